use super::height::{height, HeightKind, HeightResult, DEFAULT_HEIGHT_TOL_BITS};
use crate::arith::{parse_decimal, Parameter};
use crate::error::Result;
use crate::tent::TentMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

/// One row of a height sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub lambda: String,
    pub m: Option<i64>,
    pub n: Option<usize>,
    #[serde(rename = "type")]
    pub kind: String,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
}

const SWEEP_DIGITS: usize = 12;

/// Grid values from..to (inclusive), rounded to 12 decimals so every λ is an exact decimal.
pub fn sweep_values(from: &str, to: &str, steps: usize) -> Option<Vec<String>> {
    let lo = parse_decimal(from)?;
    let hi = parse_decimal(to)?;
    let scale = BigRational::from_integer(num_traits::pow(BigInt::from(10), SWEEP_DIGITS));
    let denom = (steps.max(2) - 1) as i64;
    Some(
        (0..steps)
            .map(|i| {
                let v = if steps == 1 {
                    lo.clone()
                } else {
                    &lo + (&hi - &lo) * BigRational::new(i.into(), denom.into())
                };
                format_fixed(&(v * &scale).round().to_integer(), SWEEP_DIGITS)
            })
            .collect(),
    )
}

fn format_fixed(n: &BigInt, digits: usize) -> String {
    let neg = n.is_negative();
    let s = n.abs().to_string();
    let s = format!("{s:0>width$}", width = digits + 1);
    let (int, frac) = s.split_at(s.len() - digits);
    let frac = frac.trim_end_matches('0');
    let body = if frac.is_empty() { int.to_string() } else { format!("{int}.{frac}") };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn kind_label(h: &HeightResult) -> String {
    match h {
        HeightResult::Rational { kind, .. } => match kind {
            HeightKind::EndpointMinus => "endpoint_minus",
            HeightKind::EndpointPlus => "endpoint_plus",
            HeightKind::Nbt => "nbt",
            HeightKind::General => "general",
        }
        .to_string(),
        HeightResult::Undecided { .. } => "undecided".to_string(),
    }
}

/// Heights over a decimal λ-grid, computed in parallel and returned in grid order.
pub fn sweep(from: &str, to: &str, steps: usize, max_iters: usize, prec: u32) -> Result<Vec<SweepRow>> {
    let values = sweep_values(from, to, steps)
        .ok_or_else(|| crate::Error::InvalidParameter(format!("bad sweep range {from}..{to}")))?;
    values
        .par_iter()
        .map(|v| {
            let p = Parameter::parse(v)?.with_precision(prec);
            let f = TentMap::new(&p);
            let h = height(&f, max_iters, DEFAULT_HEIGHT_TOL_BITS)?;
            let (lo, hi) = h.bracket();
            let (m, n) = match &h {
                HeightResult::Rational { m, n, .. } => (Some(*m), Some(*n)),
                HeightResult::Undecided { .. } => (None, None),
            };
            Ok(SweepRow { lambda: v.clone(), m, n, kind: kind_label(&h), bracket_lo: lo, bracket_hi: hi })
        })
        .collect()
}

#[allow(dead_code)]
fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_values_are_exact_decimals() {
        let v = sweep_values("1.45", "1.99", 4).unwrap();
        assert_eq!(v, vec!["1.45", "1.63", "1.81", "1.99"]);
        let v = sweep_values("1.45", "1.99", 500).unwrap();
        assert_eq!(v.len(), 500);
        assert_eq!(v[1], "1.451082164329");
    }
}
