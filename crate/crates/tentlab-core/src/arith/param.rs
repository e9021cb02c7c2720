use super::ball::Ball;
use super::field::{FieldElem, NumberField};
use super::real::Real;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

pub const DEFAULT_PRECISION: u32 = 256;
pub const DEFAULT_CAP: u32 = 4096;

#[derive(Clone, Debug)]
pub enum Backend {
    /// λ is a root of an integer polynomial; arithmetic is exact in Q(λ).
    AlgebraicRoot(Arc<NumberField>),
    /// λ is a decimal (an exact rational); arithmetic uses intervals.
    BigDecimal(Arc<BigRational>),
}

/// The slope λ ∈ (√2, 2) together with the arithmetic it selects.
#[derive(Clone, Debug)]
pub struct Parameter {
    backend: Backend,
    prec: u32,
    cap: u32,
    spec: String,
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec)
    }
}

impl Parameter {
    /// Parses `poly:"c0,c1,...":interval:"lo,hi"`, `dec:"1.83"` or a bare decimal.
    pub fn parse(spec: &str) -> Result<Parameter> {
        let s: String = spec.chars().filter(|c| !c.is_whitespace() && *c != '"' && *c != '\'').collect();
        if let Some(rest) = s.strip_prefix("poly:") {
            let (coeffs, iv) = rest
                .split_once(":interval:")
                .ok_or_else(|| bad(spec, "expected :interval:"))?;
            let coeffs: Vec<BigInt> = coeffs
                .split(',')
                .map(|t| t.parse::<BigInt>().map_err(|_| bad(spec, "bad coefficient")))
                .collect::<Result<_>>()?;
            let (lo, hi) = iv.split_once(',').ok_or_else(|| bad(spec, "bad interval"))?;
            let lo = parse_decimal(lo).ok_or_else(|| bad(spec, "bad interval endpoint"))?;
            let hi = parse_decimal(hi).ok_or_else(|| bad(spec, "bad interval endpoint"))?;
            return Parameter::algebraic(&coeffs, lo, hi, &s);
        }
        let text = s.strip_prefix("dec:").unwrap_or(&s);
        let v = parse_decimal(text).ok_or_else(|| bad(spec, "bad decimal"))?;
        Parameter::decimal(v, &s)
    }

    pub fn algebraic(coeffs: &[BigInt], lo: BigRational, hi: BigRational, spec: &str) -> Result<Parameter> {
        let field = NumberField::new(coeffs, lo, hi)?;
        let p = Parameter {
            backend: Backend::AlgebraicRoot(field),
            prec: DEFAULT_PRECISION,
            cap: DEFAULT_CAP,
            spec: spec.to_string(),
        };
        p.check_range()?;
        Ok(p)
    }

    pub fn decimal(v: BigRational, spec: &str) -> Result<Parameter> {
        let p = Parameter {
            backend: Backend::BigDecimal(Arc::new(v)),
            prec: DEFAULT_PRECISION,
            cap: DEFAULT_CAP,
            spec: spec.to_string(),
        };
        p.check_range()?;
        Ok(p)
    }

    /// The golden mean, root of λ² − λ − 1 in (1.6, 1.7).
    pub fn golden() -> Parameter {
        Parameter::parse("poly:-1,-1,1:interval:1.6,1.7").expect("golden mean")
    }

    fn check_range(&self) -> Result<()> {
        let l = self.lambda();
        let two = self.int(2);
        let ok = (&l * &l).cmp_real(&two) == Some(Ordering::Greater)
            && l.cmp_real(&two) == Some(Ordering::Less);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("λ = {} outside (√2, 2)", l.to_f64())))
        }
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.backend, Backend::AlgebraicRoot(_))
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn with_precision(&self, prec: u32) -> Parameter {
        Parameter { prec, ..self.clone() }
    }

    pub fn with_cap(&self, cap: u32) -> Parameter {
        Parameter { cap, ..self.clone() }
    }

    pub fn lambda(&self) -> Real {
        match &self.backend {
            Backend::AlgebraicRoot(k) => Real::Exact(FieldElem::generator(k)),
            Backend::BigDecimal(v) => Real::Ball(Ball::from_rational(v, self.prec)),
        }
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda().to_f64()
    }

    pub fn rational(&self, q: &BigRational) -> Real {
        match &self.backend {
            Backend::AlgebraicRoot(k) => Real::Exact(FieldElem::from_rational(k, q)),
            Backend::BigDecimal(_) => Real::Ball(Ball::from_rational(q, self.prec)),
        }
    }

    pub fn ratio(&self, n: i64, d: i64) -> Real {
        self.rational(&BigRational::new(n.into(), d.into()))
    }

    pub fn int(&self, n: i64) -> Real {
        self.ratio(n, 1)
    }

    /// The exact value of a finite double.
    pub fn from_f64(&self, x: f64) -> Real {
        self.rational(&super::dyadic::Dyadic::from_f64(x).to_rational())
    }

    /// Tighten an interval to width ≤ `target`, recomputing from its exact value.
    pub fn escalate(&self, x: &Real, target: &BigRational) -> Result<Real> {
        let b = match x {
            Real::Exact(_) => return Ok(x.clone()),
            Real::Ball(b) => b,
        };
        if b.has_exact() || &b.width().to_rational() <= target {
            return Ok(x.clone());
        }
        Err(Error::PrecisionExhausted { bits: b.prec() })
    }

    /// Runs `f`, doubling the working precision after each `PrecisionExhausted` up to the cap.
    pub fn escalating<T>(&self, mut f: impl FnMut(&Parameter) -> Result<T>) -> Result<T> {
        let mut p = self.prec;
        loop {
            match f(&self.with_precision(p)) {
                Err(Error::PrecisionExhausted { .. }) if !self.is_exact() && p < self.cap => {
                    p = (2 * p).min(self.cap);
                }
                r => return r,
            }
        }
    }
}

fn bad(spec: &str, why: &str) -> Error {
    Error::InvalidParameter(format!("{spec}: {why}"))
}

/// Exact rational value of a decimal literal such as `-1.25e-3`.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(n);
    if scale >= 0 {
        q *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    if neg {
        q = -q;
    }
    let _ = BigRational::one();
    Some(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals() {
        let q = parse_decimal("1.8392867552141611").unwrap();
        assert_eq!(q, BigRational::new(18392867552141611i64.into(), 10000000000000000i64.into()));
        assert_eq!(parse_decimal("-2.5e-1").unwrap(), BigRational::new((-1).into(), 4.into()));
        assert!(parse_decimal("abc").is_none());
    }

    #[test]
    fn grammar() {
        let p = Parameter::parse("poly:\"-1,-1,1\":interval:\"1.6,1.7\"").unwrap();
        assert!(p.is_exact());
        assert!((p.lambda_f64() - 1.618_033_988_749_895).abs() < 1e-15);
        let d = Parameter::parse("dec:\"1.62\"").unwrap();
        assert!(!d.is_exact());
        assert!(Parameter::parse("dec:1.3").is_err());
        assert!(Parameter::parse("dec:2.0").is_err());
        assert!(Parameter::parse("poly:-2,0,1:interval:1.3,1.5").is_err());
    }

    #[test]
    fn escalation() {
        let d = Parameter::parse("1.9").unwrap();
        let x = d.ratio(3, 4);
        let t = BigRational::new(1.into(), BigInt::one() << 300usize);
        assert_eq!(d.escalate(&x, &t).unwrap().width_f64(), 0.0);
        let l = d.lambda();
        assert!(d.escalate(&l, &t).is_ok());
        let wide = &(&l * &l) - &d.from_f64(1.0 / 3.0);
        assert!(wide.width_f64() < 1e-70);
    }
}
