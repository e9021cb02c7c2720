use crate::error::{Error, Result};
use crate::outside::{b_tilde, in_gamma, CirclePoint};
use crate::tent::TentMap;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CantorApprox {
    pub horizon: usize,
    /// Chart coordinates of B̃^j(a), j = 1..=certified_steps.
    pub points: Vec<f64>,
    /// Complementary intervals of the sorted points, by position, the last one wrapping through 0.
    pub gaps: Vec<(f64, f64)>,
    /// Steps proved to stay outside γ.
    pub certified_steps: usize,
    pub precision: u32,
    /// Smallest chart distance from a point to a and to â_u.
    pub approach_a: f64,
    pub approach_a_hat: f64,
}

impl CantorApprox {
    pub fn complete(&self) -> bool {
        self.certified_steps == self.horizon
    }

    pub fn largest_gap(&self) -> f64 {
        self.gaps.iter().map(|g| g.1 - g.0).fold(0.0, f64::max)
    }
}

/// Bits needed to follow an orbit of the given length through expansion by λ.
fn orbit_bits(f: &TentMap, horizon: usize) -> u32 {
    let need = (horizon as f64 * f.param().lambda_f64().log2()).ceil() as u32 + 64;
    need.max(f.param().precision())
}

fn walk(f: &TentMap, horizon: usize) -> Result<(Vec<f64>, usize)> {
    let mut y = CirclePoint::lower(f, f.a().clone());
    let mut pts = Vec::with_capacity(horizon);
    for j in 1..=horizon {
        y = match b_tilde(f, &y) {
            Ok(z) => z,
            Err(Error::PrecisionExhausted { .. }) => return Ok((pts, j - 1)),
            Err(e) => return Err(e),
        };
        match in_gamma(f, &y) {
            Ok(true) => return Err(Error::EnteredGamma(j)),
            Ok(false) => pts.push(y.chart(f)),
            Err(Error::PrecisionExhausted { .. }) => return Ok((pts, j - 1)),
            Err(e) => return Err(e),
        }
    }
    Ok((pts, horizon))
}

/// The first `horizon` points of the B̃-orbit of f(a)_ℓ, failing with EnteredGamma(j) when B̃^j(a) ∈ γ.
pub fn cantor_approx(f: &TentMap, horizon: usize) -> Result<CantorApprox> {
    let (mut pts, mut certified, mut prec) = (Vec::new(), 0, f.param().precision());
    if f.param().is_exact() {
        (pts, certified) = walk(f, horizon)?;
    } else {
        let base = orbit_bits(f, horizon);
        for bits in [base, 2 * base] {
            let p = f.param().with_cap(bits.max(f.param().cap())).with_precision(bits);
            let g = TentMap::new(&p);
            (pts, certified) = walk(&g, horizon)?;
            prec = bits;
            if certified == horizon {
                break;
            }
        }
    }
    let mut sorted = pts.clone();
    sorted.sort_by(f64::total_cmp);
    let mut gaps: Vec<(f64, f64)> = sorted.windows(2).map(|w| (w[0], w[1])).collect();
    if let (Some(&first), Some(&last)) = (sorted.first(), sorted.last()) {
        gaps.push((last, first + 1.0));
    }
    let ahat = CirclePoint::upper(f, f.a_hat().clone()).chart(f);
    let circ = |u: f64, v: f64| {
        let d = (u - v).rem_euclid(1.0);
        d.min(1.0 - d)
    };
    let approach_a = pts.iter().map(|&t| circ(t, 0.0)).fold(f64::INFINITY, f64::min);
    let approach_a_hat = pts.iter().map(|&t| circ(t, ahat)).fold(f64::INFINITY, f64::min);
    Ok(CantorApprox { horizon, points: pts, gaps, certified_steps: certified, precision: prec, approach_a, approach_a_hat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Parameter;

    #[test]
    fn golden_enters_at_step_three() {
        let f = TentMap::new(&Parameter::golden());
        assert!(matches!(cantor_approx(&f, 100), Err(Error::EnteredGamma(3))));
    }

    #[test]
    fn rational_height_general_enters() {
        let f = TentMap::new(&Parameter::parse("1.62").unwrap());
        assert!(matches!(cantor_approx(&f, 1000), Err(Error::EnteredGamma(_))));
    }
}
