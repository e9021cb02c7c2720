//! The semi-conjugacy g as an identification relation, fiber arcs, charts, streamlines and the Cantor class.

mod cantor;
mod chart;
mod fiber_arc;
mod ident;
mod stream;

pub use cantor::{cantor_approx, CantorApprox};
pub use chart::{chart_patch, psi_at, ChartPatch};
pub use fiber_arc::{fiber_arc, FiberArc, FiberArcPoint};
pub use ident::{identify_partner, ExtremeCert, IdentClass, IdentKind};
pub use stream::{spike_arcs, spike_measure, trace_streamline, trace_streamline_partial};

use crate::arith::Real;
use crate::tent::{TentMap, Word, PC_CAP};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::cmp::Ordering;

/// H(s) = Σ 2ε_r/3^{r+1} with ε_r = (s_0 + … + s_r) mod 2, as the interval of all continuations.
pub fn h_embed(s: &Word) -> (BigRational, BigRational) {
    let three = BigInt::from(3);
    let mut acc = BigRational::zero();
    let mut den = BigInt::one();
    let mut parity = 0u8;
    for &sym in s.symbols() {
        parity ^= sym;
        den *= &three;
        if parity == 1 {
            acc += BigRational::new(BigInt::from(2), den.clone());
        }
    }
    let hi = &acc + BigRational::new(BigInt::one(), den);
    (acc, hi)
}

/// Forward orbit steps of x checked against the critical orbit when testing grand-orbit membership.
pub const GO_FORWARD_CAP: usize = 64;

/// (m, n) with f^m(x) = c_n (c_0 = c) within the caps, if found.
pub fn grand_orbit_hit(f: &TentMap, x: &Real, m_cap: usize, n_cap: usize) -> Option<(usize, usize)> {
    let tm = if f.param().is_exact() { f.clone() } else { f.at_precision(f.precision_for_orbit(n_cap.max(m_cap))) };
    let mut crit = vec![tm.c().clone()];
    crit.extend(tm.critical_orbit(n_cap));
    let mut keyed: Vec<(f64, usize)> = crit.iter().enumerate().map(|(i, y)| (y.to_f64(), i)).collect();
    keyed.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
    let mut y = x.with_precision(tm.param().precision());
    for m in 0..=m_cap {
        let yf = y.to_f64();
        let start = keyed.partition_point(|p| p.0 < yf - 1e-9);
        let mut best: Option<usize> = None;
        for &(v, n) in &keyed[start..] {
            if v > yf + 1e-9 {
                break;
            }
            if y.cmp_real(&crit[n]) == Some(Ordering::Equal) || (!f.param().is_exact() && y.diff_bound(&crit[n]) < 1e-30) {
                best = Some(best.map_or(n, |b: usize| b.min(n)));
            }
        }
        if let Some(n) = best {
            return Some((m, n));
        }
        match tm.eval(&y) {
            Ok(z) => y = z,
            Err(_) => return None,
        }
    }
    None
}

pub fn in_grand_orbit(f: &TentMap, x: &Real) -> Option<(usize, usize)> {
    grand_orbit_hit(f, x, GO_FORWARD_CAP, PC_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Parameter;
    use crate::tent::unimodal_cmp;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn h_values() {
        let (lo, _) = h_embed(&Word::parse(&"0".repeat(30)).unwrap());
        assert!(lo.is_zero());
        let (lo, hi) = h_embed(&Word::parse(&format!("1{}", "0".repeat(40))).unwrap());
        assert!(hi == BigRational::one());
        assert!(BigRational::one() - lo < BigRational::new(1.into(), BigInt::from(3).pow(39)));
    }

    #[test]
    fn h_preserves_unimodal_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let n = rng.gen_range(1..24);
            let s: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            let mut t = s.clone();
            let k = rng.gen_range(0..n);
            t[k] ^= 1;
            for v in &mut t[k + 1..] {
                *v = rng.gen_range(0..2);
            }
            let (hs, _) = h_embed(&Word::from_symbols(s.clone()));
            let (ht, _) = h_embed(&Word::from_symbols(t.clone()));
            assert_eq!(unimodal_cmp(&s, &t).to_ordering(), hs.cmp(&ht));
        }
    }

    #[test]
    fn grand_orbit_detection() {
        let f = TentMap::new(&Parameter::parse("1.83").unwrap());
        let pre = f.left_preimage(&f.right_preimage(f.c()));
        assert_eq!(in_grand_orbit(&f, &pre), Some((2, 0)));
        assert_eq!(in_grand_orbit(&f, &f.param().ratio(5, 7)), None);
    }
}
