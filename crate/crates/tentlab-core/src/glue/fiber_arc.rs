use super::ident::{identify_partner, ExtremeCert, IdentKind};
use super::{h_embed, in_grand_orbit};
use crate::arith::Real;
use crate::error::{Error, Result};
use crate::ilim::{fiber, Cylinder, Thread, GUARD_BAND};
use crate::measure::{alpha_cylinder, Density};
use crate::outside::{CirclePoint, TentType};
use crate::tent::{TentMap, Word};
use num_traits::ToPrimitive;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct FiberArcPoint {
    pub thread: Thread,
    pub word: Word,
    /// H-interval of all continuations of the branch word.
    pub t: (f64, f64),
    /// Cumulative α-mass interval [T_{i-1}, T_i] of the cylinder.
    pub t_collapsed: (f64, f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberArc {
    pub x: Real,
    pub depth: usize,
    pub points: Vec<FiberArcPoint>,
    pub identified_pairs: Vec<(usize, usize)>,
    pub total_length: f64,
}

impl FiberArc {
    pub fn endpoints(&self) -> Option<(&Thread, &Thread)> {
        Some((&self.points.first()?.thread, &self.points.last()?.thread))
    }
}

/// Whether sorted neighbours t1 < t2 form an (EI) class, certified from either thread below their split.
fn identified(f: &TentMap, tent_type: TentType, t1: &Thread, t2: &Thread) -> Result<bool> {
    let r = t1.depth();
    let Some(k) = t1.first_difference(t2) else {
        return Ok(false);
    };
    if k == 0 || k + GUARD_BAND > r {
        return Ok(false);
    }
    for t in [t1, t2] {
        let y = CirclePoint::upper(f, t.coords()[k].clone());
        let cert = ExtremeCert { y, k: k as i64 };
        let cls = match identify_partner(f, tent_type, &cert, r) {
            Ok(c) => c,
            Err(Error::TypeMismatch(_)) => continue,
            Err(e) => return Err(e),
        };
        if !matches!(cls.kind, IdentKind::EI { .. }) || cls.members.len() != 2 {
            continue;
        }
        let eq = |u: &Thread, v: &Thread| u.exact_eq(v) == Some(true);
        let m = &cls.members;
        if (eq(&m[0], t1) && eq(&m[1], t2)) || (eq(&m[0], t2) && eq(&m[1], t1)) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The fiber over x as an arc: sorted threads, H-coordinates, α-collapsed coordinates and identified pairs.
pub fn fiber_arc(f: &TentMap, d: &Density, tent_type: TentType, x: &Real, r: usize) -> Result<FiberArc> {
    if let Some((m, _)) = in_grand_orbit(f, x) {
        return Err(Error::InGrandOrbit(m));
    }
    let fib = fiber(f, x, r)?;
    let mut points = Vec::with_capacity(fib.len());
    let mut acc = 0.0f64;
    for (t, w) in fib.threads.iter().zip(&fib.branch_words) {
        let (hl, hh) = h_embed(w);
        let mass = alpha_cylinder(d, &Cylinder::new(t.clone())).to_f64();
        let lo = acc;
        acc += mass;
        points.push(FiberArcPoint {
            thread: t.clone(),
            word: w.clone(),
            t: (hl.to_f64().unwrap_or(f64::NAN), hh.to_f64().unwrap_or(f64::NAN)),
            t_collapsed: (lo, acc),
        });
    }
    let mut identified_pairs = Vec::new();
    for i in 0..fib.len().saturating_sub(1) {
        if identified(f, tent_type, &fib.threads[i], &fib.threads[i + 1])? {
            identified_pairs.push((i, i + 1));
        }
    }
    Ok(FiberArc { x: x.clone(), depth: r, points, identified_pairs, total_length: acc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Parameter;
    use crate::ilim::consecutive_pairs;
    use crate::measure::density_markov;
    use crate::outside::{classify, extreme_element};

    #[test]
    fn golden_fiber_arc() {
        let f = TentMap::new(&Parameter::golden());
        let d = density_markov(&f).unwrap();
        let tt = classify(&f, 100).unwrap().tent_type;
        let x = f.param().ratio(7, 10);
        let arc = fiber_arc(&f, &d, tt, &x, 12).unwrap();
        assert!((arc.total_length - d.eval(&x).to_f64()).abs() < 1e-12);
        let (lo, hi) = arc.endpoints().unwrap();
        assert_eq!(lo.exact_eq(&extreme_element(&f, &CirclePoint::lower(&f, x.clone()), 12).unwrap()), Some(true));
        assert_eq!(hi.exact_eq(&extreme_element(&f, &CirclePoint::upper(&f, x.clone()), 12).unwrap()), Some(true));
        let fib = fiber(&f, &x, 12).unwrap();
        assert_eq!(arc.identified_pairs, consecutive_pairs(&f, &fib).unwrap());
        assert!(!arc.identified_pairs.is_empty());
        for w in arc.points.windows(2) {
            assert!(w[0].t.1 <= w[1].t.0);
            assert_eq!(w[0].t_collapsed.1, w[1].t_collapsed.0);
        }
        let last = arc.points.len() - 1;
        assert!(arc.identified_pairs.iter().all(|&(i, j)| i != 0 && j != last));
    }

    #[test]
    fn grand_orbit_is_rejected() {
        let f = TentMap::new(&Parameter::golden());
        let d = density_markov(&f).unwrap();
        let x = f.right_preimage(f.c());
        assert!(matches!(fiber_arc(&f, &d, TentType::RationalEndpointMinus, &x, 6), Err(Error::InGrandOrbit(_))));
    }
}
