use crate::arith::Real;
use crate::error::{Error, Result};
use crate::ilim::{flat_arc_for_word, flat_arc_through, lift_fa, reconstruct, FlatArc, Thread};
use crate::outside::{extreme_element, CirclePoint};
use crate::tent::{TentMap, Word};
use std::cmp::Ordering;

fn undecided(f: &TentMap) -> Error {
    Error::PrecisionExhausted { bits: f.param().precision() }
}

/// The arc adjacent to `arc` across endpoint `end`, and the index of the shared endpoint in it.
fn across(f: &TentMap, arc: &FlatArc, end: usize) -> Result<(FlatArc, usize)> {
    let shared = &arc.endpoint_threads[end];
    let Some(ci) = arc.critical[end] else {
        return Err(Error::DepthExhausted(format!("endpoint over {} has no critical coordinate within depth {}", arc.j_lo.to_f64(), arc.depth())));
    };
    let next = flat_arc_for_word(f, &arc.branch_word.flipped(ci - 1))?;
    let j = next
        .endpoint_threads
        .iter()
        .position(|t| t.exact_eq(shared) == Some(true))
        .ok_or_else(|| Error::Inconsistent("adjacent arc does not contain the shared endpoint".into()))?;
    Ok((next, j))
}

/// Up to `steps` consecutive 0-flat arcs of the path component through seed, with the error that stopped the walk.
pub fn trace_streamline_partial(f: &TentMap, seed: &Thread, steps: usize) -> (Vec<FlatArc>, Option<Error>) {
    let first = match flat_arc_through(f, seed) {
        Ok(a) => a,
        Err(e) => return (Vec::new(), Some(e)),
    };
    let mut arcs = vec![first];
    let mut exit = 1;
    while arcs.len() < steps {
        match across(f, arcs.last().expect("nonempty"), exit) {
            Ok((next, j)) => {
                exit = 1 - j;
                arcs.push(next);
            }
            Err(e) => return (arcs, Some(e)),
        }
    }
    (arcs, None)
}

pub fn trace_streamline(f: &TentMap, seed: &Thread, steps: usize) -> Result<Vec<FlatArc>> {
    match trace_streamline_partial(f, seed, steps) {
        (arcs, None) => Ok(arcs),
        (_, Some(e)) => Err(e),
    }
}

fn min_above(f: &TentMap, floor: &Real, cands: impl Iterator<Item = Real>, cap: Real) -> Result<Real> {
    let mut best = cap;
    for v in cands {
        if v.cmp_real(floor).ok_or_else(|| undecided(f))? == Ordering::Greater
            && v.cmp_real(&best).ok_or_else(|| undecided(f))? == Ordering::Less
        {
            best = v;
        }
    }
    Ok(best)
}

fn piece(f: &TentMap, w: Word, lo: Real, hi: Real) -> Result<FlatArc> {
    let lt = reconstruct(f, &lo, &w)?;
    let ht = reconstruct(f, &hi, &w)?;
    let critical = [lt.critical_index(f), ht.critical_index(f)];
    Ok(FlatArc { branch_word: w, j_lo: lo, j_hi: hi, endpoint_threads: [lt, ht], critical })
}

/// The spike S_0 = {e(x_u) : x ∈ (a, â)} at depth r as pieces of 0-flat arcs in increasing x_0.
pub fn spike_arcs(f: &TentMap, r: usize) -> Result<Vec<FlatArc>> {
    let (a, ahat) = (f.a().clone(), f.a_hat().clone());
    let eps = &(&ahat - &a) * &f.param().ratio(1, 1 << 50);
    let mut out: Vec<FlatArc> = Vec::new();
    let mut lo = a;
    while lo.cmp_real(&ahat).ok_or_else(|| undecided(f))? == Ordering::Less {
        let probe = &lo + &eps;
        let w = extreme_element(f, &CirclePoint::upper(f, probe), r)?.branch_word(f)?;
        let s = w.symbols();
        // e switches branch only where some coordinate crosses f(a).
        let hi = min_above(f, &lo, (0..r).map(|k| lift_fa(f, s, k).swap_remove(0)), ahat.clone())?;
        match out.last_mut() {
            Some(prev) if prev.branch_word == w => {
                *prev = piece(f, w, prev.j_lo.clone(), hi.clone())?;
            }
            _ => out.push(piece(f, w, lo.clone(), hi.clone())?),
        }
        lo = hi;
    }
    Ok(out)
}

/// ν^u of a spike: half the summed π_0-lengths of its pieces.
pub fn spike_measure(f: &TentMap, arcs: &[FlatArc]) -> Option<Real> {
    let first = arcs.first()?;
    let mut acc = &first.j_lo - &first.j_lo;
    for arc in arcs {
        acc = &acc + &arc.width();
    }
    Some(&acc * &f.param().ratio(1, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Parameter;
    use crate::arith::SideClass;

    #[test]
    fn streamline_arcs_chain_through_critical_endpoints() {
        let f = TentMap::new(&Parameter::parse("1.83").unwrap());
        let seed = reconstruct(&f, &f.param().ratio(78, 100), &Word::parse("1011010110").unwrap()).unwrap();
        let arcs = trace_streamline(&f, &seed, 6).unwrap();
        assert_eq!(arcs.len(), 6);
        for w in arcs.windows(2) {
            let shared = w[0].endpoint_threads.iter().filter(|t| w[1].endpoint_threads.iter().any(|u| u.exact_eq(t) == Some(true))).count();
            assert_eq!(shared, 1);
        }
        for arc in &arcs[..5] {
            for (t, ci) in arc.endpoint_threads.iter().zip(arc.critical) {
                if let Some(ci) = ci {
                    assert_eq!(f.side(&t.coords()[ci]), SideClass::AtC);
                }
            }
        }
    }

    #[test]
    fn spike_is_halved() {
        for spec in ["1.62", "1.83"] {
            let f = TentMap::new(&Parameter::parse(spec).unwrap());
            let arcs = spike_arcs(&f, 14).unwrap();
            assert!(arcs.len() > 1);
            assert_eq!(arcs[0].j_lo.cmp_real(f.a()), Some(Ordering::Equal));
            assert_eq!(arcs.last().unwrap().j_hi.cmp_real(f.a_hat()), Some(Ordering::Equal));
            for w in arcs.windows(2) {
                assert_eq!(w[0].j_hi.cmp_real(&w[1].j_lo), Some(Ordering::Equal));
            }
            let total = (f.a_hat() - f.a()).to_f64();
            assert!((spike_measure(&f, &arcs).unwrap().to_f64() - total / 2.0).abs() < 1e-15);
            for arc in &arcs {
                let mid = &(&arc.j_lo + &arc.j_hi) * &f.param().ratio(1, 2);
                let e = extreme_element(&f, &CirclePoint::upper(&f, mid.clone()), 14).unwrap();
                assert_eq!(reconstruct(&f, &mid, &arc.branch_word).unwrap().exact_eq(&e), Some(true));
            }
        }
    }
}
