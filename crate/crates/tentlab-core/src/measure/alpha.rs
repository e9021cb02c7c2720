use super::Density;
use crate::arith::Real;
use crate::error::{Error, Result};
use crate::ilim::{Cylinder, FlatArc, ZeroBox};
use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;

#[derive(Clone, Debug, Serialize)]
pub struct AlphaValue {
    pub value: Real,
    pub depth: usize,
    pub density: &'static str,
}

impl AlphaValue {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

/// α_x(⟨x, y_1, …, y_r⟩) = φ(y_r)/λ^r.
pub fn alpha_cylinder(d: &Density, c: &Cylinder) -> AlphaValue {
    let f = d.tent();
    let mut v = d.eval(c.thread.deepest());
    for _ in 0..c.depth() {
        v = &v * f.inv_lambda();
    }
    AlphaValue { value: v, depth: c.depth(), density: d.kind_name() }
}

/// α_x of a 0-box: the sum of its arc cylinders over x.
pub fn alpha_of_box(d: &Density, bx: &ZeroBox, x: &Real) -> Result<AlphaValue> {
    let f = d.tent();
    let mut acc = f.param().int(0);
    for arc in &bx.arcs {
        let t = arc.thread_over(f, x)?;
        acc = &acc + &alpha_cylinder(d, &Cylinder::new(t)).value;
    }
    Ok(AlphaValue { value: acc, depth: bx.depth, density: d.kind_name() })
}

#[derive(Clone, Debug, Serialize)]
pub struct Disintegration {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub cells: usize,
}

fn preimage_mass(d: &Density, x: f64, r: usize, lo: f64, hi: f64, lambda: f64, fa: f64, scale: f64) -> f64 {
    if r == 0 {
        return if x >= lo && x <= hi { d.eval_f64(x) * scale } else { 0.0 };
    }
    let mut s = preimage_mass(d, 1.0 - x / lambda, r - 1, lo, hi, lambda, fa, scale / lambda);
    if x >= fa {
        s += preimage_mass(d, x / lambda, r - 1, lo, hi, lambda, fa, scale / lambda);
    }
    s
}

fn pairwise(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (l, r) = v.split_at(v.len() / 2);
    pairwise(l) + pairwise(r)
}

/// Compares ∫_I Σ_{f^r(y)=x, y∈J} φ(y)/λ^r dm(x) (midpoint rule) with μ(J) = ∫_J φ dm.
pub fn disintegration_check(d: &Density, r: usize, j: (f64, f64), cells: usize) -> Disintegration {
    let f = d.tent();
    let (a, b) = d.domain();
    let lambda = f.param().lambda_f64();
    let fa = f.f_a().to_f64();
    let h = (b - a) / cells as f64;
    let vals: Vec<f64> = (0..cells)
        .into_par_iter()
        .map(|i| preimage_mass(d, a + (i as f64 + 0.5) * h, r, j.0, j.1, lambda, fa, 1.0) * h)
        .collect();
    let lhs = pairwise(&vals);
    let rhs = d.integral_f64(j.0, j.1);
    Disintegration { lhs, rhs, gap: (lhs - rhs).abs(), cells }
}

/// Lebesgue length of sub ⊆ arc.J.
pub fn unstable_measure(arc: &FlatArc, lo: &Real, hi: &Real) -> Result<Real> {
    if lo.cmp_real(&arc.j_lo) == Some(Ordering::Less) || hi.cmp_real(&arc.j_hi) == Some(Ordering::Greater) {
        return Err(Error::DomainError("subinterval leaves the arc".into()));
    }
    if hi.cmp_real(lo) != Some(Ordering::Greater) {
        return Ok(lo - lo);
    }
    Ok(hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Parameter;
    use crate::ilim::{fiber, flat_arc_through, zero_box};
    use crate::measure::{density_markov, density_series};
    use crate::tent::TentMap;

    #[test]
    fn cylinder_children_sum_to_parent() {
        let f = TentMap::new(&Parameter::golden());
        let d = density_markov(&f).unwrap();
        let x = f.param().ratio(7, 10);
        let fib = fiber(&f, &x, 6).unwrap();
        let total = fib.threads.iter().fold(f.param().int(0), |acc, t| &acc + &alpha_cylinder(&d, &Cylinder::new(t.clone())).value);
        assert_eq!(total.cmp_real(&d.eval(&x)), Some(Ordering::Equal));
        let t = fib.threads[3].clone();
        let up = alpha_cylinder(&d, &Cylinder::new(t.fhat(&f).unwrap())).value;
        let scaled = &alpha_cylinder(&d, &Cylinder::new(t)).value * f.inv_lambda();
        assert_eq!(up.cmp_real(&scaled), Some(Ordering::Equal));
    }

    #[test]
    fn holonomy_invariance() {
        let f = TentMap::new(&Parameter::golden());
        let d = density_markov(&f).unwrap();
        let (lo, hi) = (f.param().ratio(70, 100), f.param().ratio(71, 100));
        let bx = zero_box(&f, &lo, &hi, 8).unwrap();
        let one = alpha_of_box(&d, &bx, &f.param().ratio(701, 1000)).unwrap();
        let two = alpha_of_box(&d, &bx, &f.param().ratio(709, 1000)).unwrap();
        assert_eq!(one.value.cmp_real(&two.value), Some(Ordering::Equal));
    }

    #[test]
    fn disintegration_converges() {
        let f = TentMap::new(&Parameter::golden());
        let d = density_markov(&f).unwrap();
        let full = disintegration_check(&d, 3, (f.a().to_f64(), f.b().to_f64()), 1 << 10);
        assert!(full.gap < 1e-3, "{full:?}");
        let g = disintegration_check(&d, 3, (f.a().to_f64(), 0.5), 1 << 12);
        assert!(g.gap < 1e-3, "{g:?}");
        let s = density_series(&TentMap::new(&Parameter::parse("1.9").unwrap())).unwrap();
        let g = disintegration_check(&s, 5, (0.3, 0.6), 1 << 12);
        assert!(g.gap < 1e-3, "{g:?}");
    }

    #[test]
    fn unstable_measure_is_length() {
        let f = TentMap::new(&Parameter::golden());
        let arc = flat_arc_through(&f, &fiber(&f, &f.param().ratio(7, 10), 4).unwrap().threads[0]).unwrap();
        let w = unstable_measure(&arc, &arc.j_lo, &arc.j_hi).unwrap();
        assert_eq!(w.cmp_real(&arc.width()), Some(Ordering::Equal));
        assert!(unstable_measure(&arc, &f.param().int(0), &arc.j_hi).is_err());
    }
}
