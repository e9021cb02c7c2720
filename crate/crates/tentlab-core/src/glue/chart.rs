use crate::arith::Real;
use crate::error::{Error, Result};
use crate::ilim::{fiber, zero_box, Cylinder, Thread, ZeroBox};
use crate::measure::{alpha_cylinder, Density};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct ChartPatch {
    pub k: (f64, f64),
    pub depth: usize,
    /// Sample abscissae x_0 in K.
    pub xs: Vec<f64>,
    /// psi[i][j]: ψ on arc i (unimodal order) over xs[j].
    pub psi: Vec<Vec<f64>>,
    #[serde(skip)]
    pub zero_box: ZeroBox,
}

impl ChartPatch {
    pub fn arcs(&self) -> usize {
        self.psi.len()
    }

    /// Largest spread of ψ along one arc.
    pub fn max_arc_variation(&self) -> f64 {
        self.psi
            .iter()
            .map(|row| {
                let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                hi - lo
            })
            .fold(0.0, f64::max)
    }

    /// Rows of (arc, x_0, ψ).
    pub fn rows(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.psi.iter().enumerate().flat_map(move |(i, row)| row.iter().zip(&self.xs).map(move |(&p, &x)| (i, x, p)))
    }
}

/// ψ of a thread: α-mass of the fiber over its x_0 up to and including its own cylinder.
pub fn psi_at(d: &Density, t: &Thread) -> Result<f64> {
    let f = d.tent();
    let fib = fiber(f, t.x0(), t.depth())?;
    let i = fib
        .threads
        .iter()
        .position(|u| u.exact_eq(t) != Some(false))
        .ok_or_else(|| Error::Inconsistent("thread not found in its fiber".into()))?;
    Ok(fib.threads[..=i].iter().map(|u| alpha_cylinder(d, &Cylinder::new(u.clone())).to_f64()).sum())
}

/// ψ over a grid of n_x points of K for each 0-flat arc of π_0^{-1}(K) at depth r.
pub fn chart_patch(d: &Density, k_lo: &Real, k_hi: &Real, r: usize, n_x: usize) -> Result<ChartPatch> {
    let f = d.tent();
    let bx = zero_box(f, k_lo, k_hi, r)?;
    let n_x = n_x.max(2);
    let xs_exact: Vec<Real> = (0..n_x)
        .map(|j| {
            let t = f.param().ratio(j as i64, (n_x - 1) as i64);
            k_lo + &(&t * &(k_hi - k_lo))
        })
        .collect();
    let masses: Vec<Vec<f64>> = xs_exact
        .par_iter()
        .map(|x| {
            bx.arcs
                .iter()
                .map(|arc| Ok(alpha_cylinder(d, &Cylinder::new(arc.thread_over(f, x)?)).to_f64()))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut psi = vec![vec![0.0; n_x]; bx.arcs.len()];
    for (j, col) in masses.iter().enumerate() {
        let mut acc = 0.0;
        for (i, m) in col.iter().enumerate() {
            acc += m;
            psi[i][j] = acc;
        }
    }
    Ok(ChartPatch {
        k: (k_lo.to_f64(), k_hi.to_f64()),
        depth: r,
        xs: xs_exact.iter().map(Real::to_f64).collect(),
        psi,
        zero_box: bx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Parameter;
    use crate::measure::density_markov;
    use crate::tent::TentMap;

    #[test]
    fn psi_is_constant_on_arcs_and_tops_out_at_phi() {
        let f = TentMap::new(&Parameter::golden());
        let d = density_markov(&f).unwrap();
        let (lo, hi) = (f.param().ratio(70, 100), f.param().ratio(71, 100));
        let p = chart_patch(&d, &lo, &hi, 10, 9).unwrap();
        assert!(p.arcs() > 1);
        assert!(p.max_arc_variation() < 1e-12);
        for (j, x) in p.xs.iter().enumerate() {
            let top = p.psi.last().unwrap()[j];
            assert!((top - d.eval_f64(*x)).abs() < 1e-12);
            assert!(p.psi.windows(2).all(|w| w[0][j] < w[1][j]));
        }
    }

    #[test]
    fn psi_at_matches_the_patch() {
        let f = TentMap::new(&Parameter::golden());
        let d = density_markov(&f).unwrap();
        let (lo, hi) = (f.param().ratio(70, 100), f.param().ratio(71, 100));
        let p = chart_patch(&d, &lo, &hi, 10, 3).unwrap();
        for (i, arc) in p.zero_box.arcs.iter().enumerate() {
            let t = arc.thread_over(&f, &lo).unwrap();
            assert!((psi_at(&d, &t).unwrap() - p.psi[i][0]).abs() < 1e-12);
        }
    }
}
