use super::{Provenance, Report};
use crate::arith::{Real, SideClass};
use crate::error::{Error, Result};
use crate::glue::in_grand_orbit;
use crate::ilim::{fiber, flat_arc_through, reconstruct, zero_box, Cylinder, Thread};
use crate::measure::{alpha_cylinder, Density};
use crate::tent::{unimodal_cmp, TentMap, Word};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;

/// A finite-depth tartan: unstable fibers are the 0-flat arcs over K, stable fibers the columns over xs.
#[derive(Clone, Debug, Serialize)]
pub struct TartanApprox {
    pub k_lo: Real,
    pub k_hi: Real,
    pub depth: usize,
    /// Branch words of the unstable fibers, increasing in unimodal order.
    pub words: Vec<Word>,
    /// Base points of the stable fibers, increasing.
    pub xs: Vec<Real>,
    /// cells[i][j]: the intersection of unstable fiber i with stable fiber j.
    pub cells: Vec<Vec<Thread>>,
}

fn undecided(f: &TentMap) -> Error {
    Error::PrecisionExhausted { bits: f.param().precision() }
}

impl TartanApprox {
    pub fn n_unstable(&self) -> usize {
        self.words.len()
    }

    pub fn n_stable(&self) -> usize {
        self.xs.len()
    }

    /// Totality and orientation of the intersection matrix.
    pub fn validate(&self, f: &TentMap) -> Result<()> {
        if self.cells.len() != self.words.len() || self.cells.iter().any(|row| row.len() != self.xs.len()) {
            return Err(Error::Inconsistent("intersection matrix is not total".into()));
        }
        for w in self.xs.windows(2) {
            if w[0].cmp_real(&w[1]).ok_or_else(|| undecided(f))? != Ordering::Less {
                return Err(Error::Inconsistent("stable fibers out of order".into()));
            }
        }
        for w in self.words.windows(2) {
            if unimodal_cmp(w[0].symbols(), w[1].symbols()).to_ordering() != Ordering::Less {
                return Err(Error::Inconsistent("unstable fibers out of order".into()));
            }
        }
        for (i, row) in self.cells.iter().enumerate() {
            for (j, t) in row.iter().enumerate() {
                if t.x0().cmp_real(&self.xs[j]) != Some(Ordering::Equal) {
                    return Err(Error::Inconsistent(format!("cell ({i},{j}) is off its stable fiber")));
                }
                if t.branch_word(f)? != self.words[i] {
                    return Err(Error::Inconsistent(format!("cell ({i},{j}) is off its unstable fiber")));
                }
            }
        }
        Ok(())
    }

    fn alpha(&self, d: &Density, i: usize, j: usize) -> Real {
        alpha_cylinder(d, &Cylinder::new(self.cells[i][j].clone())).value
    }
}

/// Stable fiber base points: cell midpoints of K, nudged off detected grand-orbit points of c.
fn stable_points(f: &TentMap, lo: &Real, hi: &Real, n: usize) -> Result<Vec<Real>> {
    let width = hi - lo;
    (0..n)
        .map(|j| {
            let mut x = lo + &(&width * &f.param().ratio(2 * j as i64 + 1, 2 * n as i64));
            let nudge = &width * &f.param().ratio(1, 1000 * n as i64);
            for _ in 0..8 {
                if in_grand_orbit(f, &x).is_none() {
                    return Ok(x);
                }
                x = &x + &nudge;
            }
            Err(Error::InGrandOrbit(j))
        })
        .collect()
}

/// R^u = zero_box(K, r), R^s = n_stable fibers over K, and their intersections.
pub fn build_tartan(f: &TentMap, k_lo: &Real, k_hi: &Real, r: usize, n_stable: usize) -> Result<TartanApprox> {
    let bx = zero_box(f, k_lo, k_hi, r)?;
    let xs = stable_points(f, k_lo, k_hi, n_stable.max(1))?;
    let words: Vec<Word> = bx.arcs.iter().map(|a| a.branch_word.clone()).collect();
    let cells = words
        .par_iter()
        .map(|w| xs.iter().map(|x| reconstruct(f, x, w)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let t = TartanApprox { k_lo: k_lo.clone(), k_hi: k_hi.clone(), depth: r, words, xs, cells };
    t.validate(f)?;
    Ok(t)
}

fn integral(d: &Density, lo: &Real, hi: &Real) -> Real {
    let (lo, hi) = if lo.cmp_real(hi) == Some(Ordering::Greater) { (hi, lo) } else { (lo, hi) };
    match d.integral_exact(lo, hi) {
        Some(v) => v,
        None => d.tent().param().from_f64(d.integral_f64(lo.to_f64(), hi.to_f64())),
    }
}

/// Product ν_s × ν_u against the disintegration ∫ α_z dz and against μ of the depth-r projection.
pub fn check_compatibility<R: Rng>(t: &TartanApprox, d: &Density, tol: f64, n_rects: usize, rng: &mut R, prov: &Provenance) -> Report {
    let f = d.tent();
    let mut rep = Report::new("tartan_compatibility", prov.clone());
    rep.metric("tol", tol);
    rep.metric("depth", t.depth as f64);
    rep.metric("unstable_fibers", t.n_unstable() as f64);
    rep.metric("stable_fibers", t.n_stable() as f64);
    let nu = t.n_unstable();
    let ns = t.n_stable();
    if nu == 0 || ns < 2 {
        rep.fail("tartan too small");
        return rep;
    }
    let alphas: Vec<Vec<Real>> = (0..nu).map(|i| (0..ns).map(|j| t.alpha(d, i, j)).collect()).collect();
    // Holonomy between stable fibers.
    let mut hol = 0.0f64;
    for row in &alphas {
        for v in &row[1..] {
            hol = hol.max((v - &row[0]).to_f64().abs());
        }
    }
    rep.metric("holonomy_gap", hol);
    let rects: Vec<(usize, usize, Vec<usize>)> = (0..n_rects)
        .map(|_| {
            let p = rng.gen_range(0..ns - 1);
            let q = rng.gen_range(p + 1..ns);
            let members: Vec<usize> = (0..nu).filter(|_| rng.gen_bool(0.5)).collect();
            (p, q, members)
        })
        .chain(std::iter::once((0, ns - 1, Vec::new())))
        .chain(std::iter::once((0, ns - 1, (0..nu).collect())))
        .collect();
    const QUAD: usize = 16;
    let gaps: Vec<Result<(f64, f64)>> = rects
        .par_iter()
        .map(|(p, q, members)| {
            let (xp, xq) = (&t.xs[*p], &t.xs[*q]);
            let len = xq - xp;
            let mut mass = f.param().int(0);
            for &i in members {
                mass = &mass + &alphas[i][*p];
            }
            let product = &mass * &len;
            let h = &len * &f.param().ratio(1, QUAD as i64);
            let mut disint = f.param().int(0);
            for k in 0..QUAD {
                let z = xp + &(&h * &f.param().ratio(2 * k as i64 + 1, 2));
                for &i in members {
                    let th = reconstruct(f, &z, &t.words[i])?;
                    disint = &disint + &(&alpha_cylinder(d, &Cylinder::new(th)).value * &h);
                }
            }
            let mut pushed = f.param().int(0);
            for &i in members {
                let u = t.cells[i][*p].deepest();
                let v = t.cells[i][*q].deepest();
                pushed = &pushed + &integral(d, u, v);
            }
            Ok(((&product - &disint).to_f64().abs(), (&product - &pushed).to_f64().abs()))
        })
        .collect();
    let mut gd = 0.0f64;
    let mut gp = 0.0f64;
    for g in gaps {
        match g {
            Ok((a, b)) => {
                gd = gd.max(a);
                gp = gp.max(b);
            }
            Err(e) => {
                rep.fail(&format!("rectangle failed: {e}"));
                return rep;
            }
        }
    }
    rep.metric("rectangles", rects.len() as f64);
    rep.metric("disintegration_gap", gd);
    rep.metric("projection_gap", gp);
    rep.pass_if(gd <= tol && gp <= tol && hol <= tol);
    rep
}

/// The f̂-image of a tartan, one piece per side of c met by the stable fibers.
pub fn fhat_image(f: &TentMap, t: &TartanApprox) -> Result<Vec<TartanApprox>> {
    let mut out = Vec::new();
    for side in [SideClass::Left, SideClass::Right] {
        let cols: Vec<usize> = (0..t.n_stable()).filter(|&j| f.side(&t.xs[j]) == side).collect();
        if cols.is_empty() {
            continue;
        }
        let (lo, hi) = match side {
            SideClass::Left => (t.k_lo.clone(), Real::min_of(&t.k_hi, f.c())),
            _ => (if t.k_lo.cmp_real(f.c()) == Some(Ordering::Less) { f.c().clone() } else { t.k_lo.clone() }, t.k_hi.clone()),
        };
        let (mut nlo, mut nhi) = (f.eval(&lo)?, f.eval(&hi)?);
        let mut cols = cols;
        if side == SideClass::Right {
            std::mem::swap(&mut nlo, &mut nhi);
            cols.reverse();
        }
        let mut rows: Vec<(Word, Vec<Thread>)> = Vec::with_capacity(t.n_unstable());
        for row in &t.cells {
            let imgs = cols.iter().map(|&j| row[j].fhat(f)).collect::<Result<Vec<_>>>()?;
            let w = imgs[0].branch_word(f)?;
            rows.push((w, imgs));
        }
        rows.sort_by(|p, q| unimodal_cmp(p.0.symbols(), q.0.symbols()).to_ordering());
        let xs = cols.iter().map(|&j| f.eval(&t.xs[j])).collect::<Result<Vec<_>>>()?;
        let (words, cells) = rows.into_iter().unzip();
        out.push(TartanApprox { k_lo: nlo, k_hi: nhi, depth: t.depth + 1, words, xs, cells });
    }
    Ok(out)
}

/// Stable masses scale by λ^{-1}, unstable lengths by λ, and the image is again a tartan, for `iterates` steps.
pub fn check_scaling(t: &TartanApprox, d: &Density, iterates: usize, prov: &Provenance) -> Report {
    let f = d.tent();
    let mut rep = Report::new("tartan_scaling", prov.clone());
    rep.metric("iterates", iterates as f64);
    let mut pieces = vec![t.clone()];
    let (mut mass_gap, mut len_gap) = (0.0f64, 0.0f64);
    let mut ok = true;
    for it in 0..iterates {
        let mut next = Vec::new();
        let mut len_before = f.param().int(0);
        let mut len_after = f.param().int(0);
        for p in &pieces {
            len_before = &len_before + &(&p.k_hi - &p.k_lo);
            let imgs = match fhat_image(f, p) {
                Ok(v) => v,
                Err(e) => {
                    rep.fail(&format!("iterate {}: {e}", it + 1));
                    return rep;
                }
            };
            for img in &imgs {
                len_after = &len_after + &(&img.k_hi - &img.k_lo);
                if let Err(e) = img.validate(f) {
                    rep.note(&format!("iterate {}: {e}", it + 1));
                    ok = false;
                }
                for (i, row) in img.cells.iter().enumerate() {
                    for (j, th) in row.iter().enumerate() {
                        let pre = th.fhat_inverse().map(|u| alpha_cylinder(d, &Cylinder::new(u)).value);
                        let Ok(pre) = pre else {
                            ok = false;
                            continue;
                        };
                        let g = (&img.alpha(d, i, j) - &(&pre * f.inv_lambda())).to_f64().abs();
                        mass_gap = mass_gap.max(g);
                    }
                }
            }
            next.extend(imgs);
        }
        // Pieces cut at c fold onto each other; each keeps its own linear branch.
        len_gap = len_gap.max((&len_after - &(f.lambda() * &len_before)).to_f64().abs());
        pieces = next;
    }
    rep.metric("pieces", pieces.len() as f64);
    rep.metric("stable_mass_gap", mass_gap);
    rep.metric("unstable_length_gap", len_gap);
    rep.pass_if(ok && mass_gap <= 1e-12 && len_gap <= 1e-12);
    rep
}

/// Cylinder mass and diameter bounds on random fibers, and the flat-arc diameter bound.
pub fn check_tameness<R: Rng>(d: &Density, n_samples: usize, r: usize, rng: &mut R, prov: &Provenance) -> Report {
    let f = d.tent();
    let mut rep = Report::new("tameness", prov.clone());
    let (a, b) = d.domain();
    let lambda = f.param().lambda_f64();
    let k = d.min_value();
    let mass_bound = k / lambda.powi(r as i32);
    let diam_bound = 0.5f64.powi(r as i32);
    let (mut min_ratio, mut max_diam, mut max_arc) = (f64::INFINITY, 0.0f64, 0.0f64);
    let mut checked = 0usize;
    for _ in 0..n_samples {
        let x = f.param().from_f64(rng.gen_range(a..b));
        let Ok(fib) = fiber(f, &x, r) else { continue };
        for th in &fib.threads {
            let m = alpha_cylinder(d, &Cylinder::new(th.clone())).to_f64();
            min_ratio = min_ratio.min(m / mass_bound);
            // Two random continuations of the cylinder, 24 levels deeper.
            let ext = |rng: &mut R| -> Option<Thread> {
                let mut u = th.clone();
                for _ in 0..24 {
                    let pre = f.preimages(u.deepest()).ok()?;
                    let (y, _) = pre[rng.gen_range(0..pre.len())].clone();
                    u.push(y);
                }
                Some(u)
            };
            if let (Some(u), Some(v)) = (ext(rng), ext(rng)) {
                max_diam = max_diam.max(u.distance(&v) / diam_bound);
            }
            if th.critical_index(f).is_none() {
                if let Ok(arc) = flat_arc_through(f, th) {
                    let w = arc.width().to_f64();
                    if w > 0.0 {
                        max_arc = max_arc.max(arc.endpoint_threads[0].distance(&arc.endpoint_threads[1]) / (2.0 * w));
                    }
                }
            }
            checked += 1;
        }
    }
    rep.metric("threads", checked as f64);
    rep.metric("min_density", k);
    rep.metric("mass_ratio_min", min_ratio);
    rep.metric("diameter_ratio_max", max_diam);
    rep.metric("arc_diameter_ratio_max", max_arc);
    rep.pass_if(checked > 0 && min_ratio >= 1.0 - 1e-12 && max_diam <= 1.0 && max_arc < 1.0);
    rep
}

/// ψ of every unstable fiber over x, cumulative in unimodal order.
fn psi_column(d: &Density, t: &TartanApprox, x: &Real) -> Result<Vec<f64>> {
    let f = d.tent();
    let mut acc = 0.0;
    t.words
        .iter()
        .map(|w| {
            acc += alpha_cylinder(d, &Cylinder::new(reconstruct(f, x, w)?)).to_f64();
            Ok(acc)
        })
        .collect()
}

/// For each intersection point and 10 shrinking δ, the four stream-arc sides of a δ-rectangle stay in the 2δ-ball (chart coordinates, max norm).
pub fn check_regularity(t: &TartanApprox, d: &Density, prov: &Provenance) -> Report {
    let f = d.tent();
    let mut rep = Report::new("regularity_shadow", prov.clone());
    rep.note("finite shadow: chart-coordinate balls only");
    let width = &t.k_hi - &t.k_lo;
    let delta0 = width.to_f64() / 4.0;
    let work: Vec<(usize, usize)> = (0..10).flat_map(|k| (0..t.n_stable()).map(move |j| (k, j))).collect();
    let results: Vec<Result<f64>> = work
        .par_iter()
        .map(|&(k, j)| {
            let delta = delta0 / f64::powi(2.0, k as i32);
            let x = &t.xs[j];
            let step = &width * &f.param().ratio(1, 4 << k);
            let mut x2 = x + &step;
            if x2.cmp_real(&t.k_hi) == Some(Ordering::Greater) {
                x2 = x - &step;
            }
            // Sides: the unstable side sampled at 5 intermediate base points.
            let mids: Vec<Real> = (0..=4).map(|s| x + &(&(&x2 - x) * &f.param().ratio(s, 4))).collect();
            let cols = mids.iter().map(|z| psi_column(d, t, z)).collect::<Result<Vec<_>>>()?;
            let xf: Vec<f64> = mids.iter().map(Real::to_f64).collect();
            let base = &cols[0];
            let mut worst = 0.0f64;
            for i in 0..t.n_unstable() {
                let i2 = (i..t.n_unstable()).take_while(|&m| base[m] - base[i] <= delta).last().unwrap_or(i);
                let p = (xf[0], base[i]);
                for (c, col) in cols.iter().enumerate() {
                    for m in [i, i2] {
                        worst = worst.max((xf[c] - p.0).abs().max((col[m] - p.1).abs()) / delta);
                    }
                }
                for m in i..=i2 {
                    for c in [0, 4] {
                        worst = worst.max((xf[c] - p.0).abs().max((cols[c][m] - p.1).abs()) / delta);
                    }
                }
            }
            Ok(worst)
        })
        .collect();
    let mut worst = 0.0f64;
    for r in results {
        match r {
            Ok(w) => worst = worst.max(w),
            Err(e) => {
                rep.fail(&format!("{e}"));
                return rep;
            }
        }
    }
    rep.metric("deltas", 10.0);
    rep.metric("max_excursion_over_delta", worst);
    rep.pass_if(worst <= 2.0);
    rep
}
