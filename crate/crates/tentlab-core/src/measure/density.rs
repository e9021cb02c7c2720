use crate::arith::Real;
use crate::error::{Error, Result};
use crate::tent::{PostCritical, TentMap};
use serde::Serialize;
use std::cmp::Ordering;

/// Representation of the invariant density φ.
#[derive(Clone, Debug, Serialize)]
pub enum DensityKind {
    /// Piecewise constant on the partition cut by the critical orbit, with values in ℚ(λ).
    MarkovExact { points: Vec<Real>, values: Vec<Real> },
    /// Cell averages on a uniform grid over I.
    Grid { cells: usize, values: Vec<f64>, residual: f64, iterations: usize },
    /// φ = K + Σ_{n≥3} w_n·1[x ≤ c_n], truncated once |w_n| falls below 2^-64.
    Series { constant: f64, points: Vec<Real>, points_f64: Vec<f64>, weights: Vec<f64> },
}

#[derive(Clone, Debug, Serialize)]
pub struct Density {
    #[serde(skip)]
    f: TentMap,
    pub kind: DensityKind,
    a: f64,
    b: f64,
}

fn locate(points: &[Real], x: &Real) -> usize {
    // First piece j with x ≤ p_{j+1}.
    let (mut lo, mut hi) = (0usize, points.len() - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match x.cmp_real(&points[mid]) {
            Some(Ordering::Greater) => lo = mid,
            Some(_) => hi = mid,
            None => {
                if x.to_f64() > points[mid].to_f64() {
                    lo = mid
                } else {
                    hi = mid
                }
            }
        }
    }
    lo
}

/// The exact invariant density of a post-critically finite tent map.
pub fn density_markov(f: &TentMap) -> Result<Density> {
    if !f.param().is_exact() {
        return Err(Error::NotMarkov);
    }
    let prof = f.postcritical_profile_cached()?;
    if !prof.is_exact_finite() {
        return Err(Error::NotMarkov);
    }
    let n = match prof.kind {
        PostCritical::PeriodicC { period } => period,
        PostCritical::PreperiodicC { preperiod, period } => preperiod + period,
        PostCritical::InfiniteWithinCap { .. } => return Err(Error::NotMarkov),
    };
    let mut points: Vec<Real> = f.critical_orbit(n.max(2));
    points.push(f.c().clone());
    points.sort_by(|x, y| x.cmp_real(y).expect("exact"));
    points.dedup_by(|x, y| x.cmp_real(y) == Some(Ordering::Equal));
    let k = points.len() - 1;
    let two = f.param().int(2);
    let inv_l = f.inv_lambda();
    // Row i: v_i − (v_L + v_R)/λ = 0 from the midpoint of piece i.
    let zero = f.param().int(0);
    let one = f.param().int(1);
    let mut rows: Vec<Vec<Real>> = Vec::with_capacity(k);
    for i in 0..k {
        let m = (&points[i] + &points[i + 1]).div(&two)?;
        let mut row = vec![zero.clone(); k + 1];
        row[i] = &row[i] + &one;
        for (y, _) in f.preimages(&m)? {
            let j = locate(&points, &y);
            row[j] = &row[j] - inv_l;
        }
        rows.push(row);
    }
    // Replace the last balance equation by the normalization Σ v_i |J_i| = 1.
    let mut norm = Vec::with_capacity(k + 1);
    for i in 0..k {
        norm.push(&points[i + 1] - &points[i]);
    }
    norm.push(one.clone());
    rows[k - 1] = norm;
    let values = solve(rows, k)?;
    Ok(Density { a: f.a().to_f64(), b: f.b().to_f64(), f: f.clone(), kind: DensityKind::MarkovExact { points, values } })
}

/// Gauss–Jordan elimination on an augmented k×(k+1) system with exact pivots.
fn solve(mut rows: Vec<Vec<Real>>, k: usize) -> Result<Vec<Real>> {
    for col in 0..k {
        let piv = (col..k)
            .find(|&r| rows[r][col].sign().map_or(false, |s| s != Ordering::Equal))
            .ok_or(Error::NotMarkov)?;
        rows.swap(col, piv);
        let p = rows[col][col].clone();
        for j in col..=k {
            rows[col][j] = rows[col][j].div(&p)?;
        }
        for r in 0..k {
            if r == col || rows[r][col].sign() == Some(Ordering::Equal) {
                continue;
            }
            let factor = rows[r][col].clone();
            for j in col..=k {
                let d = &factor * &rows[col][j];
                rows[r][j] = &rows[r][j] - &d;
            }
        }
    }
    Ok(rows.into_iter().map(|mut r| r.pop().expect("augmented")).collect())
}

/// Mass of [u, v] ∩ [lo, hi].
fn overlap(u: f64, v: f64, lo: f64, hi: f64) -> f64 {
    (v.min(hi) - u.max(lo)).max(0.0)
}

struct Ulam {
    a: f64,
    h: f64,
    n: usize,
    lambda: f64,
}

impl Ulam {
    fn cell_of(&self, x: f64) -> usize {
        (((x - self.a) / self.h).floor().max(0.0) as usize).min(self.n - 1)
    }

    /// Pushes the mass of each cell forward; mass leaving through rounding is clipped at the ends.
    fn apply(&self, phi: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (j, &pj) in phi.iter().enumerate() {
            let x0 = self.a + j as f64 * self.h;
            let x1 = x0 + self.h;
            let mut push = |u: f64, v: f64| {
                if v <= u {
                    return;
                }
                let (iu, iv) = (self.lambda * u, self.lambda * v);
                let (lo, hi) = (iu.min(iv), iu.max(iv));
                let dens = pj / self.lambda;
                for i in self.cell_of(lo)..=self.cell_of(hi) {
                    let cl = self.a + i as f64 * self.h;
                    out[i] += dens * overlap(lo, hi, cl, cl + self.h) / self.h;
                }
            };
            if x1 <= 0.5 {
                push(x0, x1);
            } else if x0 >= 0.5 {
                push(1.0 - x1, 1.0 - x0);
            } else {
                push(x0, 0.5);
                push(1.0 - x1, 0.5);
            }
        }
    }
}

/// Ulam iteration of the transfer operator on `cells` equal cells, to sup-norm change below `tol`.
pub fn density_grid(f: &TentMap, cells: usize, tol: f64, max_iters: usize) -> Result<Density> {
    let (a, b) = (f.a().to_f64(), f.b().to_f64());
    let u = Ulam { a, h: (b - a) / cells as f64, n: cells, lambda: f.param().lambda_f64() };
    let mut phi = vec![1.0 / (b - a); cells];
    let mut next = vec![0.0; cells];
    for it in 1..=max_iters {
        u.apply(&phi, &mut next);
        let change = phi.iter().zip(&next).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut phi, &mut next);
        if change < tol {
            let mass: f64 = phi.iter().sum::<f64>() * u.h;
            phi.iter_mut().for_each(|v| *v /= mass);
            u.apply(&phi, &mut next);
            let residual = phi.iter().zip(&next).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            return Ok(Density {
                f: f.clone(),
                kind: DensityKind::Grid { cells, values: phi, residual, iterations: it },
                a,
                b,
            });
        }
    }
    Err(Error::NotConverged(max_iters))
}

/// The closed-form step series for φ, valid for every λ in (√2, 2].
pub fn density_series(f: &TentMap) -> Result<Density> {
    let lambda = f.param().lambda_f64();
    let n = 3 + (64.0 / lambda.log2()).ceil() as usize;
    let tm = if f.param().is_exact() { f.clone() } else { f.at_precision(f.precision_for_orbit(n)) };
    let orbit = tm.critical_orbit(n);
    let mut points = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut w = 1.0f64;
    for cn in &orbit[2..] {
        points.push(cn.clone());
        weights.push(w);
        let eps = match f.side(cn) {
            crate::arith::SideClass::Left => 1.0,
            _ => -1.0,
        };
        w *= eps / lambda;
    }
    let points_f64: Vec<f64> = points.iter().map(Real::to_f64).collect();
    let s: f64 = weights.iter().sum();
    let k = -lambda - s;
    let (a, b) = (f.a().to_f64(), f.b().to_f64());
    let mass = k * (b - a) + weights.iter().zip(&points_f64).map(|(w, c)| w * (c - a)).sum::<f64>();
    let weights = weights.into_iter().map(|w| w / mass).collect();
    Ok(Density {
        f: f.clone(),
        kind: DensityKind::Series { constant: k / mass, points, points_f64, weights },
        a,
        b,
    })
}

impl Density {
    pub fn tent(&self) -> &TentMap {
        &self.f
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            DensityKind::MarkovExact { .. } => "markov",
            DensityKind::Grid { .. } => "grid",
            DensityKind::Series { .. } => "series",
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.kind, DensityKind::MarkovExact { .. })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// φ(x); at a jump the left value is used (the right one at a).
    pub fn eval(&self, x: &Real) -> Real {
        match &self.kind {
            DensityKind::MarkovExact { points, values } => values[locate(points, x)].clone(),
            DensityKind::Series { constant, points, weights, .. } => {
                let mut v = *constant;
                for (c, w) in points.iter().zip(weights) {
                    let below = match x.cmp_real(c) {
                        Some(o) => o != Ordering::Greater,
                        None => x.to_f64() <= c.to_f64(),
                    };
                    if below {
                        v += w;
                    }
                }
                self.f.param().from_f64(v)
            }
            DensityKind::Grid { .. } => self.f.param().from_f64(self.eval_f64(x.to_f64())),
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        match &self.kind {
            DensityKind::MarkovExact { points, values } => {
                let j = points[1..].iter().position(|p| x <= p.to_f64()).unwrap_or(values.len() - 1);
                values[j].to_f64()
            }
            DensityKind::Series { constant, points_f64, weights, .. } => {
                constant + points_f64.iter().zip(weights).filter(|(c, _)| x <= **c).map(|(_, w)| w).sum::<f64>()
            }
            DensityKind::Grid { cells, values, .. } => {
                let h = (self.b - self.a) / *cells as f64;
                values[(((x - self.a) / h).floor().max(0.0) as usize).min(cells - 1)]
            }
        }
    }

    /// ∫_lo^hi φ dm.
    pub fn integral_f64(&self, lo: f64, hi: f64) -> f64 {
        let (lo, hi) = (lo.max(self.a), hi.min(self.b));
        if hi <= lo {
            return 0.0;
        }
        match &self.kind {
            DensityKind::MarkovExact { points, values } => values
                .iter()
                .enumerate()
                .map(|(j, v)| v.to_f64() * overlap(lo, hi, points[j].to_f64(), points[j + 1].to_f64()))
                .sum(),
            DensityKind::Series { constant, points_f64, weights, .. } => {
                constant * (hi - lo)
                    + points_f64.iter().zip(weights).map(|(c, w)| w * overlap(lo, hi, self.a, *c)).sum::<f64>()
            }
            DensityKind::Grid { cells, values, .. } => {
                let h = (self.b - self.a) / *cells as f64;
                values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let cl = self.a + i as f64 * h;
                        v * overlap(lo, hi, cl, cl + h)
                    })
                    .sum()
            }
        }
    }

    /// Exact ∫_lo^hi φ dm for a Markov density.
    pub fn integral_exact(&self, lo: &Real, hi: &Real) -> Option<Real> {
        let DensityKind::MarkovExact { points, values } = &self.kind else {
            return None;
        };
        let zero = self.f.param().int(0);
        let mut acc = zero.clone();
        for (j, v) in values.iter().enumerate() {
            let l = max_real(lo, &points[j]);
            let h = min_real(hi, &points[j + 1]);
            if h.cmp_real(&l) == Some(Ordering::Greater) {
                acc = &acc + &(v * &(&h - &l));
            }
        }
        Some(acc)
    }

    /// Σ_{f(y)=x} φ(y)/λ; for a grid, the Ulam image average over the cell of x.
    pub fn transfer_at(&self, x: &Real) -> Result<Real> {
        match &self.kind {
            DensityKind::Grid { cells, .. } => {
                let h = (self.b - self.a) / *cells as f64;
                let xf = x.to_f64();
                let i = (((xf - self.a) / h).floor().max(0.0) as usize).min(cells - 1);
                let (u, v) = (self.a + i as f64 * h, self.a + (i + 1) as f64 * h);
                let l = self.f.param().lambda_f64();
                let left = if v >= l * self.a { self.integral_f64(u.max(l * self.a) / l, v / l) } else { 0.0 };
                let right = self.integral_f64(1.0 - v / l, 1.0 - u / l);
                Ok(self.f.param().from_f64((left + right) / h))
            }
            _ => {
                let mut acc = self.f.param().int(0);
                for (y, _) in self.f.preimages(x)? {
                    acc = &acc + &(&self.eval(&y) * self.f.inv_lambda());
                }
                Ok(acc)
            }
        }
    }

    /// Smallest value of φ on I.
    pub fn min_value(&self) -> f64 {
        match &self.kind {
            DensityKind::MarkovExact { values, .. } => values.iter().map(Real::to_f64).fold(f64::INFINITY, f64::min),
            DensityKind::Grid { values, .. } => values.iter().copied().fold(f64::INFINITY, f64::min),
            DensityKind::Series { .. } => {
                let DensityKind::Series { points_f64, .. } = &self.kind else { unreachable!() };
                let mut xs: Vec<f64> = points_f64.clone();
                xs.push(self.a);
                xs.push(self.b);
                xs.iter().map(|&x| self.eval_f64(x).min(self.eval_f64((x + 1e-12).min(self.b)))).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// (x, φ(x)) at n cell midpoints.
    pub fn sample(&self, n: usize) -> Vec<(f64, f64)> {
        let h = (self.b - self.a) / n as f64;
        (0..n)
            .map(|i| {
                let x = self.a + (i as f64 + 0.5) * h;
                (x, self.eval_f64(x))
            })
            .collect()
    }

    /// L¹ distance to another density over I, by midpoint sampling.
    pub fn l1_distance(&self, o: &Density, samples: usize) -> f64 {
        let h = (self.b - self.a) / samples as f64;
        (0..samples)
            .map(|i| {
                let x = self.a + (i as f64 + 0.5) * h;
                (self.eval_f64(x) - o.eval_f64(x)).abs() * h
            })
            .sum()
    }
}

fn max_real(x: &Real, y: &Real) -> Real {
    if x.cmp_real(y) == Some(Ordering::Less) {
        y.clone()
    } else {
        x.clone()
    }
}

fn min_real(x: &Real, y: &Real) -> Real {
    if x.cmp_real(y) == Some(Ordering::Greater) {
        y.clone()
    } else {
        x.clone()
    }
}

/// Histogram density from an n-step orbit of the tent map in f64.
pub fn birkhoff_histogram(f: &TentMap, x0: f64, steps: usize, bins: usize) -> Vec<f64> {
    let (a, b) = (f.a().to_f64(), f.b().to_f64());
    let l = f.param().lambda_f64();
    let h = (b - a) / bins as f64;
    let mut counts = vec![0u64; bins];
    let mut x = x0;
    for _ in 0..1000 {
        x = l * x.min(1.0 - x);
    }
    for _ in 0..steps {
        x = l * x.min(1.0 - x);
        let i = (((x - a) / h).floor().max(0.0) as usize).min(bins - 1);
        counts[i] += 1;
    }
    counts.iter().map(|&c| c as f64 / (steps as f64 * h)).collect()
}
