//! The core tent map f on I = [a, b], itineraries and the unimodal order.

mod word;

pub use word::{unimodal_cmp, UnimodalOrd, Word};

use crate::arith::{classify_side, Parameter, Real, SideClass};
use crate::error::{Error, Result};
use serde::Serialize;
use std::cmp::Ordering;
use std::sync::{Arc, OnceLock};

/// Post-critical points examined by default.
pub const PC_CAP: usize = 512;
/// Interval-backend coincidence threshold, as a power of two.
pub const NUMERIC_COINCIDENCE_BITS: i64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Confidence {
    Exact,
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PostCritical {
    PeriodicC { period: usize },
    PreperiodicC { preperiod: usize, period: usize },
    InfiniteWithinCap { cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Profile {
    pub kind: PostCritical,
    pub confidence: Confidence,
}

impl Profile {
    pub fn is_finite(&self) -> bool {
        !matches!(self.kind, PostCritical::InfiniteWithinCap { .. })
    }

    pub fn is_exact_finite(&self) -> bool {
        self.is_finite() && self.confidence == Confidence::Exact
    }
}

/// f(x) = λx for x ≤ c, λ(1 − x) for x ≥ c, restricted to I = [a, b].
#[derive(Clone, Debug)]
pub struct TentMap {
    p: Parameter,
    lambda: Real,
    inv_lambda: Real,
    one: Real,
    a: Real,
    b: Real,
    c: Real,
    a_hat: Real,
    p_fix: Real,
    fa: Real,
    profile: Arc<OnceLock<Result<Profile>>>,
}

impl TentMap {
    pub fn new(p: &Parameter) -> TentMap {
        let lambda = p.lambda();
        let one = p.int(1);
        let inv_lambda = one.div(&lambda).expect("λ > 1");
        let c = p.ratio(1, 2);
        let b = &lambda * &c;
        let a = &lambda * &(&one - &b);
        let a_hat = &one - &a;
        let p_fix = lambda.div(&(&one + &lambda)).expect("1 + λ > 0");
        let fa = &lambda * &a;
        TentMap {
            p: p.clone(),
            lambda,
            inv_lambda,
            one,
            a,
            b,
            c,
            a_hat,
            p_fix,
            fa,
            profile: Arc::new(OnceLock::new()),
        }
    }

    /// The same map with a different working precision.
    pub fn at_precision(&self, prec: u32) -> TentMap {
        TentMap::new(&self.p.with_precision(prec))
    }

    pub fn param(&self) -> &Parameter {
        &self.p
    }
    pub fn lambda(&self) -> &Real {
        &self.lambda
    }
    pub fn inv_lambda(&self) -> &Real {
        &self.inv_lambda
    }
    pub fn a(&self) -> &Real {
        &self.a
    }
    pub fn b(&self) -> &Real {
        &self.b
    }
    pub fn c(&self) -> &Real {
        &self.c
    }
    pub fn a_hat(&self) -> &Real {
        &self.a_hat
    }
    pub fn p_fix(&self) -> &Real {
        &self.p_fix
    }
    /// f(a) = λa.
    pub fn f_a(&self) -> &Real {
        &self.fa
    }
    pub fn one(&self) -> &Real {
        &self.one
    }

    pub fn side(&self, x: &Real) -> SideClass {
        classify_side(x, &self.p)
    }

    fn check_in_interval(&self, x: &Real) -> Result<()> {
        if x.cmp_real(&self.a) == Some(Ordering::Less) || x.cmp_real(&self.b) == Some(Ordering::Greater) {
            return Err(Error::DomainError(format!("{} lies outside I", x.to_f64())));
        }
        Ok(())
    }

    /// f without the domain check; an undecided side yields the hull of both branches.
    pub fn eval_unchecked(&self, x: &Real) -> Real {
        match self.side(x) {
            SideClass::Left | SideClass::AtC => &self.lambda * x,
            SideClass::Right => &self.lambda * &(&self.one - x),
            SideClass::Uncertain => {
                (&self.lambda * x).hull(&(&self.lambda * &(&self.one - x)))
            }
        }
    }

    pub fn eval(&self, x: &Real) -> Result<Real> {
        self.check_in_interval(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub fn iterate(&self, x: &Real, n: usize) -> Result<Real> {
        let mut y = x.clone();
        for _ in 0..n {
            y = self.eval(&y)?;
        }
        Ok(y)
    }

    /// The mirror point 1 − x of x ∈ [a, â] ∖ {c}.
    pub fn hat(&self, x: &Real) -> Result<Real> {
        if self.side(x) == SideClass::AtC {
            return Err(Error::DomainError("hat is undefined at c".into()));
        }
        if x.cmp_real(&self.a) == Some(Ordering::Less) || x.cmp_real(&self.a_hat) == Some(Ordering::Greater) {
            return Err(Error::DomainError(format!("{} lies outside [a, â]", x.to_f64())));
        }
        Ok(&self.one - x)
    }

    /// y/λ, the preimage on the left branch.
    pub fn left_preimage(&self, y: &Real) -> Real {
        y * &self.inv_lambda
    }

    /// 1 − y/λ, the preimage on the right branch.
    pub fn right_preimage(&self, y: &Real) -> Real {
        &self.one - &(y * &self.inv_lambda)
    }

    /// Whether the left preimage of y lies in I, i.e. y ≥ f(a).
    pub fn has_left_preimage(&self, y: &Real) -> Result<bool> {
        match y.cmp_real(&self.fa) {
            Some(Ordering::Less) => Ok(false),
            Some(_) => Ok(true),
            None => Err(Error::PrecisionExhausted { bits: self.p.precision() }),
        }
    }

    /// Preimages in I with their branch symbol; b has the single preimage c.
    pub fn preimages(&self, y: &Real) -> Result<Vec<(Real, u8)>> {
        self.check_in_interval(y)?;
        if y.cmp_real(&self.b) == Some(Ordering::Equal) {
            return Ok(vec![(self.c.clone(), 1)]);
        }
        let mut out = Vec::with_capacity(2);
        if self.has_left_preimage(y)? {
            out.push((self.left_preimage(y), 0));
        }
        out.push((self.right_preimage(y), 1));
        Ok(out)
    }

    /// Runs `f`; on an undecided comparison with an exactly known input, retries at higher precision.
    fn retry<T>(&self, x: &Real, f: impl Fn(&TentMap, &Real) -> Result<T>) -> Result<T> {
        let mut tm = self.clone();
        let mut x = x.clone();
        loop {
            match f(&tm, &x) {
                Err(Error::PrecisionExhausted { bits }) if x.is_exact() && !self.p.is_exact() && bits < self.p.cap() => {
                    let p = (2 * tm.p.precision()).min(self.p.cap());
                    tm = tm.at_precision(p);
                    x = x.with_precision(p);
                }
                r => return r,
            }
        }
    }

    fn itinerary_once(&self, x: &Real, n: usize) -> Result<Word> {
        self.check_in_interval(x)?;
        let mut w = Word::new();
        let mut y = x.clone();
        for _ in 0..n {
            match self.side(&y) {
                SideClass::Left => w.push(0),
                SideClass::Right => w.push(1),
                SideClass::AtC => match self.epsilon() {
                    Some(e) => w.push(e),
                    None => {
                        w.set_ambiguous(true);
                        return Ok(w);
                    }
                },
                SideClass::Uncertain => return Err(Error::PrecisionExhausted { bits: self.p.precision() }),
            }
            y = self.eval_unchecked(&y);
        }
        Ok(w)
    }

    /// Length-n itinerary; cut short with the ambiguity flag at an exact hit of a non-periodic c.
    pub fn itinerary(&self, x: &Real, n: usize) -> Result<Word> {
        self.retry(x, |tm, x| tm.itinerary_once(x, n))
    }

    /// Both itineraries of a point whose orbit hits c (identical when there is no hit).
    pub fn both_continuations(&self, x: &Real, n: usize) -> Result<(Word, Word)> {
        let w = self.itinerary(x, n)?;
        if !w.is_ambiguous() {
            return Ok((w.clone(), w));
        }
        let k = w.len();
        let tail = if k + 1 < n { self.itinerary(&self.b, n - k - 1)? } else { Word::new() };
        let mut w0 = w.prefix(k);
        w0.push(0);
        let mut w1 = w.prefix(k);
        w1.push(1);
        Ok((w0.concat(&tail), w1.concat(&tail)))
    }

    /// κ(f), the itinerary of b.
    pub fn kneading(&self, n: usize) -> Result<Word> {
        self.itinerary(&self.b, n)
    }

    /// ε(f) when c is provably periodic.
    pub fn epsilon(&self) -> Option<u8> {
        let prof = self.postcritical_profile_cached().ok()?;
        match (prof.kind, prof.confidence) {
            (PostCritical::PeriodicC { period }, Confidence::Exact) => {
                let mut y = self.b.clone();
                let mut ones = 0u8;
                for _ in 1..period {
                    if self.side(&y) == SideClass::Right {
                        ones ^= 1;
                    }
                    y = self.eval_unchecked(&y);
                }
                Some(ones)
            }
            _ => None,
        }
    }

    /// The profile at the default cap, computed once.
    pub fn postcritical_profile_cached(&self) -> Result<Profile> {
        self.profile.get_or_init(|| self.postcritical_profile(PC_CAP)).clone()
    }

    /// Post-critical points c_1 = b, c_2 = a, ..., c_n.
    pub fn critical_orbit(&self, n: usize) -> Vec<Real> {
        let mut out = Vec::with_capacity(n);
        let mut y = self.c.clone();
        for _ in 0..n {
            y = self.eval_unchecked(&y);
            out.push(y.clone());
        }
        out
    }

    /// Precision for which `n` steps of the critical orbit keep width below 2^-64.
    pub fn precision_for_orbit(&self, n: usize) -> u32 {
        let need = NUMERIC_COINCIDENCE_BITS as f64 + 32.0 + n as f64 * self.p.lambda_f64().log2();
        let mut p = self.p.precision();
        while (p as f64) < need && p < self.p.cap() {
            p *= 2;
        }
        p.min(self.p.cap())
    }

    /// Periodic, preperiodic, or no coincidence among c_0 = c, c_1, ..., c_cap.
    pub fn postcritical_profile(&self, cap: usize) -> Result<Profile> {
        let tm = if self.p.is_exact() { self.clone() } else { self.at_precision(self.precision_for_orbit(cap)) };
        let mut orbit = vec![tm.c.clone()];
        orbit.extend(tm.critical_orbit(cap));
        let tol = crate::arith::ldexp(1.0, -NUMERIC_COINCIDENCE_BITS);
        if !self.p.is_exact() && orbit.iter().any(|x| x.width_f64() > tol) {
            return Err(Error::PrecisionExhausted { bits: tm.p.precision() });
        }
        // Candidate pairs are neighbours in the f64 ordering.
        let mut idx: Vec<usize> = (0..orbit.len()).collect();
        let approx: Vec<f64> = orbit.iter().map(|x| x.to_f64()).collect();
        idx.sort_by(|&i, &j| approx[i].total_cmp(&approx[j]).then(i.cmp(&j)));
        let mut best: Option<(usize, usize, Confidence)> = None;
        let mut k = 0;
        while k < idx.len() {
            let mut m = k + 1;
            while m < idx.len() && approx[idx[m]] - approx[idx[k]] <= 1e-9 {
                m += 1;
            }
            for u in k..m {
                for v in u + 1..m {
                    let (i, j) = (idx[u].min(idx[v]), idx[u].max(idx[v]));
                    let conf = match orbit[i].cmp_real(&orbit[j]) {
                        Some(Ordering::Equal) => Some(Confidence::Exact),
                        Some(_) => None,
                        None if orbit[i].diff_bound(&orbit[j]) < tol => Some(Confidence::Numeric),
                        None => None,
                    };
                    if let Some(conf) = conf {
                        if best.is_none_or(|(bi, bj, _)| (j, i) < (bj, bi)) {
                            best = Some((i, j, conf));
                        }
                    }
                }
            }
            k = m;
        }
        Ok(match best {
            None => Profile { kind: PostCritical::InfiniteWithinCap { cap }, confidence: if self.p.is_exact() { Confidence::Exact } else { Confidence::Numeric } },
            Some((0, j, conf)) => Profile { kind: PostCritical::PeriodicC { period: j }, confidence: conf },
            Some((i, j, conf)) => Profile { kind: PostCritical::PreperiodicC { preperiod: i, period: j - i }, confidence: conf },
        })
    }

    /// Index r ≤ cap with c_r in [lo, hi], if any; undecided comparisons count as hits.
    pub fn pc_hit(&self, lo: &Real, hi: &Real, cap: usize) -> Option<usize> {
        let tm = if self.p.is_exact() { self.clone() } else { self.at_precision(self.precision_for_orbit(cap)) };
        let lo = lo.with_precision(tm.p.precision());
        let hi = hi.with_precision(tm.p.precision());
        for (i, y) in tm.critical_orbit(cap).iter().enumerate() {
            let below = y.cmp_real(&lo) == Some(Ordering::Less);
            let above = y.cmp_real(&hi) == Some(Ordering::Greater);
            if !below && !above {
                return Some(i + 1);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_basics() {
        let f = TentMap::new(&Parameter::golden());
        assert_eq!(f.eval(f.c()).unwrap().cmp_real(f.b()), Some(Ordering::Equal));
        assert_eq!(f.eval(f.b()).unwrap().cmp_real(f.a()), Some(Ordering::Equal));
        assert_eq!(f.eval(f.a()).unwrap().cmp_real(f.c()), Some(Ordering::Equal));
        assert_eq!(f.side(f.a()), SideClass::Left);
        assert_eq!(f.side(f.b()), SideClass::Right);
        assert_eq!(f.side(f.c()), SideClass::AtC);
        let prof = f.postcritical_profile(64).unwrap();
        assert_eq!(prof.kind, PostCritical::PeriodicC { period: 3 });
        assert_eq!(prof.confidence, Confidence::Exact);
        assert_eq!(f.epsilon(), Some(1));
        assert_eq!(f.kneading(9).unwrap().to_string(), "101101101");
    }

    #[test]
    fn preimage_cases() {
        let f = TentMap::new(&Parameter::golden());
        let pre_b = f.preimages(f.b()).unwrap();
        assert_eq!(pre_b.len(), 1);
        assert_eq!(pre_b[0].0.cmp_real(f.c()), Some(Ordering::Equal));
        let pre_fa = f.preimages(f.f_a()).unwrap();
        assert_eq!(pre_fa.len(), 2);
        assert_eq!(pre_fa[0].0.cmp_real(f.a()), Some(Ordering::Equal));
        assert_eq!(pre_fa[1].0.cmp_real(f.a_hat()), Some(Ordering::Equal));
        let low = f.a();
        let pre = f.preimages(low).unwrap();
        assert_eq!(pre.len(), 1);
        assert_eq!(pre[0].1, 1);
    }

    #[test]
    fn decimal_profile_and_ambiguity() {
        let f = TentMap::new(&Parameter::parse("1.9").unwrap());
        let prof = f.postcritical_profile(200).unwrap();
        assert_eq!(prof.kind, PostCritical::InfiniteWithinCap { cap: 200 });
        // c/λ maps to c exactly, and c is not periodic here.
        let x = f.left_preimage(f.c());
        let w = f.itinerary(&x, 10).unwrap();
        assert!(w.is_ambiguous());
        assert_eq!(w.len(), 1);
        let (w0, w1) = f.both_continuations(&x, 10).unwrap();
        assert_eq!(w0.len(), 10);
        assert_eq!(w0.get(0), w1.get(0));
        assert_ne!(w0.get(1), w1.get(1));
    }
}
