use super::{b_tilde_step, in_gamma, CirclePoint, Sheet};
use crate::arith::{ldexp, Ball, Dyadic, Real, SideClass};
use crate::error::{Error, Result};
use crate::tent::{Confidence, PostCritical, Profile, TentMap};
use serde::Serialize;
use std::cmp::Ordering;

/// Interval-backend endpoint tolerance 2^-48.
pub const DEFAULT_HEIGHT_TOL_BITS: i64 = 48;

/// Position of the first-return point B̃ⁿ(a) in γ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum HeightKind {
    EndpointMinus,
    EndpointPlus,
    Nbt,
    General,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum HeightResult {
    Rational { m: i64, n: usize, kind: HeightKind, confidence: Confidence },
    Undecided { lo: f64, hi: f64, iterations: usize },
}

impl HeightResult {
    pub fn value(&self) -> Option<f64> {
        match self {
            HeightResult::Rational { m, n, .. } => Some(*m as f64 / *n as f64),
            HeightResult::Undecided { .. } => None,
        }
    }

    /// Rotation interval: a point for rational heights.
    pub fn bracket(&self) -> (f64, f64) {
        match self {
            HeightResult::Rational { m, n, .. } => {
                let q = *m as f64 / *n as f64;
                (q, q)
            }
            HeightResult::Undecided { lo, hi, .. } => (*lo, *hi),
        }
    }
}

enum Scan {
    Returned { m: i64, n: usize, kind: HeightKind, confidence: Confidence },
    NoReturn { steps: usize },
}

fn near(x: &Real, y: &Real, tol: f64) -> bool {
    x.diff_bound(y) <= tol
}

/// Classifies a point of γ reached by the orbit of a.
fn return_kind(f: &TentMap, y: &CirclePoint, tol: f64) -> Result<Option<(HeightKind, Confidence)>> {
    let exact = f.param().is_exact();
    if !exact {
        if near(&y.x, f.a(), tol) {
            return Ok(Some((HeightKind::EndpointMinus, Confidence::Numeric)));
        }
        if y.is_upper() && near(&y.x, f.a_hat(), tol) {
            return Ok(Some((HeightKind::EndpointPlus, Confidence::Numeric)));
        }
        if y.is_upper() && near(&y.x, f.c(), tol) {
            return Ok(Some((HeightKind::Nbt, Confidence::Numeric)));
        }
    }
    if !in_gamma(f, y)? {
        return Ok(None);
    }
    let kind = if y.sheet == Sheet::Lower {
        HeightKind::EndpointMinus
    } else if y.x.cmp_real(f.a_hat()) == Some(Ordering::Equal) {
        HeightKind::EndpointPlus
    } else if f.side(&y.x) == SideClass::AtC {
        HeightKind::Nbt
    } else {
        HeightKind::General
    };
    Ok(Some((kind, Confidence::Exact)))
}

fn scan(f: &TentMap, max_iters: usize, tol: f64) -> Result<Scan> {
    let mut y = CirclePoint::lower(f, f.a().clone());
    let mut wind = 0i64;
    for r in 1..=max_iters {
        let (z, w) = b_tilde_step(f, &y)?;
        wind += w;
        if let Some((kind, confidence)) = return_kind(f, &z, tol)? {
            // An upper landing in γ completes its turn when B collapses it to f(a).
            let m = if kind == HeightKind::EndpointMinus { wind } else { wind + 1 };
            return Ok(Scan::Returned { m, n: r, kind, confidence });
        }
        y = z;
    }
    Ok(Scan::NoReturn { steps: max_iters })
}

/// Height of f: the first return of the B̃-orbit of a to γ, or a certified rotation bracket.
pub fn height(f: &TentMap, max_iters: usize, tol_bits: i64) -> Result<HeightResult> {
    let tol = ldexp(1.0, -tol_bits);
    let mut tm = f.clone();
    loop {
        match scan(&tm, max_iters, tol) {
            Ok(Scan::Returned { m, n, kind, confidence }) => {
                return Ok(HeightResult::Rational { m, n, kind, confidence })
            }
            Ok(Scan::NoReturn { steps }) => return undecided(f, max_iters, steps),
            Err(Error::PrecisionExhausted { .. }) if tm.param().precision() < f.param().cap() => {
                let p = (2 * tm.param().precision()).min(f.param().cap());
                tm = tm.at_precision(p);
            }
            Err(Error::PrecisionExhausted { .. }) => {
                let certified = certified_steps(&tm, max_iters, tol);
                return undecided(f, max_iters, certified);
            }
            Err(e) => return Err(e),
        }
    }
}

/// Steps of the orbit of a that stay decidable at the current precision.
fn certified_steps(f: &TentMap, max_iters: usize, tol: f64) -> usize {
    let mut y = CirclePoint::lower(f, f.a().clone());
    for r in 1..=max_iters {
        match b_tilde_step(f, &y).and_then(|(z, _)| return_kind(f, &z, tol).map(|k| (z, k))) {
            Ok((z, None)) => y = z,
            _ => return r - 1,
        }
    }
    max_iters
}

fn undecided(f: &TentMap, horizon: usize, iterations: usize) -> Result<HeightResult> {
    let (lo, hi) = rotation_bracket(f, horizon.max(1))?;
    Ok(HeightResult::Undecided { lo, hi, iterations })
}

/// Lift chart in units s ∈ [0, C), C = 2(b − a): s = x − a on the lower copy, 2b − a − x on the upper.
struct LiftEval {
    a: Ball,
    b: Ball,
    c_half: Ball,
    a_hat: Ball,
    lambda: Ball,
    one: Ball,
    circ: Ball,
    fa_rel: Ball,
    prec: u32,
}

impl LiftEval {
    fn new(f: &TentMap) -> LiftEval {
        let prec = f.param().precision().max(128);
        let ball = |x: &Real| x.to_ball(prec);
        let (a, b) = (ball(f.a()), ball(f.b()));
        let circ = b.sub(&a).add(&b.sub(&a));
        let fa_rel = ball(f.f_a()).sub(&a);
        LiftEval {
            c_half: ball(f.c()),
            a_hat: ball(f.a_hat()),
            lambda: ball(f.lambda()),
            one: ball(f.one()),
            a,
            b,
            circ,
            fa_rel,
            prec,
        }
    }

    fn f_left(&self, x: &Ball) -> Ball {
        self.lambda.mul(x)
    }

    fn f_right(&self, x: &Ball) -> Ball {
        self.lambda.mul(&self.one.sub(x))
    }

    /// Enclosure of the relative lift image of the point s (may exceed C by one turn).
    fn image(&self, s: &Dyadic) -> Ball {
        let s = Ball::point(s.clone(), self.prec);
        let half = self.b.sub(&self.a);
        let mut out: Option<Ball> = None;
        let mut push = |v: Ball| {
            out = Some(match out.take() {
                Some(o) => o.hull(&v),
                None => v,
            })
        };
        let lower_possible = s.cmp(&half) != Some(Ordering::Greater);
        let upper_possible = s.cmp(&half) != Some(Ordering::Less);
        if lower_possible {
            let x = self.a.add(&s);
            let (l, r) = (x.cmp(&self.c_half), ());
            let _ = r;
            if l != Some(Ordering::Greater) {
                push(self.f_left(&x).sub(&self.a));
            }
            if l != Some(Ordering::Less) {
                // f(x)_u
                let b2 = self.b.add(&self.b);
                push(b2.sub(&self.a).sub(&self.f_right(&x)));
            }
        }
        if upper_possible {
            let x = self.b.add(&self.b).sub(&self.a).sub(&s);
            let o = x.cmp(&self.a_hat);
            if o != Some(Ordering::Greater) {
                push(self.fa_rel.add(&self.circ));
            }
            if o != Some(Ordering::Less) {
                push(self.f_right(&x).sub(&self.a).add(&self.circ));
            }
        }
        out.expect("some branch applies")
    }

    /// One pseudo-orbit step from (wind, s), keeping the lower or upper end.
    fn step(&self, wind: i64, s: &Dyadic, upper: bool) -> (i64, Dyadic) {
        let img = self.image(s);
        let e = if upper { img.hi().clone() } else { img.lo().clone() };
        if &e >= self.circ.hi() {
            let shifted = Ball::point(e, self.prec).sub(&self.circ);
            let e2 = if upper { shifted.hi().clone() } else { shifted.lo().clone() };
            (wind + 1, e2)
        } else {
            (wind, e)
        }
    }
}

/// Certified rotation interval of B from monotone lower and upper pseudo-orbits of a.
pub fn rotation_bracket(f: &TentMap, horizon: usize) -> Result<(f64, f64)> {
    let le = LiftEval::new(f);
    let circ = le.circ.mid_f64();
    let (mut wl, mut sl) = (0i64, Dyadic::zero());
    let (mut wh, mut sh) = (0i64, Dyadic::zero());
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for k in 1..=horizon {
        (wl, sl) = le.step(wl, &sl, false);
        (wh, sh) = le.step(wh, &sh, true);
        let kf = k as f64;
        let slack = 1e-12;
        let l = (wl as f64 + sl.to_f64() / circ - 1.0) / kf - slack;
        let h = (wh as f64 + sh.to_f64() / circ + 1.0) / kf + slack;
        lo = lo.max(l);
        hi = hi.min(h);
    }
    Ok((lo, hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TentType {
    IrrationalOrUndecided,
    RationalEndpointMinus,
    RationalEndpointPlus,
    RationalNbt,
    RationalGeneral,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub tent_type: TentType,
    pub height: HeightResult,
    pub profile: Profile,
    pub pcf: bool,
}

/// Combines height and the post-critical profile, checking their consistency.
pub fn classify(f: &TentMap, max_iters: usize) -> Result<Classification> {
    let h = height(f, max_iters, DEFAULT_HEIGHT_TOL_BITS)?;
    let profile = f.postcritical_profile_cached()?;
    let tent_type = match &h {
        HeightResult::Undecided { .. } => TentType::IrrationalOrUndecided,
        HeightResult::Rational { kind, .. } => match kind {
            HeightKind::EndpointMinus => TentType::RationalEndpointMinus,
            HeightKind::EndpointPlus => TentType::RationalEndpointPlus,
            HeightKind::Nbt => TentType::RationalNbt,
            HeightKind::General => TentType::RationalGeneral,
        },
    };
    if let HeightResult::Rational { n, kind, confidence: Confidence::Exact, .. } = &h {
        if profile.confidence == Confidence::Exact {
            match (kind, profile.kind) {
                (HeightKind::EndpointMinus, PostCritical::PeriodicC { period }) if period == *n => {}
                (HeightKind::EndpointMinus, other) => {
                    return Err(Error::Inconsistent(format!("endpoint type with n = {n} but {other:?}")))
                }
                (HeightKind::EndpointPlus, PostCritical::PreperiodicC { .. }) => {}
                (HeightKind::EndpointPlus, other) => {
                    return Err(Error::Inconsistent(format!("endpoint+ type but {other:?}")))
                }
                _ => {}
            }
        }
    }
    Ok(Classification { tent_type, height: h, pcf: profile.is_finite(), profile })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Parameter;

    #[test]
    fn golden_is_endpoint_minus() {
        let f = TentMap::new(&Parameter::golden());
        let h = height(&f, 100, DEFAULT_HEIGHT_TOL_BITS).unwrap();
        assert_eq!(
            h,
            HeightResult::Rational { m: 1, n: 3, kind: HeightKind::EndpointMinus, confidence: Confidence::Exact }
        );
        let c = classify(&f, 100).unwrap();
        assert_eq!(c.tent_type, TentType::RationalEndpointMinus);
        assert_eq!(c.profile.kind, PostCritical::PeriodicC { period: 3 });
    }

    #[test]
    fn decimal_general() {
        let f = TentMap::new(&Parameter::parse("1.62").unwrap());
        let h = height(&f, 100, DEFAULT_HEIGHT_TOL_BITS).unwrap();
        assert_eq!(
            h,
            HeightResult::Rational { m: 1, n: 3, kind: HeightKind::General, confidence: Confidence::Exact }
        );
    }

    #[test]
    fn bracket_contains_rational_height() {
        for (spec, q) in [("1.62", 1.0 / 3.0), ("1.9", 0.25)] {
            let f = TentMap::new(&Parameter::parse(spec).unwrap());
            let h = height(&f, 200, DEFAULT_HEIGHT_TOL_BITS).unwrap();
            assert_eq!(h.value(), Some(q), "{spec}");
            let (lo, hi) = rotation_bracket(&f, 500).unwrap();
            assert!(lo <= q && q <= hi, "{spec}: [{lo}, {hi}]");
            assert!(hi - lo <= 10.0 / 500.0);
        }
    }
}
