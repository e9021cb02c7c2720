use super::tartan::{build_tartan, check_compatibility, check_regularity, check_scaling, check_tameness, TartanApprox};
use super::{Report, SuiteCtx};
use crate::arith::{Backend, Ball, Dyadic, Parameter, Real, SideClass};
use crate::error::{Error, Result};
use crate::glue::{cantor_approx, fiber_arc, in_grand_orbit, spike_arcs, spike_measure};
use crate::ilim::{fiber, flat_arc_through, reconstruct, Cylinder, Thread};
use crate::measure::{alpha_cylinder, alpha_of_box, density_grid, density_markov, density_series, Density};
use crate::outside::{
    b_map, b_step, b_tilde, b_tilde_inverse, b_tilde_step, classify, extreme_element, height, in_gamma_interior,
    sweep, CirclePoint, HeightResult, Sheet, TentType, DEFAULT_HEIGHT_TOL_BITS,
};
use crate::tent::{unimodal_cmp, TentMap, UnimodalOrd, Word};
use crate::ilim::zero_box;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;

type Suite = fn(&SuiteCtx) -> Report;

/// Every addressable property suite, sorted by name.
pub static SUITES: &[(&str, Suite)] = &[
    ("action_on_extremes", action_on_extremes),
    ("alpha_scaling", alpha_scaling),
    ("b_inverse_round_trip", b_inverse_round_trip),
    ("cylinder_additivity", cylinder_additivity),
    ("degree_one_lift", degree_one_lift),
    ("exact_vs_interval", exact_vs_interval),
    ("extreme_distinctness", extreme_distinctness),
    ("extremes_not_identified", extremes_not_identified),
    ("fiber_extremes", fiber_extremes),
    ("fiber_reconstruct", fiber_reconstruct),
    ("flat_arc_word", flat_arc_word),
    ("forward_invariance", forward_invariance),
    ("g_coordinate", g_coordinate),
    ("grid_vs_markov", grid_vs_markov),
    ("hat_involution", hat_involution),
    ("height_monotone", height_monotone),
    ("holonomy", holonomy),
    ("irrat_key", irrat_key),
    ("many_choices", many_choices),
    ("model_action", model_action),
    ("orbit_avoidance", orbit_avoidance),
    ("order_fa_p_ha", order_fa_p_ha),
    ("order_reflection", order_reflection),
    ("outward_rounding", outward_rounding),
    ("perfect_like", perfect_like),
    ("pf_residual", pf_residual),
    ("preimages_exact", preimages_exact),
    ("regularity_shadow", regularity_shadow),
    ("spike_halving", spike_halving),
    ("tameness", tameness),
    ("tartan_compatibility", tartan_compatibility),
    ("tartan_scaling", tartan_scaling),
];

/// Algebraic parameters whose critical orbit is finite.
pub const MARKOV_PARAMETERS: [&str; 5] = [
    "poly:-1,-1,1:interval:1.6,1.7",
    "poly:-1,1,-2,1:interval:1.7,1.8",
    "poly:-1,-1,-1,1:interval:1.8,1.9",
    "poly:-1,-1,-1,-1,1:interval:1.9,1.95",
    "poly:-1,0,-1,1:interval:1.45,1.5",
];

fn stable_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// Runs a suite body, turning errors into Fail (or Undecided when precision ran out).
fn run(name: &str, ctx: &SuiteCtx, body: impl FnOnce(&mut Report, &mut ChaCha8Rng) -> Result<bool>) -> Report {
    let mut rep = Report::new(name, ctx.provenance());
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ stable_hash(name));
    match body(&mut rep, &mut rng) {
        Ok(ok) => rep.pass_if(ok),
        Err(Error::PrecisionExhausted { bits }) => {
            rep.note(&format!("precision exhausted at {bits} bits"));
            if rep.status != super::Status::Fail {
                rep.status = super::Status::Undecided;
            }
        }
        Err(e) => rep.fail(&e.to_string()),
    }
    rep
}

fn tent(ctx: &SuiteCtx) -> TentMap {
    TentMap::new(&ctx.param)
}

fn random_point<R: Rng>(f: &TentMap, rng: &mut R) -> Real {
    let (a, b) = (f.a().to_f64(), f.b().to_f64());
    f.param().from_f64(rng.gen_range(a..b))
}

fn ge(x: &Real, y: &Real) -> bool {
    matches!(x.cmp_real(y), Some(Ordering::Greater | Ordering::Equal))
}

/// Markov density when available, else the closed-form series.
fn pointwise_density(f: &TentMap) -> Result<Density> {
    density_markov(f).or_else(|_| density_series(f))
}

/// Sup-norm change at which grid iteration stops; the f64 noise floor is near 1e-12.
pub const GRID_TOL: f64 = 1e-10;

/// Markov density when available, else the grid; with the matching tolerance.
fn tolerance_density(f: &TentMap) -> Result<(Density, f64)> {
    match density_markov(f) {
        Ok(d) => Ok((d, 1e-6)),
        Err(_) => Ok((density_grid(f, 1 << 14, GRID_TOL, 5000)?, 1e-4)),
    }
}

fn same_thread(u: &Thread, v: &Thread, exact: bool) -> Result<(bool, f64)> {
    let gap = u.max_gap(v)?;
    if exact {
        Ok((u.exact_eq(v) == Some(true), gap))
    } else {
        Ok((gap <= f64::powi(2.0, -40), gap))
    }
}

// ---- arith ----

fn ball_tent(lambda: &Ball, x: &Ball, half: &Ball, one: &Ball) -> Ball {
    let left = lambda.mul(x);
    let right = lambda.mul(&one.sub(x));
    match x.cmp(half) {
        Some(Ordering::Less) | Some(Ordering::Equal) => left,
        Some(Ordering::Greater) => right,
        None => left.hull(&right),
    }
}

fn overlaps(p: &Ball, q: &Ball) -> bool {
    p.lo() <= q.hi() && q.lo() <= p.hi()
}

fn exact_vs_interval(ctx: &SuiteCtx) -> Report {
    run("exact_vs_interval", ctx, |rep, _| {
        let p = if ctx.param.is_exact() { ctx.param.clone() } else { Parameter::golden() };
        let Backend::AlgebraicRoot(field) = p.backend() else { unreachable!() };
        let f = TentMap::new(&p);
        let exact = f.critical_orbit(30);
        let mut ok = true;
        let mut worst = 0.0f64;
        for prec in [64u32, 128, 256] {
            let lam = field.lambda_ball(prec);
            let half = Ball::from_bounds(Dyadic::new(BigInt::one(), -1), Dyadic::new(BigInt::one(), -1), prec);
            let one = Ball::point(Dyadic::from_int(1), prec);
            let mut x = half.clone();
            for (n, e) in exact.iter().enumerate() {
                x = ball_tent(&lam, &x, &half, &one);
                let eb = e.to_ball(1024);
                ok &= overlaps(&x, &eb);
                let w = x.width().to_f64() * f64::powi(2.0, prec as i32 - (n as i32 + 1) - 8);
                worst = worst.max(w);
            }
        }
        rep.metric("orbit_length", 30.0);
        rep.metric("scaled_width_max", worst);
        Ok(ok)
    })
}

fn outward_rounding(ctx: &SuiteCtx) -> Report {
    run("outward_rounding", ctx, |rep, rng| {
        let mut bad = 0usize;
        for _ in 0..200 {
            let leaves: Vec<BigRational> =
                (0..8).map(|_| BigRational::new(rng.gen_range(-1000i64..1000).into(), rng.gen_range(1i64..997).into())).collect();
            let ops: Vec<u8> = (0..7).map(|_| rng.gen_range(0..4)).collect();
            let eval = |prec: u32| -> Option<Ball> {
                let lf = |q: &BigRational| Ball::from_bounds(Dyadic::from_rational(q, prec, false), Dyadic::from_rational(q, prec, true), prec);
                let mut acc = lf(&leaves[0]);
                for (q, op) in leaves[1..].iter().zip(&ops) {
                    let v = lf(q);
                    acc = match op {
                        0 => acc.add(&v),
                        1 => acc.sub(&v),
                        2 => acc.mul(&v),
                        _ => acc.div(&v)?,
                    };
                }
                Some(acc)
            };
            let prec = rng.gen_range(32u32..96);
            if let (Some(lo), Some(hi)) = (eval(prec), eval(10 * prec)) {
                if !(lo.lo() <= hi.lo() && hi.hi() <= lo.hi()) {
                    bad += 1;
                }
            }
        }
        rep.metric("expressions", 200.0);
        rep.metric("violations", bad as f64);
        Ok(bad == 0)
    })
}

// ---- tent ----

fn forward_invariance(ctx: &SuiteCtx) -> Report {
    run("forward_invariance", ctx, |rep, rng| {
        let f = tent(ctx);
        let mut bad = 0;
        for _ in 0..1000 {
            let y = f.eval(&random_point(&f, rng))?;
            if !(ge(&y, f.a()) && ge(f.b(), &y)) {
                bad += 1;
            }
        }
        rep.metric("violations", bad as f64);
        Ok(bad == 0)
    })
}

fn hat_involution(ctx: &SuiteCtx) -> Report {
    run("hat_involution", ctx, |rep, rng| {
        let f = tent(ctx);
        let (a, ah) = (f.a().to_f64(), f.a_hat().to_f64());
        let mut bad = 0;
        for _ in 0..1000 {
            let x = f.param().from_f64(rng.gen_range(a..ah));
            if f.side(&x) == SideClass::AtC {
                continue;
            }
            let h = f.hat(&x)?;
            let back = f.hat(&h)?;
            let same_image = f.eval(&h)?.cmp_real(&f.eval(&x)?);
            if back.cmp_real(&x) != Some(Ordering::Equal) || !matches!(same_image, Some(Ordering::Equal)) {
                if ctx.param.is_exact() || back.diff_bound(&x) > 1e-30 {
                    bad += 1;
                }
            }
        }
        rep.metric("violations", bad as f64);
        Ok(bad == 0)
    })
}

fn preimages_exact(ctx: &SuiteCtx) -> Report {
    run("preimages_exact", ctx, |rep, rng| {
        let f = tent(ctx);
        let (mut bad, mut worst) = (0, 0.0f64);
        for _ in 0..1000 {
            let y = random_point(&f, rng);
            for (x, _) in f.preimages(&y)? {
                let img = f.eval(&x)?;
                worst = worst.max(img.diff_bound(&y));
                let ok = match img.cmp_real(&y) {
                    Some(Ordering::Equal) => true,
                    None => !ctx.param.is_exact(),
                    Some(_) => false,
                };
                if !ok {
                    bad += 1;
                }
            }
        }
        rep.metric("max_gap", worst);
        rep.metric("violations", bad as f64);
        Ok(bad == 0)
    })
}

fn order_reflection(ctx: &SuiteCtx) -> Report {
    run("order_reflection", ctx, |rep, rng| {
        let f = tent(ctx);
        let (mut pairs, mut bad) = (0, 0);
        while pairs < 10_000 {
            let (x, y) = (random_point(&f, rng), random_point(&f, rng));
            let (x, y) = match x.cmp_real(&y) {
                Some(Ordering::Less) => (x, y),
                Some(Ordering::Greater) => (y, x),
                _ => continue,
            };
            let (Ok(wx), Ok(wy)) = (f.itinerary(&x, 40), f.itinerary(&y, 40)) else { continue };
            if wx.is_ambiguous() || wy.is_ambiguous() || wx.len() < 40 || wy.len() < 40 {
                continue;
            }
            pairs += 1;
            if unimodal_cmp(wx.symbols(), wy.symbols()) == UnimodalOrd::Greater {
                bad += 1;
            }
        }
        rep.metric("pairs", pairs as f64);
        rep.metric("violations", bad as f64);
        Ok(bad == 0)
    })
}

fn order_fa_p_ha(ctx: &SuiteCtx) -> Report {
    run("order_fa_p_ha", ctx, |rep, _| {
        let mut bad = 0;
        let lo = 2f64.sqrt();
        for k in 1..=100 {
            let v = lo + (2.0 - lo) * k as f64 / 101.0;
            let p = Parameter::parse(&format!("{v:.12}"))?;
            let f = TentMap::new(&p);
            let ok = f.f_a().cmp_real(f.p_fix()) == Some(Ordering::Less) && f.p_fix().cmp_real(f.a_hat()) == Some(Ordering::Less);
            if !ok {
                bad += 1;
            }
        }
        rep.metric("parameters", 100.0);
        rep.metric("violations", bad as f64);
        Ok(bad == 0)
    })
}

/// A depth-r thread over a random point with random preimage choices.
fn random_thread<R: Rng>(f: &TentMap, r: usize, rng: &mut R) -> Result<Thread> {
    let mut t = Thread::point(random_point(f, rng));
    for _ in 0..r {
        let pre = f.preimages(t.deepest())?;
        let (y, _) = pre[rng.gen_range(0..pre.len())].clone();
        t.push(y);
    }
    Ok(t)
}

fn two_preimages(f: &TentMap, x: &Real) -> bool {
    ge(x, f.f_a()) && x.cmp_real(f.b()) == Some(Ordering::Less)
}

fn many_choices(ctx: &SuiteCtx) -> Report {
    run("many_choices", ctx, |rep, rng| {
        let f = tent(ctx);
        let (mut min_count, mut max_window, mut bad) = (usize::MAX, 0usize, 0);
        for _ in 0..1000 {
            let t = random_thread(&f, 60, rng)?;
            let hits: Vec<bool> = t.coords().iter().map(|x| two_preimages(&f, x)).collect();
            let count = hits.iter().filter(|h| **h).count();
            let mut run_len = 0;
            let mut longest = 0;
            for h in &hits {
                run_len = if *h { 0 } else { run_len + 1 };
                longest = longest.max(run_len);
            }
            // Every window of `window` consecutive coordinates contains a hit.
            let window = longest + 1;
            max_window = max_window.max(window);
            min_count = min_count.min(count);
            if count < 5 || count < 61 / window {
                bad += 1;
            }
        }
        rep.metric("min_count", min_count as f64);
        rep.metric("max_window", max_window as f64);
        rep.metric("violations", bad as f64);
        Ok(bad == 0)
    })
}

fn perfect_like(ctx: &SuiteCtx) -> Report {
    run("perfect_like", ctx, |rep, rng| {
        // A coordinate below f(a) is followed by one in [â, b]; b is followed by c.
        const C: usize = 4;
        let f = tent(ctx);
        let mut bad = 0;
        for _ in 0..200 {
            let t = random_thread(&f, 60, rng)?;
            for r0 in 0..=(60 - C) {
                if !(r0 + 1..=r0 + C).any(|i| two_preimages(&f, &t.coords()[i])) {
                    bad += 1;
                }
            }
        }
        rep.metric("window", C as f64);
        rep.metric("violations", bad as f64);
        Ok(bad == 0)
    })
}

// ---- outside ----

/// The point of S at chart coordinate k/n, computed exactly.
fn chart_point(f: &TentMap, k: usize, n: usize) -> CirclePoint {
    let w = f.b() - f.a();
    if 2 * k < n {
        CirclePoint::lower(f, f.a() + &(&w * &f.param().ratio(2 * k as i64, n as i64)))
    } else {
        CirclePoint::upper(f, f.b() - &(&w * &f.param().ratio(2 * k as i64 - n as i64, n as i64)))
    }
}

fn degree_one_lift(ctx: &SuiteCtx) -> Report {
    run("degree_one_lift", ctx, |rep, _| {
        let f = tent(ctx);
        let n = 1000;
        let mut vals = Vec::with_capacity(2 * n + 1);
        for k in 0..=2 * n {
            let y = chart_point(&f, k % n, n);
            let w = (k / n) as f64;
            let (img, wrap) = b_step(&f, &y)?;
            vals.push(w + wrap as f64 + img.chart(&f));
        }
        let drops = vals.windows(2).filter(|v| v[1] < v[0] - 1e-12).count();
        let period = (0..=n).map(|k| (vals[k + n] - vals[k] - 1.0).abs()).fold(0.0, f64::max);
        rep.metric("grid", n as f64);
        rep.metric("decreases", drops as f64);
        rep.metric("period_gap", period);
        Ok(drops == 0 && period < 1e-12)
    })
}

fn random_domain_point<R: Rng>(f: &TentMap, rng: &mut R) -> CirclePoint {
    if rng.gen_bool(0.5) {
        CirclePoint::lower(f, random_point(f, rng))
    } else {
        let (ah, b) = (f.a_hat().to_f64(), f.b().to_f64());
        CirclePoint::upper(f, f.param().from_f64(rng.gen_range(ah..b)))
    }
}

fn b_inverse_round_trip(ctx: &SuiteCtx) -> Report {
    run("b_inverse_round_trip", ctx, |rep, rng| {
        let f = tent(ctx);
        let mut bad = 0;
        for _ in 0..1000 {
            let y = random_domain_point(&f, rng);
            let right = b_tilde(&f, &b_tilde_inverse(&f, &y)?)?;
            let left = b_tilde_inverse(&f, &b_tilde(&f, &y)?)?;
            let eq = |u: &CirclePoint, v: &CirclePoint| {
                u.sheet == v.sheet && (u.same_as(v) == Some(true) || (!ctx.param.is_exact() && u.x.diff_bound(&v.x) < 1e-30))
            };
            if !eq(&right, &y) || !eq(&left, &y) {
                bad += 1;
            }
        }
        rep.metric("round_trips", 1000.0);
        rep.metric("violations", bad as f64);
        Ok(bad == 0)
    })
}

/// f̂(e(y)) against e(B̃(y)) at depth r for `n` random y; returns (mismatches, largest gap).
pub fn model_action_check<R: Rng>(f: &TentMap, r: usize, n: usize, rng: &mut R) -> Result<(usize, f64)> {
    let (mut bad, mut worst) = (0, 0.0f64);
    for _ in 0..n {
        let y = random_domain_point(f, rng);
        let lhs = extreme_element(f, &y, r)?.fhat(f)?.truncate(r);
        let rhs = extreme_element(f, &b_tilde(f, &y)?, r)?;
        let (ok, gap) = same_thread(&lhs, &rhs, f.param().is_exact())?;
        worst = worst.max(gap);
        if !ok {
            bad += 1;
        }
    }
    Ok((bad, worst))
}

fn model_action(ctx: &SuiteCtx) -> Report {
    run("model_action", ctx, |rep, rng| {
        let f = tent(ctx);
        let (bad, worst) = model_action_check(&f, ctx.depth, 1000, rng)?;
        rep.metric("samples", 1000.0);
        rep.metric("max_gap", worst);
        rep.metric("violations", bad as f64);
        Ok(bad == 0)
    })
}

fn height_monotone(ctx: &SuiteCtx) -> Report {
    run("height_monotone", ctx, |rep, _| {
        let rows = sweep("1.46", "1.98", 50, 400, 256)?;
        let vals: Vec<f64> = rows.iter().filter_map(|r| Some(r.m? as f64 / r.n? as f64)).collect();
        let inc = vals.windows(2).filter(|w| w[1] > w[0]).count();
        let out = vals.iter().filter(|v| !(**v > 0.0 && **v < 0.5)).count();
        rep.metric("decided", vals.len() as f64);
        rep.metric("increases", inc as f64);
        rep.metric("out_of_range", out as f64);
        Ok(inc == 0 && out == 0 && !vals.is_empty())
    })
}

fn extreme_distinctness(ctx: &SuiteCtx) -> Report {
    run("extreme_distinctness", ctx, |rep, rng| {
        let f = tent(ctx);
        let mut bad = 0;
        for _ in 0..100 {
            let x = random_point(&f, rng);
            let lo = extreme_element(&f, &CirclePoint::lower(&f, x.clone()), 30)?;
            let hi = extreme_element(&f, &CirclePoint::upper(&f, x), 30)?;
            if lo.first_difference(&hi).is_none() {
                bad += 1;
            }
        }
        let glued = [f.a(), f.b()].iter().all(|e| {
            let l = extreme_element(&f, &CirclePoint::lower(&f, (*e).clone()), 30);
            let u = extreme_element(&f, &CirclePoint::upper(&f, (*e).clone()), 30);
            matches!((l, u), (Ok(l), Ok(u)) if l.exact_eq(&u) != Some(false))
        });
        rep.metric("violations", bad as f64);
        Ok(bad == 0 && glued)
    })
}

fn golden_ratio_conjugate() -> f64 {
    (3.0 - 5f64.sqrt()) / 2.0
}

/// Bisected parameters are exact rationals; endpoint hits closer than this are not coincidences.
const BISECTION_TOL_BITS: i64 = 1024;

/// A decimal λ whose height stays undecided for `n_min` iterations, by bisection towards the
/// parameter of rotation number (3 − √5)/2.
pub fn undecided_parameter(n_min: usize) -> Result<Parameter> {
    let target = golden_ratio_conjugate();
    let (mut lo, mut hi) = (BigRational::new(145.into(), 100.into()), BigRational::new(162.into(), 100.into()));
    let two = BigRational::from_integer(2.into());
    for _ in 0..4 * n_min + 200 {
        let mid = (&lo + &hi) / &two;
        let p = Parameter::decimal(mid.clone(), &format!("dec:{}", decimal_string(&mid)))?;
        let f = TentMap::new(&p);
        match height(&f, n_min, BISECTION_TOL_BITS)? {
            HeightResult::Undecided { .. } => return Ok(p),
            h => {
                if h.value().unwrap_or(0.0) > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
    }
    Err(Error::DepthExhausted("no undecided parameter found".into()))
}

/// Exact decimal expansion of a dyadic rational.
fn decimal_string(q: &BigRational) -> String {
    let mut num = q.numer().clone();
    let den = q.denom().clone();
    let int = &num / &den;
    num -= &int * &den;
    let mut s = format!("{int}.");
    let ten = BigInt::from(10);
    let mut digits = 0;
    while num != BigInt::from(0) && digits < 4000 {
        num *= &ten;
        s.push_str(&(&num / &den).to_string());
        num %= &den;
        digits += 1;
    }
    s
}

/// The parameter under test if its height is undecided after `n` iterations, else a bisected one with horizon 100.
fn undecided_setup(ctx: &SuiteCtx, n: usize) -> Result<(TentMap, usize)> {
    let f = tent(ctx);
    if matches!(height(&f, n, DEFAULT_HEIGHT_TOL_BITS)?, HeightResult::Undecided { .. }) {
        return Ok((f, n));
    }
    Ok((TentMap::new(&undecided_parameter(100)?), 100))
}

fn orbit_avoidance(ctx: &SuiteCtx) -> Report {
    run("orbit_avoidance", ctx, |rep, _| {
        let (f, n) = undecided_setup(ctx, 10_000)?;
        rep.note(&format!("λ = {}", f.param().spec()));
        rep.metric("horizon", n as f64);
        match cantor_approx(&f, n) {
            Ok(c) => {
                rep.metric("certified_steps", c.certified_steps as f64);
                Ok(c.complete())
            }
            Err(Error::EnteredGamma(j)) => {
                rep.metric("entered_at", j as f64);
                Ok(false)
            }
            Err(e) => Err(e),
        }
    })
}

/// Whether the forward B-orbit of y avoids γ̊ for n steps.
fn avoids_plateau(f: &TentMap, y: &CirclePoint, n: usize) -> Result<bool> {
    let mut z = y.clone();
    for _ in 0..n {
        if in_gamma_interior(f, &z)? {
            return Ok(false);
        }
        z = b_map(f, &z)?;
    }
    Ok(true)
}

fn irrat_key(ctx: &SuiteCtx) -> Report {
    run("irrat_key", ctx, |rep, rng| {
        let (f, n) = undecided_setup(ctx, 10_000)?;
        rep.note(&format!("λ = {}", f.param().spec()));
        let (mut both, mut one) = (0, 0);
        for _ in 0..100 {
            let x = random_point(&f, rng);
            let u = avoids_plateau(&f, &CirclePoint::upper(&f, x.clone()), n)?;
            let l = avoids_plateau(&f, &CirclePoint::lower(&f, x), n)?;
            if u && l {
                both += 1;
            } else if u || l {
                one += 1;
            }
        }
        rep.metric("horizon", n as f64);
        rep.metric("both_avoid", both as f64);
        rep.metric("one_avoids", one as f64);
        Ok(both == 0)
    })
}

// ---- ilim ----

fn capped(ctx: &SuiteCtx, cap: usize) -> usize {
    ctx.depth.clamp(1, cap)
}

fn fiber_reconstruct(ctx: &SuiteCtx) -> Report {
    run("fiber_reconstruct", ctx, |rep, rng| {
        let f = tent(ctx);
        let r = capped(ctx, 12);
        let mut bad = 0;
        for _ in 0..50 {
            let x = random_point(&f, rng);
            let fib = fiber(&f, &x, r)?;
            for (t, w) in fib.threads.iter().zip(&fib.branch_words) {
                if reconstruct(&f, &x, w)?.exact_eq(t) == Some(false) || t.branch_word(&f)? != *w {
                    bad += 1;
                }
            }
        }
        rep.metric("depth", r as f64);
        rep.metric("violations", bad as f64);
        Ok(bad == 0)
    })
}

fn fiber_extremes(ctx: &SuiteCtx) -> Report {
    run("fiber_extremes", ctx, |rep, rng| {
        let f = tent(ctx);
        let r = capped(ctx, 12);
        let mut bad = 0;
        for _ in 0..100 {
            let x = random_point(&f, rng);
            let fib = fiber(&f, &x, r)?;
            let (lo, hi) = fib.extremes().ok_or_else(|| Error::Inconsistent("empty fiber".into()))?;
            let el = extreme_element(&f, &CirclePoint::lower(&f, x.clone()), r)?;
            let eu = extreme_element(&f, &CirclePoint::upper(&f, x), r)?;
            if lo.exact_eq(&el) == Some(false) || hi.exact_eq(&eu) == Some(false) {
                bad += 1;
            }
        }
        rep.metric("violations", bad as f64);
        Ok(bad == 0)
    })
}

fn action_on_extremes(ctx: &SuiteCtx) -> Report {
    run("action_on_extremes", ctx, |rep, rng| {
        let f = tent(ctx);
        let r = ctx.depth;
        let exact = ctx.param.is_exact();
        let (mut bad, mut worst, mut case_a) = (0, 0.0f64, 0);
        for _ in 0..200 {
            let x = random_point(&f, rng);
            let x1 = f.right_preimage(&x);
            let e = |y: CirclePoint, d: usize| extreme_element(&f, &y, d);
            let (want_l, want_u) = if x.cmp_real(f.f_a()) == Some(Ordering::Less) {
                case_a += 1;
                (e(CirclePoint::upper(&f, x1.clone()), r - 1)?, e(CirclePoint::lower(&f, x1), r - 1)?)
            } else {
                let x0 = f.left_preimage(&x);
                (e(CirclePoint::lower(&f, x0), r - 1)?, e(CirclePoint::lower(&f, x1), r - 1)?)
            };
            for (got, want) in [(e(CirclePoint::lower(&f, x.clone()), r)?, want_l), (e(CirclePoint::upper(&f, x.clone()), r)?, want_u)] {
                let (ok, gap) = same_thread(&got, &want.fhat(&f)?, exact)?;
                worst = worst.max(gap);
                if !ok {
                    bad += 1;
                }
            }
        }
        rep.metric("case_a", case_a as f64);
        rep.metric("max_gap", worst);
        rep.metric("violations", bad as f64);
        Ok(bad == 0)
    })
}

fn flat_arc_word(ctx: &SuiteCtx) -> Report {
    run("flat_arc_word", ctx, |rep, rng| {
        let f = tent(ctx);
        let r = capped(ctx, 16);
        let (mut bad, mut arcs) = (0, 0);
        while arcs < 50 {
            let t = random_thread(&f, r, rng)?;
            if t.critical_index(&f).is_some() {
                continue;
            }
            let arc = flat_arc_through(&f, &t)?;
            arcs += 1;
            for k in 1..=10 {
                let z = &arc.j_lo + &(&arc.width() * &f.param().ratio(k, 11));
                match reconstruct(&f, &z, &arc.branch_word) {
                    Ok(th) if th.branch_word(&f)? == arc.branch_word => {}
                    _ => bad += 1,
                }
            }
        }
        rep.metric("arcs", arcs as f64);
        rep.metric("violations", bad as f64);
        Ok(bad == 0)
    })
}

// ---- measure ----

fn pf_residual(ctx: &SuiteCtx) -> Report {
    run("pf_residual", ctx, |rep, rng| {
        let f = tent(ctx);
        let (d, _) = tolerance_density(&f)?;
        let pc: Vec<f64> = f.critical_orbit(64).iter().map(Real::to_f64).collect();
        let mut worst = 0.0f64;
        let mut n = 0;
        while n < 1000 {
            let x = random_point(&f, rng);
            let xf = x.to_f64();
            if pc.iter().any(|p| (p - xf).abs() < 1e-9) {
                continue;
            }
            n += 1;
            worst = worst.max((&d.eval(&x) - &d.transfer_at(&x)?).to_f64().abs());
        }
        let tol = 1e-8;
        rep.metric("residual", worst);
        rep.metric("tol", tol);
        Ok(if d.is_exact() { worst == 0.0 } else { worst <= 10.0 * tol })
    })
}

fn random_cylinder<R: Rng>(f: &TentMap, r: usize, rng: &mut R) -> Result<Cylinder> {
    Ok(Cylinder::new(random_thread(f, r, rng)?))
}

fn cylinder_additivity(ctx: &SuiteCtx) -> Report {
    run("cylinder_additivity", ctx, |rep, rng| {
        let f = tent(ctx);
        let d = pointwise_density(&f)?;
        let tol = if d.is_exact() { 0.0 } else { 1e-9 };
        let (mut worst, mut nodes) = (0.0f64, 0);
        for _ in 0..20 {
            let mut t = Thread::point(random_point(&f, rng));
            for _ in 0..15 {
                let parent = alpha_cylinder(&d, &Cylinder::new(t.clone())).value;
                let pre = f.preimages(t.deepest())?;
                let mut sum = f.param().int(0);
                for (y, _) in &pre {
                    let mut c = t.clone();
                    c.push(y.clone());
                    sum = &sum + &alpha_cylinder(&d, &Cylinder::new(c)).value;
                }
                worst = worst.max((&parent - &sum).to_f64().abs());
                nodes += 1;
                let (y, _) = pre[rng.gen_range(0..pre.len())].clone();
                t.push(y);
            }
        }
        rep.metric("nodes", nodes as f64);
        rep.metric("max_gap", worst);
        Ok(worst <= tol)
    })
}

fn alpha_scaling(ctx: &SuiteCtx) -> Report {
    run("alpha_scaling", ctx, |rep, rng| {
        let f = tent(ctx);
        let d = pointwise_density(&f)?;
        let mut bad = 0;
        for _ in 0..10_000 {
            let r = rng.gen_range(0..=12);
            let c = random_cylinder(&f, r, rng)?;
            let img = Cylinder::new(c.thread.fhat(&f)?);
            let lhs = alpha_cylinder(&d, &img).value;
            let rhs = &alpha_cylinder(&d, &c).value * f.inv_lambda();
            let ok = match lhs.cmp_real(&rhs) {
                Some(Ordering::Equal) => true,
                None => !d.is_exact() && lhs.diff_bound(&rhs) == 0.0,
                _ => false,
            };
            if !ok {
                bad += 1;
            }
        }
        rep.metric("cylinders", 10_000.0);
        rep.metric("violations", bad as f64);
        Ok(bad == 0)
    })
}

/// A random 0-box K of width |I|/200 at depth r that passes the Y check.
fn random_box<R: Rng>(f: &TentMap, r: usize, rng: &mut R) -> Result<(Real, Real)> {
    let (a, b) = (f.a().to_f64(), f.b().to_f64());
    let w = (b - a) / 200.0;
    for _ in 0..50 {
        let lo = rng.gen_range(a + w..b - 2.0 * w);
        let (klo, khi) = (f.param().from_f64(lo), f.param().from_f64(lo + w));
        match zero_box(f, &klo, &khi, r) {
            Ok(_) => return Ok((klo, khi)),
            Err(Error::NotInY { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NotInY { index: 0, cap: crate::tent::PC_CAP })
}

fn holonomy(ctx: &SuiteCtx) -> Report {
    run("holonomy", ctx, |rep, rng| {
        let f = tent(ctx);
        let (d, tol) = tolerance_density(&f)?;
        let r = capped(ctx, 10);
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let (klo, khi) = random_box(&f, r, rng)?;
            let bx = zero_box(&f, &klo, &khi, r)?;
            let w = &khi - &klo;
            let x = &klo + &(&w * &f.param().ratio(rng.gen_range(1..100), 100));
            let y = &klo + &(&w * &f.param().ratio(rng.gen_range(1..100), 100));
            let g = (&alpha_of_box(&d, &bx, &x)?.value - &alpha_of_box(&d, &bx, &y)?.value).to_f64().abs();
            worst = worst.max(g);
        }
        rep.metric("boxes", 50.0);
        rep.metric("max_gap", worst);
        rep.metric("tol", tol);
        Ok(worst <= tol)
    })
}

fn grid_vs_markov(ctx: &SuiteCtx) -> Report {
    run("grid_vs_markov", ctx, |rep, _| {
        let mut worst = 0.0f64;
        for spec in MARKOV_PARAMETERS {
            let f = TentMap::new(&Parameter::parse(spec)?);
            let m = density_markov(&f)?;
            let g = density_grid(&f, 1 << 12, GRID_TOL, 5000)?;
            worst = worst.max(g.l1_distance(&m, 1 << 16));
        }
        rep.metric("parameters", MARKOV_PARAMETERS.len() as f64);
        rep.metric("max_l1", worst);
        Ok(worst <= 0.02)
    })
}

// ---- glue ----

fn tent_type(f: &TentMap) -> TentType {
    classify(f, 1000).map(|c| c.tent_type).unwrap_or(TentType::IrrationalOrUndecided)
}

fn g_coordinate(ctx: &SuiteCtx) -> Report {
    run("g_coordinate", ctx, |rep, rng| {
        let f = tent(ctx);
        let d = pointwise_density(&f)?;
        let tt = tent_type(&f);
        let r = capped(ctx, 10);
        let (mut bad, mut worst, mut done) = (0, 0.0f64, 0);
        while done < 20 {
            let x = random_point(&f, rng);
            let Ok(xp) = f.eval(&x) else { continue };
            if in_grand_orbit(&f, &x).is_some() || in_grand_orbit(&f, &xp).is_some() {
                continue;
            }
            done += 1;
            let src = fiber_arc(&f, &d, tt, &x, r)?;
            let dst = fiber_arc(&f, &d, tt, &xp, r + 1)?;
            let mut idx = Vec::with_capacity(src.points.len());
            for p in &src.points {
                let img = p.thread.fhat(&f)?;
                match dst.points.iter().position(|q| q.thread.exact_eq(&img) != Some(false)) {
                    Some(k) => {
                        let ws = p.t_collapsed.1 - p.t_collapsed.0;
                        let wd = dst.points[k].t_collapsed.1 - dst.points[k].t_collapsed.0;
                        worst = worst.max((wd - ws / f.param().lambda_f64()).abs() / ws.max(f64::MIN_POSITIVE));
                        idx.push(k);
                    }
                    None => bad += 1,
                }
            }
            let up = idx.windows(2).all(|w| w[0] < w[1]);
            let down = idx.windows(2).all(|w| w[0] > w[1]);
            if !(up || down) {
                bad += 1;
            }
        }
        rep.metric("pairs", done as f64);
        rep.metric("max_relative_scaling_gap", worst);
        rep.metric("violations", bad as f64);
        Ok(bad == 0 && worst <= 1e-12)
    })
}

fn extremes_not_identified(ctx: &SuiteCtx) -> Report {
    run("extremes_not_identified", ctx, |rep, rng| {
        let f = tent(ctx);
        let d = pointwise_density(&f)?;
        let tt = tent_type(&f);
        let r = capped(ctx, 12);
        let (mut bad, mut done, mut pairs) = (0, 0, 0);
        while done < 100 {
            let x = random_point(&f, rng);
            if in_grand_orbit(&f, &x).is_some() {
                continue;
            }
            done += 1;
            let arc = fiber_arc(&f, &d, tt, &x, r)?;
            let last = arc.points.len() - 1;
            pairs += arc.identified_pairs.len();
            if arc.identified_pairs.iter().any(|&(i, j)| i == 0 || j == last) {
                bad += 1;
            }
        }
        rep.metric("identified_pairs", pairs as f64);
        rep.metric("violations", bad as f64);
        Ok(bad == 0)
    })
}

fn spike_halving(ctx: &SuiteCtx) -> Report {
    run("spike_halving", ctx, |rep, _| {
        let f = tent(ctx);
        let r = capped(ctx, 16);
        let arcs = spike_arcs(&f, r)?;
        let half = spike_measure(&f, &arcs).ok_or_else(|| Error::Inconsistent("empty spike".into()))?;
        let len = f.a_hat() - f.a();
        let gap = (&(&half + &half) - &len).to_f64().abs();
        let mut bad = 0;
        for w in arcs.windows(2) {
            if w[0].j_hi.cmp_real(&w[1].j_lo) != Some(Ordering::Equal) {
                bad += 1;
            }
        }
        for arc in &arcs {
            let mid = &(&arc.j_lo + &arc.j_hi) * &f.param().ratio(1, 2);
            let e = extreme_element(&f, &CirclePoint::upper(&f, mid.clone()), r)?;
            if reconstruct(&f, &mid, &arc.branch_word)?.exact_eq(&e) == Some(false) {
                bad += 1;
            }
        }
        rep.metric("pieces", arcs.len() as f64);
        rep.metric("nu_u", half.to_f64());
        rep.metric("half_length_gap", gap);
        rep.metric("violations", bad as f64);
        Ok(bad == 0 && gap <= 1e-15)
    })
}

// ---- verify ----

fn tartan_setup<R: Rng>(ctx: &SuiteCtx, rng: &mut R) -> Result<(TentMap, Density, f64, TartanApprox)> {
    let f = tent(ctx);
    let (d, tol) = tolerance_density(&f)?;
    let r = capped(ctx, 12).max(8);
    let (klo, khi) = random_box(&f, r, rng)?;
    let t = build_tartan(&f, &klo, &khi, r, 8)?;
    Ok((f, d, tol, t))
}

fn tartan_compatibility(ctx: &SuiteCtx) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ stable_hash("tartan_compatibility"));
    match tartan_setup(ctx, &mut rng) {
        Ok((_, d, tol, t)) => check_compatibility(&t, &d, tol, 32, &mut rng, &ctx.provenance()),
        Err(e) => run("tartan_compatibility", ctx, |_, _| Err(e)),
    }
}

fn tartan_scaling(ctx: &SuiteCtx) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ stable_hash("tartan_scaling"));
    match tartan_setup(ctx, &mut rng) {
        Ok((_, d, _, t)) => check_scaling(&t, &d, 3, &ctx.provenance()),
        Err(e) => run("tartan_scaling", ctx, |_, _| Err(e)),
    }
}

fn regularity_shadow(ctx: &SuiteCtx) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ stable_hash("regularity_shadow"));
    match tartan_setup(ctx, &mut rng) {
        Ok((_, d, _, t)) => check_regularity(&t, &d, &ctx.provenance()),
        Err(e) => run("regularity_shadow", ctx, |_, _| Err(e)),
    }
}

fn tameness(ctx: &SuiteCtx) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ stable_hash("tameness"));
    let f = tent(ctx);
    match tolerance_density(&f) {
        Ok((d, _)) => check_tameness(&d, 10, capped(ctx, 10), &mut rng, &ctx.provenance()),
        Err(e) => run("tameness", ctx, |_, _| Err(e)),
    }
}

#[allow(dead_code)]
fn unused(_: Sheet, _: Word, _: &dyn Fn() -> Result<(CirclePoint, i64)>) {
    let _ = b_tilde_step;
}
