use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use tentlab_core::arith::{Parameter, Real};
use tentlab_core::glue::{cantor_approx, fiber_arc, in_grand_orbit};
use tentlab_core::ilim::{consecutive_pairs, fiber, zero_box};
use tentlab_core::measure::{
    birkhoff_histogram, density_grid, density_markov, density_series, disintegration_check, Density, DensityKind,
};
use tentlab_core::outside::{
    classify, extreme_element, rotation_bracket, sweep, CirclePoint, HeightKind, HeightResult, TentType,
};
use tentlab_core::tent::{Confidence, PostCritical, TentMap};
use tentlab_core::verify::{build_tartan, check_compatibility, check_scaling, model_action_check, run_suite, Provenance};
use tentlab_core::Error;

const GOLDEN: &str = "poly:\"-1,-1,1\":interval:\"1.6,1.7\"";
const SEED: u64 = 7;

fn tent(spec: &str) -> TentMap {
    TentMap::new(&Parameter::parse(spec).unwrap())
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED.wrapping_mul(1_000_003) ^ tag)
}

struct Outcome {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn golden_benchmark() -> Outcome {
    let t = Instant::now();
    let f = tent(GOLDEN);
    let c = classify(&f, 1000).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let height_ok = matches!(
        c.height,
        HeightResult::Rational { m: 1, n: 3, kind: HeightKind::EndpointMinus, confidence: Confidence::Exact }
    );
    let prof_ok = c.profile.kind == PostCritical::PeriodicC { period: 3 } && c.profile.confidence == Confidence::Exact;
    Outcome {
        id: 1,
        name: "golden-ratio benchmark",
        pass: c.tent_type == TentType::RationalEndpointMinus && height_ok && prof_ok && secs < 1.0,
        detail: format!("{:?} {:?} {:?} in {secs:.3}s", c.tent_type, c.height, c.profile),
    }
}

fn height_staircase() -> Outcome {
    let t = Instant::now();
    let rows = sweep("1.45", "1.99", 500, 400, 256).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let mut ok = true;
    let mut why = String::new();
    for w in rows.windows(2) {
        if w[1].bracket_lo > w[0].bracket_hi {
            ok = false;
            why = format!("increase at {} -> {}", w[0].lambda, w[1].lambda);
            break;
        }
    }
    if rows.iter().any(|r| r.bracket_lo <= 0.0 || r.bracket_hi >= 0.5) {
        ok = false;
        why = "height outside (0, 1/2)".into();
    }
    let third: Vec<f64> = rows
        .iter()
        .filter(|r| r.m == Some(1) && r.n == Some(3))
        .map(|r| r.lambda.parse::<f64>().unwrap())
        .collect();
    let (plo, phi) = third.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
    let contiguous = rows
        .iter()
        .filter(|r| {
            let l: f64 = r.lambda.parse().unwrap();
            l >= plo && l <= phi
        })
        .all(|r| r.m == Some(1) && r.n == Some(3));
    let plateau = !third.is_empty() && contiguous && phi - plo >= 0.02 && plo <= 1.62 && 1.62 <= phi;
    let undecided = rows.iter().filter(|r| r.m.is_none()).count();
    Outcome {
        id: 2,
        name: "height staircase",
        pass: ok && plateau && secs < 30.0,
        detail: format!("plateau 1/3 = [{plo}, {phi}], undecided {undecided}, {why} in {secs:.2}s"),
    }
}

fn model_action_suite() -> Outcome {
    let params = [GOLDEN, "poly:-1,-1,-1,1:interval:1.8,1.9", "1.62", "1.83", "1.55"];
    let mut pass = true;
    let mut detail = Vec::new();
    for (i, spec) in params.iter().enumerate() {
        let f = tent(spec);
        match model_action_check(&f, 20, 1000, &mut rng(i as u64)) {
            Ok((bad, gap)) => {
                let ok = bad == 0 && (f.param().is_exact() && gap == 0.0 || gap <= f64::powi(2.0, -40));
                pass &= ok;
                detail.push(format!("{spec}: {bad} mismatches, max gap {gap:.1e}"));
            }
            Err(e) => {
                pass = false;
                detail.push(format!("{spec}: {e}"));
            }
        }
    }
    Outcome { id: 3, name: "model action suite", pass, detail: detail.join("; ") }
}

fn suite_passes(name: &str, lambda: &str, depth: usize) -> (bool, String) {
    match run_suite(&[name], lambda, SEED, depth) {
        Ok(reps) => {
            let r = &reps[0];
            (r.passed(), format!("{name}@{lambda} {:?} {:?}", r.status, r.metrics))
        }
        Err(e) => (false, format!("{name}@{lambda}: {e}")),
    }
}

/// Least-squares slope of log2(gap) against log2(cells).
fn convergence_order(cells: &[usize], gaps: &[f64]) -> f64 {
    let xs: Vec<f64> = cells.iter().map(|c| (*c as f64).log2()).collect();
    let ys: Vec<f64> = gaps.iter().map(|g| g.log2()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    -cov / var
}

fn measure_identities() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();

    let g = tent(GOLDEN);
    let markov = density_markov(&g).unwrap();
    let mut worst = 0.0f64;
    let mut exact = true;
    let mut r = rng(40);
    for _ in 0..1000 {
        let x = g.param().from_f64(r.gen_range(g.a().to_f64()..g.b().to_f64()));
        let t = markov.transfer_at(&x).unwrap();
        let diff = &markov.eval(&x) - &t;
        worst = worst.max(diff.to_f64().abs());
        exact &= diff.cmp_real(&g.param().int(0)) == Some(std::cmp::Ordering::Equal);
    }
    pass &= exact;
    detail.push(format!("(i) markov residual exact={exact} ({worst:.1e})"));

    let dec = tent("1.62");
    match density_grid(&dec, 1 << 14, tentlab_core::verify::GRID_TOL, 5000) {
        Ok(grid) => {
            let DensityKind::Grid { residual, .. } = grid.kind else { unreachable!() };
            pass &= residual <= 1e-8;
            detail.push(format!("grid residual {residual:.1e}"));
        }
        Err(e) => {
            pass = false;
            detail.push(format!("grid: {e}"));
        }
    }

    let (ok, d) = suite_passes("alpha_scaling", GOLDEN, 20);
    pass &= ok;
    detail.push(format!("(ii) {d}"));
    for lambda in [GOLDEN, "1.62"] {
        let (ok, d) = suite_passes("holonomy", lambda, 10);
        pass &= ok;
        detail.push(format!("(iii) {d}"));
    }

    let (a, b) = markov.domain();
    let mut r = rng(44);
    let pairs: Vec<(f64, f64, usize)> = (0..20)
        .map(|_| {
            let lo = r.gen_range(a..b);
            (lo, r.gen_range(lo..b), r.gen_range(0..=6))
        })
        .collect();
    let cells = [1usize << 12, 1 << 13, 1 << 14, 1 << 15, 1 << 16];
    let gaps: Vec<Vec<f64>> =
        cells.iter().map(|&n| pairs.iter().map(|&(lo, hi, r)| disintegration_check(&markov, r, (lo, hi), n).gap).collect()).collect();
    let worst12 = gaps[0].iter().cloned().fold(0.0, f64::max);
    let sums: Vec<f64> = gaps.iter().map(|g| g.iter().sum()).collect();
    let order = convergence_order(&cells, &sums);
    pass &= worst12 <= 1e-3 && order >= 0.8;
    detail.push(format!("(iv) max gap {worst12:.1e} at 2^12 cells, order {order:.2}"));

    Outcome { id: 4, name: "measure identities", pass, detail: detail.join("; ") }
}

/// An admissible 0-box of width |I|/100 at depth r, scanning left to right from the middle.
fn admissible_box(f: &TentMap, r: usize) -> Option<(Real, Real)> {
    let (a, b) = (f.a().to_f64(), f.b().to_f64());
    let w = (b - a) / 100.0;
    (0..50).find_map(|k| {
        let lo = 0.5 * (a + b) + k as f64 * w;
        let (klo, khi) = (f.param().from_f64(lo), f.param().from_f64(lo + w));
        zero_box(f, &klo, &khi, r).ok().map(|_| (klo, khi))
    })
}

fn tartan_compatibility() -> Outcome {
    let t0 = Instant::now();
    let f = tent(GOLDEN);
    let d = density_markov(&f).unwrap();
    let prov = Provenance { lambda: GOLDEN.into(), seed: SEED, depth: 12 };
    let Some((klo, khi)) = admissible_box(&f, 12) else {
        return Outcome { id: 5, name: "tartan compatibility", pass: false, detail: "no admissible box".into() };
    };
    let t = match build_tartan(&f, &klo, &khi, 12, 8) {
        Ok(t) => t,
        Err(e) => return Outcome { id: 5, name: "tartan compatibility", pass: false, detail: e.to_string() },
    };
    let comp = check_compatibility(&t, &d, 1e-6, 32, &mut rng(50), &prov);
    let scal = check_scaling(&t, &d, 3, &prov);
    let secs = t0.elapsed().as_secs_f64();
    Outcome {
        id: 5,
        name: "tartan compatibility",
        pass: comp.passed() && scal.passed() && secs < 60.0,
        detail: format!(
            "K = [{:.4}, {:.4}], compatibility {:?} {:?}, scaling {:?} {:?} in {secs:.1}s",
            klo.to_f64(),
            khi.to_f64(),
            comp.status,
            comp.metrics,
            scal.status,
            scal.metrics
        ),
    }
}

fn fiber_arc_at(spec: &str, d: &Density, r: usize, tag: u64) -> (bool, String) {
    let f = tent(spec);
    let tt = classify(&f, 1000).map(|c| c.tent_type).unwrap_or(TentType::IrrationalOrUndecided);
    let mut rg = rng(tag);
    let (mut bad_ends, mut bad_pairs, mut bad_extreme, mut worst_len, mut pairs) = (0, 0, 0, 0.0f64, 0);
    let mut done = 0;
    while done < 100 {
        let x = f.param().from_f64(rg.gen_range(f.a().to_f64()..f.b().to_f64()));
        if in_grand_orbit(&f, &x).is_some() {
            continue;
        }
        done += 1;
        let arc = match fiber_arc(&f, d, tt, &x, r) {
            Ok(a) => a,
            Err(e) => return (false, format!("{spec}: {e}")),
        };
        let lo = extreme_element(&f, &CirclePoint::lower(&f, x.clone()), r).unwrap();
        let hi = extreme_element(&f, &CirclePoint::upper(&f, x.clone()), r).unwrap();
        let (e0, e1) = arc.endpoints().unwrap();
        if e0.exact_eq(&lo) == Some(false) || e1.exact_eq(&hi) == Some(false) {
            bad_ends += 1;
        }
        let tail = consecutive_pairs(&f, &fiber(&f, &x, r).unwrap()).unwrap();
        if tail != arc.identified_pairs {
            bad_pairs += 1;
        }
        pairs += tail.len();
        let last = arc.points.len() - 1;
        if arc.identified_pairs.iter().any(|&(i, j)| i == 0 || j == last) {
            bad_extreme += 1;
        }
        worst_len = worst_len.max((arc.total_length - d.eval_f64(x.to_f64())).abs());
    }
    let ok = bad_ends == 0 && bad_pairs == 0 && bad_extreme == 0 && worst_len <= 1e-8;
    (
        ok,
        format!(
            "{spec}: endpoint mismatches {bad_ends}, pair mismatches {bad_pairs} ({pairs} pairs), extreme identified {bad_extreme}, length gap {worst_len:.1e}"
        ),
    )
}

fn fiber_arc_structure() -> Outcome {
    let g = tent(GOLDEN);
    let dec = tent("1.62");
    let (ok1, d1) = fiber_arc_at(GOLDEN, &density_markov(&g).unwrap(), 12, 60);
    let (ok2, d2) = fiber_arc_at("1.62", &density_series(&dec).unwrap(), 12, 61);
    Outcome { id: 6, name: "fiber-arc structure", pass: ok1 && ok2, detail: format!("{d1}; {d2}") }
}

fn density_cross_validation() -> Outcome {
    let g = tent(GOLDEN);
    let grid = density_grid(&g, 1 << 14, tentlab_core::verify::GRID_TOL, 5000).unwrap();
    let l1_markov = grid.l1_distance(&density_markov(&g).unwrap(), 1 << 16);

    let f = tent("1.9");
    let grid = density_grid(&f, 1 << 14, tentlab_core::verify::GRID_TOL, 5000).unwrap();
    let bins = 1 << 10;
    let hist = birkhoff_histogram(&f, 0.3141592653589793, 10_000_000, bins);
    let (a, b) = grid.domain();
    let h = (b - a) / bins as f64;
    let l1_birkhoff: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let lo = a + i as f64 * h;
            (grid.integral_f64(lo, lo + h) - v * h).abs()
        })
        .sum();
    Outcome {
        id: 7,
        name: "density cross-validation",
        pass: l1_markov <= 0.02 && l1_birkhoff <= 0.05,
        detail: format!("L1(grid, markov) = {l1_markov:.2e} at golden, L1(grid, birkhoff) = {l1_birkhoff:.2e} at 1.9"),
    }
}

fn irrational_probe() -> Outcome {
    let f = tent("dec:\"1.7548776662\"");
    let horizon = 10_000;
    let entry = match cantor_approx(&f, horizon) {
        Ok(c) => (true, format!("no entry, {} of {horizon} steps certified", c.certified_steps)),
        Err(Error::EnteredGamma(j)) => (true, format!("EnteredGamma({j})")),
        Err(e) => (false, e.to_string()),
    };
    let (lo, hi) = rotation_bracket(&f, horizon).unwrap();
    let width = hi - lo;
    Outcome {
        id: 8,
        name: "irrational-case probe",
        pass: entry.0 && width <= 10.0 / horizon as f64,
        detail: format!("{}, rotation bracket [{lo:.6}, {hi:.6}] width {width:.2e}", entry.1),
    }
}

/// The CLI binary next to this test's target directory.
fn cli_binary() -> Option<std::path::PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?.parent()?;
    let bin = dir.join(format!("tentlab{}", std::env::consts::EXE_SUFFIX));
    bin.exists().then_some(bin)
}

/// Runs one CLI invocation in a fresh directory and returns every file it wrote plus stdout.
fn cli_outputs(bin: &std::path::Path, args: &[&str], threads: usize, tag: &str) -> Result<Vec<(String, Vec<u8>)>, String> {
    let dir = std::env::temp_dir().join(format!("tentlab-det-{}-{tag}-{threads}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let out = std::process::Command::new(bin)
        .args(args)
        .arg("--threads")
        .arg(threads.to_string())
        .current_dir(&dir)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    let mut files = vec![("stdout".to_string(), out.stdout)];
    let mut names: Vec<_> = std::fs::read_dir(&dir).map_err(|e| e.to_string())?.filter_map(|e| e.ok()).collect();
    names.sort_by_key(|e| e.file_name());
    for e in names {
        files.push((e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).map_err(|e| e.to_string())?));
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(files)
}

fn determinism() -> Outcome {
    let Some(bin) = cli_binary() else {
        return Outcome { id: 9, name: "determinism", pass: false, detail: "tentlab binary not built".into() };
    };
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("height", vec!["height", "--json"]),
        ("classify", vec!["classify", "--lambda", "dec:\"1.62\"", "--json"]),
        ("kneading", vec!["kneading", "--json"]),
        ("sweep", vec!["sweep", "--from", "1.45", "--to", "1.99", "--steps", "100", "--out", "heights.csv", "--json"]),
        ("fiber", vec!["fiber", "--x", "0.61", "--depth", "10", "--json"]),
        ("arc", vec!["arc", "--lambda", "1.62", "--x", "0.61", "--depth", "10", "--json"]),
        ("chart", vec!["chart", "--K", "0.70,0.71", "--depth", "10", "--out", "patch.csv"]),
        ("density", vec!["density", "--lambda", "1.9", "--grid", "4096", "--out", "phi.csv", "--json"]),
        ("streamline", vec!["streamline", "--lambda", "1.83", "--seed-x", "0.7", "--branch-word", "1011010110", "--steps", "6", "--svg", "s.svg", "--json"]),
        ("verify", vec!["verify", "model_action", "cylinder_additivity", "fiber_extremes", "spike_halving", "--depth", "12", "--seed", "7", "--json"]),
        ("tentgraph", vec!["render", "tentgraph", "--out", "t.svg"]),
        ("outsidegraph", vec!["render", "outsidegraph", "--out", "o.svg"]),
        ("staircase", vec!["render", "staircase", "--sweep-steps", "100", "--out", "st.svg"]),
        ("fiberarc", vec!["render", "fiberarc", "--x", "0.61", "--depth", "10", "--out", "fa.svg"]),
        ("streamlines", vec!["render", "streamlines", "--out", "sl.svg"]),
        ("chartsvg", vec!["render", "chart", "--depth", "10", "--out", "c.svg"]),
    ];
    let (mut files, mut diffs, mut errors) = (0, Vec::new(), Vec::new());
    for (tag, args) in &runs {
        let outs: Vec<_> = [1, 4, 16].iter().map(|&t| cli_outputs(&bin, args, t, tag)).collect();
        match (&outs[0], &outs[1], &outs[2]) {
            (Ok(a), Ok(b), Ok(c)) => {
                files += a.len();
                if a != b || a != c {
                    diffs.push(tag.to_string());
                }
            }
            _ => errors.extend(outs.iter().filter_map(|o| o.as_ref().err().cloned())),
        }
    }
    Outcome {
        id: 9,
        name: "determinism",
        pass: diffs.is_empty() && errors.is_empty(),
        detail: format!("{} commands, {files} outputs compared at 1/4/16 threads; differing {diffs:?}; errors {errors:?}", runs.len()),
    }
}

fn main() {
    let results = vec![
        golden_benchmark(),
        height_staircase(),
        model_action_suite(),
        measure_identities(),
        tartan_compatibility(),
        fiber_arc_structure(),
        density_cross_validation(),
        irrational_probe(),
        determinism(),
    ];
    let mut failed = 0;
    for r in &results {
        if !r.pass {
            failed += 1;
        }
        println!("criterion {} [{}] {}: {}", r.id, if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    println!("acceptance: {} passed, {} failed", results.len() - failed, failed);
    if failed > 0 && std::env::var_os("TENTLAB_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
