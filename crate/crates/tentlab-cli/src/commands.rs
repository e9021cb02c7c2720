use crate::config::Config;
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Write;
use tentlab_core::arith::{parse_decimal, Parameter, Real};
use tentlab_core::glue::{fiber_arc, psi_at, trace_streamline_partial, chart_patch, FiberArc, ChartPatch};
use tentlab_core::ilim::{consecutive_pairs, fiber, reconstruct, FlatArc};
use tentlab_core::measure::{density_grid, density_markov, density_series, disintegration_check, Density};
use tentlab_core::outside::{classify, height, sweep, SweepRow, TentType, DEFAULT_HEIGHT_TOL_BITS};
use tentlab_core::tent::{TentMap, Word};
use tentlab_core::verify::{run_suite, Provenance, Report, GRID_TOL};

pub type CliResult<T> = std::result::Result<T, String>;

pub fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// What a command produced: the JSON result, any reports, a human summary and files to write.
#[derive(Default)]
pub struct Output {
    pub result: Value,
    pub reports: Vec<Report>,
    pub text: String,
    /// (path or None for stdout, contents).
    pub artifacts: Vec<(Option<String>, String)>,
    pub failed: bool,
}

pub fn tent(cfg: &Config) -> CliResult<TentMap> {
    let mut p = Parameter::parse(&cfg.lambda).map_err(err)?;
    if let Some(bits) = cfg.precision {
        p = p.with_precision(bits).with_cap(bits.max(p.cap()));
    }
    Ok(TentMap::new(&p))
}

pub fn real(f: &TentMap, s: &str) -> CliResult<Real> {
    let q = parse_decimal(s).ok_or_else(|| format!("not a decimal: {s}"))?;
    Ok(f.param().rational(&q))
}

pub fn pair(s: &str) -> CliResult<(String, String)> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| format!("expected lo,hi: {s}"))?;
    Ok((lo.trim().to_string(), hi.trim().to_string()))
}

/// Grid when cells are configured, else Markov, else the closed-form series.
pub fn density(cfg: &Config, f: &TentMap) -> CliResult<Density> {
    match cfg.grid {
        Some(n) => density_grid(f, n, GRID_TOL, 5000).map_err(err),
        None => density_markov(f).or_else(|_| density_series(f)).map_err(err),
    }
}

pub fn tent_type(f: &TentMap) -> TentType {
    classify(f, 1000).map(|c| c.tent_type).unwrap_or(TentType::IrrationalOrUndecided)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

pub fn csv_of<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    String::from_utf8(w.into_inner().map_err(err)?).map_err(err)
}

pub fn height_cmd(cfg: &Config, max_iters: usize) -> CliResult<Output> {
    let f = tent(cfg)?;
    let h = height(&f, max_iters, DEFAULT_HEIGHT_TOL_BITS).map_err(err)?;
    let text = match h.value() {
        Some(v) => format!("height {v} {h:?}"),
        None => format!("height undecided, bracket {:?}", h.bracket()),
    };
    Ok(Output { result: json!({ "lambda": cfg.lambda, "height": h, "value": h.value() }), text, ..Output::default() })
}

pub fn classify_cmd(cfg: &Config, max_iters: usize) -> CliResult<Output> {
    let f = tent(cfg)?;
    let c = classify(&f, max_iters).map_err(err)?;
    let text = format!("{:?}\n{:?}\n{:?}", c.tent_type, c.height, c.profile);
    Ok(Output { result: to_value(&c), text, ..Output::default() })
}

pub fn kneading_cmd(cfg: &Config) -> CliResult<Output> {
    let f = tent(cfg)?;
    let depth = cfg.depth.unwrap_or(24);
    let w = f.kneading(depth).map_err(err)?;
    let eps = f.epsilon();
    let word: String = w.symbols().iter().map(|s| char::from(b'0' + s)).collect();
    let text = format!("{w}{}", eps.map(|e| format!("\nepsilon {e}")).unwrap_or_default());
    Ok(Output {
        result: json!({ "lambda": cfg.lambda, "depth": depth, "word": word, "epsilon": eps, "ambiguous": w.is_ambiguous() }),
        text,
        ..Output::default()
    })
}

pub fn sweep_cmd(cfg: &Config, from: &str, to: &str, steps: usize, max_iters: usize) -> CliResult<(Vec<SweepRow>, Output)> {
    let prec = cfg.precision.unwrap_or(tentlab_core::arith::DEFAULT_PRECISION);
    let rows = sweep(from, to, steps, max_iters, prec).map_err(err)?;
    let csv = csv_of(&rows)?;
    let decided = rows.iter().filter(|r| r.m.is_some()).count();
    let out = Output {
        result: json!({ "rows": rows.len(), "decided": decided }),
        text: format!("{} parameters, {decided} decided", rows.len()),
        artifacts: vec![(cfg.out.clone(), csv)],
        ..Output::default()
    };
    Ok((rows, out))
}

fn word_string(w: &Word) -> String {
    w.to_string()
}

pub fn fiber_cmd(cfg: &Config, x: &str) -> CliResult<Output> {
    let f = tent(cfg)?;
    let r = cfg.depth.unwrap_or(12);
    let xr = real(&f, x)?;
    let fib = fiber(&f, &xr, r).map_err(err)?;
    let pairs = consecutive_pairs(&f, &fib).map_err(err)?;
    let words: Vec<String> = fib.branch_words.iter().map(word_string).collect();
    let threads: Vec<Vec<f64>> = fib.threads.iter().map(|t| t.to_f64()).collect();
    let last = fib.threads.len().saturating_sub(1);
    let extreme = |i: usize| json!({ "index": i, "word": words.get(i), "thread": threads.get(i) });
    let mut text = format!("{} threads over x = {x} at depth {r}\n", fib.threads.len());
    for (i, w) in words.iter().enumerate() {
        let _ = writeln!(text, "{i:5} {w}");
    }
    let _ = write!(text, "consecutive pairs: {pairs:?}");
    Ok(Output {
        result: json!({
            "x": xr.to_f64(),
            "depth": r,
            "threads": threads,
            "branch_words": words,
            "extremes": { "lower": extreme(0), "upper": extreme(last) },
            "consecutive_pairs": pairs,
            "unsorted": fib.unsorted,
        }),
        text,
        ..Output::default()
    })
}

pub fn fiber_arc_for(cfg: &Config, x: &str) -> CliResult<(TentMap, Density, FiberArc)> {
    let f = tent(cfg)?;
    let d = density(cfg, &f)?;
    let xr = real(&f, x)?;
    let arc = fiber_arc(&f, &d, tent_type(&f), &xr, cfg.depth.unwrap_or(12)).map_err(err)?;
    Ok((f, d, arc))
}

pub fn arc_cmd(cfg: &Config, x: &str) -> CliResult<Output> {
    let (_, d, arc) = fiber_arc_for(cfg, x)?;
    let points: Vec<Value> = arc
        .points
        .iter()
        .map(|p| json!({ "word": word_string(&p.word), "thread": p.thread.to_f64(), "t": [p.t.0, p.t.1], "t_collapsed": [p.t_collapsed.0, p.t_collapsed.1] }))
        .collect();
    let phi = d.eval_f64(arc.x.to_f64());
    let text = format!(
        "{} points, {} identified pairs, collapsed length {} (phi = {phi})",
        arc.points.len(),
        arc.identified_pairs.len(),
        arc.total_length
    );
    Ok(Output {
        result: json!({
            "x": arc.x.to_f64(),
            "depth": arc.depth,
            "density": d.kind_name(),
            "points": points,
            "identified_pairs": arc.identified_pairs,
            "total_length": arc.total_length,
            "phi": phi,
        }),
        text,
        ..Output::default()
    })
}

pub fn chart_for(cfg: &Config, k: &str, n_x: usize) -> CliResult<(TentMap, Density, ChartPatch)> {
    let f = tent(cfg)?;
    let d = density(cfg, &f)?;
    let (lo, hi) = pair(k)?;
    let p = chart_patch(&d, &real(&f, &lo)?, &real(&f, &hi)?, cfg.depth.unwrap_or(10), n_x).map_err(err)?;
    Ok((f, d, p))
}

#[derive(Serialize)]
struct ChartRow {
    arc: usize,
    x: f64,
    psi: f64,
}

pub fn chart_cmd(cfg: &Config, k: &str, n_x: usize) -> CliResult<Output> {
    let (_, _, p) = chart_for(cfg, k, n_x)?;
    let rows: Vec<ChartRow> = p.rows().map(|(arc, x, psi)| ChartRow { arc, x, psi }).collect();
    Ok(Output {
        result: json!({ "k": [p.k.0, p.k.1], "depth": p.depth, "arcs": p.arcs(), "max_arc_variation": p.max_arc_variation() }),
        text: format!("{} arcs over K = [{}, {}], max variation along an arc {:e}", p.arcs(), p.k.0, p.k.1, p.max_arc_variation()),
        artifacts: vec![(cfg.out.clone(), csv_of(&rows)?)],
        ..Output::default()
    })
}

/// Arcs of the streamline through the thread over seed_x with the given branch word, and the reason it stopped early.
pub fn streamline_for(cfg: &Config, seed_x: &str, word: &str, steps: usize) -> CliResult<(TentMap, Vec<FlatArc>, Option<String>)> {
    let f = tent(cfg)?;
    let w = Word::parse(word).ok_or_else(|| format!("bad branch word: {word}"))?;
    let seed = reconstruct(&f, &real(&f, seed_x)?, &w).map_err(err)?;
    let (arcs, stop) = trace_streamline_partial(&f, &seed, steps);
    if arcs.is_empty() {
        return Err(stop.map(|e| e.to_string()).unwrap_or_else(|| "empty streamline".into()));
    }
    Ok((f, arcs, stop.map(|e| e.to_string())))
}

/// ψ sampled at `n` interior points of each arc's x_0-interval.
pub fn streamline_paths(f: &TentMap, d: &Density, arcs: &[FlatArc], n: usize) -> Vec<Vec<(f64, f64)>> {
    arcs.iter()
        .map(|arc| {
            (1..n)
                .filter_map(|k| {
                    let x = &arc.j_lo + &(&arc.width() * &f.param().ratio(k as i64, n as i64));
                    let t = arc.thread_over(f, &x).ok()?;
                    Some((x.to_f64(), psi_at(d, &t).ok()?))
                })
                .collect()
        })
        .collect()
}

pub fn streamline_cmd(cfg: &Config, seed_x: &str, word: &str, steps: usize, svg: Option<String>) -> CliResult<Output> {
    let (f, arcs, stop) = streamline_for(cfg, seed_x, word, steps)?;
    let list: Vec<Value> = arcs
        .iter()
        .map(|a| json!({ "word": word_string(&a.branch_word), "j": [a.j_lo.to_f64(), a.j_hi.to_f64()], "critical": a.critical }))
        .collect();
    let mut out = Output {
        result: json!({ "seed_x": seed_x, "branch_word": word, "arcs": list, "stopped": stop }),
        text: format!("{} arcs{}", arcs.len(), stop.as_ref().map(|s| format!(", stopped: {s}")).unwrap_or_default()),
        ..Output::default()
    };
    if let Some(path) = svg {
        let d = density(cfg, &f)?;
        out.artifacts.push((Some(path), crate::render::streamlines_svg(&f, &d, &arcs)));
    }
    Ok(out)
}

#[derive(Serialize)]
struct DensityRow {
    x: f64,
    phi: f64,
}

pub fn density_cmd(cfg: &Config, markov: bool, series: bool, samples: usize) -> CliResult<Output> {
    let f = tent(cfg)?;
    let d = if markov {
        density_markov(&f).map_err(err)?
    } else if series {
        density_series(&f).map_err(err)?
    } else if let Some(n) = cfg.grid {
        density_grid(&f, n, GRID_TOL, 5000).map_err(err)?
    } else {
        density_markov(&f).or_else(|_| density_grid(&f, 1 << 14, GRID_TOL, 5000)).map_err(err)?
    };
    let rows: Vec<DensityRow> = d.sample(samples).into_iter().map(|(x, phi)| DensityRow { x, phi }).collect();
    let (a, b) = d.domain();
    Ok(Output {
        result: json!({ "density": d.kind_name(), "exact": d.is_exact(), "samples": samples, "mass": d.integral_f64(a, b), "min": d.min_value() }),
        text: format!("{} density, {samples} samples, min {}", d.kind_name(), d.min_value()),
        artifacts: vec![(cfg.out.clone(), csv_of(&rows)?)],
        ..Output::default()
    })
}

pub fn verify_cmd(cfg: &Config, suites: &[String]) -> CliResult<Output> {
    let names: Vec<&str> = if suites.is_empty() { vec!["all"] } else { suites.iter().map(String::as_str).collect() };
    let reps = run_suite(&names, &cfg.lambda, cfg.seed, cfg.depth.unwrap_or(20)).map_err(err)?;
    Ok(summarize(reps))
}

fn summarize(reps: Vec<Report>) -> Output {
    let failed = reps.iter().any(|r| !r.passed());
    let mut text = String::new();
    for r in &reps {
        let m: Vec<String> = r.metrics.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(text, "{:28} {:?} {}", r.name, r.status, m.join(" "));
    }
    let pass = reps.iter().filter(|r| r.passed()).count();
    let _ = write!(text, "{pass}/{} passed", reps.len());
    Output {
        result: json!({ "suites": reps.iter().map(|r| r.name.clone()).collect::<Vec<_>>(), "passed": pass, "total": reps.len() }),
        reports: reps,
        text,
        failed,
        ..Output::default()
    }
}

/// Disintegration gap for π_r^{-1}(J), doubling quadrature cells from 2^12 until the integral moves less than 1e-9.
pub fn disintegrate_cmd(cfg: &Config, j: &str) -> CliResult<Output> {
    let f = tent(cfg)?;
    let d = density(cfg, &f)?;
    let (lo, hi) = pair(j)?;
    let (lo, hi) = (real(&f, &lo)?.to_f64(), real(&f, &hi)?.to_f64());
    let r = cfg.depth.unwrap_or(4);
    let mut cells = 1 << 12;
    let mut cur = disintegration_check(&d, r, (lo, hi), cells);
    while cells < 1 << 20 {
        cells *= 2;
        let next = disintegration_check(&d, r, (lo, hi), cells);
        let moved = (next.lhs - cur.lhs).abs();
        cur = next;
        if moved < 1e-9 {
            break;
        }
    }
    let mut rep = Report::new("disintegrate", Provenance { lambda: cfg.lambda.clone(), seed: cfg.seed, depth: r });
    rep.metric("lhs", cur.lhs);
    rep.metric("rhs", cur.rhs);
    rep.metric("gap", cur.gap);
    rep.metric("cells", cur.cells as f64);
    rep.pass_if(cur.gap <= 1e-3);
    let mut out = summarize(vec![rep]);
    out.result = to_value(&cur);
    Ok(out)
}
