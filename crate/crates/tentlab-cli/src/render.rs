use crate::commands::{chart_for, csv_of, err, fiber_arc_for, streamline_for, streamline_paths, sweep_cmd, tent, CliResult, Output};
use crate::config::Config;
use crate::svg::{Frame, Svg};
use serde_json::json;
use tentlab_core::ilim::FlatArc;
use tentlab_core::measure::Density;
use tentlab_core::outside::{b_step, CirclePoint};
use tentlab_core::tent::TentMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Tentgraph,
    Outsidegraph,
    Staircase,
    Fiberarc,
    Streamlines,
    Chart,
}

/// Options shared by the render kinds that need them.
#[derive(Clone, Debug)]
pub struct RenderOpts {
    pub x: String,
    pub seed_x: String,
    pub branch_word: String,
    pub steps: usize,
    pub k: String,
    pub from: String,
    pub to: String,
    pub sweep_steps: usize,
    pub max_iters: usize,
}

pub fn render(cfg: &Config, kind: Kind, o: &RenderOpts) -> CliResult<Output> {
    let svg_path = cfg.out.clone().unwrap_or_else(|| format!("{}.svg", name(kind)));
    let mut out = match kind {
        Kind::Tentgraph => Output { artifacts: vec![(None, tentgraph(&tent(cfg)?))], ..Output::default() },
        Kind::Outsidegraph => Output { artifacts: vec![(None, outsidegraph(&tent(cfg)?)?)], ..Output::default() },
        Kind::Staircase => {
            let (rows, mut sw) = sweep_cmd(cfg, &o.from, &o.to, o.sweep_steps, o.max_iters)?;
            let csv_path = match svg_path.strip_suffix(".svg") {
                Some(stem) => format!("{stem}.csv"),
                None => format!("{svg_path}.csv"),
            };
            let pts: Vec<(f64, f64, f64)> = rows
                .iter()
                .map(|r| {
                    let l: f64 = r.lambda.parse().unwrap_or(f64::NAN);
                    (l, r.bracket_lo, r.bracket_hi)
                })
                .collect();
            sw.artifacts = vec![(None, staircase(&pts)), (Some(csv_path), csv_of(&rows)?)];
            sw
        }
        Kind::Fiberarc => {
            let (_, d, arc) = fiber_arc_for(cfg, &o.x)?;
            let phi = d.eval_f64(arc.x.to_f64());
            let segs: Vec<(f64, f64)> = arc.points.iter().map(|p| p.t_collapsed).collect();
            let hs: Vec<(f64, f64)> = arc.points.iter().map(|p| p.t).collect();
            Output {
                result: json!({ "points": arc.points.len(), "identified_pairs": arc.identified_pairs.len(), "total_length": arc.total_length }),
                artifacts: vec![(None, fiberarc(&segs, &hs, &arc.identified_pairs, phi))],
                ..Output::default()
            }
        }
        Kind::Streamlines => {
            let (f, arcs, stop) = streamline_for(cfg, &o.seed_x, &o.branch_word, o.steps)?;
            let d = crate::commands::density(cfg, &f)?;
            Output {
                result: json!({ "arcs": arcs.len(), "stopped": stop }),
                artifacts: vec![(None, streamlines_svg(&f, &d, &arcs))],
                ..Output::default()
            }
        }
        Kind::Chart => {
            let (_, d, p) = chart_for(cfg, &o.k, 32)?;
            let mut s = Svg::new(&format!("chart over K, depth {}", p.depth), Frame::new(p.k.0, p.k.1, 0.0, max_of(p.psi.iter().flatten())));
            for row in &p.psi {
                let pts: Vec<(f64, f64)> = p.xs.iter().copied().zip(row.iter().copied()).collect();
                s.polyline(&pts, "steelblue", 1.0);
            }
            for x in [p.k.0, p.k.1] {
                s.line((x, 0.0), (x, d.eval_f64(x)), "black", 1.5);
            }
            Output { result: json!({ "arcs": p.arcs() }), artifacts: vec![(None, s.finish())], ..Output::default() }
        }
    };
    for a in out.artifacts.iter_mut() {
        if a.0.is_none() {
            a.0 = Some(svg_path.clone());
        }
    }
    if out.text.is_empty() {
        out.text = format!("wrote {svg_path}");
    }
    Ok(out)
}

fn name(kind: Kind) -> &'static str {
    match kind {
        Kind::Tentgraph => "tentgraph",
        Kind::Outsidegraph => "outsidegraph",
        Kind::Staircase => "staircase",
        Kind::Fiberarc => "fiberarc",
        Kind::Streamlines => "streamlines",
        Kind::Chart => "chart",
    }
}

fn max_of<'a>(v: impl Iterator<Item = &'a f64>) -> f64 {
    v.copied().fold(0.0, f64::max)
}

fn tentgraph(f: &TentMap) -> String {
    let (a, b, c, p) = (f.a().to_f64(), f.b().to_f64(), 0.5, f.p_fix().to_f64());
    let l = f.param().lambda_f64();
    let mut s = Svg::new(&format!("tent map, lambda = {l:.10}"), Frame::new(a, b, a, b));
    s.line((a, a), (b, b), "gray", 0.75);
    s.polyline(&[(a, l * a), (c, b), (b, l * (1.0 - b))], "black", 1.5);
    for (x, y, t) in [(a, a, "a"), (c, b, "c"), (b, b, "b"), (p, p, "p")] {
        s.dot((x, y), 3.0, "crimson");
        s.label((x, y), t);
    }
    s.finish()
}

/// The circle point at chart coordinate k/n.
fn chart_point(f: &TentMap, k: usize, n: usize) -> CirclePoint {
    let w = f.b() - f.a();
    if 2 * k < n {
        CirclePoint::lower(f, f.a() + &(&w * &f.param().ratio(2 * k as i64, n as i64)))
    } else {
        CirclePoint::upper(f, f.b() - &(&w * &f.param().ratio(2 * k as i64 - n as i64, n as i64)))
    }
}

fn outsidegraph(f: &TentMap) -> CliResult<String> {
    let n = 800;
    let mut s = Svg::new("outside map B in chart coordinates", Frame::new(0.0, 1.0, 0.0, 1.0));
    let ah = CirclePoint::upper(f, f.a_hat().clone()).chart(f);
    s.band(ah, 1.0, "khaki");
    let mut piece: Vec<(f64, f64)> = Vec::new();
    for k in 0..n {
        let y = chart_point(f, k, n);
        let (img, _) = b_step(f, &y).map_err(err)?;
        let v = img.chart(f);
        if let Some(&(_, prev)) = piece.last() {
            if (v - prev).abs() > 0.5 {
                s.polyline(&piece, "black", 1.25);
                piece.clear();
            }
        }
        piece.push((k as f64 / n as f64, v));
    }
    s.polyline(&piece, "black", 1.25);
    let fa = CirclePoint::lower(f, f.f_a().clone()).chart(f);
    s.label((ah, fa), "f(a) on the lower sheet");
    Ok(s.finish())
}

fn staircase(pts: &[(f64, f64, f64)]) -> String {
    let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let mut s = Svg::new("height staircase", Frame::new(lo, hi, 0.0, 0.5));
    let mid: Vec<(f64, f64)> = pts.iter().map(|p| (p.0, 0.5 * (p.1 + p.2))).collect();
    s.polyline(&mid, "black", 1.25);
    for p in pts.iter().filter(|p| p.2 > p.1) {
        s.line((p.0, p.1), (p.0, p.2), "crimson", 0.75);
    }
    s.line((lo, 1.0 / 3.0), (hi, 1.0 / 3.0), "gray", 0.5);
    s.label((lo, 1.0 / 3.0), "1/3");
    s.finish()
}

fn fiberarc(segs: &[(f64, f64)], hs: &[(f64, f64)], pairs: &[(usize, usize)], phi: f64) -> String {
    let mut s = Svg::new("fiber arc: H-coordinates (top) and collapsed alpha-coordinates (bottom)", Frame::new(0.0, 1.0_f64.max(phi), 0.0, 1.0));
    for (i, (lo, hi)) in segs.iter().enumerate() {
        let c = if i % 2 == 0 { "steelblue" } else { "darkorange" };
        s.line((*lo, 0.3), (*hi, 0.3), c, 4.0);
    }
    for (i, (lo, hi)) in hs.iter().enumerate() {
        let c = if i % 2 == 0 { "steelblue" } else { "darkorange" };
        s.line((*lo, 0.7), (*hi, 0.7), c, 4.0);
    }
    for &(i, _) in pairs {
        s.dot((segs[i].1, 0.3), 2.5, "crimson");
    }
    s.line((phi, 0.2), (phi, 0.4), "black", 1.0);
    s.label((phi, 0.4), "phi(x)");
    s.finish()
}

/// Streamlines in (x_0, ψ); stable fibers at arc ends drawn as vertical segments up to φ.
pub fn streamlines_svg(f: &TentMap, d: &Density, arcs: &[FlatArc]) -> String {
    let paths = streamline_paths(f, d, arcs, 16);
    let mut ends: Vec<f64> = arcs.iter().flat_map(|a| [a.j_lo.to_f64(), a.j_hi.to_f64()]).collect();
    ends.sort_by(f64::total_cmp);
    ends.dedup();
    let lo = ends.first().copied().unwrap_or(0.0);
    let hi = ends.last().copied().unwrap_or(1.0);
    let top = ends.iter().map(|x| d.eval_f64(*x)).fold(0.0, f64::max);
    let mut s = Svg::new("streamlines in (x0, psi)", Frame::new(lo, hi, 0.0, top));
    for x in &ends {
        s.line((*x, 0.0), (*x, d.eval_f64(*x)), "gray", 0.75);
    }
    for p in &paths {
        s.polyline(p, "steelblue", 1.5);
    }
    s.finish()
}
