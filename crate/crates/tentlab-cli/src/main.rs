mod commands;
mod config;
mod render;
mod svg;

use clap::{Args, Parser, Subcommand};
use commands::{CliResult, Output};
use config::{load_config, Config, Layer};
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use tentlab_core::verify::Report;

#[derive(Parser, Debug)]
#[command(name = "tentlab", version, about = "Tent-map inverse limits, heights and fiber measures")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Default)]
struct Global {
    /// poly:"c0,c1,...":interval:"lo,hi" (constant-first) or dec:"digits".
    #[arg(long, global = true)]
    lambda: Option<String>,
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Initial working precision in bits.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Use the grid density with this many cells.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true)]
    out: Option<String>,
    /// Flat key=value file with the same keys as the global flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Height of the outside map.
    Height {
        #[arg(long, default_value_t = 1000)]
        max_iters: usize,
    },
    /// Heights over a decimal parameter grid, written as CSV.
    Sweep {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 400)]
        max_iters: usize,
    },
    /// Tent type, height and post-critical profile.
    Classify {
        #[arg(long, default_value_t = 1000)]
        max_iters: usize,
    },
    /// Kneading word and epsilon.
    Kneading,
    /// All threads over x at the given depth.
    Fiber {
        #[arg(long)]
        x: String,
    },
    /// The fiber over x as an arc with collapsed coordinates.
    Arc {
        #[arg(long)]
        x: String,
    },
    /// ψ over a 0-box, written as CSV (arc, x, psi).
    Chart {
        #[arg(long = "K")]
        k: String,
        #[arg(long, default_value_t = 64)]
        nx: usize,
    },
    /// Consecutive flat arcs of a path component.
    Streamline {
        #[arg(long)]
        seed_x: String,
        #[arg(long)]
        branch_word: String,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long)]
        svg: Option<String>,
    },
    /// Invariant density sampled as CSV (x, phi).
    Density {
        #[arg(long, conflicts_with_all = ["series", "grid"])]
        markov: bool,
        #[arg(long, conflicts_with = "grid")]
        series: bool,
        #[arg(long, default_value_t = 1024)]
        samples: usize,
    },
    /// Property suites by name, `all`, or `disintegrate --J lo,hi`.
    Verify {
        suites: Vec<String>,
        #[arg(long = "J")]
        j: Option<String>,
    },
    /// Deterministic SVG figures.
    Render {
        kind: render::Kind,
        #[arg(long, default_value = "0.7")]
        x: String,
        #[arg(long, default_value = "0.7")]
        seed_x: String,
        #[arg(long, default_value = "0101010101")]
        branch_word: String,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long = "K", default_value = "0.70,0.71")]
        k: String,
        #[arg(long, default_value = "1.45")]
        from: String,
        #[arg(long, default_value = "1.99")]
        to: String,
        #[arg(long, default_value_t = 500)]
        sweep_steps: usize,
        #[arg(long, default_value_t = 400)]
        max_iters: usize,
    },
}

impl Cmd {
    fn name_and_args(&self) -> (&'static str, BTreeMap<String, String>) {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        let name = match self {
            Cmd::Height { max_iters } => {
                put("max_iters", max_iters.to_string());
                "height"
            }
            Cmd::Sweep { from, to, steps, max_iters } => {
                put("from", from.clone());
                put("to", to.clone());
                put("steps", steps.to_string());
                put("max_iters", max_iters.to_string());
                "sweep"
            }
            Cmd::Classify { max_iters } => {
                put("max_iters", max_iters.to_string());
                "classify"
            }
            Cmd::Kneading => "kneading",
            Cmd::Fiber { x } => {
                put("x", x.clone());
                "fiber"
            }
            Cmd::Arc { x } => {
                put("x", x.clone());
                "arc"
            }
            Cmd::Chart { k, nx } => {
                put("K", k.clone());
                put("nx", nx.to_string());
                "chart"
            }
            Cmd::Streamline { seed_x, branch_word, steps, svg } => {
                put("seed_x", seed_x.clone());
                put("branch_word", branch_word.clone());
                put("steps", steps.to_string());
                if let Some(s) = svg {
                    put("svg", s.clone());
                }
                "streamline"
            }
            Cmd::Density { markov, series, samples } => {
                put("markov", markov.to_string());
                put("series", series.to_string());
                put("samples", samples.to_string());
                "density"
            }
            Cmd::Verify { suites, j } => {
                put("suites", suites.join(","));
                if let Some(j) = j {
                    put("J", j.clone());
                }
                "verify"
            }
            Cmd::Render { kind, x, seed_x, branch_word, steps, k, from, to, sweep_steps, max_iters } => {
                put("kind", format!("{kind:?}").to_lowercase());
                put("x", x.clone());
                put("seed_x", seed_x.clone());
                put("branch_word", branch_word.clone());
                put("steps", steps.to_string());
                put("K", k.clone());
                put("from", from.clone());
                put("to", to.clone());
                put("sweep_steps", sweep_steps.to_string());
                put("max_iters", max_iters.to_string());
                "render"
            }
        };
        (name, m)
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: &'static str,
    config_echo: &'a Config,
    result: &'a serde_json::Value,
    reports: &'a [Report],
}

fn run(cfg: &Config, cmd: &Cmd) -> CliResult<Output> {
    match cmd {
        Cmd::Height { max_iters } => commands::height_cmd(cfg, *max_iters),
        Cmd::Sweep { from, to, steps, max_iters } => commands::sweep_cmd(cfg, from, to, *steps, *max_iters).map(|p| p.1),
        Cmd::Classify { max_iters } => commands::classify_cmd(cfg, *max_iters),
        Cmd::Kneading => commands::kneading_cmd(cfg),
        Cmd::Fiber { x } => commands::fiber_cmd(cfg, x),
        Cmd::Arc { x } => commands::arc_cmd(cfg, x),
        Cmd::Chart { k, nx } => commands::chart_cmd(cfg, k, *nx),
        Cmd::Streamline { seed_x, branch_word, steps, svg } => {
            commands::streamline_cmd(cfg, seed_x, branch_word, *steps, svg.clone())
        }
        Cmd::Density { markov, series, samples } => commands::density_cmd(cfg, *markov, *series, *samples),
        Cmd::Verify { suites, j } => match suites.first().map(String::as_str) {
            Some("disintegrate") => {
                let j = j.as_deref().ok_or("verify disintegrate needs --J lo,hi")?;
                commands::disintegrate_cmd(cfg, j)
            }
            _ => commands::verify_cmd(cfg, suites),
        },
        Cmd::Render { kind, x, seed_x, branch_word, steps, k, from, to, sweep_steps, max_iters } => {
            let o = render::RenderOpts {
                x: x.clone(),
                seed_x: seed_x.clone(),
                branch_word: branch_word.clone(),
                steps: *steps,
                k: k.clone(),
                from: from.clone(),
                to: to.clone(),
                sweep_steps: *sweep_steps,
                max_iters: *max_iters,
            };
            render::render(cfg, *kind, &o)
        }
    }
}

fn write_file(path: &str, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| format!("{path}: {e}"))
}

/// Files first; then the JSON envelope (to --out when no file claimed it) or the text summary.
fn emit(cfg: &Config, out: &Output) -> CliResult<()> {
    let mut stdout = std::io::stdout().lock();
    let mut out_used = false;
    for (path, body) in &out.artifacts {
        match path {
            Some(p) => {
                out_used |= cfg.out.as_deref() == Some(p.as_str());
                write_file(p, body)?;
            }
            None if !cfg.json => stdout.write_all(body.as_bytes()).map_err(commands::err)?,
            None => {}
        }
    }
    if cfg.json {
        let env = Envelope { schema: "tentlab/1", config_echo: cfg, result: &out.result, reports: &out.reports };
        let s = serde_json::to_string_pretty(&env).map_err(commands::err)? + "\n";
        match (&cfg.out, out_used) {
            (Some(p), false) => write_file(p, &s)?,
            _ => stdout.write_all(s.as_bytes()).map_err(commands::err)?,
        }
    } else if out.artifacts.iter().all(|a| a.0.is_some()) {
        writeln!(stdout, "{}", out.text).map_err(commands::err)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global;
    let flags = Layer {
        lambda: g.lambda,
        depth: g.depth,
        precision: g.precision,
        grid: g.grid,
        seed: g.seed,
        out: g.out,
        json: g.json.then_some(true),
        threads: g.threads,
    };
    let layer = match &g.config {
        Some(p) => match load_config(p) {
            Ok(file) => flags.over(file),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => flags,
    };
    let (name, args) = cli.cmd.name_and_args();
    let cfg = layer.resolve(name, args);
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cfg, &cli.cmd).and_then(|out| emit(&cfg, &out).map(|_| out.failed)) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
