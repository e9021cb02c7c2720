use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

pub const DEFAULT_LAMBDA: &str = "poly:\"-1,-1,1\":interval:\"1.6,1.7\"";

/// Resolved run settings. `threads` is excluded from the echo so outputs do not depend on it.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Config {
    pub lambda: String,
    pub depth: Option<usize>,
    pub precision: Option<u32>,
    pub grid: Option<usize>,
    pub seed: u64,
    pub out: Option<String>,
    pub json: bool,
    #[serde(skip)]
    pub threads: Option<usize>,
    /// The subcommand and its own options, as given.
    pub command: String,
    pub args: BTreeMap<String, String>,
}

/// Raw values from the command line or a config file; later layers override earlier ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Layer {
    pub lambda: Option<String>,
    pub depth: Option<usize>,
    pub precision: Option<u32>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub json: Option<bool>,
    pub threads: Option<usize>,
}

impl Layer {
    pub fn over(self, base: Layer) -> Layer {
        Layer {
            lambda: self.lambda.or(base.lambda),
            depth: self.depth.or(base.depth),
            precision: self.precision.or(base.precision),
            grid: self.grid.or(base.grid),
            seed: self.seed.or(base.seed),
            out: self.out.or(base.out),
            json: self.json.or(base.json),
            threads: self.threads.or(base.threads),
        }
    }

    pub fn resolve(self, command: &str, args: BTreeMap<String, String>) -> Config {
        Config {
            lambda: self.lambda.unwrap_or_else(|| DEFAULT_LAMBDA.to_string()),
            depth: self.depth,
            precision: self.precision,
            grid: self.grid,
            seed: self.seed.unwrap_or(0),
            out: self.out,
            json: self.json.unwrap_or(false),
            threads: self.threads,
            command: command.to_string(),
            args,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("config: bad value for {key}: {v}"))
}

/// Parses a flat `key = value` file; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Layer, String> {
    let mut l = Layer::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key=value", n + 1))?;
        let (k, v) = (k.trim(), v.trim());
        match k {
            "lambda" => l.lambda = Some(v.to_string()),
            "depth" => l.depth = Some(parse_value(k, v)?),
            "precision" => l.precision = Some(parse_value(k, v)?),
            "grid" => l.grid = Some(parse_value(k, v)?),
            "seed" => l.seed = Some(parse_value(k, v)?),
            "out" => l.out = Some(v.to_string()),
            "json" => l.json = Some(parse_value(k, v)?),
            "threads" => l.threads = Some(parse_value(k, v)?),
            _ => return Err(format!("config line {}: unknown key {k}", n + 1)),
        }
    }
    Ok(l)
}

pub fn load_config(path: &Path) -> Result<Layer, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_config(&text)
}
