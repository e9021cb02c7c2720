//! Tartans and their compatibility, scaling, tameness and regularity checks; named property suites.

mod suites;
mod tartan;

pub use suites::{model_action_check, undecided_parameter, GRID_TOL, MARKOV_PARAMETERS, SUITES};
pub use tartan::{
    build_tartan, check_compatibility, check_regularity, check_scaling, check_tameness, fhat_image, TartanApprox,
};

use crate::arith::Parameter;
use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub lambda: String,
    pub seed: u64,
    pub depth: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub name: String,
    pub status: Status,
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(name: &str, provenance: Provenance) -> Report {
        Report { name: name.to_string(), status: Status::Undecided, metrics: BTreeMap::new(), notes: Vec::new(), provenance }
    }

    pub fn metric(&mut self, key: &str, v: f64) {
        self.metrics.insert(key.to_string(), v);
    }

    pub fn note(&mut self, s: &str) {
        self.notes.push(s.to_string());
    }

    pub fn fail(&mut self, why: &str) {
        self.note(why);
        self.status = Status::Fail;
    }

    /// Sets Pass or Fail unless an earlier failure was recorded.
    pub fn pass_if(&mut self, ok: bool) {
        if self.status != Status::Fail {
            self.status = if ok { Status::Pass } else { Status::Fail };
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Inputs shared by every suite.
#[derive(Clone, Debug)]
pub struct SuiteCtx {
    pub param: Parameter,
    pub seed: u64,
    pub depth: usize,
}

impl SuiteCtx {
    pub fn provenance(&self) -> Provenance {
        Provenance { lambda: self.param.spec().to_string(), seed: self.seed, depth: self.depth }
    }
}

/// Expands "all" and rejects unknown names; the result is sorted and deduplicated.
pub fn resolve_suites(names: &[&str]) -> Result<Vec<&'static str>> {
    let mut out = Vec::new();
    for n in names {
        if *n == "all" {
            out.extend(SUITES.iter().map(|(k, _)| *k));
            continue;
        }
        match SUITES.iter().find(|(k, _)| k == n) {
            Some((k, _)) => out.push(*k),
            None => return Err(Error::UnknownSuite(n.to_string())),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Runs the named suites in parallel; reports come back ordered by name.
pub fn run_suite(names: &[&str], lambda: &str, seed: u64, depth: usize) -> Result<Vec<Report>> {
    let list = resolve_suites(names)?;
    let ctx = SuiteCtx { param: Parameter::parse(lambda)?, seed, depth };
    Ok(list
        .par_iter()
        .map(|name| {
            let run = SUITES.iter().find(|(k, _)| k == name).expect("resolved").1;
            run(&ctx)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(matches!(run_suite(&["no_such_suite"], "1.62", 7, 8), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn model_action_passes_at_golden() {
        let reps = run_suite(&["model_action"], "poly:-1,-1,1:interval:1.6,1.7", 7, 20).unwrap();
        assert_eq!(reps.len(), 1);
        assert!(reps[0].passed(), "{:?}", reps[0]);
    }

    #[test]
    fn names_are_sorted_and_unique() {
        let mut names: Vec<&str> = SUITES.iter().map(|(k, _)| *k).collect();
        let n = names.len();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), n);
        assert_eq!(resolve_suites(&["model_action", "height_monotone", "model_action"]).unwrap(), vec!["height_monotone", "model_action"]);
    }
}
