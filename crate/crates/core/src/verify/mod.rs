//! Seeded randomized verification suites.
//!
//! Trial `t` of a run with seed `s` draws from `ChaCha8Rng::seed_from_u64(s)`
//! on stream `t`, so trials are independent and a report depends only on
//! `(suite, trials, seed, bounds)`.

mod gen;
mod suites;

use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

use suites::SUITES;

/// Upper bounds for random charts and operator orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub n: usize,
    pub m: usize,
    pub q: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { n: 2, m: 2, q: 3 }
    }
}

impl std::str::FromStr for Bounds {
    type Err = Error;

    /// `"n,m,q"`, each at least 1.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Document(format!("bounds `{s}`: {e}")))?;
        match parts[..] {
            [n, m, q] if n >= 1 && m >= 1 && q >= 1 => Ok(Bounds { n, m, q }),
            _ => Err(Error::Document(format!(
                "bounds `{s}` must be three positive integers n,m,q"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub suite: String,
    pub trial: u64,
    pub identity: String,
    /// Inputs of the failing check, as operator / derivation documents.
    pub counterexample: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub trials: u64,
    pub seed: u64,
    pub bounds: Bounds,
    /// Number of identity checks evaluated across all trials.
    pub checks: u64,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

/// State of one trial: its generator and the checks recorded so far.
pub(crate) struct Trial {
    pub gen: gen::Gen,
    suite: &'static str,
    index: u64,
    checks: u64,
    failures: Vec<Failure>,
}

impl Trial {
    /// Record one identity; `inputs` is only built on failure.
    pub fn check(&mut self, identity: &str, holds: bool, inputs: impl FnOnce() -> Value) {
        self.checks += 1;
        if !holds {
            self.failures.push(Failure {
                suite: self.suite.to_string(),
                trial: self.index,
                identity: identity.to_string(),
                counterexample: inputs(),
            });
        }
    }
}

fn run_trial(
    suite: &'static str,
    body: suites::SuiteFn,
    seed: u64,
    index: u64,
    bounds: Bounds,
) -> (u64, Vec<Failure>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut trial = Trial {
        gen: gen::Gen { rng, bounds },
        suite,
        index,
        checks: 0,
        failures: Vec::new(),
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| body(&mut trial)));
    let error = match outcome {
        Ok(Ok(())) => None,
        Ok(Err(e)) => Some(format!("error: {e}")),
        Err(panic) => Some(format!(
            "panic: {}",
            panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default()
        )),
    };
    if let Some(identity) = error {
        trial.checks += 1;
        trial.failures.push(Failure {
            suite: suite.to_string(),
            trial: index,
            identity,
            counterexample: serde_json::json!({ "rerun": { "suite": suite, "seed": seed, "trial": index } }),
        });
    }
    (trial.checks, trial.failures)
}

/// Run one suite, or every suite for `"all"`.
pub fn run_suite(name: &str, trials: u64, seed: u64, bounds: Bounds) -> Result<VerifyReport> {
    let selected: Vec<(&'static str, suites::SuiteFn)> = if name == "all" {
        SUITES.to_vec()
    } else {
        SUITES.iter().filter(|(n, _)| *n == name).copied().collect()
    };
    if selected.is_empty() {
        return Err(Error::UnknownSuite(name.to_string()));
    }
    let mut checks = 0;
    let mut failures = Vec::new();
    for (suite, body) in selected {
        let results: Vec<(u64, Vec<Failure>)> = (0..trials)
            .into_par_iter()
            .map(|t| run_trial(suite, body, seed, t, bounds))
            .collect();
        for (c, f) in results {
            checks += c;
            failures.extend(f);
        }
    }
    Ok(VerifyReport {
        suite: name.to_string(),
        trials,
        seed,
        bounds,
        checks,
        failures,
    })
}

/// Names accepted by [`run_suite`].
pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).chain(["all"]).collect()
}
