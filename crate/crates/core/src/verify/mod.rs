//! Seeded property suites. Each suite runs independent trials (in parallel)
//! and aggregates results by trial index, so reports are deterministic.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::Prime;
use crate::error::{Error, Result};
use crate::sample::{trial_rng, TrialRng};

mod algebra;
mod chi;
mod geometry;
mod weil;

pub use algebra::{arith_suite, modules_suite, nazarov_suite, relations_suite};
pub use chi::{boundary_suite, charfn_suite, cosets_suite};
pub use geometry::{buildings_suite, continuity_suite};
pub use weil::weil_suite;

pub const SUITES: &[&str] = &[
    "arith",
    "modules",
    "relations",
    "nazarov",
    "cosets",
    "charfn",
    "boundary",
    "buildings",
    "continuity",
    "weil",
];

#[derive(Debug, Clone, Copy, Default, Serialize, PartialEq, Eq)]
pub struct Tally {
    pub passed: u64,
    pub failed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: u64,
    pub failures: u64,
    pub seed: u64,
    pub witnesses: Vec<Value>,
    pub wall_time: f64,
    /// Per-property pass/fail counts.
    pub checks: BTreeMap<String, Tally>,
    /// Recorded observations that are never asserted.
    pub info: BTreeMap<String, Value>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }

    pub fn check(&self, name: &str) -> Tally {
        self.checks.get(name).copied().unwrap_or_default()
    }

    /// True when the named property ran at least once and never failed.
    pub fn check_passed(&self, name: &str) -> bool {
        let t = self.check(name);
        t.failed == 0 && t.passed > 0
    }

    fn merge(name: &str, seed: u64, parts: Vec<SuiteReport>) -> SuiteReport {
        let mut out = SuiteReport {
            suite: name.to_string(),
            trials: 0,
            failures: 0,
            seed,
            witnesses: Vec::new(),
            wall_time: 0.0,
            checks: BTreeMap::new(),
            info: BTreeMap::new(),
        };
        for part in parts {
            out.trials += part.trials;
            out.failures += part.failures;
            out.wall_time += part.wall_time;
            out.witnesses
                .extend(part.witnesses.into_iter().map(|mut w| {
                    if let Value::Object(ref mut o) = w {
                        o.insert("suite".into(), json!(part.suite));
                    }
                    w
                }));
            for (k, v) in part.checks {
                let e = out.checks.entry(format!("{}.{k}", part.suite)).or_default();
                e.passed += v.passed;
                e.failed += v.failed;
            }
            for (k, v) in part.info {
                out.info.insert(format!("{}.{k}", part.suite), v);
            }
        }
        out
    }
}

/// Suite-wide configuration.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub primes: Vec<Prime>,
    pub trials: u64,
    pub seed: u64,
}

impl SuiteConfig {
    pub fn new(primes: Vec<Prime>, trials: u64, seed: u64) -> Self {
        SuiteConfig {
            primes,
            trials,
            seed,
        }
    }

    pub fn default_primes() -> Vec<Prime> {
        [3, 5, 7]
            .iter()
            .map(|&p| Prime::new(p).expect("prime"))
            .collect()
    }

    pub(crate) fn prime_for(&self, index: u64) -> Prime {
        self.primes[(index as usize) % self.primes.len()]
    }
}

/// Accumulates checks for a single trial.
pub(crate) struct Trial {
    index: u64,
    checks: BTreeMap<String, Tally>,
    witnesses: Vec<Value>,
    info: BTreeMap<String, u64>,
}

impl Trial {
    fn new(index: u64) -> Self {
        Trial {
            index,
            checks: BTreeMap::new(),
            witnesses: Vec::new(),
            info: BTreeMap::new(),
        }
    }

    pub(crate) fn index(&self) -> u64 {
        self.index
    }

    pub(crate) fn check(&mut self, name: &str, ok: bool, detail: impl FnOnce() -> Value) {
        let t = self.checks.entry(name.to_string()).or_default();
        if ok {
            t.passed += 1;
        } else {
            t.failed += 1;
            self.witnesses
                .push(json!({"trial": self.index, "check": name, "detail": detail()}));
        }
    }

    /// Records the outcome of a fallible check; errors count as failures.
    pub(crate) fn check_result(
        &mut self,
        name: &str,
        r: Result<bool>,
        detail: impl FnOnce() -> Value,
    ) {
        match r {
            Ok(ok) => self.check(name, ok, detail),
            Err(e) => {
                let msg = e.to_string();
                self.check(name, false, || json!({"error": msg}))
            }
        }
    }

    /// Counts an informational event.
    pub(crate) fn note(&mut self, key: &str) {
        self.note_value(key, 1);
    }

    pub(crate) fn note_value(&mut self, key: &str, v: u64) {
        *self.info.entry(key.to_string()).or_default() += v;
    }

    fn failed(&self) -> bool {
        self.checks.values().any(|t| t.failed > 0)
    }
}

/// Runs `trials` independent trials of `body` and aggregates the results.
pub(crate) fn run_trials<F>(suite: &str, cfg: &SuiteConfig, trials: u64, body: F) -> SuiteReport
where
    F: Fn(&mut Trial, &mut TrialRng, Prime) -> Result<()> + Sync,
{
    let start = Instant::now();
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut trial = Trial::new(i);
            let mut rng = trial_rng(cfg.seed, suite, i);
            if let Err(e) = body(&mut trial, &mut rng, cfg.prime_for(i)) {
                let msg = e.to_string();
                trial.check("trial_error", false, || json!({"error": msg}));
            }
            trial
        })
        .collect();
    let mut report = SuiteReport {
        suite: suite.to_string(),
        trials,
        failures: 0,
        seed: cfg.seed,
        witnesses: Vec::new(),
        wall_time: 0.0,
        checks: BTreeMap::new(),
        info: BTreeMap::new(),
    };
    let mut info: BTreeMap<String, u64> = BTreeMap::new();
    for t in results {
        if t.failed() {
            report.failures += 1;
        }
        for (k, v) in &t.checks {
            let e = report.checks.entry(k.clone()).or_default();
            e.passed += v.passed;
            e.failed += v.failed;
        }
        for (k, v) in &t.info {
            *info.entry(k.clone()).or_default() += v;
        }
        report.witnesses.extend(t.witnesses);
    }
    report.info = info.into_iter().map(|(k, v)| (k, json!(v))).collect();
    report.wall_time = start.elapsed().as_secs_f64();
    report
}

/// Runs a named suite, or every suite for `"all"`.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    if cfg.primes.is_empty() {
        return Err(Error::Input("at least one prime is required".into()));
    }
    let start = Instant::now();
    let report = match name {
        "arith" => arith_suite(cfg),
        "modules" => modules_suite(cfg),
        "relations" => relations_suite(cfg),
        "nazarov" => nazarov_suite(cfg),
        "cosets" => cosets_suite(cfg),
        "charfn" => charfn_suite(cfg),
        "boundary" => boundary_suite(cfg),
        "buildings" => buildings_suite(cfg),
        "continuity" => continuity_suite(cfg),
        "weil" => weil_suite(cfg),
        "all" => {
            let mut parts = Vec::new();
            for s in SUITES {
                parts.push(run_suite(s, cfg)?);
            }
            let mut merged = SuiteReport::merge("all", cfg.seed, parts);
            merged.wall_time = start.elapsed().as_secs_f64();
            return Ok(merged);
        }
        other => return Err(Error::Input(format!("unknown suite {other:?}"))),
    };
    let mut report = report;
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(report)
}
