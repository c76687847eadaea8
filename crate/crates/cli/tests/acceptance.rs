//! Acceptance criteria. Each criterion prints one `PASS`/`FAIL` line; the
//! test fails if any criterion fails.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use pcoset::verify::{run_suite, SuiteConfig, SuiteReport};
use pcoset::Prime;

fn primes(ps: &[u64]) -> Vec<Prime> {
    ps.iter().map(|&p| Prime::new(p).unwrap()).collect()
}

fn run(name: &str, ps: &[u64], trials: u64, seed: u64) -> SuiteReport {
    run_suite(name, &SuiteConfig::new(primes(ps), trials, seed)).unwrap()
}

/// All named checks ran and none failed.
fn all_passed(r: &SuiteReport, names: &[&str]) -> Result<(), String> {
    let bad: Vec<String> = names
        .iter()
        .filter(|n| !r.check_passed(n))
        .map(|n| {
            let t = r.check(n);
            format!("{n}: {} passed / {} failed", t.passed, t.failed)
        })
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad.join("; "))
    }
}

fn at_least(r: &SuiteReport, name: &str, n: u64) -> Result<(), String> {
    let t = r.check(name);
    if t.passed + t.failed >= n {
        Ok(())
    } else {
        Err(format!(
            "{name} ran {} times, wanted {n}",
            t.passed + t.failed
        ))
    }
}

fn within(elapsed: Duration, budget_s: u64) -> Result<(), String> {
    if elapsed <= Duration::from_secs(budget_s) {
        Ok(())
    } else {
        Err(format!(
            "took {:.1}s, budget {budget_s}s",
            elapsed.as_secs_f64()
        ))
    }
}

fn clean(r: &SuiteReport) -> Result<(), String> {
    if r.pass() && r.witnesses.is_empty() {
        Ok(())
    } else {
        Err(format!(
            "{} failures, first witness {:?}",
            r.failures,
            r.witnesses.first()
        ))
    }
}

struct Ledger {
    lines: Vec<(u32, &'static str, Result<(), String>)>,
}

impl Ledger {
    fn record(&mut self, n: u32, title: &'static str, outcome: Result<(), String>) {
        let line = match &outcome {
            Ok(()) => format!("PASS  [{n:>2}] {title}"),
            Err(why) => format!("FAIL  [{n:>2}] {title}: {why}"),
        };
        // Straight to the handle so the line survives output capture.
        writeln!(std::io::stdout(), "{line}").unwrap();
        self.lines.push((n, title, outcome));
    }
}

fn chain(parts: Vec<Result<(), String>>) -> Result<(), String> {
    let errs: Vec<String> = parts.into_iter().filter_map(|r| r.err()).collect();
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs.join(" | "))
    }
}

#[test]
fn acceptance_criteria() {
    let mut ledger = Ledger { lines: Vec::new() };

    let start = Instant::now();
    let charfn = run("charfn", &[3, 5, 7], 200, 42);
    let charfn_time = start.elapsed();
    ledger.record(
        1,
        "chi multiplicativity over 200 trials within 60 s",
        chain(vec![
            all_passed(&charfn, &["multiplicativity"]),
            at_least(&charfn, "multiplicativity", 200),
            clean(&charfn),
            within(charfn_time, 60),
        ]),
    );

    let nazarov = run("nazarov", &[3, 5, 7], 200, 42);
    ledger.record(
        2,
        "self-dual relations compose to self-dual, lattices to lattices",
        chain(vec![
            all_passed(&nazarov, &["closure", "lattice_closure"]),
            at_least(&nazarov, "closure", 200),
            clean(&nazarov),
        ]),
    );

    ledger.record(
        3,
        "chi is self-dual, and almost self-dual on almost self-dual inputs",
        chain(vec![
            all_passed(&charfn, &["self_duality", "almost_self_duality"]),
            at_least(&charfn, "self_duality", 200),
        ]),
    );

    ledger.record(
        4,
        "sandwich containments always, equalities on lattice inputs",
        all_passed(&charfn, &["sandwich_containment", "sandwich_equality"]),
    );

    let cosets = run("cosets", &[3, 5, 7], 100, 42);
    ledger.record(
        5,
        "chi independent of representative and of padding",
        chain(vec![
            all_passed(&cosets, &["representative_independence", "m_independence"]),
            at_least(&cosets, "representative_independence", 100),
            clean(&cosets),
        ]),
    );

    ledger.record(
        6,
        "chi of g I(Theta_N) h stabilizes and matches coset_mul",
        all_passed(&cosets, &["theta_stabilization"]),
    );

    let boundary = run("boundary", &[3, 5, 7], 100, 42);
    ledger.record(
        7,
        "boundary values are Lagrangian, symplectic on graphs, singular inputs rejected",
        chain(vec![
            all_passed(
                &boundary,
                &[
                    "boundary_value",
                    "lagrangian",
                    "symplectic_graph",
                    "z_symmetric",
                    "dual_path",
                    "singular_detected",
                ],
            ),
            at_least(&boundary, "lagrangian", 100),
            clean(&boundary),
        ]),
    );

    ledger.record(
        8,
        "involution and M(lambda) equivariance",
        chain(vec![
            all_passed(&charfn, &["involution", "m_lambda_equivariance"]),
            at_least(&charfn, "involution", 100),
        ]),
    );

    let modules = run("modules", &[3, 5, 7], 10, 42);
    ledger.record(
        9,
        "almost-self-duality classifier over all 625 exponent tuples",
        chain(vec![
            all_passed(&modules, &["fig1_classifier"]),
            at_least(&modules, "fig1_classifier", 625),
            clean(&modules),
        ]),
    );

    let buildings = run("buildings", &[3, 5], 100, 42);
    ledger.record(
        10,
        "tree valence p+1, complete neighbor enumeration, graph morphism on 100 arrows",
        chain(vec![
            all_passed(
                &buildings,
                &[
                    "tree_valence",
                    "neighbor_sound",
                    "neighbor_complete",
                    "graph_morphism",
                ],
            ),
            at_least(&buildings, "tree_valence", 2),
            at_least(&buildings, "graph_morphism", 100),
            clean(&buildings),
        ]),
    );

    let continuity = run("continuity", &[3, 5, 7], 20, 42);
    ledger.record(
        11,
        "continuity clauses along the standard sequence",
        chain(vec![
            all_passed(
                &continuity,
                &["sequence_converges", "clause_i", "clause_ii", "lower_limit"],
            ),
            clean(&continuity),
        ]),
    );

    let start = Instant::now();
    let weil = run("weil", &[3, 5, 7], 100, 42);
    let weil_time = start.elapsed();
    ledger.record(
        12,
        "Weil operators: unitarity, projectivity, Fourier period, commutator, lambda/theta",
        chain(vec![
            all_passed(
                &weil,
                &[
                    "generator_unitary",
                    "weil_unitary",
                    "projectivity",
                    "fourier_fourth_identity",
                    "commutator_phase",
                    "lambda_isometry",
                    "theta_factorization",
                    "theta_idempotent",
                    "theta_selfadjoint",
                    "theta_fixes_lambda_range",
                ],
            ),
            at_least(&weil, "projectivity", 100),
            clean(&weil),
            within(weil_time, 120),
        ]),
    );

    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_pcoset"))
        .args(["verify", "all", "--trials", "50", "--seed", "1"])
        .output()
        .expect("spawn pcoset");
    let elapsed = start.elapsed();
    let status = if out.status.code() == Some(0) {
        Ok(())
    } else {
        Err(format!("exit {:?}", out.status.code()))
    };
    ledger.record(
        13,
        "verify all --trials 50 --seed 1 exits 0 within 5 minutes",
        chain(vec![status, within(elapsed, 300)]),
    );

    let failed: Vec<u32> = ledger
        .lines
        .iter()
        .filter(|l| l.2.is_err())
        .map(|l| l.0)
        .collect();
    writeln!(
        std::io::stdout(),
        "{} of {} criteria passed",
        ledger.lines.len() - failed.len(),
        ledger.lines.len()
    )
    .unwrap();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
