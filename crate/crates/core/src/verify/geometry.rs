//! Suites for the building graphs and the continuity harness.

use std::collections::HashSet;

use rand::Rng;
use serde_json::json;

use super::{run_trials, SuiteConfig, SuiteReport, Trial};
use crate::arith::{Matrix, Prime, Rational};
use crate::building::{
    check_convergence, chi_graph_morphism_check, classify, continuity_check, has_arrow,
    neighbors_over, standard_sequence, Classification,
};
use crate::error::Result;
use crate::module::{Module, ModuleJson, SymplecticForm};
use crate::sample::{sample_block_element, sample_selfdual, ModuleKind, TrialRng};

/// Every module between `O^2` and `p^{-1}O^2`, found by scanning all
/// subsets of `F_p^2` that are closed under addition, then filtered by the
/// almost-self-duality test.
fn brute_force_star(p: Prime) -> Result<Vec<Module>> {
    let q = p.get() as usize;
    let points: Vec<(usize, usize)> = (0..q).flat_map(|a| (0..q).map(move |b| (a, b))).collect();
    let form = SymplecticForm::standard(1);
    let inv_p = Rational::p_pow(p, -1);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1 << points.len()) {
        let set: Vec<(usize, usize)> = (0..points.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| points[i])
            .collect();
        if !set.contains(&(0, 0)) {
            continue;
        }
        let closed = set.iter().all(|&(a, b)| {
            set.iter()
                .all(|&(c, d)| set.contains(&((a + c) % q, (b + d) % q)))
        });
        if !closed {
            continue;
        }
        let mut gens = Matrix::identity(2);
        for &(a, b) in &set {
            gens.push_row(&[
                &Rational::from_int(a as i64) * &inv_p,
                &Rational::from_int(b as i64) * &inv_p,
            ]);
        }
        let r = Module::lattice_span(p, &gens);
        if r.is_almost_selfdual(&form)? && seen.insert(r.clone()) {
            out.push(r);
        }
    }
    Ok(out)
}

/// Classification examples, tree valence, completeness of the neighbor
/// enumeration and the `χ` graph-morphism property on random arrows.
pub fn buildings_suite(cfg: &SuiteConfig) -> SuiteReport {
    run_trials("buildings", cfg, cfg.trials, |t, rng, p| {
        if t.index() == 0 {
            fixed_building_checks(t)?;
        }
        morphism_trial(t, rng, p)
    })
}

fn fixed_building_checks(t: &mut Trial) -> Result<()> {
    let f1 = SymplecticForm::standard(1);
    for q in [3u64, 5] {
        let p = Prime::new(q)?;
        let star = neighbors_over(&Module::standard_lattice(p, 2), &f1)?;
        let strict = star.len() - 1;
        t.check(
            "tree_valence",
            strict as u64 == q + 1,
            || json!({"p": q, "strict": strict}),
        );
        for r in &star {
            t.check_result("neighbor_sound", r.is_almost_selfdual(&f1), || {
                json!(ModuleJson::from(r))
            });
        }
    }
    let p3 = Prime::new(3)?;
    let star: HashSet<Module> = neighbors_over(&Module::standard_lattice(p3, 2), &f1)?
        .into_iter()
        .collect();
    let brute: HashSet<Module> = brute_force_star(p3)?.into_iter().collect();
    t.check(
        "neighbor_complete",
        star == brute,
        || json!({"enumerated": star.len(), "brute_force": brute.len()}),
    );
    let f2 = SymplecticForm::standard(2);
    let star2 = neighbors_over(&Module::standard_lattice(p3, 4), &f2)?;
    t.note_value("star_size_n2_p3", star2.len() as u64);

    let cases = [
        (Module::standard_lattice(p3, 2), Classification::Selfdual),
        (
            Module::diagonal_lattice(p3, &[-1, 0]),
            Classification::AlmostSelfdual,
        ),
        (
            Module::diagonal_lattice(p3, &[-1, -1]),
            Classification::Neither,
        ),
    ];
    for (m, want) in &cases {
        t.check("classify_examples", classify(m, &f1)? == *want, || {
            json!(ModuleJson::from(m))
        });
    }
    let o = Module::standard_lattice(p3, 2);
    let big = Module::diagonal_lattice(p3, &[-1, 0]);
    let skew = Module::diagonal_lattice(p3, &[-1, 1]);
    let arrows = has_arrow(&big, &o)?
        && has_arrow(&o, &o)?
        && !has_arrow(&o, &skew)?
        && !has_arrow(&skew, &o)?;
    t.check("arrow_examples", arrows, || json!(null));
    Ok(())
}

/// A random arrow `(Q,T) → (Q′,T′)`: `Q′` is a random self-dual lattice and
/// `Q` one of its neighbors, likewise for `T` (or `T = T′`).
fn random_arrow(rng: &mut TrialRng, k: usize, p: Prime) -> Result<[Module; 4]> {
    let form = SymplecticForm::standard(k);
    let pick = |rng: &mut TrialRng| -> Result<(Module, Module)> {
        let base = sample_selfdual(k, p, ModuleKind::Lattice, rng);
        let star = neighbors_over(&base, &form)?;
        let up = star[rng.gen_range(0..star.len())].clone();
        Ok((up, base))
    };
    let (q, q2) = pick(rng)?;
    let (t, t2) = if rng.gen_bool(0.5) {
        pick(rng)?
    } else {
        let b = sample_selfdual(k, p, ModuleKind::Lattice, rng);
        (b.clone(), b)
    };
    Ok([q, t, q2, t2])
}

fn morphism_trial(t: &mut Trial, rng: &mut TrialRng, p: Prime) -> Result<()> {
    // Neighbor enumeration is bounded to p ≤ 5.
    let p = if p.get() > 5 { Prime::new(3)? } else { p };
    let alpha = rng.gen_range(1..=2);
    let k = rng.gen_range(1..=2);
    let m = rng.gen_range(1..=2);
    let g = sample_block_element(alpha, k, m, p, rng)?;
    let [q, tt, q2, t2] = random_arrow(rng, k, p)?;
    let rep = chi_graph_morphism_check(&g, (&q, &tt), (&q2, &t2))?;
    t.check("graph_morphism", rep.pass(), || {
        json!({"g": g, "Q": ModuleJson::from(&q), "T": ModuleJson::from(&tt),
               "Q2": ModuleJson::from(&q2), "T2": ModuleJson::from(&t2), "report": rep})
    });
    t.note(if rep.equal {
        "arrow_collapsed"
    } else {
        "arrow_strict"
    });
    let same = chi_graph_morphism_check(&g, (&q, &tt), (&q, &tt))?;
    t.check(
        "graph_morphism_loop",
        same.pass() && same.equal,
        || json!({"g": g}),
    );
    Ok(())
}

/// `χ` along `Q_j = p^{-j}O ⊕ p^{j}O ↗ Q_p e⁺` for `j ≤ 6` at depth 4, and
/// the intersection lemma along the same sequence.
pub fn continuity_suite(cfg: &SuiteConfig) -> SuiteReport {
    run_trials("continuity", cfg, cfg.trials, |t, rng, p| {
        continuity_trial(t, rng, p)
    })
}

const DEPTH: i64 = 4;
const LENGTH: usize = 7;

fn continuity_trial(t: &mut Trial, rng: &mut TrialRng, p: Prime) -> Result<()> {
    let (seq, lim) = standard_sequence(p, LENGTH);
    let direct = check_convergence(&seq, &lim, DEPTH)?;
    t.check("sequence_converges", direct.pass(), || json!(direct));

    let alpha = rng.gen_range(1..=2);
    let m = rng.gen_range(1..=2);
    let g = sample_block_element(alpha, 1, m, p, rng)?;
    let tt = sample_selfdual(1, p, ModuleKind::Any, rng);
    let rep = continuity_check(&g, &seq, &lim, &tt, DEPTH)?;
    t.check(
        "clause_i",
        rep.convergence.clause_i,
        || json!({"g": g, "report": rep}),
    );
    t.check(
        "clause_ii",
        rep.convergence.clause_ii,
        || json!({"g": g, "report": rep}),
    );
    t.check(
        "lower_limit",
        rep.lower_limit,
        || json!({"g": g, "report": rep}),
    );

    let constant = continuity_check(&g, &vec![lim.clone(); 3], &lim, &tt, DEPTH)?;
    t.check(
        "constant_sequence",
        constant.convergence.clause_i && constant.lower_limit,
        || json!({"g": g, "report": constant}),
    );

    // Intersection with a fixed module commutes with the limit.
    let l = sample_selfdual(1, p, ModuleKind::Any, rng);
    let cut: Vec<Module> = seq.iter().map(|q| q.intersect(&l)).collect::<Result<_>>()?;
    let cut_rep = check_convergence(&cut, &lim.intersect(&l)?, DEPTH)?;
    t.check(
        "intersection_lemma",
        cut_rep.pass(),
        || json!({"L": ModuleJson::from(&l), "report": cut_rep}),
    );
    Ok(())
}
