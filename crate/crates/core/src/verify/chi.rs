//! Suites for double cosets, characteristic functions and boundary values.

use rand::Rng;
use serde_json::{json, Value};

use super::{run_trials, SuiteConfig, SuiteReport, Trial};
use crate::arith::{Matrix, Prime, Rational};
use crate::charfn::{
    chi, chi_boundary, chi_sp, conjugate, lambda_sandwich_check, m_lambda, z_matrix, BoundaryValue,
};
use crate::coset::{coset_mul, embed_orthogonal, sp_coset_mul, theta_product};
use crate::error::{Error, Result};
use crate::module::{Module, ModuleJson, SymplecticForm};
use crate::relation::{Relation, RelationJson};
use crate::sample::{
    sample_almost_selfdual, sample_block_element, sample_orthogonal_int, sample_selfdual,
    sample_sp_block, ModuleKind, TrialRng,
};

fn random_kind(rng: &mut TrialRng, k: usize) -> ModuleKind {
    match rng.gen_range(0..4) {
        0 => ModuleKind::Lattice,
        1 => ModuleKind::Lagrangian,
        2 if k >= 2 => ModuleKind::Mixed,
        _ => ModuleKind::Any,
    }
}

fn mj(m: &Module) -> Value {
    json!(ModuleJson::from(m))
}

fn rj(r: &Relation) -> Value {
    json!(RelationJson::from(r))
}

fn is_selfdual_vv(r: &Relation, alpha: usize) -> Result<bool> {
    let v = SymplecticForm::standard(alpha);
    r.is_nazarov(&v, &v, false)
}

fn is_almost_selfdual_vv(r: &Relation, alpha: usize) -> Result<bool> {
    let v = SymplecticForm::standard(alpha);
    r.body().is_almost_selfdual(&SymplecticForm::ominus(&v, &v))
}

/// Multiplicativity, self-duality, the Λ sandwich, involution and `M(λ)`
/// equivariance of `χ`, plus the symplectic variant.
pub fn charfn_suite(cfg: &SuiteConfig) -> SuiteReport {
    run_trials("charfn", cfg, cfg.trials, |t, rng, p| {
        charfn_trial(t, rng, p)
    })
}

fn charfn_trial(t: &mut Trial, rng: &mut TrialRng, p: Prime) -> Result<()> {
    let alpha = rng.gen_range(1..=2);
    let k = rng.gen_range(1..=2);
    let l = rng.gen_range(1..=2);
    let m = rng.gen_range(1..=2);
    let g = sample_block_element(alpha, k, l, p, rng)?;
    let h = sample_block_element(alpha, k, m, p, rng)?;
    let kq = random_kind(rng, k);
    let kt = random_kind(rng, k);
    let q = sample_selfdual(k, p, kq, rng);
    let tt = sample_selfdual(k, p, kt, rng);

    let cg = chi(&g, &q, &tt)?;
    let ch = chi(&h, &q, &tt)?;
    let cf = chi(&coset_mul(&g, &h)?, &q, &tt)?;
    let prod = cg.compose(&ch)?;
    t.check("multiplicativity", cf == prod, || {
        json!({"p": p.get(), "g": g, "h": h, "Q": mj(&q), "T": mj(&tt), "chi_product": rj(&cf), "composite": rj(&prod)})
    });
    for (name, r) in [("g", &cg), ("h", &ch), ("g*h", &cf)] {
        t.check_result(
            "self_duality",
            is_selfdual_vv(r, alpha),
            || json!({"which": name, "chi": rj(r)}),
        );
    }

    let sw = lambda_sandwich_check(&g, &q, &tt)?;
    t.check(
        "sandwich_containment",
        sw.down_contains_lambda && sw.up_inside_lambda_perp,
        || json!(sw),
    );
    if let (Some(a), Some(b)) = (sw.down_equals_lambda, sw.up_equals_lambda_perp) {
        t.check("sandwich_equality", a && b, || json!(sw));
    }

    let qa = sample_almost_selfdual(k, p, random_kind(rng, k), rng);
    let ta = sample_almost_selfdual(k, p, random_kind(rng, k), rng);
    let ca = chi(&g, &qa, &ta)?;
    t.check_result(
        "almost_self_duality",
        is_almost_selfdual_vv(&ca, alpha),
        || json!({"Q": mj(&qa), "T": mj(&ta), "chi": rj(&ca)}),
    );

    let inv = chi(&g.involute(), &tt, &q)?;
    t.check(
        "involution",
        inv == cg.pseudo_inverse(),
        || json!({"g": g, "chi_inverse": rj(&inv)}),
    );

    let lambda = match rng.gen_range(0..3) {
        0 => Rational::p_pow(p, 1),
        1 => Rational::p_pow(p, -1),
        _ => Rational::from_int(2),
    };
    let mh = m_lambda(&lambda, k)?;
    let lhs = chi(&g, &q.image(&mh)?, &tt.image(&mh)?)?;
    let rhs = conjugate(&cg, &m_lambda(&lambda, alpha)?)?;
    t.check(
        "m_lambda_equivariance",
        lhs == rhs,
        || json!({"lambda": lambda, "lhs": rj(&lhs), "rhs": rj(&rhs)}),
    );
    let flipped = conjugate(&cg, &m_lambda(&lambda.recip().expect("nonzero"), alpha)?)?;
    if lhs == flipped {
        t.note("m_lambda_reversed_orientation_agrees");
    } else {
        t.note("m_lambda_reversed_orientation_differs");
    }

    if rng.gen_bool(0.25) {
        let gs = sample_sp_block(alpha, k, l, p, rng);
        let hs = sample_sp_block(alpha, k, m, p, rng);
        let xg = chi_sp(&gs, &q, &tt)?;
        let xh = chi_sp(&hs, &q, &tt)?;
        let xf = chi_sp(&sp_coset_mul(&gs, &hs)?, &q, &tt)?;
        t.check(
            "sp_multiplicativity",
            xf == xg.compose(&xh)?,
            || json!({"gs": gs, "hs": hs}),
        );
        t.check_result(
            "sp_self_duality",
            is_selfdual_vv(&xf, alpha),
            || json!({"chi": rj(&xf)}),
        );
        let xinv = chi_sp(&gs.involute(), &tt, &q)?;
        t.check(
            "sp_involution",
            xinv == xg.pseudo_inverse(),
            || json!({"gs": gs}),
        );
    }
    Ok(())
}

/// Representative independence, `m`-independence, Θ-stabilization,
/// coset-level associativity and the involution anti-homomorphism.
pub fn cosets_suite(cfg: &SuiteConfig) -> SuiteReport {
    run_trials("cosets", cfg, cfg.trials, |t, rng, p| {
        cosets_trial(t, rng, p)
    })
}

fn cosets_trial(t: &mut Trial, rng: &mut TrialRng, p: Prime) -> Result<()> {
    let alpha = rng.gen_range(1..=2);
    let k = rng.gen_range(1..=2);
    let l = rng.gen_range(1..=2);
    let m = rng.gen_range(1..=2);
    let g = sample_block_element(alpha, k, l, p, rng)?;
    let h = sample_block_element(alpha, k, m, p, rng)?;
    let q = sample_selfdual(k, p, random_kind(rng, k), rng);
    let tt = sample_selfdual(k, p, random_kind(rng, k), rng);
    let cg = chi(&g, &q, &tt)?;

    let u = sample_orthogonal_int(l, p, rng);
    let u2 = sample_orthogonal_int(l, p, rng);
    let moved = embed_orthogonal(&u, alpha, k, p)?
        .mul(&g)?
        .mul(&embed_orthogonal(&u2, alpha, k, p)?)?;
    t.check(
        "representative_independence",
        chi(&moved, &q, &tt)? == cg,
        || json!({"g": g, "u": u, "u2": u2}),
    );
    t.check(
        "m_independence",
        chi(&g.pad(l + 1)?, &q, &tt)? == cg,
        || json!({"g": g}),
    );

    let f = coset_mul(&g, &h)?;
    let cf = chi(&f, &q, &tt)?;
    let n0 = l.max(m);
    for n in n0..=n0 + 2 {
        let fn_ = theta_product(&g, &h, n)?;
        t.check(
            "theta_stabilization",
            chi(&fn_, &q, &tt)? == cf,
            || json!({"g": g, "h": h, "N": n}),
        );
    }
    if l == m {
        let at_m = theta_product(&g, &h, m)?;
        if at_m.matrix() == f.matrix() {
            t.note("theta_matrix_equal");
        } else {
            t.note("theta_matrix_differs");
        }
    }

    let star_inv = chi(&f.involute(), &q, &tt)?;
    let inv_star = chi(&coset_mul(&h.involute(), &g.involute())?, &q, &tt)?;
    t.check(
        "involution_antihomomorphism",
        star_inv == inv_star,
        || json!({"g": g, "h": h}),
    );

    if rng.gen_bool(0.5) {
        let e = sample_block_element(alpha, k, 1, p, rng)?;
        let g1 = sample_block_element(alpha, k, 1, p, rng)?;
        let h1 = sample_block_element(alpha, k, 1, p, rng)?;
        let left = coset_mul(&coset_mul(&e, &g1)?, &h1)?;
        let right = coset_mul(&e, &coset_mul(&g1, &h1)?)?;
        t.check(
            "associativity",
            chi(&left, &q, &tt)? == chi(&right, &q, &tt)?,
            || json!({"f": e, "g": g1, "h": h1}),
        );
        if left.matrix() == right.matrix() {
            t.note("associativity_matrix_equal");
        } else {
            t.note("associativity_matrix_differs");
        }
    }
    Ok(())
}

fn random_symmetric_rational(rng: &mut TrialRng, k: usize, p: Prime) -> Matrix {
    let mut s = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let mut x = Rational::from_int(rng.gen_range(-3..=3));
            if rng.gen_bool(0.2) {
                x = &x * &Rational::p_pow(p, -1);
            }
            s[(i, j)] = x.clone();
            s[(j, i)] = x;
        }
    }
    s
}

/// Values of `χ` on Lagrangian graphs, the symmetric matrix `Z`, and the
/// singular locus.
pub fn boundary_suite(cfg: &SuiteConfig) -> SuiteReport {
    run_trials("boundary", cfg, cfg.trials, |t, rng, p| {
        boundary_trial(t, rng, p)
    })
}

fn boundary_trial(t: &mut Trial, rng: &mut TrialRng, p: Prime) -> Result<()> {
    let alpha = rng.gen_range(1..=2);
    let k = rng.gen_range(1..=2);
    let m = rng.gen_range(1..=2);
    let g = sample_block_element(alpha, k, m, p, rng)?;
    let v = SymplecticForm::standard(alpha);
    let ominus = SymplecticForm::ominus(&v, &v);
    let mut done = false;
    for _ in 0..8 {
        let kappa = random_symmetric_rational(rng, k, p);
        let tau = random_symmetric_rational(rng, k, p);
        match chi_boundary(&g, &kappa, &tau, p) {
            Err(Error::SingularBoundary) => {
                t.note("singular_resampled");
                continue;
            }
            Err(e) => {
                let msg = e.to_string();
                t.check(
                    "boundary_value",
                    false,
                    || json!({"g": g, "kappa": kappa, "tau": tau, "error": msg}),
                );
            }
            Ok(value) => {
                t.check("boundary_value", true, || Value::Null);
                let rel = match &value {
                    BoundaryValue::Symplectic(s) => {
                        t.note("graph");
                        t.check_result("symplectic_graph", v.preserved_by(s), || json!({"S": s}));
                        Relation::graph(p, s)
                    }
                    BoundaryValue::Relation(r) => {
                        t.note("non_graph");
                        r.clone()
                    }
                };
                t.check_result(
                    "lagrangian",
                    rel.body().is_selfdual(&ominus),
                    || json!({"chi": rj(&rel)}),
                );
                let q = crate::charfn::symmetric_graph(&tau, p)?;
                let tg = crate::charfn::symmetric_graph(&kappa, p)?;
                t.check(
                    "dual_path",
                    chi(&g, &q, &tg)? == rel,
                    || json!({"g": g, "kappa": kappa, "tau": tau}),
                );
                match z_matrix(&g, &kappa, &tau) {
                    Ok(z) => t.check("z_symmetric", z.is_symmetric(), || json!({"Z": z})),
                    Err(e) => {
                        let msg = e.to_string();
                        t.check("z_symmetric", false, || json!({"error": msg}))
                    }
                }
            }
        }
        done = true;
        break;
    }
    if !done {
        t.note("all_samples_singular");
    }
    // A configuration on the singular hypersurface must be reported as such.
    let g1 = sample_block_element(alpha, k, 1, p, rng)?;
    let kappa = random_symmetric_rational(rng, k, p);
    let d = g1.d_all();
    let tau = d.transpose().mul(&kappa)?.mul(&d)?;
    let r = chi_boundary(&g1, &kappa, &tau, p);
    t.check("singular_detected", matches!(r, Err(Error::SingularBoundary)), || {
        json!({"g": g1, "kappa": kappa, "tau": tau, "result": format!("{:?}", r.as_ref().map(|_| ()))})
    });
    Ok(())
}
