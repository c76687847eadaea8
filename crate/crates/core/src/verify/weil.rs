//! Numerical checks of the finite-level Heisenberg and Weil operators.

use num_complex::Complex64;
use rand::Rng;
use serde_json::json;

use super::algebra::random_rational;
use super::{run_trials, SuiteConfig, SuiteReport, Trial};
use crate::arith::{Matrix, Prime, Rational};
use crate::error::Result;
use crate::sample::TrialRng;
use crate::weil::{
    commutator_residual, covariance_residual, distance, heis_op, lambda_op, parity,
    projective_scalar, theta_op, tokens_product, unitarity_residual, weil_fourier, weil_of,
    CMatrix, FiniteModel, FiniteOperator, HeisConvention, Sl2Token,
};

const UNITARY_TOL: f64 = 1e-9;
const PROJECTIVE_TOL: f64 = 1e-8;
const SCALAR_TOL: f64 = 1e-9;
const COMMUTATOR_TOL: f64 = 1e-10;
const LAMBDA_TOL: f64 = 1e-12;

/// Random element of `SL(2, Z_(p))` as a product of generators.
fn random_sl2(rng: &mut TrialRng, p: Prime) -> Matrix {
    let len = rng.gen_range(2..=5);
    let tokens: Vec<Sl2Token> = (0..len)
        .map(|_| match rng.gen_range(0..3) {
            0 => Sl2Token::Upper(random_rational(rng, p, 0, 2)),
            1 => loop {
                let a = random_rational(rng, p, 0, 0);
                if !a.is_zero() {
                    break Sl2Token::Diag(a);
                }
            },
            _ => Sl2Token::Fourier,
        })
        .collect();
    tokens_product(&tokens)
}

fn window_vector(rng: &mut TrialRng, p: Prime, depth: i64) -> (Rational, Rational) {
    (
        random_rational(rng, p, -depth, depth),
        random_rational(rng, p, -depth, depth),
    )
}

/// Unitarity, projectivity, covariance, the Heisenberg commutator, Fourier
/// periodicity and the `λ`/`θ` identities. Projectivity and covariance run
/// at `p = 3, N = 2`; the commutator also runs at `N = 1` for every odd
/// prime in the configuration.
pub fn weil_suite(cfg: &SuiteConfig) -> SuiteReport {
    run_trials("weil", cfg, cfg.trials, |t, rng, p| {
        if t.index() == 0 {
            fixed_weil_checks(t)?;
        }
        weil_trial(t, rng, p)
    })
}

fn fixed_weil_checks(t: &mut Trial) -> Result<()> {
    let p = Prime::new(3)?;
    let model = FiniteModel::new(p, 2, 1)?;
    let n = model.size();
    let f = weil_fourier(model)?;
    t.check(
        "generator_unitary",
        unitarity_residual(&f) < UNITARY_TOL,
        || json!({"op": "fourier"}),
    );
    let f2 = &f.matrix * &f.matrix;
    let (s2, r2) = projective_scalar(&f2, &parity(model)?.matrix);
    t.check(
        "fourier_square_parity",
        r2 < PROJECTIVE_TOL && (s2.norm() - 1.0).abs() < SCALAR_TOL,
        || json!({"scalar": [s2.re, s2.im], "residual": r2}),
    );
    let (s4, r4) = projective_scalar(&(&f2 * &f2), &CMatrix::identity(n, n));
    t.check(
        "fourier_fourth_identity",
        r4 < PROJECTIVE_TOL && (s4.norm() - 1.0).abs() < SCALAR_TOL,
        || json!({"scalar": [s4.re, s4.im], "residual": r4}),
    );
    let (si, ri) = projective_scalar(
        &weil_of(model, &Matrix::identity(2))?.matrix,
        &CMatrix::identity(n, n),
    );
    t.check(
        "identity_element",
        ri < PROJECTIVE_TOL && (si.norm() - 1.0).abs() < SCALAR_TOL,
        || json!({"residual": ri}),
    );

    // λ from the one- to the two-dimensional model at N = 1.
    let src = FiniteModel::new(p, 1, 1)?;
    let dst = FiniteModel::new(p, 1, 2)?;
    let l = lambda_op(src, dst)?;
    let ll = l.adjoint().compose(&l)?;
    t.check(
        "lambda_isometry",
        distance(&ll.matrix, &FiniteOperator::identity(src).matrix) < LAMBDA_TOL,
        || json!({"residual": distance(&ll.matrix, &FiniteOperator::identity(src).matrix)}),
    );
    let th = theta_op(dst)?;
    let llstar = l.compose(&l.adjoint())?;
    t.check(
        "theta_factorization",
        distance(&th.matrix, &llstar.matrix) < LAMBDA_TOL,
        || json!(null),
    );
    t.check(
        "theta_idempotent",
        distance(&(&th.matrix * &th.matrix), &th.matrix) < LAMBDA_TOL,
        || json!(null),
    );
    t.check(
        "theta_selfadjoint",
        distance(&th.matrix.adjoint(), &th.matrix) < LAMBDA_TOL,
        || json!(null),
    );
    t.check(
        "theta_fixes_lambda_range",
        distance(&(&th.matrix * &l.matrix), &l.matrix) < LAMBDA_TOL,
        || json!(null),
    );
    Ok(())
}

fn weil_trial(t: &mut Trial, rng: &mut TrialRng, p_cfg: Prime) -> Result<()> {
    let p = Prime::new(3)?;
    let model = FiniteModel::new(p, 2, 1)?;
    let g = random_sl2(rng, p);
    let h = random_sl2(rng, p);
    let wg = weil_of(model, &g)?;
    let wh = weil_of(model, &h)?;
    let wgh = weil_of(model, &g.mul(&h)?)?;
    for (name, w) in [("g", &wg), ("h", &wh), ("gh", &wgh)] {
        let r = unitarity_residual(w);
        t.check(
            "weil_unitary",
            r < UNITARY_TOL,
            || json!({"which": name, "residual": r}),
        );
    }
    let (s, r) = projective_scalar(&(&wg.matrix * &wh.matrix), &wgh.matrix);
    t.check(
        "projectivity",
        r < PROJECTIVE_TOL && (s.norm() - 1.0).abs() < SCALAR_TOL,
        || json!({"g": g, "h": h, "scalar": [s.re, s.im], "residual": r}),
    );

    let (vp, vm) = window_vector(rng, p, 2);
    let (c, rc) = covariance_residual(model, &g, (&vp, &vm))?;
    t.check(
        "covariance",
        rc < UNITARY_TOL && (c.norm() - 1.0).abs() < SCALAR_TOL,
        || json!({"g": g, "v": [vp, vm], "scalar": [c.re, c.im], "residual": rc}),
    );

    let v = window_vector(rng, p, 2);
    let w = window_vector(rng, p, 2);
    let rc = commutator_residual(model, (&v.0, &v.1), (&w.0, &w.1), HeisConvention::Corrected)?;
    t.check(
        "commutator_phase",
        rc < COMMUTATOR_TOL,
        || json!({"v": [v.0, v.1], "w": [w.0, w.1], "residual": rc}),
    );
    let h_unit = heis_op(
        model,
        &v.0,
        &v.1,
        Complex64::new(0.6, 0.8),
        HeisConvention::Corrected,
    )?;
    t.check(
        "heisenberg_unitary",
        unitarity_residual(&h_unit) < UNITARY_TOL,
        || json!(null),
    );

    // As printed, every pair of operators commutes.
    let one = Complex64::new(1.0, 0.0);
    let a = heis_op(model, &v.0, &v.1, one, HeisConvention::AsWritten)?.matrix;
    let b = heis_op(model, &w.0, &w.1, one, HeisConvention::AsWritten)?.matrix;
    if distance(&(&a * &b), &(&b * &a)) < COMMUTATOR_TOL {
        t.note("as_written_commutes");
    } else {
        t.note("as_written_noncommuting");
    }
    let expected = (&(&v.0 * &w.1) - &(&v.1 * &w.0)).char_value(p);
    if (expected - one).norm() > 1e-6 {
        t.note("nontrivial_pairing");
    }

    if p_cfg.get() != 2 {
        let small = FiniteModel::new(p_cfg, 1, 1)?;
        let v = window_vector(rng, p_cfg, 1);
        let w = window_vector(rng, p_cfg, 1);
        let rs = commutator_residual(small, (&v.0, &v.1), (&w.0, &w.1), HeisConvention::Corrected)?;
        t.check(
            "commutator_phase",
            rs < COMMUTATOR_TOL,
            || json!({"p": p_cfg.get(), "v": [v.0, v.1], "w": [w.0, w.1], "residual": rs}),
        );
        let fs = weil_fourier(small)?;
        t.check(
            "generator_unitary",
            unitarity_residual(&fs) < UNITARY_TOL,
            || json!({"p": p_cfg.get()}),
        );
    } else {
        t.note("prime_two_skipped");
    }
    Ok(())
}
