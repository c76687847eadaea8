//! Suites for scalars and echelon forms, modules, relations and the
//! Nazarov category.

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::json;

use super::{run_trials, SuiteConfig, SuiteReport, Trial};
use crate::arith::{dvr_echelon, Matrix, Prime, Rational, Valuation};
use crate::error::Result;
use crate::module::{Module, ModuleJson, SymplecticForm};
use crate::relation::{Relation, RelationJson};
use crate::sample::{sample_selfdual_relation, sample_selfdual_relation_nf, ModuleKind, TrialRng};

/// `u·p^e` with `u` a small ratio of integers prime to `p`, or zero.
pub(crate) fn random_rational(rng: &mut TrialRng, p: Prime, emin: i64, emax: i64) -> Rational {
    if rng.gen_bool(0.15) {
        return Rational::zero();
    }
    let pu = p.get() as i64;
    let unit = |rng: &mut TrialRng| loop {
        let x: i64 = rng.gen_range(1..=12);
        if x % pu != 0 {
            return x;
        }
    };
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let u = Rational::new(sign * unit(rng), unit(rng));
    &u * &Rational::p_pow(p, rng.gen_range(emin..=emax))
}

fn random_matrix(
    rng: &mut TrialRng,
    p: Prime,
    rows: usize,
    cols: usize,
    emin: i64,
    emax: i64,
) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = random_rational(rng, p, emin, emax);
        }
    }
    m
}

/// Random module with free and integral generators.
pub(crate) fn random_module(
    rng: &mut TrialRng,
    p: Prime,
    dim: usize,
    emin: i64,
    emax: i64,
) -> Module {
    let f = rng.gen_range(0..=dim / 2);
    let s = rng.gen_range(0..=dim);
    let free = random_matrix(rng, p, f, dim, emin, emax);
    let int = random_matrix(rng, p, s, dim, emin, emax);
    Module::new(p, dim, &free, &int).expect("shapes")
}

/// A random unit of `Z_(p)`.
fn random_unit(rng: &mut TrialRng, p: Prime) -> Rational {
    loop {
        let x = random_rational(rng, p, 0, 0);
        if !x.is_zero() {
            return x;
        }
    }
}

/// A product of random elementary operations invertible over `Z_(p)`.
fn random_unimodular(rng: &mut TrialRng, p: Prime, n: usize) -> Matrix {
    let mut u = Matrix::identity(n);
    for _ in 0..3 * n {
        let mut e = Matrix::identity(n);
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        match rng.gen_range(0..3) {
            0 => e.swap_rows(i, j),
            1 => e[(i, i)] = random_unit(rng, p),
            _ if i != j => e[(i, j)] = random_rational(rng, p, 0, 2),
            _ => {}
        }
        u = e.mul(&u).expect("square");
    }
    u
}

fn mj(m: &Module) -> serde_json::Value {
    json!(ModuleJson::from(m))
}

/// Valuations, fractional parts, echelon canonicality and inversion.
pub fn arith_suite(cfg: &SuiteConfig) -> SuiteReport {
    run_trials("arith", cfg, cfg.trials, arith_trial)
}

fn arith_trial(t: &mut Trial, rng: &mut TrialRng, p: Prime) -> Result<()> {
    for _ in 0..10 {
        let x = random_rational(rng, p, -6, 6);
        let y = random_rational(rng, p, -6, 6);
        let lhs = (&x * &y).valuation(p);
        let rhs = sum_val(x.valuation(p), y.valuation(p));
        t.check(
            "valuation_multiplicative",
            lhs == rhs,
            || json!({"x": x, "y": y}),
        );
        let f = x.frac_part(p);
        t.check(
            "frac_idempotent",
            (&x - &f).frac_part(p).is_zero(),
            || json!({"x": x}),
        );
    }
    // Large numerators exercise the arbitrary-precision path.
    let mut big = Rational::one();
    for _ in 0..rng.gen_range(1..6) {
        big = &big
            * &Rational::new(
                rng.gen_range(1_000_000_007..2_000_000_000),
                rng.gen_range(1..1000),
            );
    }
    let pe = Rational::p_pow(p, rng.gen_range(-5..=5));
    let prod = &big * &pe;
    t.check(
        "valuation_multiplicative",
        prod.valuation(p) == sum_val(big.valuation(p), pe.valuation(p)),
        || json!({"x": big, "y": pe}),
    );

    let rows = rng.gen_range(1..=4);
    let cols = rng.gen_range(1..=4);
    let m = random_matrix(rng, p, rows, cols, -2, 2);
    let u = random_unimodular(rng, p, rows);
    let e1 = dvr_echelon(&m, p);
    let e2 = dvr_echelon(&u.mul(&m)?, p);
    t.check("echelon_canonical", e1 == e2, || json!({"M": m, "U": u}));

    let n = rng.gen_range(1..=5);
    let a = random_matrix(rng, p, n, n, -2, 2);
    if let Ok(inv) = a.invert() {
        t.check(
            "inverse",
            a.mul(&inv)? == Matrix::identity(n) && inv.mul(&a)? == Matrix::identity(n),
            || json!({"A": a}),
        );
    } else {
        t.check("inverse", a.det()?.is_zero(), || json!({"A": a}));
    }
    Ok(())
}

fn sum_val(a: Valuation, b: Valuation) -> Valuation {
    match (a, b) {
        (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
        _ => Valuation::Infinite,
    }
}

/// Canonical-form congruence, duality laws and the exhaustive Fig. 1 scan.
pub fn modules_suite(cfg: &SuiteConfig) -> SuiteReport {
    run_trials("modules", cfg, cfg.trials, |t, rng, p| {
        if t.index() == 0 {
            for &q in &cfg.primes {
                classifier_scan(t, q)?;
            }
        }
        modules_trial(t, rng, p)
    })
}

/// All diagonal lattices `p^{k1}e1 ⊕ p^{k2}e2 ⊕ p^{l1}f1 ⊕ p^{l2}f2` with
/// exponents in `[-2, 2]`: almost self-dual iff `k_i + l_i ∈ {0, -1}`.
fn classifier_scan(t: &mut Trial, p: Prime) -> Result<()> {
    let form = SymplecticForm::standard(2);
    for k1 in -2..=2i64 {
        for k2 in -2..=2i64 {
            for l1 in -2..=2i64 {
                for l2 in -2..=2i64 {
                    let r = Module::diagonal_lattice(p, &[k1, k2, l1, l2]);
                    let expect = [k1 + l1, k2 + l2].iter().all(|s| *s == 0 || *s == -1);
                    let got = r.is_almost_selfdual(&form)?;
                    t.check(
                        "fig1_classifier",
                        got == expect,
                        || json!({"p": p.get(), "exponents": [k1, k2, l1, l2], "expected": expect}),
                    );
                }
            }
        }
    }
    t.note("fig1_primes_scanned");
    Ok(())
}

fn modules_trial(t: &mut Trial, rng: &mut TrialRng, p: Prime) -> Result<()> {
    let n = rng.gen_range(1..=2);
    let dim = 2 * n;
    let form = SymplecticForm::standard(n);
    let r = random_module(rng, p, dim, -3, 3);

    // Reshuffle and rescale the generators, mix integral rows by Z_(p)
    // combinations and add free multiples; the span is unchanged.
    let (free, int) = r.generators();
    let mut fr = free.row_vecs();
    fr.shuffle(rng);
    let fr: Vec<Vec<Rational>> = fr
        .into_iter()
        .map(|row| {
            let c = random_rational(rng, p, -3, 3);
            if c.is_zero() {
                row
            } else {
                row.iter().map(|x| x * &c).collect()
            }
        })
        .collect();
    let mut ir = int.row_vecs();
    ir.shuffle(rng);
    let mut ir: Vec<Vec<Rational>> = ir
        .into_iter()
        .map(|row| {
            let u = random_unit(rng, p);
            row.iter().map(|x| x * &u).collect()
        })
        .collect();
    for i in 0..ir.len() {
        for j in 0..ir.len() {
            if i != j && rng.gen_bool(0.3) {
                let c = random_rational(rng, p, 0, 2);
                let src = ir[j].clone();
                for (a, b) in ir[i].iter_mut().zip(&src) {
                    *a = &*a + &(&c * b);
                }
            }
        }
        for f in &fr {
            let c = random_rational(rng, p, -3, 3);
            for (a, b) in ir[i].iter_mut().zip(f) {
                *a = &*a + &(&c * b);
            }
        }
    }
    let again = Module::new(
        p,
        dim,
        &Matrix::from_rows(fr, dim)?,
        &Matrix::from_rows(ir, dim)?,
    )?;
    t.check(
        "congruence",
        again == r,
        || json!({"R": mj(&r), "presentation": mj(&again)}),
    );

    let d = r.dual(&form)?;
    t.check(
        "dual_involution",
        d.dual(&form)? == r,
        || json!({"R": mj(&r)}),
    );

    let extra = random_module(rng, p, dim, -3, 3);
    let r2 = r.sum(&extra)?;
    t.check(
        "dual_antitone",
        d.contains(&r2.dual(&form)?)?,
        || json!({"R1": mj(&r), "R2": mj(&r2)}),
    );

    let lhs = r.intersect(&extra)?.dual(&form)?;
    let rhs = d.sum(&extra.dual(&form)?)?;
    t.check(
        "intersect_sum_duality",
        lhs == rhs,
        || json!({"R1": mj(&r), "R2": mj(&extra)}),
    );

    let up = r.up();
    let orth = if up.rows() == 0 {
        Matrix::identity(dim)
    } else {
        up.mul(form.gram())?.nullspace()
    };
    let orth = Module::subspace(p, &orth);
    t.check("down_up", d.down_module() == orth, || json!({"R": mj(&r)}));
    Ok(())
}

/// Random relation `Q^{a} ⇒ Q^{b}`.
fn random_relation(rng: &mut TrialRng, p: Prime, a: usize, b: usize) -> Relation {
    Relation::new(a, b, random_module(rng, p, a + b, -2, 2)).expect("dimensions")
}

fn rj(r: &Relation) -> serde_json::Value {
    json!(RelationJson::from(r))
}

/// Composition associativity, pseudo-inverse contravariance and
/// kernel/domain duality.
pub fn relations_suite(cfg: &SuiteConfig) -> SuiteReport {
    run_trials("relations", cfg, cfg.trials, |t, rng, p| {
        relations_trial(t, rng, p)
    })
}

fn relations_trial(t: &mut Trial, rng: &mut TrialRng, p: Prime) -> Result<()> {
    let d: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=2)).collect();
    let a = random_relation(rng, p, d[0], d[1]);
    let b = random_relation(rng, p, d[1], d[2]);
    let c = random_relation(rng, p, d[2], d[3]);
    let left = c.compose(&b)?.compose(&a)?;
    let right = c.compose(&b.compose(&a)?)?;
    t.check(
        "associativity",
        left == right,
        || json!({"T": rj(&a), "S": rj(&b), "R": rj(&c)}),
    );

    let pq = b.compose(&a)?;
    let swapped = a.pseudo_inverse().compose(&b.pseudo_inverse())?;
    t.check(
        "pseudo_inverse_contravariant",
        pq.pseudo_inverse() == swapped,
        || json!({"Q": rj(&a), "P": rj(&b)}),
    );

    let (x, y) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
    let nz = sample_selfdual_relation(x, y, p, rng)?;
    let (bx, by) = (SymplecticForm::standard(x), SymplecticForm::standard(y));
    t.check(
        "kernel_dom_duality",
        nz.kernel()?.dual(&bx)? == nz.dom()?,
        || json!({"P": rj(&nz)}),
    );
    t.check(
        "indef_im_duality",
        nz.indef()?.dual(&by)? == nz.im()?,
        || json!({"P": rj(&nz)}),
    );
    Ok(())
}

/// Closure of self-dual relations, and of lattice relations, under composition.
pub fn nazarov_suite(cfg: &SuiteConfig) -> SuiteReport {
    run_trials("nazarov", cfg, cfg.trials, |t, rng, p| {
        nazarov_trial(t, rng, p)
    })
}

fn nazarov_trial(t: &mut Trial, rng: &mut TrialRng, p: Prime) -> Result<()> {
    let d: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=2)).collect();
    let forms: Vec<SymplecticForm> = d.iter().map(|&n| SymplecticForm::standard(n)).collect();
    let pr = sample_selfdual_relation(d[0], d[1], p, rng)?;
    let qr = sample_selfdual_relation(d[1], d[2], p, rng)?;
    let qp = qr.compose(&pr)?;
    t.check_result(
        "closure",
        qp.is_nazarov(&forms[0], &forms[2], false),
        || json!({"P": rj(&pr), "Q": rj(&qr)}),
    );

    let pl = sample_selfdual_relation_nf(d[0], d[1], p, ModuleKind::Lattice, rng);
    let ql = sample_selfdual_relation_nf(d[1], d[2], p, ModuleKind::Lattice, rng);
    let ql_pl = ql.compose(&pl)?;
    t.check_result(
        "closure",
        ql_pl.is_nazarov(&forms[0], &forms[2], false),
        || json!({"P": rj(&pl), "Q": rj(&ql)}),
    );
    t.check(
        "lattice_closure",
        ql_pl.body().is_lattice(),
        || json!({"P": rj(&pl), "Q": rj(&ql)}),
    );
    Ok(())
}
