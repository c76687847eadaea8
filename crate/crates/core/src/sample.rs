//! Seeded samplers for test data. Every sampler is a pure function of the
//! generator state handed to it.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{Matrix, Prime, Rational};
use crate::coset::{BlockElement, SpBlockElement};
use crate::error::{Error, Result};
use crate::module::{Module, SymplecticForm};
use crate::relation::Relation;

pub type TrialRng = ChaCha8Rng;

const MAX_ATTEMPTS: usize = 64;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial generator: `hash(seed, suite, index)` seeds a ChaCha8 stream.
pub fn trial_rng(seed: u64, suite: &str, index: u64) -> TrialRng {
    let mut h = splitmix64(seed);
    for b in suite.bytes() {
        h = splitmix64(h ^ b as u64);
    }
    h = splitmix64(h ^ index);
    ChaCha8Rng::seed_from_u64(h)
}

fn small(rng: &mut impl Rng, bound: i64) -> Rational {
    Rational::from_int(rng.gen_range(-bound..=bound))
}

fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: i64) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = small(rng, bound);
        }
    }
    m
}

fn random_symmetric(rng: &mut impl Rng, n: usize, bound: i64) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = small(rng, bound);
            m[(i, j)] = x.clone();
            m[(j, i)] = x;
        }
    }
    m
}

fn signed_permutation(rng: &mut impl Rng, n: usize) -> Matrix {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut m = Matrix::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        m[(i, j)] = if rng.gen_bool(0.5) {
            Rational::one()
        } else {
            -Rational::one()
        };
    }
    m
}

/// Cayley transform `(1 - S)(1 + S)^{-1}` of a skew `S` with entries in
/// `p·Z`, times a random signed permutation. Orthogonal with integral entries.
pub fn sample_orthogonal_int(size: usize, p: Prime, rng: &mut impl Rng) -> Matrix {
    let pp = Rational::from_int(p.get() as i64);
    let mut s = Matrix::zeros(size, size);
    for i in 0..size {
        for j in i + 1..size {
            let x = &small(rng, 1) * &pp;
            s[(j, i)] = -&x;
            s[(i, j)] = x;
        }
    }
    let id = Matrix::identity(size);
    let plus = id.add(&s).expect("square");
    let minus = id.sub(&s).expect("square");
    // det(1 + S) > 0 for real skew S, so the inverse exists.
    let cayley = minus
        .mul(&plus.invert().expect("1 + S is invertible"))
        .expect("square");
    cayley.mul(&signed_permutation(rng, size)).expect("square")
}

/// Random invertible block element with small integer entries, sometimes
/// with one row scaled by `p^{±1}`.
pub fn sample_block_element(
    alpha: usize,
    k: usize,
    m: usize,
    p: Prime,
    rng: &mut impl Rng,
) -> Result<BlockElement> {
    let n = alpha + k * m;
    for _ in 0..MAX_ATTEMPTS {
        let mut g = random_matrix(rng, n, n, 2);
        if rng.gen_bool(0.5) {
            let r = rng.gen_range(0..n);
            let e = if rng.gen_bool(0.5) { 1 } else { -1 };
            let s = Rational::p_pow(p, e);
            for x in g.row_mut(r) {
                *x = &*x * &s;
            }
        }
        if !g.det()?.is_zero() {
            return BlockElement::new(alpha, k, m, g);
        }
    }
    Err(Error::SamplerExhausted(MAX_ATTEMPTS))
}

/// Random element of `Sp(2n, Q)` as a short product of elementary
/// symplectic matrices.
pub fn sample_symplectic(n: usize, p: Prime, rng: &mut impl Rng) -> Matrix {
    let id = Matrix::identity(n);
    let zero = Matrix::zeros(n, n);
    let mut acc = Matrix::identity(2 * n);
    for _ in 0..3 {
        let factor = match rng.gen_range(0..3) {
            0 => {
                let s = random_symmetric(rng, n, 2);
                block2(&id, &s, &zero, &id)
            }
            1 => {
                let s = random_symmetric(rng, n, 2);
                block2(&id, &zero, &s, &id)
            }
            _ => {
                let a = loop {
                    let mut a = random_matrix(rng, n, n, 2);
                    if rng.gen_bool(0.3) {
                        let r = rng.gen_range(0..n);
                        let s = Rational::p_pow(p, 1);
                        for x in a.row_mut(r) {
                            *x = &*x * &s;
                        }
                    }
                    if !a.det().expect("square").is_zero() {
                        break a;
                    }
                };
                let inv_t = a.invert().expect("invertible").transpose();
                block2(&a, &zero, &zero, &inv_t)
            }
        };
        acc = acc.mul(&factor).expect("square");
    }
    acc
}

fn block2(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Matrix {
    let top = Matrix::hstack(&[a, b]).expect("shapes");
    let bottom = Matrix::hstack(&[c, d]).expect("shapes");
    Matrix::vstack(&[&top, &bottom]).expect("shapes")
}

/// Shape of a sampled self-dual module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuleKind {
    Lattice,
    Lagrangian,
    Mixed,
    /// Any of the above, chosen per coordinate pair.
    Any,
}

/// Normal-form module over `Q^{2n}` (pairs `e_i ↔ e_{n+i}`), one summand
/// per pair. `almost` allows the `p^a e ⊕ p^{-a-1} f` summand.
fn normal_form(n: usize, p: Prime, kind: ModuleKind, almost: bool, rng: &mut impl Rng) -> Module {
    let mut free = Matrix::zeros(0, 2 * n);
    let mut int = Matrix::zeros(0, 2 * n);
    for i in 0..n {
        let choice = match kind {
            ModuleKind::Lattice => 0,
            ModuleKind::Lagrangian => 1,
            ModuleKind::Mixed => {
                if i == 0 {
                    0
                } else if i == 1 {
                    1
                } else {
                    rng.gen_range(0..2)
                }
            }
            ModuleKind::Any => rng.gen_range(0..2),
        };
        let mut e = vec![Rational::zero(); 2 * n];
        let mut f = vec![Rational::zero(); 2 * n];
        if choice == 0 {
            let a = rng.gen_range(-1..=1);
            let shift = if almost && rng.gen_bool(0.5) { -1 } else { 0 };
            e[i] = Rational::p_pow(p, a);
            f[n + i] = Rational::p_pow(p, -a + shift);
            int.push_row(&e);
            int.push_row(&f);
        } else if rng.gen_bool(0.5) {
            e[i] = Rational::one();
            free.push_row(&e);
        } else {
            f[n + i] = Rational::one();
            free.push_row(&f);
        }
    }
    Module::new(p, 2 * n, &free, &int).expect("shapes")
}

/// Random self-dual module for the standard form on `Q^{2n}`: the image of
/// a normal form under a random symplectic matrix.
pub fn sample_selfdual(n: usize, p: Prime, kind: ModuleKind, rng: &mut impl Rng) -> Module {
    let nf = normal_form(n, p, kind, false, rng);
    nf.image(&sample_symplectic(n, p, rng)).expect("shapes")
}

/// Random almost self-dual module for the standard form.
pub fn sample_almost_selfdual(n: usize, p: Prime, kind: ModuleKind, rng: &mut impl Rng) -> Module {
    let nf = normal_form(n, p, kind, true, rng);
    nf.image(&sample_symplectic(n, p, rng)).expect("shapes")
}

/// Random almost self-dual *lattice* for the standard form.
pub fn sample_almost_selfdual_lattice(n: usize, p: Prime, rng: &mut impl Rng) -> Module {
    sample_almost_selfdual(n, p, ModuleKind::Lattice, rng)
}

/// Random symplectic block element in the doubled layout.
pub fn sample_sp_block(
    alpha: usize,
    k: usize,
    m: usize,
    p: Prime,
    rng: &mut impl Rng,
) -> SpBlockElement {
    let n = alpha + k * m;
    SpBlockElement::new(alpha, k, m, sample_symplectic(n, p, rng))
        .expect("sampled matrix is symplectic")
}

/// Maps a module that is self-dual for the standard form on `Q^{2(a+b)}`
/// to one that is self-dual for `B_a ⊖ B_b` on `Q^{2a} ⊕ Q^{2b}`.
fn to_ominus(m: &Module, a: usize, b: usize) -> Module {
    let n = a + b;
    // (v⁺, w⁺, v⁻, w⁻) → (v⁺, v⁻, w⁺, -w⁻)
    let mut t = Matrix::zeros(2 * n, 2 * n);
    for i in 0..a {
        t[(i, i)] = Rational::one();
        t[(a + i, n + i)] = Rational::one();
    }
    for i in 0..b {
        t[(2 * a + i, a + i)] = Rational::one();
        t[(2 * a + b + i, n + a + i)] = -Rational::one();
    }
    m.image(&t).expect("shapes")
}

/// Random self-dual relation `Q^{2a} ⇒ Q^{2b}` built from a normal form.
pub fn sample_selfdual_relation_nf(
    a: usize,
    b: usize,
    p: Prime,
    kind: ModuleKind,
    rng: &mut impl Rng,
) -> Relation {
    let m = sample_selfdual(a + b, p, kind, rng);
    Relation::new(2 * a, 2 * b, to_ominus(&m, a, b)).expect("dimensions")
}

/// Random self-dual relation `Q^{2a} ⇒ Q^{2b}` grown from a random seed
/// vector by repeatedly adjoining vectors of the dual until the body is
/// self-dual under `B_a ⊖ B_b`.
pub fn sample_selfdual_relation(
    a: usize,
    b: usize,
    p: Prime,
    rng: &mut impl Rng,
) -> Result<Relation> {
    let form = SymplecticForm::ominus(&SymplecticForm::standard(a), &SymplecticForm::standard(b));
    let n = 2 * (a + b);
    let mut free = Matrix::zeros(0, n);
    let mut int = Matrix::zeros(0, n);
    let mut seed = vec![Rational::zero(); n];
    for x in seed.iter_mut() {
        *x = &small(rng, 2) * &Rational::p_pow(p, rng.gen_range(-1..=1));
    }
    int.push_row(&seed);
    for _ in 0..4 * n + 8 {
        let r = Module::new(p, n, &free, &int)?;
        let d = r.dual(&form)?;
        if d == r {
            return Relation::new(2 * a, 2 * b, r);
        }
        let mut candidates: Vec<(Vec<Rational>, bool)> = Vec::new();
        for row in d.free().row_vecs() {
            if !r.down_module().contains_vector(&row)? {
                candidates.push((row, true));
            }
        }
        for row in d.int().row_vecs() {
            if !r.contains_vector(&row)? {
                candidates.push((row, false));
            }
        }
        let (w, is_line) = candidates
            .choose(rng)
            .expect("dual strictly contains an isotropic module")
            .clone();
        if is_line && rng.gen_bool(0.5) && !r.contains_vector(&w)? {
            int.push_row(&w);
        } else if is_line {
            free.push_row(&w);
        } else {
            int.push_row(&w);
        }
        let r2 = Module::new(p, n, &free, &int)?;
        free = r2.free().clone();
        int = r2.int().clone();
    }
    Err(Error::SamplerExhausted(4 * n + 8))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn trial_streams_are_deterministic_and_distinct() {
        let a: u64 = trial_rng(1, "charfn", 0).gen();
        let b: u64 = trial_rng(1, "charfn", 0).gen();
        let c: u64 = trial_rng(1, "charfn", 1).gen();
        let d: u64 = trial_rng(1, "modules", 0).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn orthogonal_sampler() {
        let p = pr(3);
        let mut rng = trial_rng(7, "t", 0);
        for size in 1..4 {
            let u = sample_orthogonal_int(size, p, &mut rng);
            assert!(u.transpose().mul(&u).unwrap().is_identity());
            for i in 0..size {
                assert!(u.row(i).iter().all(|x| x.is_p_integral(p)));
            }
        }
    }

    #[test]
    fn cayley_of_explicit_skew() {
        let p = pr(3);
        let s = Matrix::from_ints(&[&[0, 3], &[-3, 0]]);
        let id = Matrix::identity(2);
        let u = id
            .sub(&s)
            .unwrap()
            .mul(&id.add(&s).unwrap().invert().unwrap())
            .unwrap();
        let expect = Matrix::from_ints(&[&[-8, -6], &[6, -8]]).scale(&Rational::new(1, 10));
        assert_eq!(u, expect);
        assert!(u.transpose().mul(&u).unwrap().is_identity());
        assert!((0..2).all(|i| u.row(i).iter().all(|x| x.is_p_integral(p))));
    }

    #[test]
    fn symplectic_sampler() {
        let p = pr(5);
        let mut rng = trial_rng(3, "t", 0);
        let form = SymplecticForm::standard(2);
        for _ in 0..10 {
            assert!(form
                .preserved_by(&sample_symplectic(2, p, &mut rng))
                .unwrap());
        }
    }

    #[test]
    fn selfdual_samplers() {
        let p = pr(3);
        let mut rng = trial_rng(11, "t", 0);
        let form = SymplecticForm::standard(2);
        for kind in [
            ModuleKind::Lattice,
            ModuleKind::Lagrangian,
            ModuleKind::Mixed,
            ModuleKind::Any,
        ] {
            let m = sample_selfdual(2, p, kind, &mut rng);
            assert!(m.is_selfdual(&form).unwrap(), "{kind:?}");
            let a = sample_almost_selfdual(2, p, kind, &mut rng);
            assert!(a.is_almost_selfdual(&form).unwrap(), "{kind:?}");
        }
        assert!(sample_selfdual(2, p, ModuleKind::Lattice, &mut rng).is_lattice());
    }

    #[test]
    fn relation_samplers() {
        let p = pr(3);
        let mut rng = trial_rng(5, "t", 0);
        let b1 = SymplecticForm::standard(1);
        let b2 = SymplecticForm::standard(2);
        for _ in 0..5 {
            let r = sample_selfdual_relation(1, 2, p, &mut rng).unwrap();
            assert!(r.is_nazarov(&b1, &b2, false).unwrap());
            let l = sample_selfdual_relation_nf(1, 2, p, ModuleKind::Lattice, &mut rng);
            assert!(l.is_nazarov(&b1, &b2, true).unwrap());
            assert!(l.body().is_lattice());
        }
    }
}
