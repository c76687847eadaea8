//! Algebraic laws as property tests over generated inputs.

use proptest::prelude::*;

use pcoset::arith::dvr_echelon;
use pcoset::charfn::chi;
use pcoset::sample::{
    sample_block_element, sample_selfdual, sample_selfdual_relation, trial_rng, ModuleKind,
};
use pcoset::{coset_mul, Matrix, Module, Prime, Rational, Relation, SymplecticForm, Valuation};

fn prime() -> impl Strategy<Value = Prime> {
    prop_oneof![Just(3u64), Just(5), Just(7)].prop_map(|p| Prime::new(p).unwrap())
}

/// Small rationals `n/d · p^e`.
fn rational(p: Prime, emin: i64, emax: i64) -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=9, emin..=emax)
        .prop_map(move |(n, d, e)| &Rational::new(n, d) * &Rational::p_pow(p, e))
}

fn matrix(p: Prime, rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(rational(p, -2, 2), rows * cols).prop_map(move |v| {
        let rows_v: Vec<Vec<Rational>> = v.chunks(cols).map(|c| c.to_vec()).collect();
        Matrix::from_rows(rows_v, cols).unwrap()
    })
}

/// Module in `Q_p^{2n}` with up to `n` free and `2n` integral generators.
fn module_in(p: Prime, n: usize) -> impl Strategy<Value = Module> {
    let dim = 2 * n;
    (0..=n, 0..=dim).prop_flat_map(move |(f, s)| {
        (matrix(p, f, dim), matrix(p, s, dim))
            .prop_map(move |(free, int)| Module::new(p, dim, &free, &int).unwrap())
    })
}

fn module() -> impl Strategy<Value = Module> {
    (prime(), 1usize..=2).prop_flat_map(|(p, n)| module_in(p, n))
}

fn module_pair() -> impl Strategy<Value = (Module, Module)> {
    (prime(), 1usize..=2).prop_flat_map(|(p, n)| (module_in(p, n), module_in(p, n)))
}

/// Random relation `Q^2 ⇒ Q^2` drawn from a seeded generator.
fn random_relation(p: Prime, seed: u64, index: u64) -> Relation {
    use rand::Rng;
    let mut rng = trial_rng(seed, "relation", index);
    let mut gen = |rows: usize| {
        let mut m = Matrix::zeros(rows, 4);
        for a in 0..rows {
            for b in 0..4 {
                let e = rng.gen_range(-2..=2);
                m[(a, b)] = &Rational::from_int(rng.gen_range(-3..=3)) * &Rational::p_pow(p, e);
            }
        }
        m
    };
    let free = gen(1);
    let int = gen(2);
    Relation::new(2, 2, Module::new(p, 4, &free, &int).unwrap()).unwrap()
}

fn form_for(m: &Module) -> SymplecticForm {
    SymplecticForm::standard(m.dim() / 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valuation_is_additive(p in prime(), a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50) {
        let x = Rational::new(a, b);
        let y = Rational::new(c, d);
        let expected = match (x.valuation(p), y.valuation(p)) {
            (Valuation::Finite(u), Valuation::Finite(v)) => Valuation::Finite(u + v),
            _ => Valuation::Infinite,
        };
        prop_assert_eq!((&x * &y).valuation(p), expected);
    }

    #[test]
    fn fractional_part_is_idempotent(p in prime(), a in -500i64..500, b in 1i64..500) {
        let x = Rational::new(a, b);
        let f = x.frac_part(p);
        prop_assert!((&x - &f).frac_part(p).is_zero());
        prop_assert_eq!(f.frac_part(p), f);
    }

    #[test]
    fn echelon_ignores_row_order_and_unit_scaling(
        (p, m) in prime().prop_flat_map(|p| (Just(p), matrix(p, 3, 3))),
        swap in 0usize..3,
        unit in 1i64..=4,
    ) {
        let mut u = Matrix::identity(3);
        u.swap_rows(0, swap);
        let unit = if (unit as u64).is_multiple_of(p.get()) { 1 } else { unit };
        u[(1, 1)] = Rational::from_int(unit);
        u[(2, 0)] = Rational::from_int(1);
        prop_assert_eq!(dvr_echelon(&u.mul(&m).unwrap(), p), dvr_echelon(&m, p));
    }

    #[test]
    fn inverse_is_two_sided((_p, a) in prime().prop_flat_map(|p| (Just(p), matrix(p, 3, 3)))) {
        if let Ok(inv) = a.invert() {
            prop_assert!(a.mul(&inv).unwrap().is_identity());
            prop_assert!(inv.mul(&a).unwrap().is_identity());
        } else {
            prop_assert!(a.det().unwrap().is_zero());
        }
    }

    #[test]
    fn dual_is_an_involution(r in module()) {
        let f = form_for(&r);
        prop_assert_eq!(r.dual(&f).unwrap().dual(&f).unwrap(), r);
    }

    #[test]
    fn dual_reverses_inclusion((a, b) in module_pair()) {
        let f = form_for(&a);
        let big = a.sum(&b).unwrap();
        prop_assert!(a.dual(&f).unwrap().contains(&big.dual(&f).unwrap()).unwrap());
    }

    #[test]
    fn dual_exchanges_intersection_and_sum((a, b) in module_pair()) {
        let f = form_for(&a);
        let lhs = a.intersect(&b).unwrap().dual(&f).unwrap();
        let rhs = a.dual(&f).unwrap().sum(&b.dual(&f).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn intersection_is_the_meet((a, b) in module_pair()) {
        let i = a.intersect(&b).unwrap();
        prop_assert!(a.contains(&i).unwrap() && b.contains(&i).unwrap());
        let s = a.sum(&b).unwrap();
        prop_assert!(s.contains(&a).unwrap() && s.contains(&b).unwrap());
    }

    #[test]
    fn canonical_form_ignores_presentation(r in module(), scale in 1i64..=4) {
        let p = r.prime();
        let unit = if (scale as u64).is_multiple_of(p.get()) { 1 } else { scale };
        let (free, int) = r.generators();
        let mut int_rows = int.row_vecs();
        int_rows.reverse();
        for row in int_rows.iter_mut() {
            for x in row.iter_mut() {
                *x = &*x * &Rational::from_int(unit);
            }
        }
        let again = Module::new(p, r.dim(), &free.scale(&Rational::from_int(3)), &Matrix::from_rows(int_rows, r.dim()).unwrap()).unwrap();
        prop_assert_eq!(again, r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn composition_is_associative(p in prime(), seed in any::<u64>()) {
        let rels: Vec<Relation> = (0..3).map(|i| random_relation(p, seed, i)).collect();
        let left = rels[2].compose(&rels[1]).unwrap().compose(&rels[0]).unwrap();
        let right = rels[2].compose(&rels[1].compose(&rels[0]).unwrap()).unwrap();
        prop_assert_eq!(left.clone(), right);
        let swapped = rels[0].pseudo_inverse().compose(&rels[1].pseudo_inverse()).unwrap();
        prop_assert_eq!(rels[1].compose(&rels[0]).unwrap().pseudo_inverse(), swapped);
    }

    #[test]
    fn selfdual_relations_compose_to_selfdual(p in prime(), seed in any::<u64>(), a in 1usize..=2, b in 1usize..=2, c in 1usize..=2) {
        let mut rng = trial_rng(seed, "nazarov", 0);
        let pr = sample_selfdual_relation(a, b, p, &mut rng).unwrap();
        let qr = sample_selfdual_relation(b, c, p, &mut rng).unwrap();
        let (fa, fc) = (SymplecticForm::standard(a), SymplecticForm::standard(c));
        prop_assert!(qr.compose(&pr).unwrap().is_nazarov(&fa, &fc, false).unwrap());
    }

    #[test]
    fn chi_is_multiplicative_and_selfdual(p in prime(), seed in any::<u64>(), alpha in 1usize..=2, k in 1usize..=2) {
        let mut rng = trial_rng(seed, "chi", 0);
        let g = sample_block_element(alpha, k, 1, p, &mut rng).unwrap();
        let h = sample_block_element(alpha, k, 1, p, &mut rng).unwrap();
        let q = sample_selfdual(k, p, ModuleKind::Any, &mut rng);
        let t = sample_selfdual(k, p, ModuleKind::Lattice, &mut rng);
        let cg = chi(&g, &q, &t).unwrap();
        let ch = chi(&h, &q, &t).unwrap();
        let cf = chi(&coset_mul(&g, &h).unwrap(), &q, &t).unwrap();
        prop_assert_eq!(&cf, &cg.compose(&ch).unwrap());
        let v = SymplecticForm::standard(alpha);
        prop_assert!(cf.is_nazarov(&v, &v, false).unwrap());
    }
}
