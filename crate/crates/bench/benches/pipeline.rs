use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use pcoset::arith::dvr_echelon;
use pcoset::charfn::chi;
use pcoset::sample::{
    sample_block_element, sample_selfdual, sample_selfdual_relation, trial_rng, ModuleKind,
};
use pcoset::weil::{weil_of, FiniteModel};
use pcoset::{coset_mul, Matrix, Prime, Rational, SymplecticForm};

fn arithmetic(c: &mut Criterion) {
    let p = Prime::new(3).unwrap();
    let rows: Vec<Vec<Rational>> = (0..6)
        .map(|i| {
            (0..6)
                .map(|j| Rational::new((i * 7 + j * 5) % 11 - 5, 1 + (i + j) % 4))
                .collect()
        })
        .collect();
    let m = Matrix::from_rows(rows, 6).unwrap();
    c.bench_function("dvr_echelon 6x6", |b| {
        b.iter(|| dvr_echelon(black_box(&m), p))
    });
}

fn relations(c: &mut Criterion) {
    let p = Prime::new(5).unwrap();
    let mut rng = trial_rng(7, "bench", 0);
    let a = sample_selfdual_relation(2, 2, p, &mut rng).unwrap();
    let b = sample_selfdual_relation(2, 2, p, &mut rng).unwrap();
    let f = SymplecticForm::standard(2);
    c.bench_function("compose self-dual 4x4", |bch| {
        bch.iter(|| black_box(&b).compose(black_box(&a)).unwrap())
    });
    c.bench_function("nazarov check", |bch| {
        bch.iter(|| b.is_nazarov(&f, &f, false).unwrap())
    });
}

fn characteristic(c: &mut Criterion) {
    let p = Prime::new(3).unwrap();
    let mut rng = trial_rng(7, "bench", 1);
    let g = sample_block_element(2, 2, 2, p, &mut rng).unwrap();
    let h = sample_block_element(2, 2, 2, p, &mut rng).unwrap();
    let q = sample_selfdual(2, p, ModuleKind::Any, &mut rng);
    let t = sample_selfdual(2, p, ModuleKind::Lattice, &mut rng);
    c.bench_function("coset_mul", |b| {
        b.iter(|| coset_mul(black_box(&g), black_box(&h)).unwrap())
    });
    c.bench_function("chi alpha=k=m=2", |b| {
        b.iter(|| chi(black_box(&g), &q, &t).unwrap())
    });
}

fn weil(c: &mut Criterion) {
    let p = Prime::new(3).unwrap();
    let model = FiniteModel::new(p, 2, 1).unwrap();
    let g = Matrix::from_rows(
        vec![
            vec![Rational::from_int(2), Rational::from_int(1)],
            vec![Rational::from_int(1), Rational::from_int(1)],
        ],
        2,
    )
    .unwrap();
    c.bench_function("weil_of N=2", |b| {
        b.iter(|| weil_of(model, black_box(&g)).unwrap())
    });
}

criterion_group!(benches, arithmetic, relations, characteristic, weil);
criterion_main!(benches);
