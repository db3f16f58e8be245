use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dmtlab::dmt::{lemma2_bruteforce, Lemma2Problem};
use dmtlab::lattice::{build_hamilton_order, build_split_order, enumerate_shell};
use dmtlab::linalg::hermitian_eigenvalues;
use dmtlab::rng::{complex_gaussian_matrix, substream};

fn jacobi(c: &mut Criterion) {
    let mut rng = substream(1, 0);
    for n in [2usize, 4, 8] {
        let h = complex_gaussian_matrix(&mut rng, n, n).gram();
        c.bench_function(&format!("hermitian_eigenvalues {n}x{n}"), |b| {
            b.iter(|| hermitian_eigenvalues(black_box(&h)).unwrap())
        });
    }
}

fn enumeration(c: &mut Criterion) {
    let h = build_hamilton_order();
    let s = build_split_order();
    c.bench_function("enumerate hamilton radius 4", |b| b.iter(|| enumerate_shell(black_box(&h), 4.0).unwrap()));
    c.bench_function("enumerate split radius 6", |b| b.iter(|| enumerate_shell(black_box(&s), 6.0).unwrap()));
}

fn lemma2(c: &mut Criterion) {
    let p = Lemma2Problem::new(5.0, 4, 1.75).unwrap();
    c.bench_function("lemma2 grid l=4 step 0.02", |b| b.iter(|| lemma2_bruteforce(black_box(&p), 0.02).unwrap()));
}

criterion_group!(benches, jacobi, enumeration, lemma2);
criterion_main!(benches);
