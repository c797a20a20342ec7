use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use gkz_bench::{first_wall, fixture, ConnectionOptions, MbParams, Quadrature};
use gkz_core::analytic::{admissible_points, evaluate_mb_full, numeric_wall_matrix};
use gkz_core::arrangement::face_complex;
use gkz_core::instances::squarecross;
use gkz_core::ktheory::{psi_matrix, HilbertTable};
use gkz_core::rational::rat;
use gkz_core::schober_k0::{relation_suite, wall_crossing_matrix, Side};
use num_complex::Complex64;

fn gauss_alpha() -> Vec<Complex64> {
    vec![Complex64::new(-0.3, 0.0), Complex64::new(-0.4, 0.0), Complex64::new(-0.2, 0.0)]
}

fn combinatorics(c: &mut Criterion) {
    let cfg = squarecross();
    c.bench_function("face_complex/squarecross", |b| b.iter(|| face_complex(black_box(&cfg), &rat(1, 1)).unwrap()));
    let (cfg, fc) = fixture("squarecross");
    let (c1, c2) = first_wall(&fc);
    c.bench_function("wall_crossing/squarecross", |b| {
        b.iter(|| wall_crossing_matrix(&cfg, &fc, black_box(&c1), &c2, Side::Analytic).unwrap())
    });
    let (cfg, fc) = fixture("two_one_one");
    c.bench_function("relation_suite/two_one_one", |b| b.iter(|| relation_suite(&cfg, &fc, Side::KTheory).unwrap()));
}

fn duality(c: &mut Criterion) {
    let (cfg, fc) = fixture("gauss");
    let mut labels = fc.neg_lattice_points(&fc.faces[fc.chambers[0]].sign_vector);
    labels.sort();
    c.bench_function("hilbert_psi/gauss_n8", |b| {
        b.iter(|| psi_matrix(&HilbertTable::new(black_box(&cfg), 8), &labels))
    });
}

fn analytic(c: &mut Criterion) {
    let (cfg, fc) = fixture("gauss");
    let alpha = gauss_alpha();
    let p = MbParams::for_alpha(&cfg, &alpha, Quadrature::default()).unwrap();
    let v = admissible_points(&cfg, 1, 0.8, 0).remove(0);
    c.bench_function("mb_integral/gauss", |b| b.iter(|| evaluate_mb_full(&cfg, &p, black_box(&v)).unwrap()));
    let (c1, c2) = first_wall(&fc);
    let opts = ConnectionOptions::default();
    let mut g = c.benchmark_group("continuation");
    g.sample_size(10);
    g.bench_function("numeric_wall/gauss", |b| b.iter(|| numeric_wall_matrix(&cfg, &fc, &c1, &c2, black_box(&alpha), &opts).unwrap()));
    g.finish();
}

criterion_group!(benches, combinatorics, duality, analytic);
criterion_main!(benches);
