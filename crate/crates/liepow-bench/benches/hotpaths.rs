//! Benchmarks for the paths the table computations spend their time in:
//! echelon reduction, Weyl-orbit enumeration, the multiplicity recursion,
//! a full peel, and the matrix-level exterior-square split.
//!
//! Orbit and multiplicity results are cached inside a root system, so
//! those benches rebuild the system in the setup closure of every batch;
//! the build cost is excluded from the measurement.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use liepow_core::{
    build_root_system, composition_factors_matrix, exterior_square, g2_generators, table_row,
    PowerKind, PrimeField, ProbeConfig, Regime, RootSystem, Subspace, TypeLabel, Weight,
};

fn c28_weight(ones: &[usize]) -> Weight {
    let mut v = vec![0i64; 28];
    for &i in ones {
        v[i - 1] = 1;
    }
    Weight(v)
}

fn bench_echelon(c: &mut Criterion) {
    let field = PrimeField::new(7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rows: Vec<Vec<u64>> =
        (0..40).map(|_| (0..60).map(|_| rng.gen_range(0..7)).collect()).collect();
    c.bench_function("echelon basis, 40 rows in F7^60", |b| {
        b.iter_batched(
            || rows.clone(),
            |rows| Subspace::from_rows(field, 60, &rows).unwrap().dim(),
            BatchSize::SmallInput,
        )
    });
}

fn bench_orbit(c: &mut Criterion) {
    c.bench_function("weyl orbit, C28 second fundamental weight", |b| {
        b.iter_batched(
            || Arc::new(build_root_system(TypeLabel::C, 28).unwrap()),
            |rs| rs.orbit_size(&c28_weight(&[2])).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn bench_freudenthal(c: &mut Criterion) {
    c.bench_function("weight multiplicities, E7 51072-dimensional module", |b| {
        b.iter_batched(
            || Arc::new(build_root_system(TypeLabel::E, 7).unwrap()),
            |rs| rs.freudenthal(&Weight(vec![0, 0, 0, 0, 0, 1, 1])).unwrap().len(),
            BatchSize::SmallInput,
        )
    });
}

fn bench_peel(c: &mut Criterion) {
    c.bench_function("factor table row, F4 adjoint exterior square", |b| {
        b.iter_batched(
            || Arc::new(build_root_system(TypeLabel::F, 4).unwrap()),
            |rs: Arc<RootSystem>| {
                table_row(&rs, &Weight(vec![1, 0, 0, 0]), PowerKind::ExteriorSquare, Regime::Generic, None)
                    .unwrap()
                    .target_dim
            },
            BatchSize::SmallInput,
        )
    });
}

fn bench_wedge_split(c: &mut Criterion) {
    let m = g2_generators(7).unwrap();
    let cfg = ProbeConfig::default();
    c.bench_function("exterior square and factor split, G2 matrix module", |b| {
        b.iter(|| {
            let wedge = exterior_square(&m);
            composition_factors_matrix(&wedge, &cfg).unwrap().len()
        })
    });
}

criterion_group!(
    benches,
    bench_echelon,
    bench_orbit,
    bench_freudenthal,
    bench_peel,
    bench_wedge_split
);
criterion_main!(benches);
