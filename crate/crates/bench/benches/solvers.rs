//! Benchmarks for the hot paths: polynomial root extraction, contour zero
//! counting, the design sweep, and the power-series recursion.

use criterion::{criterion_group, criterion_main, Criterion};
use krein_strings::{
    count_zeros, min_decay, series_coefficients, spectrum, Constraints, SearchBox, StringSpec,
    ValidatedString, DEFAULT_CLUSTER_TOL,
};
use std::hint::black_box;

fn eight_atoms() -> ValidatedString {
    StringSpec::atomic(&[
        (-1.9, 0.4),
        (-1.3, 1.1),
        (-0.8, 0.7),
        (-0.35, 2.2),
        (0.0, 0.9),
        (0.3, 1.6),
        (0.65, 0.5),
        (0.9, 1.2),
    ])
    .validate()
    .unwrap()
}

fn bench_polynomial_spectrum(c: &mut Criterion) {
    let s = eight_atoms();
    c.bench_function("polynomial spectrum, 8 atoms", |b| {
        b.iter(|| spectrum(black_box(&s), DEFAULT_CLUSTER_TOL).unwrap())
    });
}

fn bench_contour_count(c: &mut Criterion) {
    let s = eight_atoms();
    let bx = SearchBox::new(-3.0, 3.0, 0.05, 3.0).unwrap();
    c.bench_function("contour zero count", |b| {
        b.iter(|| count_zeros(black_box(&s), black_box(&bx)).unwrap())
    });
}

fn bench_design_sweep(c: &mut Criterion) {
    let constraints = Constraints::new(2.0, 1.0).unwrap();
    c.bench_function("min_decay sweep, 1000 frequencies", |b| {
        b.iter(|| {
            (0..1000)
                .map(|k| min_decay(-1.2 + 2.4 * k as f64 / 999.0, black_box(&constraints)).0)
                .sum::<f64>()
        })
    });
}

fn bench_series_coefficients(c: &mut Criterion) {
    let s = eight_atoms();
    c.bench_function("series coefficients, order 12", |b| {
        b.iter(|| series_coefficients(black_box(&s), 12))
    });
}

criterion_group!(
    benches,
    bench_polynomial_spectrum,
    bench_contour_count,
    bench_design_sweep,
    bench_series_coefficients
);
criterion_main!(benches);
