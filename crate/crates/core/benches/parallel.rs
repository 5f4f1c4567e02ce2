//! Numeric divergence scan: rayon fan-out against the sequential reference
//! path, on the divergence of a KP family conserved vector.

use adjflux_core::conslaw::conserved_vector;
use adjflux_core::expr::Expr;
use adjflux_core::jet::total_derivative;
use adjflux_core::manifold::Ranking;
use adjflux_core::numeric::{max_residual, max_residual_sequential, NumericConfig};
use adjflux_core::testkit::{identity_sub, kp, kp_xf, ranking_of};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn divergence_terms() -> (Ranking, Vec<Expr>) {
    let sys = kp();
    let rk = ranking_of(&sys);
    let sub = identity_sub(&sys);
    let cv = conserved_vector(&sys, &kp_xf(), &sub, &rk).unwrap();
    let terms = sys
        .space()
        .indeps()
        .iter()
        .zip(cv.components())
        .map(|(i, c)| total_derivative(sys.space(), c, i).unwrap())
        .collect();
    (rk, terms)
}

fn bench_scan(c: &mut Criterion) {
    let (rk, terms) = divergence_terms();
    let mut group = c.benchmark_group("divergence_scan");
    for points in [32usize, 256] {
        let cfg = NumericConfig { points, ..NumericConfig::default() };
        group.bench_with_input(BenchmarkId::new("parallel", points), &cfg, |b, cfg| {
            b.iter(|| max_residual(&rk, &terms, cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", points), &cfg, |b, cfg| {
            b.iter(|| max_residual_sequential(&rk, &terms, cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_scan);
criterion_main!(benches);
