//! Parallel vs. sequential throughput of the two sample-loop workloads:
//! the fuzzy-pipeline batch behind the Sobol analysis, and the perturbed
//! eigenvector extraction behind the Monte-Carlo analysis.
//!
//! With the default `parallel` feature, `map_indexed` runs on rayon and
//! `map_indexed_seq` is the sequential fallback; both produce identical
//! outputs, so the comparison is pure scheduling overhead vs. speedup.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::Rng;

use ethrisk::exec::{map_indexed, map_indexed_seq};
use ethrisk::fahp::principal_eigen;
use ethrisk::scenario::{load_builtin, PATIENT_DILEMMA};
use ethrisk::sensitivity::PipelineModel;

fn pipeline_batch(c: &mut Criterion) {
    let scenario = load_builtin(PATIENT_DILEMMA).unwrap();
    let model = PipelineModel::new(&scenario, "physical-harm", 1001).unwrap();
    let mut rng = rand::rng();
    let points: Vec<[f64; 6]> = (0..2048)
        .map(|_| {
            [
                rng.random_range(1.0..10.0),
                rng.random_range(1.0..10.0),
                rng.random_range(1.0..10.0),
                rng.random_range(1.0..10.0),
                rng.random_range(0.5..1.0),
                rng.random_range(0.4..0.7),
            ]
        })
        .collect();

    let mut group = c.benchmark_group("pipeline_batch");
    group.bench_with_input(
        BenchmarkId::new("default", points.len()),
        &points,
        |b, pts| b.iter(|| black_box(map_indexed(pts.len(), |i| model.score(&pts[i])))),
    );
    group.bench_with_input(
        BenchmarkId::new("sequential", points.len()),
        &points,
        |b, pts| b.iter(|| black_box(map_indexed_seq(pts.len(), |i| model.score(&pts[i])))),
    );
    group.finish();
}

fn eigenvector_batch(c: &mut Criterion) {
    let mut rng = rand::rng();
    let matrices: Vec<Vec<Vec<f64>>> = (0..512)
        .map(|_| {
            let a12: f64 = rng.random_range(1.0..5.0);
            let a13: f64 = rng.random_range(3.0..7.0);
            let a23: f64 = rng.random_range(1.0..5.0);
            vec![
                vec![1.0, a12, a13],
                vec![1.0 / a12, 1.0, a23],
                vec![1.0 / a13, 1.0 / a23, 1.0],
            ]
        })
        .collect();

    let mut group = c.benchmark_group("eigenvector_batch");
    group.bench_with_input(
        BenchmarkId::new("default", matrices.len()),
        &matrices,
        |b, ms| {
            b.iter(|| {
                black_box(map_indexed(ms.len(), |i| {
                    principal_eigen(&ms[i]).unwrap().0
                }))
            })
        },
    );
    group.bench_with_input(
        BenchmarkId::new("sequential", matrices.len()),
        &matrices,
        |b, ms| {
            b.iter(|| {
                black_box(map_indexed_seq(ms.len(), |i| {
                    principal_eigen(&ms[i]).unwrap().0
                }))
            })
        },
    );
    group.finish();
}

criterion_group!(benches, pipeline_batch, eigenvector_batch);
criterion_main!(benches);
