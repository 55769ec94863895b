use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qudit_synth::random::{haar_unitary, random_state};
use qudit_synth::{
    cinc_sequence, controlled_state_map, qr_reduce, simulate, spectral_synthesize, synthesize_single,
    synthesize_single_with_tree, CouplingGraph, SpanningTree, System,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rb87(c: &mut Criterion) {
    let g = CouplingGraph::rb87();
    let tree = SpanningTree::rb87();
    let v = haar_unitary(8, &mut ChaCha8Rng::seed_from_u64(87));
    c.bench_function("rb87/qr_reduce", |b| {
        b.iter(|| qr_reduce(black_box(&v), &g, &tree).unwrap())
    });
    c.bench_function("rb87/synthesize", |b| {
        b.iter(|| synthesize_single_with_tree(black_box(&v), &g, &tree).unwrap())
    });
    let s = synthesize_single_with_tree(&v, &g, &tree).unwrap().schedule;
    c.bench_function("rb87/simulate", |b| b.iter(|| simulate(black_box(&s)).unwrap()));
}

fn single_by_dimension(c: &mut Criterion) {
    let mut group = c.benchmark_group("synthesize_single/path");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in [2, 4, 8, 16] {
        let g = CouplingGraph::path(d).unwrap();
        let v = haar_unitary(d, &mut rng);
        group.bench_with_input(BenchmarkId::from_parameter(d), &v, |b, v| {
            b.iter(|| synthesize_single(v, &g).unwrap())
        });
    }
    group.finish();
}

fn two_qudit(c: &mut Criterion) {
    let mut group = c.benchmark_group("two_qudit");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in [3, 5] {
        let g = CouplingGraph::complete(d).unwrap();
        group.bench_with_input(BenchmarkId::new("cinc", d), &g, |b, g| {
            b.iter(|| cinc_sequence(g.d(), g).unwrap())
        });
        let psi = random_state(d, &mut rng);
        group.bench_with_input(BenchmarkId::new("state_map", d), &psi, |b, psi| {
            b.iter(|| controlled_state_map(psi, &g).unwrap())
        });
        let w = haar_unitary(d * d, &mut rng);
        group.bench_with_input(BenchmarkId::new("spectral", d), &w, |b, w| {
            b.iter(|| spectral_synthesize(w, System::pair(d), &g).unwrap())
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = rb87, single_by_dimension, two_qudit
}
criterion_main!(benches);
