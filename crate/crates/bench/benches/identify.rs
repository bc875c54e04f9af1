use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use idinfo_core::identify::{
    build_context_tree, identify_depth_first, identify_sorted, identify_tree, BitString, Query,
    Resolution, SortedHypothesisSet,
};
use idinfo_core::process::BitSource;

fn random_set(n: usize, len: usize, seed: u64) -> SortedHypothesisSet {
    let mut src = BitSource::new(seed);
    let members = (0..n)
        .map(|_| BitString::new((0..len).map(|_| src.next_bit()).collect()))
        .collect();
    SortedHypothesisSet::from_unsorted(members).unwrap()
}

fn procedures(c: &mut Criterion) {
    let mut group = c.benchmark_group("identify");
    for n in [64, 1024, 16384] {
        let set = random_set(n, 48, n as u64);
        let tree = build_context_tree(&set);
        // a member, so every procedure reads the whole string
        let q = Query::Finite(set.members()[n / 2].clone());
        let r = Resolution::UNCAPPED;
        group.bench_with_input(BenchmarkId::new("sorted", n), &q, |b, q| {
            b.iter(|| identify_sorted(&set, q, r))
        });
        group.bench_with_input(BenchmarkId::new("tree", n), &q, |b, q| {
            b.iter(|| identify_tree(&tree, q, r))
        });
        group.bench_with_input(BenchmarkId::new("depth_first", n), &q, |b, q| {
            b.iter(|| identify_depth_first(set.members(), q, r))
        });
        group.bench_with_input(BenchmarkId::new("build_tree", n), &set, |b, s| {
            b.iter(|| build_context_tree(s))
        });
    }
    group.finish();
}

criterion_group!(benches, procedures);
criterion_main!(benches);
