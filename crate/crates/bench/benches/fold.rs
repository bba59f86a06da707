use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dotstitch_bench::random_sequence;
use dotstitch_core::thermo::{base_pair_probabilities, partition_function};
use dotstitch_core::FoldParams;

fn fold(c: &mut Criterion) {
    let params = FoldParams::default();
    let mut group = c.benchmark_group("fold");
    group.sample_size(20);
    for len in [50, 100, 200, 260] {
        let seq = random_sequence(len, len as u64);
        group.bench_with_input(BenchmarkId::new("inside", len), &seq, |b, s| {
            b.iter(|| partition_function(s, &params).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("bppm", len), &seq, |b, s| {
            b.iter(|| base_pair_probabilities(s, &params).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, fold);
criterion_main!(benches);
