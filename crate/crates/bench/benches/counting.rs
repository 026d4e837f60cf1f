use criterion::{BenchmarkId, Criterion, Throughput};
use kleinzeta_core::counting::{count_klein_curve_sum, count_klein_direct, count_klein_fast};
use kleinzeta_core::ffield::build_field;
use kleinzeta_core::CountOptions;

pub fn bench(c: &mut Criterion) {
    let opts = CountOptions::default();
    let mut group = c.benchmark_group("count");
    group.sample_size(10);
    for (p, k) in [(3u64, 3u32), (7, 2), (3, 4)] {
        let f = build_field(p, k).unwrap();
        group.throughput(Throughput::Elements(f.q().pow(4)));
        group.bench_with_input(BenchmarkId::new("quad-fiber", f.q()), &f, |b, f| {
            b.iter(|| count_klein_fast(f, &opts).unwrap())
        });
    }
    for (p, k) in [(3u64, 7u32), (13, 4)] {
        let f = build_field(p, k).unwrap();
        group.throughput(Throughput::Elements(f.q()));
        group.bench_with_input(BenchmarkId::new("curve-sum", f.q()), &f, |b, f| {
            b.iter(|| count_klein_curve_sum(f).unwrap())
        });
    }
    let f = build_field(2, 3).unwrap();
    group.bench_with_input(BenchmarkId::new("direct", f.q()), &f, |b, f| {
        b.iter(|| count_klein_direct(f, &opts).unwrap())
    });
    group.finish();
}
