mod counting;
mod exact;

use criterion::{criterion_group, criterion_main};

criterion_group!(benches, counting::bench, exact::bench);
criterion_main!(benches);
