use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gmsk_wsn::channel::substream;
use gmsk_wsn::*;
use rand::Rng;

fn modem(c: &mut Criterion) {
    let modem = GmskModem::new(ModemConfig::default()).unwrap();
    let mut rng = substream(2, 0);
    let bits: Vec<u8> = (0..1056).map(|_| rng.random_range(0..2)).collect();
    let signal = modem.modulate(&bits).unwrap();
    c.bench_function("gmsk_modulate_1056_bits", |b| b.iter(|| modem.modulate(black_box(&bits))));
    c.bench_function("gmsk_demodulate_1056_bits", |b| {
        b.iter(|| modem.demodulate(black_box(&signal), bits.len()))
    });
}

fn link_point(c: &mut Criterion) {
    let spec = SweepSpec {
        stop_rule: StopRule {
            min_bit_errors: u64::MAX,
            max_bits: 100_000,
        },
        ..SweepSpec::new(vec![], CodeSpec::golay(4.0), 3)
    };
    let mut group = c.benchmark_group("link");
    group.sample_size(10);
    group.bench_function("golay_point_1e5_bits", |b| b.iter(|| run_point(black_box(&spec), 5.0)));
    group.finish();
}

criterion_group!(benches, modem, link_point);
criterion_main!(benches);
