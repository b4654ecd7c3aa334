use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use intcoord_bench::{binpack, format_game, spread_state};
use intcoord_core::formats::Topology;
use intcoord_core::{private_utility, ClampKind, UtilityChoice};

fn binpack_objectives(c: &mut Criterion) {
    let mut group = c.benchmark_group("binpack");
    for n in [20, 50, 200] {
        let inst = binpack(n, 12.0);
        let z = spread_state(n, n / 3);
        group.bench_with_input(BenchmarkId::new("g_soft", n), &n, |b, _| {
            b.iter(|| inst.g_soft(&inst.loads(black_box(&z))))
        });
        group.bench_with_input(BenchmarkId::new("wlu", n), &n, |b, _| {
            b.iter(|| private_utility(&inst, UtilityChoice::Wlu(ClampKind::Zero), 0, black_box(&z)))
        });
    }
    group.finish();
}

fn format_objectives(c: &mut Criterion) {
    let mut group = c.benchmark_group("formats");
    for hops in [1, 3] {
        let game = format_game(100, Topology::SmallWorlds, hops);
        let z = spread_state(100, 4);
        group.bench_with_input(BenchmarkId::new("g_formats", hops), &hops, |b, _| {
            b.iter(|| game.g_formats(black_box(&z)))
        });
        for (name, choice) in [
            ("wlu", UtilityChoice::Wlu(ClampKind::Zero)),
            ("econ", UtilityChoice::Econ),
        ] {
            group.bench_with_input(BenchmarkId::new(name, hops), &hops, |b, _| {
                b.iter(|| private_utility(&game, choice, 7, black_box(&z)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, binpack_objectives, format_objectives);
criterion_main!(benches);
