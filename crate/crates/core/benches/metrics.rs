use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use clc_core::metrics::{consistency_matrix, rankc_with, Metric, WeightScheme};
use clc_core::synthetic::{random_dataset, random_store};
use clc_core::{Execution, LanguageId};

const LANGS: [&str; 17] = [
    "en", "fr", "nl", "es", "ru", "ja", "zh", "ko", "vi", "el", "hu", "he", "tr", "ca", "ar", "uk",
    "fa",
];

fn modes() -> [(&'static str, Execution); 2] {
    [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ]
}

fn bench_rankc(c: &mut Criterion) {
    let mut group = c.benchmark_group("rankc_pair");
    for facts in [1_000usize, 10_000] {
        let ds = random_dataset(&LANGS[..2], facts, 9, 10, 7).unwrap();
        let store = random_store(&ds, "bench", 2.0, 11).unwrap();
        let (a, b) = (
            LanguageId::new("en").unwrap(),
            LanguageId::new("fr").unwrap(),
        );
        for (name, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(name, facts), &facts, |bench, _| {
                bench.iter(|| rankc_with(&ds, &store, &a, &b, WeightScheme::Softmax, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_matrix(c: &mut Criterion) {
    let mut group = c.benchmark_group("consistency_matrix");
    group.sample_size(10);
    let ds = random_dataset(&LANGS, 2_000, 9, 10, 3).unwrap();
    let store = random_store(&ds, "bench", 2.0, 5).unwrap();
    for metric in [Metric::RankC, Metric::COverlap] {
        for (name, exec) in modes() {
            group.bench_function(BenchmarkId::new(name, metric.as_str()), |bench| {
                bench.iter(|| {
                    black_box(
                        consistency_matrix(&ds, &store, metric, WeightScheme::Softmax, exec)
                            .unwrap(),
                    )
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_rankc, bench_matrix);
criterion_main!(benches);
