use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use milnor_cover::brunnian::corpus_word;
use milnor_cover::cover::m_set;
use milnor_cover::milnor::Index;
use milnor_cover::verify::sweep;
use milnor_cover::{Exec, MilnorEngine, Modulus};

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn indices(c: &mut Criterion) {
    let d = corpus_word("Lprime").unwrap().insert_axis().unwrap().diagram;
    let idx: Vec<Index> = (2..=4).flat_map(|k| Index::all(3, k, false)).collect();
    let mut g = c.benchmark_group("mu_bar_many/Lprime");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                // Fresh engine so the arc series cache starts cold.
                let e = MilnorEngine::new(&d, Modulus::INTEGERS, 6).unwrap();
                e.mu_bar_many(exec, &idx)
            })
        });
    }
    g.finish();
}

fn selections(c: &mut Criterion) {
    let w = corpus_word("Lprime").unwrap();
    let i = Index::parse("12").unwrap();
    let mut g = c.benchmark_group("m_set/Lprime");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| m_set(&w, &i, Modulus::INTEGERS, 6, exec).unwrap())
        });
    }
    g.finish();
}

fn samples(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweep/n2");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| sweep(2, 8, 3, 1, 6, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, indices, selections, samples);
criterion_main!(benches);
