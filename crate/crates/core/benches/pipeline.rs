//! Rayon global pool against a one-thread pool on the heavy stages.
//! Built with `--no-default-features`, both variants run sequentially.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use dgbv_core::frobenius::check_wdvv;
use dgbv_core::models::{exterior_model, six_dim_example, tensor};
use dgbv_core::pipeline::{run_pipeline, PipelineOptions};

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let all = rayon::ThreadPoolBuilder::new().build().expect("thread pool");
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("thread pool");
    vec![("rayon", all), ("single", one)]
}

fn stages(c: &mut Criterion) {
    let torus4 = exterior_model(4).unwrap();
    let six_t2 = tensor(&six_dim_example().unwrap(), &exterior_model(2).unwrap()).unwrap();
    let opts = PipelineOptions::default();
    let run = run_pipeline(&six_t2, opts).unwrap();

    let mut g = c.benchmark_group("axioms-torus4");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| pool.install(|| torus4.check_axioms())));
    }
    g.finish();

    let mut g = c.benchmark_group("pipeline-six-t2");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| run_pipeline(&six_t2, opts).unwrap()))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("wdvv-six-t2");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| check_wdvv(&run.potential, &run.metric.eta).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, stages);
criterion_main!(benches);
