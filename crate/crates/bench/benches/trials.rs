use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use nnoma_core::experiment::{count_outages, figure_preset, run_trial, TrialSetup};
use nnoma_core::schemes::Scheme;
use nnoma_core::stream::StreamKey;

fn setup(preset: &str, scheme: Scheme, power_dbm: f64) -> TrialSetup {
    let config = figure_preset(preset).unwrap();
    let variant = config.variants().unwrap().pop().unwrap();
    let snr = config.snr(power_dbm);
    TrialSetup {
        layout: variant.layout.clone(),
        scheme,
        cfg: variant.scheme_config(snr).unwrap(),
        alpha: config.path_loss_exponent,
        interference: variant.interference_config(power_dbm).unwrap(),
        shared_positions: false,
    }
}

fn single_trial(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_trial");
    let cases = [("fig4", Scheme::NNoma), ("fig4", Scheme::NomaBestBs), ("fig2", Scheme::Oma), ("fig7", Scheme::NNoma)];
    for (preset, scheme) in cases {
        let s = setup(preset, scheme, 0.0);
        let key = StreamKey::new(1, scheme.tag(), 0);
        let mut t = 0u64;
        group.bench_function(BenchmarkId::new(preset, scheme.name()), |b| {
            b.iter(|| {
                t += 1;
                let mut rng = key.trial_rng(t);
                black_box(run_trial(&s, &mut rng))
            })
        });
    }
    group.finish();
}

fn batch(c: &mut Criterion) {
    let trials = 20_000;
    let mut group = c.benchmark_group("count_outages");
    group.throughput(Throughput::Elements(trials));
    group.sample_size(20);
    for preset in ["fig4", "fig7"] {
        let s = setup(preset, Scheme::NNoma, 0.0);
        let key = StreamKey::new(1, Scheme::NNoma.tag(), 0);
        group.bench_function(preset, |b| b.iter(|| black_box(count_outages(&s, key, trials))));
    }
    group.finish();
}

criterion_group!(benches, single_trial, batch);
criterion_main!(benches);
