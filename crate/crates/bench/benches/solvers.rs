use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use irsbf::mm::{mm_step, MmIterate};
use irsbf::sdr::project_elliptope;
use irsbf::txbf::optimal_beam_for_channel;
use irsbf::{
    draw_channels, run_mm, solve_sdr, CMatrix, ChannelSet, CompositeChannel, Geometry, LiftedPhaseVector, MmSettings,
    ReflectConfig, SdrSettings, SystemConfig, C64,
};

fn setup(n_i: usize) -> (SystemConfig, ChannelSet, CompositeChannel, LiftedPhaseVector) {
    let cfg = SystemConfig::default().with_n_i(n_i);
    let mut rng = ChaCha8Rng::seed_from_u64(n_i as u64);
    let ch = draw_channels(&mut rng, &cfg, &Geometry::default()).unwrap();
    let psi = CompositeChannel::build(&ch).unwrap();
    let init = LiftedPhaseVector::random(n_i + 1, &mut rng);
    (cfg, ch, psi, init)
}

fn bench_mm(c: &mut Criterion) {
    let mut group = c.benchmark_group("mm");
    for n_i in [16, 64, 256] {
        let (cfg, _, psi, init) = setup(n_i);
        let settings = MmSettings::default();
        let start = MmIterate::initial(init.clone(), &psi, &cfg);
        group.bench_with_input(BenchmarkId::new("step", n_i), &n_i, |b, _| {
            b.iter(|| mm_step(black_box(&start), &psi, &cfg, &settings))
        });
        for accelerate in [false, true] {
            let name = if accelerate { "solve_accelerated" } else { "solve_plain" };
            let s = settings.accelerated(accelerate);
            group.bench_with_input(BenchmarkId::new(name, n_i), &n_i, |b, _| {
                b.iter(|| run_mm(black_box(init.clone()), &psi, &cfg, &s).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_beam(c: &mut Criterion) {
    let (cfg, ch, _, _) = setup(64);
    let v = ch.effective_channel(Some(&ReflectConfig::identity(64)));
    c.bench_function("optimal_beam", |b| {
        b.iter(|| optimal_beam_for_channel(black_box(&v), &cfg).unwrap())
    });
}

fn bench_sdr(c: &mut Criterion) {
    let mut group = c.benchmark_group("sdr");
    group.sample_size(10);
    for n_i in [8, 32] {
        let (cfg, _, psi, _) = setup(n_i);
        group.bench_with_input(BenchmarkId::new("solve", n_i), &n_i, |b, _| {
            b.iter(|| solve_sdr(black_box(&psi), &cfg, &SdrSettings::default(), None).unwrap())
        });
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = CMatrix::from_fn(n_i + 1, n_i + 1, |_, _| irsbf::channel::sample_cn(&mut rng, 1.0));
        let m = (&m + m.adjoint()) * C64::from(0.5);
        group.bench_with_input(BenchmarkId::new("project_elliptope", n_i), &n_i, |b, _| {
            b.iter(|| project_elliptope(black_box(&m), 1e-9, 10_000).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_mm, bench_beam, bench_sdr);
criterion_main!(benches);
