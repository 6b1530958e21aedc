use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use irsbf::sim::{run_sweep, Scheme, SweepSpec, SweepVariable};
use irsbf::{
    draw_channels, run_mm, solve_sdr, CompositeChannel, Geometry, LiftedPhaseVector, MmSettings, PhaseConstraint,
    SdrSettings, SystemConfig,
};

fn small_spec(variable: SweepVariable, values: Vec<f64>) -> SweepSpec {
    SweepSpec {
        n_channels: 4,
        n_symbols: 200,
        seed: 11,
        ..SweepSpec::new(variable, values)
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn sweep_results_do_not_depend_on_worker_count() {
    let spec = small_spec(SweepVariable::NI, vec![4.0, 16.0]);
    let cfg = SystemConfig::default();
    let geo = Geometry::default();
    let one = in_pool(1, || run_sweep(&spec, &cfg, &geo).unwrap());
    let three = in_pool(3, || run_sweep(&spec, &cfg, &geo).unwrap());
    assert_eq!(one, three);
}

#[test]
fn sweep_orders_schemes_sensibly() {
    let spec = small_spec(SweepVariable::NI, vec![8.0, 40.0]);
    let res = run_sweep(&spec, &SystemConfig::default(), &Geometry::default()).unwrap();
    for r in &res {
        let snr = |s: Scheme| r.scheme(s).unwrap().mean_snr_db;
        assert!(snr(Scheme::UpperBound) >= snr(Scheme::RobustWithIRS) - 1e-9, "{r:?}");
        assert!(
            snr(Scheme::RobustWithIRS) >= snr(Scheme::NonrobustWithIRS) - 1e-9,
            "{r:?}"
        );
        assert!(snr(Scheme::RobustNoIRS) >= snr(Scheme::NonrobustNoIRS) - 1e-9, "{r:?}");
        assert!(r.scheme(Scheme::UpperBound).unwrap().ser.is_none());
    }
    let gain = |s: Scheme| res[1].scheme(s).unwrap().mean_snr_db - res[0].scheme(s).unwrap().mean_snr_db;
    assert!(gain(Scheme::RobustWithIRS) > 0.0);
}

#[test]
fn discrete_phases_cost_little_at_three_bits() {
    let cfg = SystemConfig::default();
    let geo = Geometry::default();
    let cont = run_sweep(&small_spec(SweepVariable::NI, vec![16.0]), &cfg, &geo).unwrap();
    let spec = SweepSpec {
        phase_mode: PhaseConstraint::discrete(3).unwrap(),
        ..small_spec(SweepVariable::NI, vec![16.0])
    };
    let disc = run_sweep(&spec, &cfg, &geo).unwrap();
    let c = cont[0].scheme(Scheme::RobustWithIRS).unwrap().mean_snr_db;
    let d = disc[0].scheme(Scheme::RobustWithIRS).unwrap().mean_snr_db;
    assert!(d <= c + 1e-9 && c - d < 0.5, "continuous {c}, 3-bit {d}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn relaxation_bound_dominates_mm(seed in any::<u64>(), n_i in 1usize..12, kappa in 0.0..0.2f64) {
        let cfg = SystemConfig { n_i, ..SystemConfig::default().with_kappa(kappa) };
        let ch = draw_channels(&mut ChaCha8Rng::seed_from_u64(seed), &cfg, &Geometry::default()).unwrap();
        let psi = CompositeChannel::build(&ch).unwrap();
        let init = LiftedPhaseVector::random(n_i + 1, &mut ChaCha8Rng::seed_from_u64(!seed));
        let mm = run_mm(init, &psi, &cfg, &MmSettings::default()).unwrap();
        let ub = solve_sdr(&psi, &cfg, &SdrSettings::default(), None).unwrap();
        prop_assert!(ub.bound_psi_tilde >= mm.eval.psi_tilde_val * (1.0 - 1e-6));
        prop_assert!(ub.bound_psi_tilde >= ub.primal_psi_tilde - 1e-9 * ub.bound_psi_tilde);
    }
}
