//! Closed-form design for a rank-one source-to-IRS channel without a direct link.
//!
//! With `H_SI = eta a_I a_S^H` and `h_SD = 0` the composite channel is
//! `conj(eta) (a_I^H Theta^H h_ID) a_S`. Aligning every reflected path makes
//! the scalar factor equal to `||h_ID||_1` (sum of entry moduli), and the best
//! beam is then the scaled array response `sqrt(P~ / N_S) a_S`.

use std::f64::consts::PI;

use crate::channel::{LosChannel, RayleighSpec};
use crate::error::Result;
use crate::model::{ChannelSet, ReflectConfig, SystemConfig};
use crate::txbf::{evaluate_snr, TransmitBeam};
use crate::{CVector, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct LosSolution {
    pub theta: ReflectConfig,
    pub w: TransmitBeam,
    pub snr: f64,
    /// Large-array approximation for Rayleigh `h_ID`, when its variance is known.
    pub snr_asymptotic: Option<f64>,
}

/// Channel set of the special case: rank-one `H_SI` and a zero direct link.
pub fn los_channel_set(ch: &LosChannel, h_id: &CVector) -> Result<ChannelSet> {
    ChannelSet::new(ch.h_si(), h_id.clone(), CVector::zeros(ch.n_s()))
}

/// `theta_i = exp(j (arg h_ID,i - arg a_I,i))` and `w = sqrt(P~ / N_S) a_S`.
pub fn solve_los(
    ch: &LosChannel,
    h_id: &CVector,
    cfg: &SystemConfig,
    rayleigh: Option<&RayleighSpec>,
) -> Result<LosSolution> {
    let set = los_channel_set(ch, h_id)?;
    set.check_config(cfg)?;

    let phases: Vec<f64> = h_id.iter().zip(ch.a_i.iter()).map(|(h, a)| h.arg() - a.arg()).collect();
    let theta = ReflectConfig::from_phases(&phases);
    let scale = (cfg.effective_power() / ch.n_s() as f64).sqrt();
    let w = TransmitBeam::new(&ch.a_s * C64::from(scale));
    let snr = evaluate_snr(&w, Some(&theta), &set, cfg);
    let snr_asymptotic = rayleigh.map(|r| asymptotic_snr(cfg, ch.n_i(), r.sigma_id2, ch.eta.norm_sqr()));
    Ok(LosSolution {
        theta,
        w,
        snr,
        snr_asymptotic,
    })
}

/// `P~ N_S g / (P~ (kd N_S + (1+kd) ks) g + (1+kd) sigma^2)` with
/// `g = |eta|^2 ||h_ID||_1^2`.
pub fn los_closed_form_snr(cfg: &SystemConfig, n_s: usize, eta_abs2: f64, h_id_l1: f64) -> f64 {
    let pt = cfg.effective_power();
    let ns = n_s as f64;
    let g = eta_abs2 * h_id_l1 * h_id_l1;
    pt * ns * g / (pt * (cfg.kappa_d * ns + cfg.distortion_weight()) * g + (1.0 + cfg.kappa_d) * cfg.sigma_n2)
}

/// Closed form with `||h_ID||_1^2` replaced by its large-array value
/// `pi N_I^2 sigma_ID^2 / 4`.
pub fn asymptotic_snr(cfg: &SystemConfig, n_i: usize, sigma_id2: f64, eta_abs2: f64) -> f64 {
    let pt = cfg.effective_power();
    let ns = cfg.n_s as f64;
    let g = eta_abs2 * PI * (n_i as f64).powi(2) * sigma_id2;
    pt * ns * g / (pt * (cfg.kappa_d * ns + cfg.distortion_weight()) * g + 4.0 * (1.0 + cfg.kappa_d) * cfg.sigma_n2)
}

/// `sum_i |h_i|`.
pub fn l1_norm(h: &CVector) -> f64 {
    h.iter().map(|z| z.norm()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_los, sample_rayleigh_vector};
    use crate::txbf::optimal_transmit_beam;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(seed: u64, n_s: usize, n_i: usize) -> (LosChannel, CVector, SystemConfig) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = SystemConfig {
            n_s,
            n_i,
            ..Default::default()
        };
        let ch = sample_los(&mut rng, n_s, n_i, 1e-5);
        let h = sample_rayleigh_vector(&mut rng, n_i, 1e-4);
        (ch, h, cfg)
    }

    #[test]
    fn reflected_paths_combine_coherently() {
        let (ch, h, cfg) = setup(1, 4, 20);
        let sol = solve_los(&ch, &h, &cfg, None).unwrap();
        let combined: C64 = ch
            .a_i
            .iter()
            .zip(sol.theta.theta().iter())
            .zip(h.iter())
            .map(|((a, t), h)| h.conj() * t * a)
            .sum();
        assert_relative_eq!(combined.norm(), l1_norm(&h), max_relative = 1e-12);
    }

    #[test]
    fn snr_matches_closed_ratio() {
        for seed in 0..20 {
            let (ch, h, cfg) = setup(seed, 1 + seed as usize % 6, 8 + seed as usize);
            let sol = solve_los(&ch, &h, &cfg, None).unwrap();
            let closed = los_closed_form_snr(&cfg, ch.n_s(), ch.eta.norm_sqr(), l1_norm(&h));
            assert_relative_eq!(sol.snr, closed, max_relative = 1e-10);
            assert!(sol.w.is_feasible(&cfg));
        }
    }

    #[test]
    fn random_reflections_never_beat_closed_form() {
        let (ch, h, cfg) = setup(3, 4, 16);
        let sol = solve_los(&ch, &h, &cfg, None).unwrap();
        let set = los_channel_set(&ch, &h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10_000 {
            let rc = ReflectConfig::from_coefficients(&sample_rayleigh_vector(&mut rng, 16, 1.0)).unwrap();
            let w = optimal_transmit_beam(Some(&rc), &set, &cfg).unwrap();
            assert!(evaluate_snr(&w, Some(&rc), &set, &cfg) <= sol.snr * (1.0 + 1e-12));
        }
    }

    #[test]
    fn array_beam_matches_optimal_beam() {
        let (ch, h, cfg) = setup(4, 6, 12);
        let sol = solve_los(&ch, &h, &cfg, None).unwrap();
        let set = los_channel_set(&ch, &h).unwrap();
        let w = optimal_transmit_beam(Some(&sol.theta), &set, &cfg).unwrap();
        assert_relative_eq!(
            evaluate_snr(&w, Some(&sol.theta), &set, &cfg),
            sol.snr,
            max_relative = 1e-9
        );
    }

    #[test]
    fn asymptotic_noise_free_ceiling() {
        let cfg = SystemConfig {
            sigma_n2: 1e-300,
            ..Default::default()
        };
        let ceiling = cfg.n_s as f64 / (cfg.kappa_d * cfg.n_s as f64 + cfg.distortion_weight());
        assert_relative_eq!(asymptotic_snr(&cfg, 50, 1e-4, 1e-5), ceiling, max_relative = 1e-9);
    }

    #[test]
    fn asymptotic_monotone_in_elements_and_variance() {
        let cfg = SystemConfig::default();
        let mut last = 0.0;
        for n in 10..=200 {
            let s = asymptotic_snr(&cfg, n, 1e-9, 1e-6);
            assert!(s > last);
            last = s;
        }
        let mut last = 0.0;
        for k in 0..40 {
            let s = asymptotic_snr(&cfg, 50, 1e-11 * 1.5f64.powi(k), 1e-6);
            assert!(s > last);
            last = s;
        }
    }

    #[test]
    fn asymptotic_attached_when_variance_known() {
        let (ch, h, cfg) = setup(5, 4, 10);
        let spec = RayleighSpec::new(1e-4).unwrap();
        let sol = solve_los(&ch, &h, &cfg, Some(&spec)).unwrap();
        assert_eq!(
            sol.snr_asymptotic,
            Some(asymptotic_snr(&cfg, 10, 1e-4, ch.eta.norm_sqr()))
        );
    }

    #[test]
    fn rejects_mismatched_config() {
        let (ch, h, cfg) = setup(6, 4, 10);
        assert!(solve_los(&ch, &h, &SystemConfig { n_i: 9, ..cfg }, None).is_err());
    }
}
