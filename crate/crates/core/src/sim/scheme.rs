//! The compared designs and how each one picks its beams.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::mm::{lifted_objective, quantize_phases, run_mm, LiftedPhaseVector, MmSettings, MmSolution};
use crate::model::{ChannelSet, CompositeChannel, PhaseConstraint, ReflectConfig, SystemConfig};
use crate::sdr::{solve_sdr, SdrSettings, UpperBoundResult};
use crate::txbf::{evaluate_snr, optimal_beam_for_channel, TransmitBeam};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    RobustWithIRS,
    NonrobustWithIRS,
    RobustNoIRS,
    NonrobustNoIRS,
    UpperBound,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::RobustWithIRS,
        Scheme::NonrobustWithIRS,
        Scheme::RobustNoIRS,
        Scheme::NonrobustNoIRS,
        Scheme::UpperBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::RobustWithIRS => "robust_irs",
            Scheme::NonrobustWithIRS => "nonrobust_irs",
            Scheme::RobustNoIRS => "robust_no_irs",
            Scheme::NonrobustNoIRS => "nonrobust_no_irs",
            Scheme::UpperBound => "upper_bound",
        }
    }

    /// Schemes that run the reflect optimizer and so report iteration counts.
    pub fn is_optimizing(self) -> bool {
        matches!(self, Scheme::RobustWithIRS | Scheme::NonrobustWithIRS)
    }

    /// Schemes with a transmit beam, and so a symbol error rate.
    pub fn has_beam(self) -> bool {
        self != Scheme::UpperBound
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::InvalidSweep(format!("unknown scheme {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DesignSettings {
    pub mm: MmSettings,
    pub sdr: SdrSettings,
    pub phase: PhaseConstraint,
}

/// Beams chosen by one scheme on one channel realization.
#[derive(Debug, Clone)]
pub struct Design {
    pub beam: TransmitBeam,
    /// `None` when the scheme does not use the IRS.
    pub reflect: Option<ReflectConfig>,
    /// Optimizer iterations, for optimizing schemes.
    pub iterations: Option<usize>,
}

impl Design {
    /// SNR under the true impairment levels in `cfg`.
    pub fn snr(&self, ch: &ChannelSet, cfg: &SystemConfig) -> f64 {
        evaluate_snr(&self.beam, self.reflect.as_ref(), ch, cfg)
    }
}

/// Continuous MM solutions behind the two IRS schemes.
#[derive(Debug, Clone)]
pub struct IrsSolutions {
    pub robust: MmSolution,
    pub nonrobust: MmSolution,
}

/// Runs the impairment-blind and the impairment-aware optimizers from the same
/// random start.
///
/// The aware run is scored by the true objective while the blind one is not,
/// so a local optimum of the aware run can still fall short of the blind
/// design on that objective. When that happens the aware optimizer is rerun
/// from the blind solution and the better of the two is kept.
pub fn solve_irs<R: Rng + ?Sized>(
    ch: &ChannelSet,
    cfg: &SystemConfig,
    mm: &MmSettings,
    rng: &mut R,
) -> Result<IrsSolutions> {
    let psi = CompositeChannel::build(ch)?;
    let init = LiftedPhaseVector::random(psi.lifted_len(), rng);

    let blind = cfg.impairment_blind();
    let nonrobust = run_mm(init.clone(), &psi, &blind, mm)?;
    let mut robust = run_mm(init, &psi, cfg, mm)?;

    let blind_value = lifted_objective(&nonrobust.theta_tilde, &psi, cfg);
    if blind_value > robust.eval.psi_tilde_val {
        let warm = run_mm(nonrobust.theta_tilde.clone(), &psi, cfg, mm)?;
        if warm.eval.psi_tilde_val > robust.eval.psi_tilde_val {
            robust = MmSolution {
                iterations: robust.iterations,
                evaluations: robust.evaluations + warm.evaluations,
                ..warm
            };
        }
    }
    Ok(IrsSolutions { robust, nonrobust })
}

/// Final beams of an IRS scheme from its continuous solution: quantize when
/// the phases are discrete, then recompute the transmit beam for the
/// reflect configuration actually used.
fn irs_design(sol: &MmSolution, ch: &ChannelSet, design_cfg: &SystemConfig, phase: PhaseConstraint) -> Result<Design> {
    let reflect = quantize_phases(&sol.reflect, phase);
    let beam = optimal_beam_for_channel(&ch.effective_channel(Some(&reflect)), design_cfg)?;
    Ok(Design {
        beam,
        reflect: Some(reflect),
        iterations: Some(sol.iterations),
    })
}

/// `sqrt(P~) v / ||v||`.
pub fn matched_filter(v: &crate::CVector, cfg: &SystemConfig) -> Result<TransmitBeam> {
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::DegenerateChannel);
    }
    Ok(TransmitBeam::new(v * C64::from(cfg.effective_power().sqrt() / norm)).normalize_phase())
}

/// All four beam designs plus the continuous IRS solutions they came from.
#[derive(Debug, Clone)]
pub struct DesignSet {
    pub robust_irs: Design,
    pub nonrobust_irs: Design,
    pub robust_no_irs: Design,
    pub nonrobust_no_irs: Design,
    pub irs: IrsSolutions,
}

impl DesignSet {
    pub fn get(&self, scheme: Scheme) -> Option<&Design> {
        match scheme {
            Scheme::RobustWithIRS => Some(&self.robust_irs),
            Scheme::NonrobustWithIRS => Some(&self.nonrobust_irs),
            Scheme::RobustNoIRS => Some(&self.robust_no_irs),
            Scheme::NonrobustNoIRS => Some(&self.nonrobust_no_irs),
            Scheme::UpperBound => None,
        }
    }
}

pub fn design_all<R: Rng + ?Sized>(
    ch: &ChannelSet,
    cfg: &SystemConfig,
    settings: &DesignSettings,
    rng: &mut R,
) -> Result<DesignSet> {
    let irs = solve_irs(ch, cfg, &settings.mm, rng)?;
    let blind = cfg.impairment_blind();
    Ok(DesignSet {
        robust_irs: irs_design(&irs.robust, ch, cfg, settings.phase)?,
        nonrobust_irs: irs_design(&irs.nonrobust, ch, &blind, settings.phase)?,
        robust_no_irs: Design {
            beam: optimal_beam_for_channel(&ch.h_sd, cfg)?,
            reflect: None,
            iterations: None,
        },
        nonrobust_no_irs: Design {
            beam: matched_filter(&ch.h_sd, cfg)?,
            reflect: None,
            iterations: None,
        },
        irs,
    })
}

/// Beams of a single scheme. The upper bound has no beams and is rejected;
/// use [`upper_bound`] for it.
pub fn design_beams<R: Rng + ?Sized>(
    scheme: Scheme,
    ch: &ChannelSet,
    cfg: &SystemConfig,
    settings: &DesignSettings,
    rng: &mut R,
) -> Result<Design> {
    let blind = cfg.impairment_blind();
    match scheme {
        Scheme::RobustWithIRS => {
            let irs = solve_irs(ch, cfg, &settings.mm, rng)?;
            irs_design(&irs.robust, ch, cfg, settings.phase)
        }
        Scheme::NonrobustWithIRS => {
            let psi = CompositeChannel::build(ch)?;
            let init = LiftedPhaseVector::random(psi.lifted_len(), rng);
            let sol = run_mm(init, &psi, &blind, &settings.mm)?;
            irs_design(&sol, ch, &blind, settings.phase)
        }
        Scheme::RobustNoIRS => Ok(Design {
            beam: optimal_beam_for_channel(&ch.h_sd, cfg)?,
            reflect: None,
            iterations: None,
        }),
        Scheme::NonrobustNoIRS => Ok(Design {
            beam: matched_filter(&ch.h_sd, cfg)?,
            reflect: None,
            iterations: None,
        }),
        Scheme::UpperBound => Err(Error::InvalidSettings("the upper bound has no beam design".into())),
    }
}

/// Relaxation bound for a realization, warm-started at `warm`.
pub fn upper_bound(
    ch: &ChannelSet,
    cfg: &SystemConfig,
    settings: &SdrSettings,
    warm: Option<&LiftedPhaseVector>,
) -> Result<UpperBoundResult> {
    solve_sdr(&CompositeChannel::build(ch)?, cfg, settings, warm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{draw_channels, Geometry};
    use crate::CVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn channels(seed: u64, cfg: &SystemConfig) -> ChannelSet {
        draw_channels(&mut ChaCha8Rng::seed_from_u64(seed), cfg, &Geometry::default()).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("bogus".parse::<Scheme>().is_err());
    }

    #[test]
    fn ideal_hardware_makes_designs_coincide() {
        let cfg = SystemConfig {
            n_i: 10,
            ..SystemConfig::default().with_kappa(0.0)
        };
        let ch = channels(1, &cfg);
        let set = design_all(&ch, &cfg, &DesignSettings::default(), &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let (r, n) = (set.robust_irs.snr(&ch, &cfg), set.nonrobust_irs.snr(&ch, &cfg));
        assert!((r - n).abs() <= 1e-9 * r);
    }

    #[test]
    fn no_irs_link_has_two_distinct_beams() {
        let cfg = SystemConfig {
            n_i: 0,
            ..Default::default()
        };
        let ch = channels(3, &cfg);
        let set = design_all(&ch, &cfg, &DesignSettings::default(), &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let snr: Vec<f64> = [
            Scheme::RobustWithIRS,
            Scheme::NonrobustWithIRS,
            Scheme::RobustNoIRS,
            Scheme::NonrobustNoIRS,
        ]
        .iter()
        .map(|s| set.get(*s).unwrap().snr(&ch, &cfg))
        .collect();
        assert!((snr[0] - snr[2]).abs() <= 1e-12 * snr[0]);
        assert!((snr[1] - snr[3]).abs() <= 1e-12 * snr[1]);
        assert!(snr[2] > snr[3]);
    }

    #[test]
    fn robust_dominates_nonrobust_per_realization() {
        let cfg = SystemConfig {
            n_i: 12,
            ..SystemConfig::default().with_kappa(0.15)
        };
        for seed in 0..20 {
            let ch = channels(seed, &cfg);
            let set = design_all(
                &ch,
                &cfg,
                &DesignSettings::default(),
                &mut ChaCha8Rng::seed_from_u64(seed),
            )
            .unwrap();
            assert!(set.robust_irs.snr(&ch, &cfg) >= set.nonrobust_irs.snr(&ch, &cfg) - 1e-9);
            assert!(set.robust_irs.beam.is_feasible(&cfg));
            assert!(set.nonrobust_irs.beam.is_feasible(&cfg));
        }
    }

    #[test]
    fn single_scheme_designs_match_the_joint_one() {
        let cfg = SystemConfig {
            n_i: 6,
            ..Default::default()
        };
        let ch = channels(5, &cfg);
        let settings = DesignSettings::default();
        let set = design_all(&ch, &cfg, &settings, &mut ChaCha8Rng::seed_from_u64(6)).unwrap();
        for s in [
            Scheme::RobustWithIRS,
            Scheme::NonrobustWithIRS,
            Scheme::RobustNoIRS,
            Scheme::NonrobustNoIRS,
        ] {
            let d = design_beams(s, &ch, &cfg, &settings, &mut ChaCha8Rng::seed_from_u64(6)).unwrap();
            let expected = set.get(s).unwrap().snr(&ch, &cfg);
            assert!((d.snr(&ch, &cfg) - expected).abs() <= 1e-12 * expected, "{s}");
        }
        assert!(design_beams(
            Scheme::UpperBound,
            &ch,
            &cfg,
            &settings,
            &mut ChaCha8Rng::seed_from_u64(6)
        )
        .is_err());
    }

    #[test]
    fn discrete_phases_lie_on_the_grid() {
        let cfg = SystemConfig {
            n_i: 8,
            ..Default::default()
        };
        let ch = channels(7, &cfg);
        let settings = DesignSettings {
            phase: PhaseConstraint::discrete(2).unwrap(),
            ..Default::default()
        };
        let d = design_beams(
            Scheme::RobustWithIRS,
            &ch,
            &cfg,
            &settings,
            &mut ChaCha8Rng::seed_from_u64(8),
        )
        .unwrap();
        for &p in d.reflect.unwrap().phases() {
            let k = p / (std::f64::consts::PI / 2.0);
            assert!((k - k.round()).abs() < 1e-12);
        }
    }

    #[test]
    fn matched_filter_rejects_zero_channel() {
        assert!(matched_filter(&CVector::zeros(3), &SystemConfig::default()).is_err());
    }
}
