//! Average optimizer iteration counts with and without acceleration.

use rayon::prelude::*;

use crate::channel::{draw_channels, Geometry};
use crate::error::{Error, Result};
use crate::mm::{run_mm, LiftedPhaseVector, MmSettings};
use crate::model::{CompositeChannel, SystemConfig};
use crate::sim::sweep::{realization_seed, round_sig, stream_rng, CHANNEL_STREAM, INIT_STREAM};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRow {
    pub n_i: usize,
    pub robust_plain: f64,
    pub robust_accelerated: f64,
    pub nonrobust_plain: f64,
    pub nonrobust_accelerated: f64,
}

/// Counts for one realization, in the field order of [`IterationRow`].
fn realization_counts(cfg: &SystemConfig, geo: &Geometry, mm: &MmSettings, seed: u64) -> Result<[usize; 4]> {
    let ch = draw_channels(&mut stream_rng(seed, CHANNEL_STREAM), cfg, geo)?;
    let psi = CompositeChannel::build(&ch)?;
    let init = LiftedPhaseVector::random(psi.lifted_len(), &mut stream_rng(seed, INIT_STREAM));
    let blind = cfg.impairment_blind();
    let plain = mm.accelerated(false);
    let fast = mm.accelerated(true);
    Ok([
        run_mm(init.clone(), &psi, cfg, &plain)?.iterations,
        run_mm(init.clone(), &psi, cfg, &fast)?.iterations,
        run_mm(init.clone(), &psi, &blind, &plain)?.iterations,
        run_mm(init, &psi, &blind, &fast)?.iterations,
    ])
}

/// Mean iterations to convergence for the impairment-aware and blind designs,
/// plain and accelerated, over `n_channels` realizations per element count.
/// All four runs of a realization share the channel and the starting point.
pub fn run_iteration_study(
    n_i_list: &[usize],
    base_cfg: &SystemConfig,
    geo: &Geometry,
    seed: u64,
    n_channels: usize,
    mm: &MmSettings,
) -> Result<Vec<IterationRow>> {
    if n_i_list.is_empty() || n_channels == 0 {
        return Err(Error::InvalidSweep(
            "iteration study needs element counts and channels".into(),
        ));
    }
    n_i_list
        .iter()
        .map(|&n_i| {
            let cfg = base_cfg.with_n_i(n_i).validate()?;
            let counts: Vec<[usize; 4]> = (0..n_channels as u64)
                .into_par_iter()
                .map(|i| realization_counts(&cfg, geo, mm, realization_seed(seed, i)))
                .collect::<Result<_>>()?;
            let mean = |k: usize| round_sig(counts.iter().map(|c| c[k] as f64).sum::<f64>() / n_channels as f64);
            Ok(IterationRow {
                n_i,
                robust_plain: mean(0),
                robust_accelerated: mean(1),
                nonrobust_plain: mean(2),
                nonrobust_accelerated: mean(3),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_study_orders_as_expected() {
        let rows = run_iteration_study(
            &[8, 24],
            &SystemConfig::default(),
            &Geometry::default(),
            3,
            10,
            &MmSettings::default(),
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert!(r.robust_accelerated < r.robust_plain, "{r:?}");
            assert!(r.nonrobust_plain <= r.robust_plain, "{r:?}");
        }
        assert!(rows[1].robust_plain > rows[0].robust_plain);
    }

    #[test]
    fn rejects_empty_input() {
        let cfg = SystemConfig::default();
        assert!(run_iteration_study(&[], &cfg, &Geometry::default(), 0, 10, &MmSettings::default()).is_err());
        assert!(run_iteration_study(&[4], &cfg, &Geometry::default(), 0, 0, &MmSettings::default()).is_err());
    }
}
