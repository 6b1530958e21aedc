//! Monte-Carlo sweeps over one system parameter.

use std::fmt;
use std::str::FromStr;

use log::warn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{draw_channels, Geometry};
use crate::error::{Error, Result};
use crate::model::units::{db_to_linear, linear_to_db};
use crate::model::{PhaseConstraint, SystemConfig};
use crate::sim::scheme::{design_all, upper_bound, DesignSettings, Scheme};
use crate::sim::ser::simulate_ser;

/// Random streams of one realization. Symbol streams follow, one per scheme.
pub const CHANNEL_STREAM: u64 = 0;
pub const INIT_STREAM: u64 = 1;
pub const SYMBOL_STREAM_BASE: u64 = 2;

/// Seed of realization `index`: the master seed xor the index, passed
/// through the splitmix64 finalizer. The same index gets the same seed at
/// every sweep point and for any number of worker threads.
pub fn realization_seed(master: u64, index: u64) -> u64 {
    let mut z = (master ^ index).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic generator for one stream of a realization.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    /// Number of reflecting elements.
    NI,
    /// Horizontal source-destination offset in meters.
    DistanceSdH,
    /// Transmit power in dBW.
    PowerDbw,
    /// Common impairment level of source and destination.
    Kappa,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::NI => "n_i",
            SweepVariable::DistanceSdH => "d_sd_h",
            SweepVariable::PowerDbw => "p_dbw",
            SweepVariable::Kappa => "kappa",
        }
    }

    /// Configuration at sweep value `x`.
    pub fn apply(self, x: f64, cfg: &SystemConfig, geo: &Geometry) -> Result<(SystemConfig, Geometry)> {
        let (mut cfg, mut geo) = (*cfg, *geo);
        match self {
            SweepVariable::NI => {
                if !(x >= 0.0 && x.fract() == 0.0) {
                    return Err(Error::InvalidSweep(format!(
                        "n_i must be a non-negative integer, got {x}"
                    )));
                }
                cfg.n_i = x as usize;
            }
            SweepVariable::DistanceSdH => geo.d_sd_h = x,
            SweepVariable::PowerDbw => cfg.p = db_to_linear(x),
            SweepVariable::Kappa => cfg = cfg.with_kappa(x),
        }
        Ok((cfg.validate()?, geo.validate()?))
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            SweepVariable::NI,
            SweepVariable::DistanceSdH,
            SweepVariable::PowerDbw,
            SweepVariable::Kappa,
        ]
        .into_iter()
        .find(|v| v.name() == s)
        .ok_or_else(|| Error::InvalidSweep(format!("unknown sweep variable {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub n_channels: usize,
    pub n_symbols: usize,
    pub seed: u64,
    pub phase_mode: PhaseConstraint,
    pub design: DesignSettings,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, values: Vec<f64>) -> Self {
        Self {
            variable,
            values,
            n_channels: 500,
            n_symbols: 2000,
            seed: 0,
            phase_mode: PhaseConstraint::Continuous,
            design: DesignSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidSweep("no sweep values".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSweep("sweep values must be finite".into()));
        }
        if self.values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidSweep("sweep values must be sorted".into()));
        }
        if self.n_channels == 0 {
            return Err(Error::InvalidSweep("need at least one channel realization".into()));
        }
        Ok(())
    }
}

/// Averages of one scheme at one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeStats {
    pub scheme: Scheme,
    /// Mean linear SNR, in dB.
    pub mean_snr_db: f64,
    pub ser: Option<f64>,
    pub mean_iterations: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub sweep_variable: SweepVariable,
    pub sweep_value: f64,
    /// In the order of [`Scheme::ALL`].
    pub schemes: Vec<SchemeStats>,
}

impl SimResult {
    pub fn scheme(&self, scheme: Scheme) -> Option<&SchemeStats> {
        self.schemes.iter().find(|s| s.scheme == scheme)
    }
}

/// Per-scheme outcome of one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizationOutcome {
    pub snr: [f64; 5],
    pub ser: [Option<f64>; 5],
    pub iterations: [Option<usize>; 5],
}

/// Designs, scores and simulates every scheme on realization `index`.
pub fn run_realization(
    cfg: &SystemConfig,
    geo: &Geometry,
    settings: &DesignSettings,
    master_seed: u64,
    index: u64,
    n_symbols: usize,
) -> Result<RealizationOutcome> {
    let seed = realization_seed(master_seed, index);
    let ch = draw_channels(&mut stream_rng(seed, CHANNEL_STREAM), cfg, geo)?;
    let set = design_all(&ch, cfg, settings, &mut stream_rng(seed, INIT_STREAM))?;

    let mut out = RealizationOutcome {
        snr: [0.0; 5],
        ser: [None; 5],
        iterations: [None; 5],
    };
    for (k, scheme) in Scheme::ALL.into_iter().enumerate() {
        match set.get(scheme) {
            Some(d) => {
                out.snr[k] = d.snr(&ch, cfg);
                let mut rng = stream_rng(seed, SYMBOL_STREAM_BASE + k as u64);
                out.ser[k] = Some(simulate_ser(&d.beam, d.reflect.as_ref(), &ch, cfg, n_symbols, &mut rng).ser);
                out.iterations[k] = d.iterations;
            }
            None => {
                let ub = upper_bound(&ch, cfg, &settings.sdr, Some(&set.irs.robust.theta_tilde))?;
                out.snr[k] = ub.bound_snr;
            }
        }
    }
    Ok(out)
}

/// Rounds to the ten significant digits written to CSV, so stored results
/// and their serialized form agree exactly.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.9e}").parse().expect("formatted float parses")
}

/// Ordered reduction of realization outcomes into per-scheme averages.
pub fn aggregate(variable: SweepVariable, value: f64, outcomes: &[RealizationOutcome]) -> Result<SimResult> {
    if outcomes.is_empty() {
        return Err(Error::InvalidSweep(format!(
            "every realization failed at {variable} = {value}"
        )));
    }
    let n = outcomes.len() as f64;
    let schemes = Scheme::ALL
        .into_iter()
        .enumerate()
        .map(|(k, scheme)| {
            let snr = outcomes.iter().map(|o| o.snr[k]).sum::<f64>() / n;
            let ser = scheme
                .has_beam()
                .then(|| outcomes.iter().map(|o| o.ser[k].unwrap_or(0.0)).sum::<f64>() / n);
            let iterations = scheme.is_optimizing().then(|| {
                outcomes
                    .iter()
                    .map(|o| o.iterations[k].unwrap_or(0) as f64)
                    .sum::<f64>()
                    / n
            });
            SchemeStats {
                scheme,
                mean_snr_db: round_sig(linear_to_db(snr)),
                ser: ser.map(round_sig),
                mean_iterations: iterations.map(round_sig),
            }
        })
        .collect();
    Ok(SimResult {
        sweep_variable: variable,
        sweep_value: round_sig(value),
        schemes,
    })
}

/// Runs the sweep on the current rayon pool. Realizations that fail are
/// logged, skipped and left out of the averages.
pub fn run_sweep(spec: &SweepSpec, base_cfg: &SystemConfig, geo: &Geometry) -> Result<Vec<SimResult>> {
    spec.validate()?;
    let settings = DesignSettings {
        phase: spec.phase_mode,
        ..spec.design
    };
    spec.values
        .iter()
        .map(|&value| {
            let (cfg, geo) = spec.variable.apply(value, base_cfg, geo)?;
            let results: Vec<Result<RealizationOutcome>> = (0..spec.n_channels as u64)
                .into_par_iter()
                .map(|i| run_realization(&cfg, &geo, &settings, spec.seed, i, spec.n_symbols))
                .collect();
            let mut outcomes = Vec::with_capacity(results.len());
            let mut skipped = 0;
            for r in results {
                match r {
                    Ok(o) => outcomes.push(o),
                    Err(e) => {
                        skipped += 1;
                        warn!("{} = {value}: skipping realization: {e}", spec.variable);
                    }
                }
            }
            if skipped > 0 {
                warn!(
                    "{} = {value}: skipped {skipped} of {} realizations",
                    spec.variable, spec.n_channels
                );
            }
            aggregate(spec.variable, value, &outcomes)
        })
        .collect()
}
