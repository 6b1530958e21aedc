//! Domain types shared by every optimizer: system parameters, channel blocks,
//! the composite channel matrix and reflect-beamforming configurations.
//!
//! All powers are linear watts. Conversions to and from dB live in [`units`]
//! and are only used at the CLI and config boundaries.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::{CMatrix, CVector, C64};

/// Modulus tolerance for reflect coefficients and lifted phase vectors.
pub const UNIT_MODULUS_TOL: f64 = 1e-12;

pub mod units {
    /// `10^(db/10)`.
    pub fn db_to_linear(db: f64) -> f64 {
        10f64.powf(db / 10.0)
    }

    /// `10 log10(x)`; `-inf` for zero.
    pub fn linear_to_db(x: f64) -> f64 {
        10.0 * x.log10()
    }
}

/// Scalars of the link: antenna counts, power budget, impairment levels and
/// receiver noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Source antennas.
    pub n_s: usize,
    /// Reflecting elements. Zero models a link without an IRS.
    pub n_i: usize,
    /// Maximum source transmit power in watts.
    pub p: f64,
    /// Transmit distortion level.
    pub kappa_s: f64,
    /// Receive distortion level.
    pub kappa_d: f64,
    /// Destination noise power in watts.
    pub sigma_n2: f64,
}

impl Default for SystemConfig {
    /// The reference operating point: 4 antennas, 50 elements, 12 dBW,
    /// kappa = 0.07 on both ends, -85 dBW noise.
    fn default() -> Self {
        Self {
            n_s: 4,
            n_i: 50,
            p: units::db_to_linear(12.0),
            kappa_s: 0.07,
            kappa_d: 0.07,
            sigma_n2: units::db_to_linear(-85.0),
        }
    }
}

impl SystemConfig {
    pub fn validate(self) -> Result<Self> {
        if self.n_s == 0 {
            return Err(Error::ZeroAntennas);
        }
        if !(0.0..1.0).contains(&self.kappa_s) {
            return Err(Error::KappaSOutOfRange(self.kappa_s));
        }
        if !(0.0..1.0).contains(&self.kappa_d) {
            return Err(Error::KappaDOutOfRange(self.kappa_d));
        }
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err(Error::NonPositivePower(self.p));
        }
        if !(self.sigma_n2 > 0.0 && self.sigma_n2.is_finite()) {
            return Err(Error::NonPositiveNoise(self.sigma_n2));
        }
        Ok(self)
    }

    /// Power available for the intended signal, `P / (1 + kappa_s)`.
    pub fn effective_power(&self) -> f64 {
        self.p / (1.0 + self.kappa_s)
    }

    /// `(1 + kappa_d) kappa_s`, the weight of the per-antenna distortion term.
    pub fn distortion_weight(&self) -> f64 {
        (1.0 + self.kappa_d) * self.kappa_s
    }

    /// `(1 + kappa_d) sigma_n2 / P~`, the noise floor of every diagonal
    /// weighting matrix.
    pub fn noise_floor(&self) -> f64 {
        (1.0 + self.kappa_d) * self.sigma_n2 / self.effective_power()
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa_s = kappa;
        self.kappa_d = kappa;
        self
    }

    pub fn with_n_i(mut self, n_i: usize) -> Self {
        self.n_i = n_i;
        self
    }

    pub fn with_power(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    /// The configuration an impairment-blind designer would assume. The power
    /// is rescaled so that `effective_power` is unchanged, which keeps the
    /// designed beam inside the true power budget.
    pub fn impairment_blind(&self) -> Self {
        Self {
            p: self.effective_power(),
            kappa_s: 0.0,
            kappa_d: 0.0,
            ..*self
        }
    }
}

/// Free function form of [`SystemConfig::effective_power`].
pub fn effective_power(cfg: &SystemConfig) -> f64 {
    cfg.effective_power()
}

/// The three channel blocks of the link.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// Source-to-IRS channel, `n_i x n_s`.
    pub h_si: CMatrix,
    /// IRS-to-destination channel, length `n_i`.
    pub h_id: CVector,
    /// Source-to-destination channel, length `n_s`.
    pub h_sd: CVector,
}

impl ChannelSet {
    pub fn new(h_si: CMatrix, h_id: CVector, h_sd: CVector) -> Result<Self> {
        let ch = Self { h_si, h_id, h_sd };
        ch.check()?;
        Ok(ch)
    }

    fn check(&self) -> Result<()> {
        if self.h_si.nrows() != self.h_id.len() {
            return Err(Error::DimensionMismatch {
                what: "h_si rows vs h_id length",
                expected: self.h_id.len(),
                found: self.h_si.nrows(),
            });
        }
        if self.h_si.ncols() != self.h_sd.len() {
            return Err(Error::DimensionMismatch {
                what: "h_si cols vs h_sd length",
                expected: self.h_sd.len(),
                found: self.h_si.ncols(),
            });
        }
        let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
        if !(self.h_si.iter().all(finite) && self.h_id.iter().all(finite) && self.h_sd.iter().all(finite)) {
            return Err(Error::NonFiniteChannel);
        }
        Ok(())
    }

    /// Checks dimensions against a configuration.
    pub fn check_config(&self, cfg: &SystemConfig) -> Result<()> {
        if self.n_s() != cfg.n_s {
            return Err(Error::DimensionMismatch {
                what: "source antennas",
                expected: cfg.n_s,
                found: self.n_s(),
            });
        }
        if self.n_i() != cfg.n_i {
            return Err(Error::DimensionMismatch {
                what: "reflecting elements",
                expected: cfg.n_i,
                found: self.n_i(),
            });
        }
        Ok(())
    }

    pub fn n_s(&self) -> usize {
        self.h_sd.len()
    }

    pub fn n_i(&self) -> usize {
        self.h_id.len()
    }

    /// Composite channel `v = H_SI^H Theta^H h_ID + h_SD`, so that the
    /// noiseless received sample is `v^H w x`. With `theta = None` the IRS is
    /// absent and `v = h_SD`.
    pub fn effective_channel(&self, theta: Option<&ReflectConfig>) -> CVector {
        match theta {
            None => self.h_sd.clone(),
            Some(theta) => {
                let scaled = CVector::from_iterator(
                    self.n_i(),
                    theta.theta().iter().zip(self.h_id.iter()).map(|(t, h)| t.conj() * h),
                );
                self.h_si.ad_mul(&scaled) + &self.h_sd
            }
        }
    }
}

/// `Psi = [H_SI^H diag(h_ID) | h_SD]`, shape `n_s x (n_i + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeChannel {
    psi: CMatrix,
}

impl CompositeChannel {
    pub fn build(ch: &ChannelSet) -> Result<Self> {
        ch.check()?;
        let (n_s, n_i) = (ch.n_s(), ch.n_i());
        let mut psi = CMatrix::zeros(n_s, n_i + 1);
        for i in 0..n_i {
            let h = ch.h_id[i];
            for m in 0..n_s {
                psi[(m, i)] = ch.h_si[(i, m)].conj() * h;
            }
        }
        psi.set_column(n_i, &ch.h_sd);
        Ok(Self { psi })
    }

    /// Wraps an explicit matrix. Used by tests and by callers that estimate
    /// `Psi` directly.
    pub fn from_matrix(psi: CMatrix) -> Self {
        Self { psi }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.psi
    }

    pub fn n_s(&self) -> usize {
        self.psi.nrows()
    }

    /// Length of the lifted phase vector, `n_i + 1`.
    pub fn lifted_len(&self) -> usize {
        self.psi.ncols()
    }

    /// `Psi * x`.
    pub fn apply(&self, x: &CVector) -> CVector {
        &self.psi * x
    }

    /// `Psi^H * y`.
    pub fn apply_adjoint(&self, y: &CVector) -> CVector {
        self.psi.ad_mul(y)
    }
}

/// Free function form of [`CompositeChannel::build`].
pub fn build_composite(ch: &ChannelSet) -> Result<CompositeChannel> {
    CompositeChannel::build(ch)
}

/// Feasible set for the reflect coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseConstraint {
    #[default]
    Continuous,
    /// `2^bits` equispaced phases starting at zero.
    Discrete { bits: u32 },
}

impl PhaseConstraint {
    pub fn discrete(bits: u32) -> Result<Self> {
        if !(1..=16).contains(&bits) {
            return Err(Error::InvalidSettings(format!(
                "phase resolution must be 1..=16 bits, got {bits}"
            )));
        }
        Ok(Self::Discrete { bits })
    }

    /// Number of phase levels; `None` for the continuous set.
    pub fn levels(&self) -> Option<usize> {
        match *self {
            Self::Continuous => None,
            Self::Discrete { bits } => Some(1usize << bits),
        }
    }

    /// The discrete phase set `{0, 2pi/L, ..., 2pi(L-1)/L}`.
    pub fn phase_set(&self) -> Option<Vec<f64>> {
        self.levels()
            .map(|l| (0..l).map(|k| TAU * k as f64 / l as f64).collect())
    }
}

/// Diagonal of the IRS reflection matrix `Theta`. Entries are the physical
/// coefficients `theta_i = exp(j phi_i)`, never the conjugated stack used by
/// the lifted formulation; see `LiftedPhaseVector` for the converters.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectConfig {
    theta: CVector,
    phases: Vec<f64>,
}

impl ReflectConfig {
    /// Builds from phases in radians; phases are wrapped into `[0, 2pi)`.
    pub fn from_phases(phases: &[f64]) -> Self {
        let phases: Vec<f64> = phases.iter().map(|&p| wrap_phase(p)).collect();
        let theta = CVector::from_iterator(phases.len(), phases.iter().map(|&p| C64::from_polar(1.0, p)));
        Self { theta, phases }
    }

    /// Builds from complex coefficients, renormalizing each to unit modulus.
    /// Zero entries cannot be normalized and are rejected.
    pub fn from_coefficients(values: &CVector) -> Result<Self> {
        let mut phases = Vec::with_capacity(values.len());
        for (index, z) in values.iter().enumerate() {
            let modulus = z.norm();
            if !(modulus > 0.0 && modulus.is_finite()) {
                return Err(Error::NotUnitModulus { index, modulus });
            }
            phases.push(z.arg());
        }
        Ok(Self::from_phases(&phases))
    }

    /// All-zero phases (`Theta = I`).
    pub fn identity(n_i: usize) -> Self {
        Self::from_phases(&vec![0.0; n_i])
    }

    pub fn theta(&self) -> &CVector {
        &self.theta
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        for (index, z) in self.theta.iter().enumerate() {
            let modulus = z.norm();
            if (modulus - 1.0).abs() > UNIT_MODULUS_TOL {
                return Err(Error::NotUnitModulus { index, modulus });
            }
        }
        Ok(())
    }
}

/// Wraps a phase into `[0, 2pi)`.
pub fn wrap_phase(p: f64) -> f64 {
    let w = p.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Objective values attached to a reflect configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    /// Received SNR with the optimal transmit beam.
    pub snr: f64,
    /// Optimal-beam SNR obtained from `psi_tilde_val` via the monotone map.
    pub psi_val: f64,
    /// Reduced reflect-beamforming objective.
    pub psi_tilde_val: f64,
}
