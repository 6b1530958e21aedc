//! Impairment-aware SNR and the closed-form optimal transmit beam.
//!
//! Every function works on the composite channel `v = H_SI^H Theta^H h_ID +
//! h_SD`. A `None` reflect configuration means the IRS is absent and
//! `v = h_SD`.

use crate::error::{Error, Result};
use crate::model::{ChannelSet, EvalResult, ReflectConfig, SystemConfig};
use crate::{CMatrix, CVector, C64};

/// Source transmit beamformer.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitBeam {
    w: CVector,
}

impl TransmitBeam {
    pub fn new(w: CVector) -> Self {
        Self { w }
    }

    pub fn zero(n_s: usize) -> Self {
        Self { w: CVector::zeros(n_s) }
    }

    pub fn vector(&self) -> &CVector {
        &self.w
    }

    pub fn into_vector(self) -> CVector {
        self.w
    }

    /// `||w||^2`.
    pub fn power(&self) -> f64 {
        self.w.norm_squared()
    }

    /// True when `||w||^2 <= P~ (1 + 1e-9)`.
    pub fn is_feasible(&self, cfg: &SystemConfig) -> bool {
        self.power() <= cfg.effective_power() * (1.0 + 1e-9)
    }

    /// Rotates the beam so its first nonzero entry is real and positive.
    pub fn normalize_phase(mut self) -> Self {
        if let Some(z) = self.w.iter().find(|z| z.norm() > 0.0).copied() {
            let rot = z.conj() / z.norm();
            self.w *= rot;
        }
        self
    }
}

/// Rank-one `Upsilon = v v^H` and its diagonal weighting
/// `Upsilon~ = (1+kd) ks diag(Upsilon) + (1+kd) sigma^2 / P~ I`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpsilonPair {
    pub upsilon: CMatrix,
    /// Diagonal entries of `Upsilon~`.
    pub upsilon_tilde: Vec<f64>,
}

pub fn upsilon_pair(v: &CVector, cfg: &SystemConfig) -> UpsilonPair {
    UpsilonPair {
        upsilon: v * v.adjoint(),
        upsilon_tilde: upsilon_tilde_diag(v, cfg),
    }
}

fn upsilon_tilde_diag(v: &CVector, cfg: &SystemConfig) -> Vec<f64> {
    let a = cfg.distortion_weight();
    let c0 = cfg.noise_floor();
    v.iter().map(|z| a * z.norm_sqr() + c0).collect()
}

/// Received SNR of beam `w` over composite channel `v`:
///
/// `|v^H w|^2 / (kd |v^H w|^2 + (1+kd) ks sum_m |v_m|^2 |w_m|^2 + (1+kd) sigma^2)`.
pub fn snr_for_channel(w: &TransmitBeam, v: &CVector, cfg: &SystemConfig) -> f64 {
    let w = w.vector();
    let gain = v.dotc(w).norm_sqr();
    let per_antenna: f64 = v.iter().zip(w.iter()).map(|(a, b)| a.norm_sqr() * b.norm_sqr()).sum();
    let denom = cfg.kappa_d * gain + cfg.distortion_weight() * per_antenna + (1.0 + cfg.kappa_d) * cfg.sigma_n2;
    gain / denom
}

pub fn evaluate_snr(w: &TransmitBeam, theta: Option<&ReflectConfig>, ch: &ChannelSet, cfg: &SystemConfig) -> f64 {
    snr_for_channel(w, &ch.effective_channel(theta), cfg)
}

/// `w* = sqrt(P~) Upsilon~^{-1} v / ||Upsilon~^{-1} v||`, phase-normalized.
pub fn optimal_beam_for_channel(v: &CVector, cfg: &SystemConfig) -> Result<TransmitBeam> {
    if v.iter().all(|z| z.norm_sqr() == 0.0) {
        return Err(Error::DegenerateChannel);
    }
    let diag = upsilon_tilde_diag(v, cfg);
    let u = CVector::from_iterator(v.len(), v.iter().zip(&diag).map(|(z, d)| z / *d));
    let scale = cfg.effective_power().sqrt() / u.norm();
    Ok(TransmitBeam::new(u * C64::from(scale)).normalize_phase())
}

pub fn optimal_transmit_beam(
    theta: Option<&ReflectConfig>,
    ch: &ChannelSet,
    cfg: &SystemConfig,
) -> Result<TransmitBeam> {
    optimal_beam_for_channel(&ch.effective_channel(theta), cfg)
}

/// `v^H Upsilon~^{-1} v`.
pub fn psi_tilde_for_channel(v: &CVector, cfg: &SystemConfig) -> f64 {
    let a = cfg.distortion_weight();
    let c0 = cfg.noise_floor();
    v.iter()
        .map(|z| {
            let q = z.norm_sqr();
            q / (a * q + c0)
        })
        .sum()
}

pub fn psi_tilde(theta: Option<&ReflectConfig>, ch: &ChannelSet, cfg: &SystemConfig) -> f64 {
    psi_tilde_for_channel(&ch.effective_channel(theta), cfg)
}

/// SNR achieved by the optimal beam, `pt / (kd pt + 1)`.
///
/// Monotone increasing in `pt`, so maximizing `psi_tilde` maximizes SNR.
pub fn snr_from_psi_tilde(pt: f64, cfg: &SystemConfig) -> f64 {
    pt / (cfg.kappa_d * pt + 1.0)
}

/// Objective triple at a reflect configuration with the optimal beam.
pub fn evaluate(theta: Option<&ReflectConfig>, ch: &ChannelSet, cfg: &SystemConfig) -> Result<EvalResult> {
    let v = ch.effective_channel(theta);
    let w = optimal_beam_for_channel(&v, cfg)?;
    let pt = psi_tilde_for_channel(&v, cfg);
    Ok(EvalResult {
        snr: snr_for_channel(&w, &v, cfg),
        psi_val: snr_from_psi_tilde(pt, cfg),
        psi_tilde_val: pt,
    })
}
