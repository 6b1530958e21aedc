//! Channel realizations: distance-based path loss, i.i.d. Rayleigh blocks and
//! rank-one line-of-sight source-to-IRS channels.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{Error, Result};
use crate::model::{ChannelSet, SystemConfig};
use crate::{CMatrix, CVector, C64};

/// Placement of source, IRS and destination plus the path-loss model.
///
/// The source sits at the origin and the IRS at `(d_si, 0)`. The destination
/// lies at horizontal offset `d_sd_h` along the source-IRS line and vertical
/// offset `d_v` from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub d_si: f64,
    pub d_v: f64,
    pub d_sd_h: f64,
    /// Path loss at the reference distance, dB (negative for attenuation).
    pub pl0_db: f64,
    pub d0: f64,
    pub gamma_si: f64,
    pub gamma_id: f64,
    pub gamma_sd: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            d_si: 50.0,
            d_v: 2.0,
            d_sd_h: 49.0,
            pl0_db: -30.0,
            d0: 1.0,
            gamma_si: 2.5,
            gamma_id: 2.5,
            gamma_sd: 3.5,
        }
    }
}

impl Geometry {
    pub fn validate(self) -> Result<Self> {
        for d in [self.d_si, self.d_v, self.d0] {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::NonPositiveDistance(d));
            }
        }
        if !(self.d_sd_h >= 0.0 && self.d_sd_h.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "d_sd_h must be >= 0, got {}",
                self.d_sd_h
            )));
        }
        let (d_sd, d_id) = derive_distances(&self);
        if !(d_sd > 0.0 && d_id > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "destination collides with a node (d_sd = {d_sd}, d_id = {d_id})"
            )));
        }
        Ok(self)
    }

    /// Linear power gains of the source-IRS, IRS-destination and
    /// source-destination links.
    pub fn link_gains(&self) -> Result<LinkGains> {
        let (d_sd, d_id) = derive_distances(self);
        Ok(LinkGains {
            si: path_loss_linear(self.d_si, self.gamma_si, self)?,
            id: path_loss_linear(d_id, self.gamma_id, self)?,
            sd: path_loss_linear(d_sd, self.gamma_sd, self)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGains {
    pub si: f64,
    pub id: f64,
    pub sd: f64,
}

/// `10^((PL_0 - 10 gamma log10(d / d_0)) / 10)`.
pub fn path_loss_linear(d: f64, gamma: f64, geo: &Geometry) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::NonPositiveDistance(d));
    }
    let db = geo.pl0_db - 10.0 * gamma * (d / geo.d0).log10();
    Ok(10f64.powf(db / 10.0))
}

/// Source-destination and IRS-destination distances, `(d_sd, d_id)`.
pub fn derive_distances(geo: &Geometry) -> (f64, f64) {
    let d_sd = geo.d_sd_h.hypot(geo.d_v);
    let d_id = (geo.d_si - geo.d_sd_h).hypot(geo.d_v);
    (d_sd, d_id)
}

/// One `CN(0, gain)` sample: two real normals scaled by `sqrt(gain / 2)`.
pub fn sample_cn<R: Rng + ?Sized>(rng: &mut R, gain: f64) -> C64 {
    let s = (gain / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(s * re, s * im)
}

/// `rows x cols` matrix of i.i.d. `CN(0, gain)` entries, filled row by row.
pub fn sample_rayleigh<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, gain: f64) -> CMatrix {
    // from_fn walks column-major; draw row-major so the stream layout matches
    // the natural reading order of the matrix
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = sample_cn(rng, gain);
        }
    }
    m
}

pub fn sample_rayleigh_vector<R: Rng + ?Sized>(rng: &mut R, len: usize, gain: f64) -> CVector {
    CVector::from_iterator(len, (0..len).map(|_| sample_cn(rng, gain)))
}

/// Draws `H_SI`, `h_ID`, `h_SD` (in that order) with path-loss gains from the
/// geometry.
pub fn draw_channels<R: Rng + ?Sized>(rng: &mut R, cfg: &SystemConfig, geo: &Geometry) -> Result<ChannelSet> {
    let gains = geo.link_gains()?;
    let h_si = sample_rayleigh(rng, cfg.n_i, cfg.n_s, gains.si);
    let h_id = sample_rayleigh_vector(rng, cfg.n_i, gains.id);
    let h_sd = sample_rayleigh_vector(rng, cfg.n_s, gains.sd);
    ChannelSet::new(h_si, h_id, h_sd)
}

/// Rank-one source-to-IRS channel `H_SI = eta a_I a_S^H`.
#[derive(Debug, Clone, PartialEq)]
pub struct LosChannel {
    pub eta: C64,
    /// IRS array response, unit-modulus entries.
    pub a_i: CVector,
    /// Source array response, unit-modulus entries.
    pub a_s: CVector,
}

impl LosChannel {
    pub fn h_si(&self) -> CMatrix {
        (&self.a_i * self.a_s.adjoint()) * self.eta
    }

    pub fn n_s(&self) -> usize {
        self.a_s.len()
    }

    pub fn n_i(&self) -> usize {
        self.a_i.len()
    }
}

/// Half-wavelength uniform linear array response at angle `angle`.
pub fn ula_response(n: usize, angle: f64) -> CVector {
    let phase = PI * angle.cos();
    CVector::from_iterator(n, (0..n).map(|k| C64::from_polar(1.0, phase * k as f64)))
}

/// LOS channel with `|eta|^2 = gain`, uniform phase of `eta`, and ULA
/// responses at angles drawn uniformly from `[0, pi)`.
pub fn sample_los<R: Rng + ?Sized>(rng: &mut R, n_s: usize, n_i: usize, gain: f64) -> LosChannel {
    let phase = Uniform::new(0.0, 2.0 * PI).expect("valid range");
    let angle = Uniform::new(0.0, PI).expect("valid range");
    let eta = C64::from_polar(gain.sqrt(), phase.sample(rng));
    let a_i = ula_response(n_i, angle.sample(rng));
    let a_s = ula_response(n_s, angle.sample(rng));
    LosChannel { eta, a_i, a_s }
}

/// Per-entry variance of a Rayleigh IRS-to-destination channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighSpec {
    pub sigma_id2: f64,
}

impl RayleighSpec {
    pub fn new(sigma_id2: f64) -> Result<Self> {
        if !(sigma_id2 > 0.0 && sigma_id2.is_finite()) {
            return Err(Error::InvalidSettings(format!(
                "sigma_id2 must be positive, got {sigma_id2}"
            )));
        }
        Ok(Self { sigma_id2 })
    }
}
