//! Minorization-maximization over the lifted unit-modulus phase vector.
//!
//! The reduced objective is written on `x = [conj(theta_1), ..., conj(theta_N), t]`
//! with `|x_i| = 1`:
//!
//! ```text
//! f(x) = sum_m |(Psi x)_m|^2 / (a |(Psi x)_m|^2 + c0),   a = (1+kd) ks,  c0 = (1+kd) sigma^2 / P~
//! ```
//!
//! Around an expansion point `x0` with `y0 = Psi x0`, `Xi0 = diag(a |y0_m|^2 + c0)`
//! and `Omega = Psi^H diag(|y0_m|^2 / Xi0_m^2) Psi`, the function
//!
//! ```text
//! g(x | x0) = 2 Re{alpha^H x} - 2 a (N+1) lambda_max(Omega) + 2 a x0^H Omega x0 - f(x0)
//! alpha     = (Psi^H Xi0^{-1} Psi - a (Omega - lambda_max I)) x0
//! ```
//!
//! lower-bounds `f` on the feasible set and touches it at `x0`. Maximizing `g`
//! over unit-modulus vectors is solved entrywise by `x_i = exp(j arg alpha_i)`.

use std::f64::consts::TAU;

use log::debug;
use rand::Rng;

use crate::channel::sample_cn;
use crate::error::{Error, Result};
use crate::linalg::{lambda_max_power_iteration, max_eigenvalue};
use crate::model::{CompositeChannel, EvalResult, PhaseConstraint, ReflectConfig, SystemConfig, UNIT_MODULUS_TOL};
use crate::txbf::{optimal_beam_for_channel, psi_tilde_for_channel, snr_for_channel, snr_from_psi_tilde, TransmitBeam};
use crate::{CMatrix, CVector, C64};

/// Unit-modulus vector of length `n_i + 1`. The first `n_i` entries carry the
/// conjugated reflect coefficients and the last entry is the slack phase.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPhaseVector {
    values: CVector,
}

impl LiftedPhaseVector {
    /// Renormalizes each entry onto the unit circle; zero entries are rejected.
    pub fn from_values(values: CVector) -> Result<Self> {
        let mut values = values;
        for (index, z) in values.iter_mut().enumerate() {
            let modulus = z.norm();
            if !(modulus > 0.0 && modulus.is_finite()) {
                return Err(Error::NotUnitModulus { index, modulus });
            }
            *z /= modulus;
        }
        Ok(Self { values })
    }

    pub fn ones(len: usize) -> Self {
        Self {
            values: CVector::from_element(len, C64::from(1.0)),
        }
    }

    /// Uniformly random phases, obtained by normalizing each entry of a
    /// complex Gaussian vector.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        loop {
            let raw = CVector::from_iterator(len, (0..len).map(|_| sample_cn(rng, 1.0)));
            if let Ok(v) = Self::from_values(raw) {
                return v;
            }
        }
    }

    /// `[conj(theta); 1]`.
    pub fn from_reflect(theta: &ReflectConfig) -> Self {
        let n = theta.len();
        let values = CVector::from_iterator(
            n + 1,
            theta
                .theta()
                .iter()
                .map(|z| z.conj())
                .chain(std::iter::once(C64::from(1.0))),
        );
        Self { values }
    }

    /// Reflect coefficients `theta_i = conj(x_i / t)`. Dividing by the slack
    /// removes the global phase, which the objective does not see.
    pub fn to_reflect(&self) -> ReflectConfig {
        let n = self.values.len() - 1;
        let t = self.values[n];
        let phases: Vec<f64> = self.values.iter().take(n).map(|x| (x / t).conj().arg()).collect();
        ReflectConfig::from_phases(&phases)
    }

    pub fn as_vector(&self) -> &CVector {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        for (index, z) in self.values.iter().enumerate() {
            let modulus = z.norm();
            if (modulus - 1.0).abs() > UNIT_MODULUS_TOL {
                return Err(Error::NotUnitModulus { index, modulus });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmSettings {
    /// Relative objective change that ends the iteration.
    pub epsilon: f64,
    pub max_iter: usize,
    /// Use squared-extrapolation (SQUAREM) cycles instead of plain MM steps.
    pub accelerate: bool,
    pub power_iter_tol: f64,
    pub power_iter_max: usize,
}

impl Default for MmSettings {
    fn default() -> Self {
        Self {
            epsilon: 1e-5,
            max_iter: 10_000,
            accelerate: false,
            power_iter_tol: 1e-10,
            power_iter_max: 10_000,
        }
    }
}

impl MmSettings {
    pub fn accelerated(mut self, on: bool) -> Self {
        self.accelerate = on;
        self
    }

    pub fn validate(self) -> Result<Self> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidSettings(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidSettings("max_iter must be at least 1".into()));
        }
        if !(self.power_iter_tol > 0.0) || self.power_iter_max == 0 {
            return Err(Error::InvalidSettings(
                "power iteration needs tol > 0 and max_iter >= 1".into(),
            ));
        }
        Ok(self)
    }
}

/// State after an MM update together with the minorizer it maximized.
///
/// `xi0`, `omega_weights`, `lambda_max` and `alpha` describe the surrogate
/// built at the previous point; they are empty for the initial iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct MmIterate {
    pub theta_tilde: LiftedPhaseVector,
    /// `f(theta_tilde)`.
    pub objective: f64,
    /// Diagonal of `Xi0`.
    pub xi0: Vec<f64>,
    /// `|y0_m|^2 / Xi0_m^2`, so that `Omega = Psi^H diag(omega_weights) Psi`.
    pub omega_weights: Vec<f64>,
    pub lambda_max: f64,
    pub alpha: CVector,
    pub iter: usize,
    /// Number of MM maps evaluated so far.
    pub evaluations: usize,
}

impl MmIterate {
    pub fn initial(theta_tilde: LiftedPhaseVector, psi: &CompositeChannel, cfg: &SystemConfig) -> Self {
        let objective = lifted_objective(&theta_tilde, psi, cfg);
        Self {
            theta_tilde,
            objective,
            xi0: Vec::new(),
            omega_weights: Vec::new(),
            lambda_max: 0.0,
            alpha: CVector::zeros(0),
            iter: 0,
            evaluations: 0,
        }
    }

    /// `Omega = Psi^H diag(omega_weights) Psi`.
    pub fn omega(&self, psi: &CompositeChannel) -> CMatrix {
        omega_matrix(psi, &self.omega_weights)
    }
}

/// Lifted objective `sum_m |(Psi x)_m|^2 / (a |(Psi x)_m|^2 + c0)`.
pub fn lifted_objective(tt: &LiftedPhaseVector, psi: &CompositeChannel, cfg: &SystemConfig) -> f64 {
    psi_tilde_for_channel(&psi.apply(tt.as_vector()), cfg)
}

fn omega_matrix(psi: &CompositeChannel, weights: &[f64]) -> CMatrix {
    let p = psi.matrix();
    let mut scaled = p.clone();
    for (m, w) in weights.iter().enumerate() {
        scaled.row_mut(m).scale_mut(*w);
    }
    p.ad_mul(&scaled)
}

/// Quantities of the minorizer at expansion point `x0`.
struct Minorizer {
    xi0: Vec<f64>,
    omega_weights: Vec<f64>,
    lambda_max: f64,
    alpha: CVector,
    /// `f(x0)`.
    value: f64,
    /// `x0^H Omega x0`.
    omega_form: f64,
}

fn minorizer(x0: &CVector, psi: &CompositeChannel, cfg: &SystemConfig, settings: &MmSettings) -> Minorizer {
    let a = cfg.distortion_weight();
    let c0 = cfg.noise_floor();
    let y0 = psi.apply(x0);

    let xi0: Vec<f64> = y0.iter().map(|y| a * y.norm_sqr() + c0).collect();
    let omega_weights: Vec<f64> = y0.iter().zip(&xi0).map(|(y, xi)| y.norm_sqr() / (xi * xi)).collect();
    let value: f64 = y0.iter().zip(&xi0).map(|(y, xi)| y.norm_sqr() / xi).sum();
    let omega_form: f64 = y0.iter().zip(&omega_weights).map(|(y, w)| w * y.norm_sqr()).sum();

    // Psi^H (Xi0^{-1} - a diag(omega_weights)) y0 + a lambda x0
    let combined = CVector::from_iterator(
        y0.len(),
        y0.iter()
            .zip(xi0.iter().zip(&omega_weights))
            .map(|(y, (xi, w))| y * (1.0 / xi - a * w)),
    );
    let mut alpha = psi.apply_adjoint(&combined);

    let lambda_max = if a > 0.0 {
        let lambda = omega_lambda_max(psi, &omega_weights, settings);
        alpha.axpy(C64::from(a * lambda), x0, C64::from(1.0));
        lambda
    } else {
        0.0
    };

    Minorizer {
        xi0,
        omega_weights,
        lambda_max,
        alpha,
        value,
        omega_form,
    }
}

/// `lambda_max(Psi^H D Psi)` computed on the `n_s x n_s` matrix
/// `D^{1/2} Psi Psi^H D^{1/2}`, which has the same nonzero spectrum.
fn omega_lambda_max(psi: &CompositeChannel, weights: &[f64], settings: &MmSettings) -> f64 {
    let p = psi.matrix();
    let mut scaled = p.clone();
    for (m, w) in weights.iter().enumerate() {
        scaled.row_mut(m).scale_mut(w.sqrt());
    }
    let gram = &scaled * scaled.adjoint();
    match lambda_max_power_iteration(&gram, settings.power_iter_tol, settings.power_iter_max) {
        Ok(l) => l,
        Err(e) => {
            debug!("{e}; falling back to dense eigensolver");
            max_eigenvalue(&gram)
        }
    }
}

/// Entrywise phase alignment with `alpha`; entries with `alpha_i = 0` keep
/// their previous phase.
fn align_phases(alpha: &CVector, prev: &CVector) -> CVector {
    CVector::from_iterator(
        alpha.len(),
        alpha.iter().zip(prev.iter()).map(|(a, p)| {
            let m = a.norm();
            if m > 0.0 && m.is_finite() {
                a / m
            } else {
                *p
            }
        }),
    )
}

/// One MM update.
pub fn mm_step(prev: &MmIterate, psi: &CompositeChannel, cfg: &SystemConfig, settings: &MmSettings) -> MmIterate {
    let x0 = prev.theta_tilde.as_vector();
    let mz = minorizer(x0, psi, cfg, settings);
    let next = LiftedPhaseVector {
        values: align_phases(&mz.alpha, x0),
    };
    let objective = lifted_objective(&next, psi, cfg);
    MmIterate {
        theta_tilde: next,
        objective,
        xi0: mz.xi0,
        omega_weights: mz.omega_weights,
        lambda_max: mz.lambda_max,
        alpha: mz.alpha,
        iter: prev.iter + 1,
        evaluations: prev.evaluations + 1,
    }
}

/// Value of the minorizer built at `tt0`, evaluated at `tt`.
pub fn surrogate_value(
    tt: &LiftedPhaseVector,
    tt0: &LiftedPhaseVector,
    psi: &CompositeChannel,
    cfg: &SystemConfig,
    settings: &MmSettings,
) -> f64 {
    let a = cfg.distortion_weight();
    let n = tt0.len() as f64;
    let mz = minorizer(tt0.as_vector(), psi, cfg, settings);
    2.0 * mz.alpha.dotc(tt.as_vector()).re - 2.0 * a * n * mz.lambda_max + 2.0 * a * mz.omega_form - mz.value
}

/// Backtracking steps before a SQUAREM cycle falls back to the plain double step.
const SQUAREM_MAX_BACKTRACK: usize = 8;

/// One SQUAREM cycle: two MM maps, a squared extrapolation with step
/// `-||r|| / ||v||` projected back onto the unit circle, and one stabilizing
/// MM map. The step is pulled toward `-1` until the result is at least as good
/// as the plain double step, which is returned if that never happens.
pub fn squarem_accelerate(
    state: &MmIterate,
    psi: &CompositeChannel,
    cfg: &SystemConfig,
    settings: &MmSettings,
) -> MmIterate {
    let x0 = state.theta_tilde.as_vector().clone();
    let s1 = mm_step(state, psi, cfg, settings);
    let s2 = mm_step(&s1, psi, cfg, settings);
    let plain = |mut s: MmIterate| {
        s.iter = state.iter + 1;
        s
    };

    let x1 = s1.theta_tilde.as_vector();
    let x2 = s2.theta_tilde.as_vector();
    let r = x1 - &x0;
    let v = x2 - x1 - &r;
    let (rn, vn) = (r.norm(), v.norm());
    if rn == 0.0 || vn <= f64::EPSILON * rn {
        return plain(s2);
    }

    let mut step = -rn / vn;
    let mut evaluations = s2.evaluations;
    for _ in 0..SQUAREM_MAX_BACKTRACK {
        if step >= -1.0 {
            break;
        }
        // x0 - 2 step r + step^2 v
        let mut cand = &x0 - &r * C64::from(2.0 * step) + &v * C64::from(step * step);
        for (c, fallback) in cand.iter_mut().zip(x2.iter()) {
            let m = c.norm();
            *c = if m > 0.0 && m.is_finite() { *c / m } else { *fallback };
        }
        let start = MmIterate {
            evaluations,
            ..MmIterate::initial(LiftedPhaseVector { values: cand }, psi, cfg)
        };
        let stabilized = mm_step(&start, psi, cfg, settings);
        evaluations = stabilized.evaluations;
        if stabilized.objective >= s2.objective {
            return MmIterate {
                iter: state.iter + 1,
                ..stabilized
            };
        }
        step = (step - 1.0) / 2.0;
    }
    MmIterate {
        evaluations,
        ..plain(s2)
    }
}

/// Outcome of a full MM run.
#[derive(Debug, Clone)]
pub struct MmSolution {
    pub reflect: ReflectConfig,
    pub beam: TransmitBeam,
    pub eval: EvalResult,
    pub theta_tilde: LiftedPhaseVector,
    /// MM steps, or SQUAREM cycles when accelerated.
    pub iterations: usize,
    /// MM maps evaluated; equals `iterations` without acceleration.
    pub evaluations: usize,
    pub converged: bool,
    /// Objective after each iteration, starting with the initial point.
    pub trace: Vec<f64>,
}

/// Runs MM (optionally SQUAREM-accelerated) until the relative objective
/// change drops below `epsilon`, then extracts the reflect configuration and
/// its optimal transmit beam. Hitting `max_iter` returns the last iterate with
/// `converged = false`.
pub fn run_mm(
    init: LiftedPhaseVector,
    psi: &CompositeChannel,
    cfg: &SystemConfig,
    settings: &MmSettings,
) -> Result<MmSolution> {
    let settings = settings.validate()?;
    if init.len() != psi.lifted_len() {
        return Err(Error::DimensionMismatch {
            what: "lifted phase vector",
            expected: psi.lifted_len(),
            found: init.len(),
        });
    }
    init.validate()?;

    let mut state = MmIterate::initial(init, psi, cfg);
    let mut trace = vec![state.objective];
    let mut converged = false;
    while state.iter < settings.max_iter {
        let next = if settings.accelerate {
            squarem_accelerate(&state, psi, cfg, &settings)
        } else {
            mm_step(&state, psi, cfg, &settings)
        };
        let change = (next.objective - state.objective).abs() / state.objective.max(1.0);
        trace.push(next.objective);
        state = next;
        if change < settings.epsilon {
            converged = true;
            break;
        }
    }

    let reflect = state.theta_tilde.to_reflect();
    let v = psi.apply(LiftedPhaseVector::from_reflect(&reflect).as_vector());
    let beam = optimal_beam_for_channel(&v, cfg)?;
    let pt = psi_tilde_for_channel(&v, cfg);
    Ok(MmSolution {
        eval: EvalResult {
            snr: snr_for_channel(&beam, &v, cfg),
            psi_val: snr_from_psi_tilde(pt, cfg),
            psi_tilde_val: pt,
        },
        reflect,
        beam,
        iterations: state.iter,
        evaluations: state.evaluations,
        converged,
        trace,
        theta_tilde: state.theta_tilde,
    })
}

/// Maps each phase to the nearest level of the discrete set under angular
/// distance. Exact ties go to the lower level index.
pub fn quantize_phases(theta: &ReflectConfig, pc: PhaseConstraint) -> ReflectConfig {
    let Some(levels) = pc.levels() else {
        return theta.clone();
    };
    let step = TAU / levels as f64;
    let phases: Vec<f64> = theta
        .phases()
        .iter()
        .map(|&phi| {
            let pos = phi / step;
            let lo = pos.floor();
            let frac = pos - lo;
            let lo_idx = (lo as i64).rem_euclid(levels as i64) as usize;
            let hi_idx = (lo_idx + 1) % levels;
            let idx = if frac < 0.5 {
                lo_idx
            } else if frac > 0.5 {
                hi_idx
            } else {
                lo_idx.min(hi_idx)
            };
            idx as f64 * step
        })
        .collect();
    ReflectConfig::from_phases(&phases)
}
