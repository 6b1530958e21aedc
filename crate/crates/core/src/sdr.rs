//! Upper bound on the reflect objective from its semidefinite relaxation.
//!
//! Lifting `x x^H` to a matrix `X` with unit diagonal and dropping the rank
//! constraint gives the concave problem
//!
//! ```text
//! maximize  g(X) = sum_m q_m / (a q_m + c0),   q_m = (Psi X Psi^H)_mm
//! subject to X PSD, X_ii = 1.
//! ```
//!
//! Two ascent methods are provided. The default keeps `X = V V^H` with `V`
//! an `n x r` matrix of unit-norm rows and runs Riemannian gradient ascent on
//! `V`, which never leaves the feasible set. The other runs projected
//! supergradient steps on `X` directly with a Dykstra projection.
//!
//! Both report a certified bound. For concave `g`, any PSD `X` and any
//! feasible `Y`,
//!
//! ```text
//! g(Y) <= g(X) + <G, Y - X> <= g(X) + n lambda_max(G - Diag(z)),   z_i = Re (G X)_ii,
//! ```
//!
//! where `G` is the gradient at `X`. The right-hand side is what is returned
//! as `bound_psi_tilde`, so the bound stays valid even when the ascent stops
//! early.

use log::debug;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::sample_cn;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, max_eigenvalue, project_psd};
use crate::mm::LiftedPhaseVector;
use crate::model::{CompositeChannel, SystemConfig};
use crate::txbf::snr_from_psi_tilde;
use crate::{CMatrix, C64};

/// Result of a relaxation solve.
#[derive(Debug, Clone)]
pub struct UpperBoundResult {
    /// Best feasible relaxation point found.
    pub theta_big: CMatrix,
    /// Certified upper bound on the relaxed (and hence the original) optimum.
    pub bound_psi_tilde: f64,
    /// Relaxed objective at `theta_big`, a lower bound on the relaxed optimum.
    pub primal_psi_tilde: f64,
    pub bound_snr: f64,
    /// True when the relative gap between bound and primal fell below tolerance.
    pub converged: bool,
    pub iterations: usize,
}

impl UpperBoundResult {
    /// `(bound - primal) / max(1, bound)`.
    pub fn relative_gap(&self) -> f64 {
        (self.bound_psi_tilde - self.primal_psi_tilde) / self.bound_psi_tilde.abs().max(1.0)
    }

    /// Number of eigenvalues of `theta_big` above `rel_tol` times the largest.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        let eig = crate::linalg::hermitian_part(&self.theta_big).symmetric_eigenvalues();
        let top = eig.iter().cloned().fold(0.0, f64::max);
        eig.iter().filter(|&&l| l > rel_tol * top).count()
    }
}

/// Diagonal congruence values and gradient at one relaxation point.
#[derive(Debug, Clone)]
pub struct BoundIterate {
    pub q: Vec<f64>,
    pub grad: CMatrix,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SdrMethod {
    /// Low-rank factorization with Riemannian gradient ascent.
    #[default]
    Factorized,
    /// Projected supergradient ascent on the full matrix.
    ProjectedSupergradient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdrSettings {
    pub method: SdrMethod,
    /// Relative gap (factorized) or relative stall (supergradient) that ends the ascent.
    pub tol: f64,
    pub max_iter: usize,
    /// Iterations between bound certificates in the factorized method.
    pub certify_every: usize,
    /// Seed for the factor columns beyond the warm start.
    pub seed: u64,
    /// Stall window of the supergradient method.
    pub window: usize,
    /// Step decay `b` in `a / (1 + k b)`.
    pub step_decay: f64,
    pub projection_tol: f64,
    pub projection_max_iter: usize,
}

impl Default for SdrSettings {
    fn default() -> Self {
        Self {
            method: SdrMethod::Factorized,
            tol: 1e-6,
            max_iter: 5000,
            certify_every: 10,
            seed: 0x5d12,
            window: 50,
            step_decay: 0.01,
            projection_tol: 1e-9,
            projection_max_iter: 10_000,
        }
    }
}

impl SdrSettings {
    pub fn validate(self) -> Result<Self> {
        if !(self.tol > 0.0) || self.max_iter == 0 || self.certify_every == 0 || self.window == 0 {
            return Err(Error::InvalidSettings(
                "sdr settings need tol > 0 and positive iteration counts".into(),
            ));
        }
        if !(self.projection_tol > 0.0) || self.projection_max_iter == 0 {
            return Err(Error::InvalidSettings(
                "projection needs tol > 0 and max_iter >= 1".into(),
            ));
        }
        Ok(self)
    }
}

/// `q_m = (Psi X Psi^H)_mm`.
fn congruence_diag(theta_big: &CMatrix, psi: &CMatrix) -> Vec<f64> {
    let px = psi * theta_big;
    (0..psi.nrows())
        .map(|m| {
            px.row(m)
                .iter()
                .zip(psi.row(m).iter())
                .map(|(a, b)| a * b.conj())
                .sum::<C64>()
                .re
        })
        .collect()
}

fn objective_from_q(q: &[f64], a: f64, c0: f64) -> f64 {
    q.iter().map(|&q| q / (a * q + c0)).sum()
}

/// `sum_m q_m / (a q_m + c0)` with `q_m = (Psi X Psi^H)_mm`.
pub fn relaxed_objective(theta_big: &CMatrix, psi: &CompositeChannel, cfg: &SystemConfig) -> f64 {
    let q = congruence_diag(theta_big, psi.matrix());
    objective_from_q(&q, cfg.distortion_weight(), cfg.noise_floor())
}

fn weighted_gram(psi: &CMatrix, c: &[f64]) -> CMatrix {
    let mut scaled = psi.clone();
    for (m, w) in c.iter().enumerate() {
        scaled.row_mut(m).scale_mut(*w);
    }
    psi.ad_mul(&scaled)
}

/// `q` and the gradient `Psi^H diag(c) Psi`, `c_m = c0 / (a q_m + c0)^2`.
pub fn bound_iterate(theta_big: &CMatrix, psi: &CompositeChannel, cfg: &SystemConfig, step: f64) -> BoundIterate {
    let (a, c0) = (cfg.distortion_weight(), cfg.noise_floor());
    let q = congruence_diag(theta_big, psi.matrix());
    let c: Vec<f64> = q.iter().map(|&q| c0 / (a * q + c0).powi(2)).collect();
    BoundIterate {
        grad: weighted_gram(psi.matrix(), &c),
        q,
        step,
    }
}

/// Dykstra's alternating projections between the PSD cone and the
/// unit-diagonal affine set. The returned matrix has an exact unit diagonal
/// and lies within `tol` (Frobenius) of the PSD cone.
pub fn project_elliptope(m: &CMatrix, tol: f64, max_iter: usize) -> Result<CMatrix> {
    let n = m.nrows();
    let mut x = hermitian_part(m);
    let mut p = CMatrix::zeros(n, n);
    let mut q = CMatrix::zeros(n, n);
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let y = project_psd(&(&x + &p));
        p = &x + &p - &y;
        let mut next = &y + &q;
        for i in 0..n {
            next[(i, i)] = C64::from(1.0);
        }
        q = &y + &q - &next;
        x = next;
        residual = (&x - &y).norm();
        if residual < tol {
            return Ok(x);
        }
    }
    Err(Error::ElliptopeProjection {
        residual,
        iterations: max_iter,
        last: Box::new(x),
    })
}

/// Certified bound `g(X) + n lambda_max(G - Diag(Re diag(G X)))` for PSD `X`.
fn certificate(x: &CMatrix, value: f64, grad: &CMatrix) -> f64 {
    let n = x.nrows();
    let gx = grad * x;
    let mut shifted = grad.clone();
    for i in 0..n {
        shifted[(i, i)] -= C64::from(gx[(i, i)].re);
    }
    value + n as f64 * max_eigenvalue(&shifted).max(0.0)
}

/// Solves the relaxation and returns a certified upper bound. `warm` seeds the
/// ascent at `x x^H`; without it the all-ones vector is used.
pub fn solve_sdr(
    psi: &CompositeChannel,
    cfg: &SystemConfig,
    settings: &SdrSettings,
    warm: Option<&LiftedPhaseVector>,
) -> Result<UpperBoundResult> {
    let settings = settings.validate()?;
    let n = psi.lifted_len();
    let start = match warm {
        Some(w) if w.len() != n => {
            return Err(Error::DimensionMismatch {
                what: "sdr warm start",
                expected: n,
                found: w.len(),
            })
        }
        Some(w) => w.clone(),
        None => LiftedPhaseVector::ones(n),
    };

    let c0 = cfg.noise_floor();
    // Work with Psi / sqrt(c0): the objective becomes sum q / (a q + 1) and
    // its value is unchanged.
    let scaled = CompositeChannel::from_matrix(psi.matrix().unscale(c0.sqrt()));
    let unit_cfg = ScaledProblem {
        a: cfg.distortion_weight(),
    };

    let mut res = match settings.method {
        SdrMethod::Factorized => factorized_ascent(&scaled, unit_cfg, &settings, &start),
        SdrMethod::ProjectedSupergradient => supergradient_ascent(&scaled, unit_cfg, &settings, &start),
    };
    res.bound_snr = snr_from_psi_tilde(res.bound_psi_tilde, cfg);
    Ok(res)
}

/// Objective parameters after scaling `c0` to one.
#[derive(Debug, Clone, Copy)]
struct ScaledProblem {
    a: f64,
}

impl ScaledProblem {
    fn value(&self, q: &[f64]) -> f64 {
        objective_from_q(q, self.a, 1.0)
    }

    fn weights(&self, q: &[f64]) -> Vec<f64> {
        q.iter().map(|&q| 1.0 / (self.a * q + 1.0).powi(2)).collect()
    }
}

fn normalize_rows(v: &mut CMatrix) {
    for mut row in v.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row.unscale_mut(norm);
        } else {
            row[0] = C64::from(1.0);
        }
    }
}

/// Factor rank large enough that second-order critical points are global.
fn factor_rank(n: usize, n_s: usize) -> usize {
    let r = (2.0 * (n + n_s) as f64).sqrt().ceil() as usize + 1;
    r.min(n).max(1)
}

fn factorized_ascent(
    psi: &CompositeChannel,
    prob: ScaledProblem,
    settings: &SdrSettings,
    start: &LiftedPhaseVector,
) -> UpperBoundResult {
    let p = psi.matrix();
    let n = psi.lifted_len();
    let r = factor_rank(n, psi.n_s());

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut v = CMatrix::from_fn(n, r, |_, j| {
        if j == 0 {
            C64::from(0.0)
        } else {
            sample_cn(&mut rng, 0.01)
        }
    });
    v.set_column(0, start.as_vector());
    normalize_rows(&mut v);

    // value and weights at V
    let eval = |v: &CMatrix| {
        let pv = p * v;
        let q: Vec<f64> = pv.row_iter().map(|row| row.norm_squared()).collect();
        (prob.value(&q), pv, q)
    };

    let (mut value, mut pv, mut q) = eval(&v);
    let mut step = 1.0 / p.norm_squared().max(f64::MIN_POSITIVE);
    let mut bound = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    for k in 0..settings.max_iter {
        iterations = k + 1;
        let c = prob.weights(&q);
        // Euclidean gradient 2 G V with G = Psi^H diag(c) Psi
        let mut cpv = pv.clone();
        for (m, w) in c.iter().enumerate() {
            cpv.row_mut(m).scale_mut(*w);
        }
        let egrad = p.ad_mul(&cpv) * C64::from(2.0);

        if k % settings.certify_every == 0 {
            let x = &v * v.adjoint();
            let grad = weighted_gram(p, &c);
            bound = bound.min(certificate(&x, value, &grad));
            if (bound - value) / bound.abs().max(1.0) < settings.tol {
                converged = true;
                break;
            }
        }

        // tangent projection, row by row
        let mut rgrad = egrad;
        for i in 0..n {
            let radial = v
                .row(i)
                .iter()
                .zip(rgrad.row(i).iter())
                .map(|(a, b)| a.conj() * b)
                .sum::<C64>()
                .re;
            for j in 0..rgrad.ncols() {
                rgrad[(i, j)] -= v[(i, j)] * radial;
            }
        }
        let gnorm2 = rgrad.norm_squared();
        if gnorm2 == 0.0 {
            continue;
        }

        step *= 2.0;
        let mut accepted = false;
        for _ in 0..60 {
            let mut cand = &v + &rgrad * C64::from(step);
            normalize_rows(&mut cand);
            let (cv, cpv, cq) = eval(&cand);
            if cv >= value + 1e-4 * step * gnorm2 {
                v = cand;
                value = cv;
                pv = cpv;
                q = cq;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            debug!("factorized ascent: line search stalled at iteration {k}");
            break;
        }
    }

    let x = &v * v.adjoint();
    if !converged {
        let grad = weighted_gram(p, &prob.weights(&q));
        bound = bound.min(certificate(&x, value, &grad));
        converged = (bound - value) / bound.abs().max(1.0) < settings.tol;
    }
    UpperBoundResult {
        theta_big: x,
        bound_psi_tilde: bound,
        primal_psi_tilde: value,
        bound_snr: f64::NAN,
        converged,
        iterations,
    }
}

fn supergradient_ascent(
    psi: &CompositeChannel,
    prob: ScaledProblem,
    settings: &SdrSettings,
    start: &LiftedPhaseVector,
) -> UpperBoundResult {
    let p = psi.matrix();
    let s = start.as_vector();
    let mut x = s * s.adjoint();
    let a0 = 1.0 / p.norm_squared().max(f64::MIN_POSITIVE);

    let value_at = |x: &CMatrix| prob.value(&congruence_diag(x, p));
    let mut best = x.clone();
    let mut best_value = value_at(&x);
    let mut history = vec![best_value];
    let mut converged = false;
    let mut iterations = 0;

    for k in 0..settings.max_iter {
        iterations = k + 1;
        let q = congruence_diag(&x, p);
        let grad = weighted_gram(p, &prob.weights(&q));
        let step = a0 / (1.0 + k as f64 * settings.step_decay);
        let moved = &x + grad * C64::from(step);
        x = match project_elliptope(&moved, settings.projection_tol, settings.projection_max_iter) {
            Ok(x) => x,
            Err(Error::ElliptopeProjection { last, residual, .. }) => {
                debug!("supergradient ascent: projection residual {residual}");
                *last
            }
            Err(_) => unreachable!("projection only fails with a residual error"),
        };
        let value = value_at(&x);
        if value > best_value {
            best_value = value;
            best.copy_from(&x);
        }
        history.push(best_value);
        if history.len() > settings.window {
            let old = history[history.len() - 1 - settings.window];
            if (best_value - old) / best_value.abs().max(1.0) < settings.tol {
                converged = true;
                break;
            }
        }
    }

    // the certificate needs a PSD point; the projection leaves a tiny residual
    let cert_point = project_psd(&best);
    let cert_value = value_at(&cert_point);
    let grad = weighted_gram(p, &prob.weights(&congruence_diag(&cert_point, p)));
    let bound = certificate(&cert_point, cert_value, &grad);
    UpperBoundResult {
        theta_big: best,
        bound_psi_tilde: bound,
        primal_psi_tilde: best_value,
        bound_snr: f64::NAN,
        converged,
        iterations,
    }
}

/// SNR implied by the relaxation bound.
pub fn snr_bound(ub: &UpperBoundResult, cfg: &SystemConfig) -> f64 {
    snr_from_psi_tilde(ub.bound_psi_tilde, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{draw_channels, Geometry};
    use crate::linalg::min_eigenvalue;
    use crate::mm::{lifted_objective, run_mm, MmSettings};
    use approx::assert_relative_eq;
    use rand::Rng;

    fn instance(seed: u64, n_s: usize, n_i: usize) -> (CompositeChannel, SystemConfig) {
        let cfg = SystemConfig {
            n_s,
            n_i,
            ..Default::default()
        };
        let ch = draw_channels(&mut ChaCha8Rng::seed_from_u64(seed), &cfg, &Geometry::default()).unwrap();
        (CompositeChannel::build(&ch).unwrap(), cfg)
    }

    fn random_elliptope_point(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let mut v = CMatrix::from_fn(n, n, |_, _| sample_cn(rng, 1.0));
        normalize_rows(&mut v);
        &v * v.adjoint()
    }

    #[test]
    fn rank_one_matches_lifted_objective() {
        let (psi, cfg) = instance(1, 4, 6);
        let tt = LiftedPhaseVector::random(7, &mut ChaCha8Rng::seed_from_u64(3));
        let x = tt.as_vector() * tt.as_vector().adjoint();
        assert_relative_eq!(
            relaxed_objective(&x, &psi, &cfg),
            lifted_objective(&tt, &psi, &cfg),
            max_relative = 1e-12
        );
    }

    #[test]
    fn numerical_rank_of_lifted_point() {
        let tt = LiftedPhaseVector::random(5, &mut ChaCha8Rng::seed_from_u64(8));
        let mut ub = UpperBoundResult {
            theta_big: tt.as_vector() * tt.as_vector().adjoint(),
            bound_psi_tilde: 1.0,
            primal_psi_tilde: 1.0,
            bound_snr: 1.0,
            converged: true,
            iterations: 0,
        };
        assert_eq!(ub.numerical_rank(1e-9), 1);
        ub.theta_big = CMatrix::identity(5, 5);
        assert_eq!(ub.numerical_rank(1e-9), 5);
    }

    #[test]
    fn single_term_hand_value() {
        let cfg = SystemConfig {
            n_s: 3,
            n_i: 2,
            ..Default::default()
        };
        let mut e = CMatrix::zeros(3, 3);
        e[(0, 0)] = C64::from(1.0);
        let psi = CompositeChannel::from_matrix(e);
        let expected = 1.0 / (cfg.distortion_weight() + cfg.noise_floor());
        assert_relative_eq!(
            relaxed_objective(&CMatrix::identity(3, 3), &psi, &cfg),
            expected,
            max_relative = 1e-14
        );
    }

    #[test]
    fn saturates_for_large_kappa_s() {
        let (psi, cfg) = instance(2, 4, 3);
        let x = CMatrix::identity(4, 4);
        let mut last = f64::INFINITY;
        for ks in [1e2, 1e4, 1e6] {
            let c = SystemConfig { kappa_s: ks, ..cfg };
            let v = relaxed_objective(&x, &psi, &c);
            assert!(v < last);
            assert!(v <= cfg.n_s as f64 / c.distortion_weight());
            last = v;
        }
    }

    #[test]
    fn objective_is_concave() {
        let (psi, cfg) = instance(3, 4, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let a = random_elliptope_point(6, &mut rng);
            let b = random_elliptope_point(6, &mut rng);
            let l: f64 = rng.random();
            let mix = &a * C64::from(l) + &b * C64::from(1.0 - l);
            let lhs = relaxed_objective(&mix, &psi, &cfg);
            let rhs = l * relaxed_objective(&a, &psi, &cfg) + (1.0 - l) * relaxed_objective(&b, &psi, &cfg);
            assert!(lhs >= rhs - 1e-9 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (psi, cfg) = instance(4, 3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_elliptope_point(4, &mut rng);
        let g = bound_iterate(&x, &psi, &cfg, 0.0).grad;
        let f0 = relaxed_objective(&x, &psi, &cfg);
        for i in 0..4 {
            for j in i..4 {
                for dir in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                    if i == j && dir.im != 0.0 {
                        continue;
                    }
                    let mut d = CMatrix::zeros(4, 4);
                    d[(i, j)] = dir;
                    d[(j, i)] = dir.conj();
                    let h = 1e-6;
                    let fd = (relaxed_objective(&(&x + &d * C64::from(h)), &psi, &cfg)
                        - relaxed_objective(&(&x - &d * C64::from(h)), &psi, &cfg))
                        / (2.0 * h);
                    let analytic = g.zip_map(&d, |a, b| (a.conj() * b).re).sum();
                    assert!(
                        (fd - analytic).abs() <= 1e-5 * analytic.abs().max(f0 * 1e-6),
                        "({i},{j}) fd {fd} analytic {analytic}"
                    );
                }
            }
        }
    }

    #[test]
    fn feasible_input_is_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = random_elliptope_point(5, &mut rng);
        let p = project_elliptope(&x, 1e-10, 1000).unwrap();
        assert!((p - x).norm() < 1e-9);
    }

    #[test]
    fn scaled_identity_projects_to_identity() {
        let p = project_elliptope(&(CMatrix::identity(4, 4) * C64::from(2.0)), 1e-12, 100).unwrap();
        assert!((p - CMatrix::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn random_hermitian_projection_is_feasible_and_closer_than_alternating() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let raw = CMatrix::from_fn(6, 6, |_, _| sample_cn(&mut rng, 1.0));
        let m = hermitian_part(&raw) * C64::from(2.0);
        let p = project_elliptope(&m, 1e-10, 100_000).unwrap();
        for i in 0..6 {
            assert!((p[(i, i)] - C64::from(1.0)).norm() < 1e-8);
        }
        assert!((project_psd(&p) - &p).norm() < 1e-8);

        // plain alternating projections land on a feasible point that is not the nearest one
        let mut alt = m.clone();
        for _ in 0..20_000 {
            alt = project_psd(&alt);
            for i in 0..6 {
                alt[(i, i)] = C64::from(1.0);
            }
        }
        assert!((&p - &m).norm() <= (&alt - &m).norm() + 1e-9);
    }

    #[test]
    fn projection_failure_carries_iterate() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let raw = CMatrix::from_fn(5, 5, |_, _| sample_cn(&mut rng, 1.0));
        match project_elliptope(&hermitian_part(&raw), 0.0, 3) {
            Err(Error::ElliptopeProjection { iterations, last, .. }) => {
                assert_eq!(iterations, 3);
                assert_eq!(last.nrows(), 5);
            }
            other => panic!("expected projection error, got {other:?}"),
        }
    }

    #[test]
    fn bound_result_is_feasible_and_dominates_mm() {
        for seed in 0..5 {
            let (psi, cfg) = instance(seed, 4, 8);
            let tt = LiftedPhaseVector::random(9, &mut ChaCha8Rng::seed_from_u64(seed));
            let mm = run_mm(tt, &psi, &cfg, &MmSettings::default()).unwrap();
            let ub = solve_sdr(&psi, &cfg, &SdrSettings::default(), Some(&mm.theta_tilde)).unwrap();
            for i in 0..9 {
                assert!((ub.theta_big[(i, i)].re - 1.0).abs() < 1e-7);
            }
            assert!(min_eigenvalue(&ub.theta_big) > -1e-7);
            assert!(ub.bound_psi_tilde >= mm.eval.psi_tilde_val - 1e-6);
            assert!(ub.bound_psi_tilde >= ub.primal_psi_tilde);
            assert!(ub.converged, "gap {}", ub.relative_gap());
        }
    }

    #[test]
    fn methods_agree_on_small_instance() {
        let (psi, cfg) = instance(11, 3, 2);
        let fact = solve_sdr(&psi, &cfg, &SdrSettings::default(), None).unwrap();
        let sg = solve_sdr(
            &psi,
            &cfg,
            &SdrSettings {
                method: SdrMethod::ProjectedSupergradient,
                tol: 1e-10,
                max_iter: 3000,
                ..Default::default()
            },
            None,
        )
        .unwrap();
        assert!(sg.primal_psi_tilde <= fact.bound_psi_tilde + 1e-6 * fact.bound_psi_tilde);
        assert!(fact.primal_psi_tilde <= sg.bound_psi_tilde + 1e-6 * sg.bound_psi_tilde);
        assert_relative_eq!(sg.primal_psi_tilde, fact.primal_psi_tilde, max_relative = 1e-3);
    }

    #[test]
    fn snr_bound_map() {
        let (psi, cfg) = instance(12, 4, 4);
        let ub = solve_sdr(&psi, &cfg, &SdrSettings::default(), None).unwrap();
        assert_relative_eq!(snr_bound(&ub, &cfg), ub.bound_snr);
        let zero = UpperBoundResult {
            bound_psi_tilde: 0.0,
            ..ub.clone()
        };
        assert_eq!(snr_bound(&zero, &cfg), 0.0);
        let blind = SystemConfig { kappa_d: 0.0, ..cfg };
        assert_relative_eq!(snr_bound(&ub, &blind), ub.bound_psi_tilde);
    }

    #[test]
    fn warm_start_length_checked() {
        let (psi, cfg) = instance(13, 4, 4);
        let bad = LiftedPhaseVector::ones(3);
        assert!(solve_sdr(&psi, &cfg, &SdrSettings::default(), Some(&bad)).is_err());
    }
}
