//! Small dense Hermitian helpers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::{CMatrix, CVector, C64};

/// Fixed seed for the start vector so eigenvalue estimates are reproducible.
const START_SEED: u64 = 0x005e_ed0f_9e37_79b9;

/// Dominant eigenvalue of a Hermitian PSD matrix by power iteration.
///
/// Stops once the Rayleigh quotient changes by less than `tol` relative to its
/// magnitude. On failure the error carries the last estimate.
pub fn lambda_max_power_iteration(m: &CMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "power iteration needs a square matrix");
    if n == 0 {
        return Ok(0.0);
    }
    if n == 1 {
        return Ok(m[(0, 0)].re.max(0.0));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut x = CVector::from_fn(n, |_, _| C64::new(rng.random::<f64>() + 0.5, rng.random::<f64>() - 0.5));
    x /= C64::from(x.norm());

    let mut lambda = 0.0;
    for _ in 0..max_iter {
        let y = m * &x;
        let next = x.dotc(&y).re;
        let norm = y.norm();
        if norm == 0.0 {
            // x lies in the null space; for a PSD matrix with a random start
            // this only happens for the zero matrix.
            return Ok(0.0);
        }
        x = y / C64::from(norm);
        if (next - lambda).abs() <= tol * next.abs().max(f64::MIN_POSITIVE) {
            return Ok(next.max(0.0));
        }
        lambda = next;
    }
    Err(Error::PowerIteration {
        estimate: lambda,
        iterations: max_iter,
    })
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn max_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).last().copied().unwrap_or(0.0)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// `(m + m^H) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::from(0.5)
}

/// Projection onto the PSD cone by clipping negative eigenvalues.
pub fn project_psd(m: &CMatrix) -> CMatrix {
    let eig = hermitian_part(m).symmetric_eigen();
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > 0.0 {
            let u = eig.eigenvectors.column(k);
            out += (u * u.adjoint()) * C64::from(lambda);
        }
    }
    out
}
