//! Hermitian eigensolver (cyclic Jacobi) and spectral matrix functions.

use num_complex::Complex64;
use thiserror::Error;

use crate::matrix::CMatrix;

/// Sweep limit for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("matrix is not Hermitian: ‖m − m†‖ = {defect:e} exceeds tolerance {tol:e}")]
    NotHermitian { defect: f64, tol: f64 },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps (off-diagonal norm {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },
    #[error("eigenvalue {value} lies outside the function domain by more than {tol:e}")]
    DomainError { value: f64, tol: f64 },
}

/// Ascending eigenvalues with the matching orthonormal eigenvectors stored as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// `U Λ U†`.
    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|x| x)
    }

    /// `U f(Λ) U†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let u = &self.vectors;
        let fl: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        CMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| u[(i, k)] * fl[k] * u[(j, k)].conj())
                .sum()
        })
    }
}

fn off_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Diagonalize a Hermitian matrix.
///
/// Threshold-pivoted cyclic Jacobi: each rotation first removes the phase of
/// the pivot `a_pq` and then applies the real symmetric 2×2 rotation.
pub fn hermitian_eigen(m: &CMatrix, tol: f64) -> Result<HermitianEigen, EigenError> {
    let defect = m.hermitian_defect();
    if defect > tol {
        return Err(EigenError::NotHermitian { defect, tol });
    }
    let n = m.dim();
    // symmetrize so that round-off in the input does not leak into the rotations
    let mut a = CMatrix::from_fn(n, |i, j| {
        if i == j {
            Complex64::new(m[(i, i)].re, 0.0)
        } else {
            (m[(i, j)] + m[(j, i)].conj()) * 0.5
        }
    });
    let mut v = CMatrix::identity(n);

    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let mut converged = n == 1;
    for sweep in 0..MAX_SWEEPS {
        let off = off_norm(&a);
        if off <= f64::EPSILON * scale * 1e-2 || off == 0.0 {
            converged = true;
            break;
        }
        let threshold = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // after a few sweeps, negligible pivots are zeroed outright
                let tiny = 1e2 * g;
                if sweep > 3 && app.abs() + tiny == app.abs() && aqq.abs() + tiny == aqq.abs() {
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                if g <= threshold || g == 0.0 {
                    continue;
                }
                let phase = apq / g;
                let theta = (aqq - app) / (2.0 * g);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let ph_conj = phase.conj();
                // U = [[c, s], [−s e^{−iφ}, c e^{−iφ}]] on (p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * ph_conj * s;
                    a[(k, q)] = akp * s + akq * ph_conj * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * phase * s;
                    a[(q, k)] = apk * s + aqk * phase * c;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * ph_conj * s;
                    v[(k, q)] = vkp * s + vkq * ph_conj * c;
                }
            }
        }
    }
    if !converged {
        let off = off_norm(&a);
        if off > f64::EPSILON * scale * (n as f64) {
            return Err(EigenError::NoConvergence {
                sweeps: MAX_SWEEPS,
                off,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// `U f(Λ) U†` for Hermitian `m`.
pub fn matrix_function(
    m: &CMatrix,
    f: impl Fn(f64) -> f64,
    tol: f64,
) -> Result<CMatrix, EigenError> {
    let eig = hermitian_eigen(m, tol)?;
    Ok(eig.reconstruct_with(f))
}

/// Principal-branch arcsin applied spectrally. Eigenvalues within `tol` outside
/// `[−1, 1]` are clamped; anything further out is a [`EigenError::DomainError`].
pub fn matrix_arcsin(m: &CMatrix, tol: f64) -> Result<CMatrix, EigenError> {
    let eig = hermitian_eigen(m, tol)?;
    if let Some(&bad) = eig.values.iter().find(|x| x.abs() > 1.0 + tol) {
        return Err(EigenError::DomainError { value: bad, tol });
    }
    Ok(eig.reconstruct_with(|x| x.clamp(-1.0, 1.0).asin()))
}
