//! Hermitian eigendecomposition via cyclic Jacobi, plus the operator-norm
//! and positive-square-root helpers built on it.
//!
//! Jacobi is chosen for unconditional stability and determinism: fixed sweep
//! order and a fixed eigenvector phase convention make repeated runs
//! bit-identical on the same input.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::tol::ToleranceConfig;

/// Dimension cap for the Jacobi solver; desk scale needs far less.
pub const JACOBI_MAX_DIM: usize = 64;

/// Eigendecomposition of a Hermitian matrix: `A = V diag(lambda) V*`.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose column `j` is the eigenvector for `eigenvalues[j]`.
    pub eigenvectors: ComplexMatrix,
}

fn off_diag_frobenius(m: &ComplexMatrix) -> f64 {
    let d = m.rows();
    let mut sum = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                sum += m.get(i, j).norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Diagonalizes a Hermitian matrix with cyclic Jacobi sweeps.
///
/// The input must be Hermitian within `tol_eig` (relative to its Frobenius
/// norm, with a floor of 1); it is symmetrized exactly before iteration.
/// Eigenvalues come back ascending, and each eigenvector is rephased so its
/// largest-modulus component (smallest index on ties) is real nonnegative.
pub fn herm_eig(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<HermEig> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let d = a.rows();
    if d > JACOBI_MAX_DIM {
        return Err(Error::TooLarge {
            dim: d,
            max: JACOBI_MAX_DIM,
        });
    }
    let defect = a.hermitian_defect();
    if defect > tol.tol_eig * a.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian { defect });
    }

    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(d);
    if d == 1 {
        return Ok(HermEig {
            eigenvalues: vec![m.get(0, 0).re],
            eigenvectors: v,
        });
    }

    // Rounding noise reinjected by the rotations plateaus near d*eps*||A||_F,
    // so the stop threshold sits a factor 4 above that.
    let norm = m.frobenius_norm();
    let stop = 4.0 * d as f64 * f64::EPSILON * norm;

    let mut converged = false;
    for _sweep in 0..tol.max_iter {
        if off_diag_frobenius(&m) <= stop {
            converged = true;
            break;
        }
        for p in 0..d - 1 {
            for q in p + 1..d {
                let apq = m.get(p, q);
                let b = apq.norm();
                if b == 0.0 {
                    continue;
                }
                // Phase-split the pivot: diag(e^{i phi}, 1) reduces the 2x2
                // block to a real symmetric one, then a real rotation with
                // tan(theta) solving t^2 - 2*tau*t - 1 = 0 annihilates it.
                let phase = apq / b;
                let tau = (m.get(q, q).re - m.get(p, p).re) / (2.0 * b);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                let cphase = phase.conj();
                // Rows p and q of U*: [conj(phase)*c, s] and [-conj(phase)*s, c].
                for j in 0..d {
                    let mpj = m.get(p, j);
                    let mqj = m.get(q, j);
                    m.set(p, j, cphase * c * mpj + s * mqj);
                    m.set(q, j, -cphase * s * mpj + c * mqj);
                }
                // Columns p and q of U: [phase*c, s] and [-phase*s, c].
                for i in 0..d {
                    let mip = m.get(i, p);
                    let miq = m.get(i, q);
                    m.set(i, p, phase * c * mip + s * miq);
                    m.set(i, q, -phase * s * mip + c * miq);
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, phase * c * vip + s * viq);
                    v.set(i, q, -phase * s * vip + c * viq);
                }
                // The pivot is annihilated by construction; keep the matrix
                // exactly Hermitian so later pivots see clean data.
                m.set(p, q, Complex64::ZERO);
                m.set(q, p, Complex64::ZERO);
                m.set(p, p, Complex64::new(m.get(p, p).re, 0.0));
                m.set(q, q, Complex64::new(m.get(q, q).re, 0.0));
            }
        }
    }
    if !converged && off_diag_frobenius(&m) > stop {
        return Err(Error::NoConvergence {
            sweeps: tol.max_iter,
        });
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        m.get(i, i)
            .re
            .partial_cmp(&m.get(j, j).re)
            .expect("finite eigenvalues")
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&i| m.get(i, i).re).collect();
    let mut vectors = ComplexMatrix::zeros(d, d);
    for (new_col, &old_col) in order.iter().enumerate() {
        // Phase convention: largest-modulus component (smallest index on
        // ties) made real nonnegative.
        let mut pivot = 0;
        let mut best = 0.0;
        for i in 0..d {
            let mag = v.get(i, old_col).norm();
            if mag > best {
                best = mag;
                pivot = i;
            }
        }
        let z = v.get(pivot, old_col);
        let rot = if best > 0.0 {
            z.conj() / best
        } else {
            Complex64::ONE
        };
        for i in 0..d {
            vectors.set(i, new_col, v.get(i, old_col) * rot);
        }
    }

    Ok(HermEig {
        eigenvalues,
        eigenvectors: vectors,
    })
}

/// Largest singular value, computed as `sqrt(max eigenvalue of a* a)`.
///
/// The Gram matrix `a* a` is exactly conjugate-symmetric in floating point
/// because entries (i,j) and (j,i) accumulate the same products in the same
/// order, so `herm_eig` never rejects it.
pub fn op_norm(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<f64> {
    let gram = a.adjoint().matmul(a)?;
    let eig = herm_eig(&gram, tol)?;
    let top = eig.eigenvalues.last().copied().unwrap_or(0.0);
    Ok(top.max(0.0).sqrt())
}

/// Positive square root of a Hermitian PSD matrix.
///
/// Eigenvalues in `[-tol_feas, 0)` are treated as rounding noise and clamped
/// to zero; anything more negative is a genuine failure.
pub fn psd_sqrt(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let eig = herm_eig(a, tol)?;
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -tol.tol_feas {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    let sqrt_diag = ComplexMatrix::diagonal(
        &eig.eigenvalues
            .iter()
            .map(|&l| Complex64::new(l.max(0.0).sqrt(), 0.0))
            .collect::<Vec<_>>(),
    )?;
    let v = &eig.eigenvectors;
    let b = &(v * &sqrt_diag) * &v.adjoint();
    Ok(b.hermitian_part())
}
