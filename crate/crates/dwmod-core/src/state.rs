//! States on M_d as density matrices: positive linear functionals of norm 1
//! realized as a ↦ trace(ρ·a) with ρ Hermitian, PSD, trace 1.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eig::herm_eig;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::tol::ToleranceConfig;

/// Density matrix representing the state a ↦ trace(ρ·a).
///
/// Deserialization only checks matrix shape; call `validate` before trusting
/// external input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct State {
    rho: ComplexMatrix,
}

impl State {
    /// Validated constructor: Hermitian within tol_eig, eigenvalues
    /// ≥ −tol_eig, trace 1 within tol_eig.
    pub fn new(rho: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let s = Self { rho };
        s.validate(tol)?;
        Ok(s)
    }

    pub fn validate(&self, tol: &ToleranceConfig) -> Result<()> {
        if !self.rho.is_square() {
            return Err(Error::InvalidState(format!(
                "density matrix must be square, got {}x{}",
                self.rho.rows(),
                self.rho.cols()
            )));
        }
        let defect = self.rho.hermitian_defect();
        if defect > tol.tol_eig {
            return Err(Error::InvalidState(format!(
                "Hermitian defect {defect:.3e} exceeds tolerance"
            )));
        }
        let tr = self.rho.trace();
        if (tr.re - 1.0).abs() > tol.tol_eig || tr.im.abs() > tol.tol_eig {
            return Err(Error::InvalidState(format!(
                "trace {tr} differs from 1 beyond tolerance"
            )));
        }
        let eig = herm_eig(&self.rho, tol)?;
        let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
        if min < -tol.tol_eig {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    /// Evaluates the state: trace(ρ·a).
    pub fn apply(&self, a: &ComplexMatrix) -> Result<Complex64> {
        if !a.is_square() || a.rows() != self.rho.rows() {
            return Err(Error::DimensionMismatch(format!(
                "state dimension {} vs matrix {}x{}",
                self.rho.rows(),
                a.rows(),
                a.cols()
            )));
        }
        // trace(ρ·a) without forming the product.
        let d = self.rho.rows();
        let mut sum = Complex64::ZERO;
        for i in 0..d {
            for k in 0..d {
                sum += self.rho.get(i, k) * a.get(k, i);
            }
        }
        Ok(sum)
    }

    /// The maximally mixed state ρ = I/d.
    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            rho: ComplexMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0)),
        }
    }

    /// Pure state vv*/‖v‖² from a nonzero vector.
    pub fn pure(v: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(Error::InvalidState(
                "pure state requires a nonzero finite vector".into(),
            ));
        }
        let d = v.len();
        let rho = ComplexMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj() / norm_sq)?;
        Ok(Self { rho })
    }

    /// 2×2 state from Bloch coordinates: ρ = (I + xσ₁ + yσ₂ + zσ₃)/2.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let r2 = x * x + y * y + z * z;
        if r2 > 1.0 + 1e-12 {
            return Err(Error::InvalidState(format!(
                "Bloch vector length {} exceeds 1",
                r2.sqrt()
            )));
        }
        let rho = ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::new((1.0 + z) / 2.0, 0.0),
                Complex64::new(x / 2.0, -y / 2.0),
                Complex64::new(x / 2.0, y / 2.0),
                Complex64::new((1.0 - z) / 2.0, 0.0),
            ],
        )?;
        Ok(Self { rho })
    }
}
