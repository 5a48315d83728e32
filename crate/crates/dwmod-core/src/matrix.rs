//! Dense complex matrices, the carrier for both algebra and module elements.
//!
//! Everything in the crate runs on row-major `ComplexMatrix` values with
//! `f64` components. Matrices are immutable after construction and reject
//! non-finite entries, so downstream numerics never see NaN or Inf.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense m x n complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

/// Wire format: `{"rows":m,"cols":n,"entries":[[re,im],...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        let entries = repr
            .entries
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(repr.rows, repr.cols, entries)
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        MatrixRepr {
            rows: m.rows,
            cols: m.cols,
            entries: m.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl ComplexMatrix {
    /// Builds a matrix after checking shape and entry finiteness.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix(format!(
                "dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for {rows}x{cols}, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(idx) = entries
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidMatrix(format!(
                "non-finite entry at flat index {idx}"
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![Complex64::ZERO; rows * cols]).expect("positive dims")
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::ONE;
        }
        m
    }

    /// Square matrix with `diag` on the diagonal and zeros elsewhere.
    pub fn diagonal(diag: &[Complex64]) -> Result<Self> {
        let d = diag.len();
        let mut m = Self::new(d, d, vec![Complex64::ZERO; d * d])?;
        for (i, &z) in diag.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidMatrix(format!(
                    "non-finite diagonal entry {i}"
                )));
            }
            m.entries[i * d + i] = z;
        }
        Ok(m)
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        f: impl Fn(usize, usize) -> Complex64,
    ) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self::new(rows, cols, entries)
    }

    /// Column vector from a slice.
    pub fn column(v: &[Complex64]) -> Result<Self> {
        Self::new(v.len(), 1, v.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, z: Complex64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j] = z;
    }

    /// Conjugate transpose. Involutive: `a.adjoint().adjoint() == a` exactly.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * z).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius distance to another matrix of the same shape.
    pub fn frobenius_dist(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `(A + A*)/2`; requires a square matrix.
    pub fn hermitian_part(&self) -> Self {
        debug_assert!(self.is_square());
        let adj = self.adjoint();
        let entries = self
            .entries
            .iter()
            .zip(&adj.entries)
            .map(|(a, b)| (a + b) * 0.5)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    /// `||A - A*||_F`, zero iff exactly Hermitian.
    pub fn hermitian_defect(&self) -> f64 {
        debug_assert!(self.is_square());
        self.frobenius_dist(&self.adjoint())
    }

    /// Matrix product with explicit dimension check.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.entries[i * rhs.cols + j] += a * rhs.get(l, j);
                }
            }
        }
        Ok(out)
    }

    /// Detects `a a* = lambda^2 I` and returns the coisometry scale `lambda >= 0`.
    ///
    /// The scale is forced by the trace when the relation holds, so the test
    /// is `||a a* - (tr(a a*)/d) I||_F <= tol_eq`. Returns `None` for
    /// non-square input or when the relation fails. The returned value equals
    /// the operator norm of `a`.
    pub fn coisometry_scale(&self, tol_eq: f64) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let d = self.rows;
        let prod = self.matmul(&self.adjoint()).expect("square product");
        // tr(a a*) is a sum of |entry|^2, hence real and nonnegative.
        let lambda_sq = prod.trace().re / d as f64;
        let mut defect_sq = 0.0;
        for i in 0..d {
            for j in 0..d {
                let expected = if i == j {
                    Complex64::new(lambda_sq, 0.0)
                } else {
                    Complex64::ZERO
                };
                defect_sq += (prod.get(i, j) - expected).norm_sqr();
            }
        }
        if defect_sq.sqrt() <= tol_eq {
            Some(lambda_sq.max(0.0).sqrt())
        } else {
            None
        }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale(-Complex64::ONE)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
            .expect("dimension mismatch in matrix product")
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Shorthand for building matrices from `(re, im)` pairs in tests and the CLI.
pub fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn adjoint_conjugates_1x1() {
        let a = ComplexMatrix::new(1, 1, vec![c(0.0, 1.0)]).unwrap();
        assert_eq!(a.adjoint().get(0, 0), c(0.0, -1.0));
    }

    #[test]
    fn adjoint_fixes_identity() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(id.adjoint(), id);
    }

    #[test]
    fn adjoint_transposes_real_entries() {
        let a = ComplexMatrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let expected = ComplexMatrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert_eq!(a.adjoint(), expected);
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn rejects_non_finite_entries() {
        assert!(ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(ComplexMatrix::new(1, 2, vec![c(1.0, 0.0)]).is_err());
        assert!(ComplexMatrix::new(0, 1, vec![]).is_err());
    }

    #[test]
    fn coisometry_scale_unitary_diag() {
        let a = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let lambda = a.coisometry_scale(1e-9).unwrap();
        assert!((lambda - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coisometry_scale_of_diagonal_pair_difference() {
        // a1 - a2 = diag(1-i, i-1), whose product with its adjoint is 2I.
        let diff = ComplexMatrix::diagonal(&[c(1.0, -1.0), c(-1.0, 1.0)]).unwrap();
        let lambda = diff.coisometry_scale(1e-9).unwrap();
        assert!((lambda - 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn coisometry_scale_rejects_nilpotent() {
        let a = ComplexMatrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert_eq!(a.coisometry_scale(1e-9), None);
    }

    #[test]
    fn serde_wire_format_roundtrip() {
        let a = ComplexMatrix::new(1, 2, vec![c(1.0, -2.0), c(0.5, 0.0)]).unwrap();
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(
            json,
            r#"{"rows":1,"cols":2,"entries":[[1.0,-2.0],[0.5,0.0]]}"#
        );
        let back: ComplexMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn serde_rejects_bad_shape() {
        let bad = r#"{"rows":2,"cols":2,"entries":[[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
    }

    #[test]
    fn matmul_dimension_check() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(a.matmul(&b).is_err());
        assert!(a.matmul(&b.adjoint()).is_ok());
    }
}
