//! The pre-Hilbert module realized as m×d matrices over the algebra M_d(ℂ),
//! with inner product ⟨x,y⟩ = x*y, right action x·a, and the operator-norm
//! module norm. d = 1 recovers the classical inner-product space ℂ^m.

use serde::{Deserialize, Serialize};

use crate::eig::op_norm;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::tol::ToleranceConfig;

/// Element of the module: an m×d matrix; the algebra acts on the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModuleElementRepr", into = "ModuleElementRepr")]
pub struct ModuleElement {
    mat: ComplexMatrix,
}

/// Element of the algebra M_d(ℂ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModuleElementRepr", into = "ModuleElementRepr")]
pub struct AlgebraElement {
    mat: ComplexMatrix,
}

/// Wire format: the matrix fields plus an explicit "algebra_dim".
#[derive(Serialize, Deserialize)]
struct ModuleElementRepr {
    #[serde(flatten)]
    mat: ComplexMatrix,
    algebra_dim: usize,
}

impl TryFrom<ModuleElementRepr> for ModuleElement {
    type Error = Error;

    fn try_from(repr: ModuleElementRepr) -> Result<Self> {
        if repr.mat.cols() != repr.algebra_dim {
            return Err(Error::DimensionMismatch(format!(
                "module element has {} columns but algebra_dim {}",
                repr.mat.cols(),
                repr.algebra_dim
            )));
        }
        Ok(Self { mat: repr.mat })
    }
}

impl From<ModuleElement> for ModuleElementRepr {
    fn from(x: ModuleElement) -> Self {
        let algebra_dim = x.mat.cols();
        Self {
            mat: x.mat,
            algebra_dim,
        }
    }
}

impl TryFrom<ModuleElementRepr> for AlgebraElement {
    type Error = Error;

    fn try_from(repr: ModuleElementRepr) -> Result<Self> {
        if repr.mat.cols() != repr.algebra_dim {
            return Err(Error::DimensionMismatch(format!(
                "algebra element has {} columns but algebra_dim {}",
                repr.mat.cols(),
                repr.algebra_dim
            )));
        }
        AlgebraElement::new(repr.mat)
    }
}

impl From<AlgebraElement> for ModuleElementRepr {
    fn from(a: AlgebraElement) -> Self {
        let algebra_dim = a.mat.cols();
        Self {
            mat: a.mat,
            algebra_dim,
        }
    }
}

impl ModuleElement {
    pub fn new(mat: ComplexMatrix) -> Self {
        Self { mat }
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn rows(&self) -> usize {
        self.mat.rows()
    }

    pub fn algebra_dim(&self) -> usize {
        self.mat.cols()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.rows(), self.algebra_dim()) != (other.rows(), other.algebra_dim()) {
            return Err(Error::DimensionMismatch(format!(
                "module sum of {}x{} and {}x{}",
                self.rows(),
                self.algebra_dim(),
                other.rows(),
                other.algebra_dim()
            )));
        }
        Ok(Self {
            mat: &self.mat + &other.mat,
        })
    }

    pub fn scale(&self, z: num_complex::Complex64) -> Self {
        Self {
            mat: self.mat.scale(z),
        }
    }

    pub fn neg(&self) -> Self {
        Self { mat: -(&self.mat) }
    }
}

impl AlgebraElement {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare {
                rows: mat.rows(),
                cols: mat.cols(),
            });
        }
        Ok(Self { mat })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(d),
        }
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn algebra_dim(&self) -> usize {
        self.mat.cols()
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.algebra_dim() != other.algebra_dim() {
            return Err(Error::DimensionMismatch(format!(
                "algebra difference of dims {} and {}",
                self.algebra_dim(),
                other.algebra_dim()
            )));
        }
        Ok(Self {
            mat: &self.mat - &other.mat,
        })
    }

    /// Coisometry scale of the underlying matrix, if a·a* is scalar.
    pub fn coisometry_scale(&self, tol_eq: f64) -> Option<f64> {
        self.mat.coisometry_scale(tol_eq)
    }
}

/// ⟨x,y⟩ = x*·y, a d×d algebra element.
pub fn inner_product(x: &ModuleElement, y: &ModuleElement) -> Result<AlgebraElement> {
    if (x.rows(), x.algebra_dim()) != (y.rows(), y.algebra_dim()) {
        return Err(Error::DimensionMismatch(format!(
            "inner product of {}x{} and {}x{}",
            x.rows(),
            x.algebra_dim(),
            y.rows(),
            y.algebra_dim()
        )));
    }
    AlgebraElement::new(x.mat.adjoint().matmul(&y.mat)?)
}

/// Right action x·a.
pub fn right_action(x: &ModuleElement, a: &AlgebraElement) -> Result<ModuleElement> {
    if x.algebra_dim() != a.algebra_dim() {
        return Err(Error::DimensionMismatch(format!(
            "right action of dim {} on module element with algebra_dim {}",
            a.algebra_dim(),
            x.algebra_dim()
        )));
    }
    Ok(ModuleElement::new(x.mat.matmul(&a.mat)?))
}

/// ‖x‖ = ‖⟨x,x⟩‖^{1/2}, the largest singular value of the matrix.
pub fn module_norm(x: &ModuleElement, tol: &ToleranceConfig) -> Result<f64> {
    op_norm(&x.mat, tol)
}

/// ‖a‖ for algebra elements.
pub fn algebra_norm(a: &AlgebraElement, tol: &ToleranceConfig) -> Result<f64> {
    op_norm(&a.mat, tol)
}

/// Outcome of the multiplicativity check ‖x·a‖ = ‖x‖·‖a‖ for coisometry
/// multiples a.
#[derive(Debug, Clone, Copy)]
pub struct CoisometryNormCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Checks ‖x·a‖ = ‖x‖·‖a‖, valid whenever a·a* is a scalar multiple of the
/// identity; also folds in the zero dichotomy (‖x·a‖ ≈ 0 forces x ≈ 0 or
/// a ≈ 0).
pub fn check_coisometry_norm(
    x: &ModuleElement,
    a: &AlgebraElement,
    tol: &ToleranceConfig,
) -> Result<CoisometryNormCheck> {
    if a.coisometry_scale(tol.tol_eq).is_none() {
        return Err(Error::NotCoisometryMultiple);
    }
    let lhs = module_norm(&right_action(x, a)?, tol)?;
    let x_norm = module_norm(x, tol)?;
    let a_norm = algebra_norm(a, tol)?;
    let rhs = x_norm * a_norm;
    let product_rule = (lhs - rhs).abs() <= tol.tol_eq;
    let zero_rule = lhs > tol.tol_eq || x_norm <= tol.tol_eq || a_norm <= tol.tol_eq;
    Ok(CoisometryNormCheck {
        lhs,
        rhs,
        holds: product_rule && zero_rule,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::{rand_matrix, rand_unitary};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn row(entries: &[Complex64]) -> ModuleElement {
        ModuleElement::new(ComplexMatrix::new(1, entries.len(), entries.to_vec()).unwrap())
    }

    #[test]
    fn inner_product_of_unit_row() {
        let x = row(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let g = inner_product(&x, &x).unwrap();
        let expected = ComplexMatrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert_eq!(g.mat(), &expected);
    }

    #[test]
    fn orthogonal_columns_give_diagonal_gram() {
        let x = ModuleElement::new(
            ComplexMatrix::new(
                2,
                2,
                vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
            )
            .unwrap(),
        );
        let g = inner_product(&x, &x).unwrap();
        assert_eq!(g.mat().get(0, 1), Complex64::ZERO);
        assert_eq!(g.mat().get(1, 0), Complex64::ZERO);
        assert_eq!(g.mat().get(0, 0), c(1.0, 0.0));
        assert_eq!(g.mat().get(1, 1), c(4.0, 0.0));
    }

    #[test]
    fn right_action_unit_and_zero() {
        let x = row(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let id = AlgebraElement::identity(2);
        assert_eq!(right_action(&x, &id).unwrap(), x);
        let zero = AlgebraElement::new(ComplexMatrix::zeros(2, 2)).unwrap();
        let xz = right_action(&x, &zero).unwrap();
        assert!(xz.mat().entries().iter().all(|z| *z == Complex64::ZERO));
    }

    #[test]
    fn right_action_diagonal() {
        let x = row(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let a = AlgebraElement::new(ComplexMatrix::diagonal(&[c(0.0, 1.0), c(1.0, 0.0)]).unwrap())
            .unwrap();
        let xa = right_action(&x, &a).unwrap();
        assert_eq!(xa.mat().get(0, 0), c(0.0, 1.0));
        assert_eq!(xa.mat().get(0, 1), Complex64::ZERO);
    }

    #[test]
    fn module_norm_examples() {
        let t = tol();
        assert_abs_diff_eq!(
            module_norm(&row(&[c(1.0, 0.0), c(0.0, 0.0)]), &t).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        let zero = ModuleElement::new(ComplexMatrix::zeros(2, 2));
        assert_abs_diff_eq!(module_norm(&zero, &t).unwrap(), 0.0, epsilon = 1e-14);
        let diag =
            ModuleElement::new(ComplexMatrix::diagonal(&[c(3.0, 0.0), c(1.0, 0.0)]).unwrap());
        assert_abs_diff_eq!(module_norm(&diag, &t).unwrap(), 3.0, epsilon = 1e-13);
    }

    #[test]
    fn coisometry_norm_check_examples() {
        let t = tol();
        let x = row(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let a = AlgebraElement::new(ComplexMatrix::diagonal(&[c(0.0, 1.0), c(1.0, 0.0)]).unwrap())
            .unwrap();
        let rec = check_coisometry_norm(&x, &a, &t).unwrap();
        assert_abs_diff_eq!(rec.lhs, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(rec.rhs, 1.0, epsilon = 1e-13);
        assert!(rec.holds);

        let zero = ModuleElement::new(ComplexMatrix::zeros(1, 2));
        let rec = check_coisometry_norm(&zero, &a, &t).unwrap();
        assert_eq!(rec.lhs, 0.0);
        assert!(rec.holds);

        let nil = AlgebraElement::new(
            ComplexMatrix::new(
                2,
                2,
                vec![c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            )
            .unwrap(),
        )
        .unwrap();
        assert!(matches!(
            check_coisometry_norm(&x, &nil, &t),
            Err(Error::NotCoisometryMultiple)
        ));
    }

    #[test]
    fn norm_multiplicativity_sweep() {
        // ‖x·a‖ = ‖x‖·‖a‖ across dimensions for scaled random unitaries.
        let t = tol();
        let dims = [1usize, 2, 3];
        let ms = [1usize, 2, 4];
        for seed in 0..1000u64 {
            let d = dims[(seed % 3) as usize];
            let m = ms[((seed / 3) % 3) as usize];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = ModuleElement::new(rand_matrix(&mut rng, m, d));
            let u = rand_unitary(&mut rng, d);
            let a = AlgebraElement::new(u.scale(c(2.0, 0.0))).unwrap();
            let rec = check_coisometry_norm(&x, &a, &t).unwrap();
            assert!(rec.holds, "seed {seed}: lhs {} vs rhs {}", rec.lhs, rec.rhs);
        }
    }

    #[test]
    fn serde_carries_algebra_dim() {
        let x = row(&[c(1.0, 0.0), c(0.5, -0.5)]);
        let json = serde_json::to_string(&x).unwrap();
        assert!(json.contains("\"algebra_dim\":2"));
        let back: ModuleElement = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
        let bad = r#"{"rows":1,"cols":2,"entries":[[1.0,0.0],[0.0,0.0]],"algebra_dim":3}"#;
        assert!(serde_json::from_str::<ModuleElement>(bad).is_err());
    }

    fn complex_entry() -> impl Strategy<Value = Complex64> {
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| c(re, im))
    }

    fn module_elem(m: usize, d: usize) -> impl Strategy<Value = ModuleElement> {
        proptest::collection::vec(complex_entry(), m * d)
            .prop_map(move |v| ModuleElement::new(ComplexMatrix::new(m, d, v).unwrap()))
    }

    proptest! {
        #[test]
        fn action_compatible_with_inner_product(
            x in module_elem(3, 2),
            y in module_elem(3, 2),
            a_entries in proptest::collection::vec(complex_entry(), 4),
        ) {
            let a = AlgebraElement::new(ComplexMatrix::new(2, 2, a_entries).unwrap()).unwrap();
            // ⟨x, y·a⟩ = ⟨x,y⟩·a up to floating reassociation.
            let lhs = inner_product(&x, &right_action(&y, &a).unwrap()).unwrap();
            let rhs = lhs_free(&x, &y, &a);
            prop_assert!(lhs.mat().frobenius_dist(&rhs) <= 1e-12);
        }

        #[test]
        fn hermitian_symmetry(x in module_elem(2, 2), y in module_elem(2, 2)) {
            let xy = inner_product(&x, &y).unwrap();
            let yx = inner_product(&y, &x).unwrap();
            prop_assert!(xy.mat().frobenius_dist(&yx.mat().adjoint()) == 0.0);
        }

        #[test]
        fn cauchy_schwarz(x in module_elem(3, 2), y in module_elem(3, 2)) {
            let t = tol();
            let ip = inner_product(&x, &y).unwrap();
            let bound = module_norm(&x, &t).unwrap() * module_norm(&y, &t).unwrap();
            prop_assert!(algebra_norm(&ip, &t).unwrap() <= bound + 1e-9);
        }

        #[test]
        fn triangle(x in module_elem(3, 2), y in module_elem(3, 2)) {
            let t = tol();
            let sum = x.add(&y).unwrap();
            prop_assert!(
                module_norm(&sum, &t).unwrap()
                    <= module_norm(&x, &t).unwrap() + module_norm(&y, &t).unwrap() + 1e-9
            );
        }

        #[test]
        fn d1_is_euclidean(v in proptest::collection::vec(complex_entry(), 4)) {
            let t = tol();
            let euclid = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let x = ModuleElement::new(ComplexMatrix::new(4, 1, v).unwrap());
            prop_assert!((module_norm(&x, &t).unwrap() - euclid).abs() <= 1e-12);
        }
    }

    fn lhs_free(x: &ModuleElement, y: &ModuleElement, a: &AlgebraElement) -> ComplexMatrix {
        inner_product(x, y).unwrap().mat().matmul(a.mat()).unwrap()
    }
}
