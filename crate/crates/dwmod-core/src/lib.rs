//! Numerical laboratory for a two-sided norm bound on sums Σ x_j a_j, where
//! the x_j are rectangular complex matrices viewed as a module over the
//! square matrices and the a_j form a family of coisometry multiples.
//!
//! The crate evaluates the bound, decides its equality cases by solving
//! state-feasibility problems over density matrices, specializes both to the
//! classical normalized-difference inequalities, and checks the
//! truncated-shift model where every identity is exact integer bookkeeping.

pub mod certifier;
pub mod eig;
pub mod engine;
pub mod error;
pub mod factory;
pub mod forge;
pub mod matrix;
pub mod module_space;
pub mod state;
pub mod tol;

pub use certifier::{
    certify_sum_nonzero, certify_sum_zero, corollary_norm_reciprocal_condition,
    corollary_scalar_condition, solve_state_feasibility, triangle_equality_state,
    verify_certificate, CaseTag, Certificate, CertificateCheck, Constraint, ConstraintSet,
    FeasibilityResult, FeasibilityStatus,
};
pub use eig::{herm_eig, op_norm, psd_sqrt, HermEig, JACOBI_MAX_DIM};
pub use engine::{
    check_theorem, classical_two_point, dw_lower_bound, dw_upper_bound, kato_bounds,
    pecaric_rajic_bounds, BoundReport, InequalityCheck, Instance, KatoReport, TwoPointReport,
};
pub use error::{Error, Result};
pub use factory::{
    exhaustive_index_check, make_diagonal_pair, make_reciprocal_norm_family, make_scalar_family,
    make_shift_family, CoisometryFamily, Construction, ShiftCheckReport, ShiftOperator,
};
pub use forge::{
    bloch_grid_oracle, forge, rand_matrix, rand_unitary, BlochOracleReport, FamilyTag, ForgeSpec,
    Kind,
};
pub use matrix::{cplx, ComplexMatrix};
pub use module_space::{
    algebra_norm, check_coisometry_norm, inner_product, module_norm, right_action, AlgebraElement,
    CoisometryNormCheck, ModuleElement,
};
pub use state::State;
pub use tol::ToleranceConfig;
