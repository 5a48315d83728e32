//! Constructors for families a_1..a_n in which every member and every
//! pairwise difference is a scalar multiple of a coisometry, plus the
//! truncated-shift model where the halving-projection relations are checked
//! exactly on basis vectors.
//!
//! In M_d a coisometry is unitary, so mutually orthogonal halving projections
//! cannot exist there; the shift model keeps its own exact integer-index
//! arithmetic instead of operator norms for precisely that reason.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::module_space::{AlgebraElement, ModuleElement};
use crate::tol::ToleranceConfig;

/// How a coisometry family was built; doubles as the instance family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Construction {
    #[serde(rename = "diagpair")]
    DiagonalPair,
    #[serde(rename = "scalar")]
    ScalarFamily,
    #[serde(rename = "recipnorm")]
    ReciprocalNormFamily,
    #[serde(rename = "shift")]
    ShiftFamily,
}

/// Family of algebra elements whose members and pairwise differences are all
/// scalar multiples of coisometries.
#[derive(Debug, Clone)]
pub struct CoisometryFamily {
    pub elems: Vec<AlgebraElement>,
    pub construction: Construction,
}

impl CoisometryFamily {
    /// Re-checks both family invariants via the trace test.
    pub fn validate(&self, tol: &ToleranceConfig) -> Result<()> {
        for (j, a) in self.elems.iter().enumerate() {
            if a.coisometry_scale(tol.tol_eq).is_none() {
                return Err(Error::InvalidParameters(format!(
                    "family element {j} is not a coisometry multiple"
                )));
            }
            for (i, b) in self.elems.iter().enumerate() {
                if i != j {
                    let diff = a.sub(b)?;
                    if diff.coisometry_scale(tol.tol_eq).is_none() {
                        return Err(Error::InvalidParameters(format!(
                            "difference of elements {j} and {i} is not a coisometry multiple"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The two-element family {diag(α,β), diag(β,α)} in M₂.
///
/// Requires |α| = |β| (so each member is a multiple of a unitary) and
/// α² ≠ β² (so the difference diag(α−β, β−α) is nonzero); the difference has
/// coisometry scale |α−β|.
pub fn make_diagonal_pair(
    alpha: Complex64,
    beta: Complex64,
    tol: &ToleranceConfig,
) -> Result<CoisometryFamily> {
    if (alpha.norm() - beta.norm()).abs() > tol.tol_eq {
        return Err(Error::InvalidParameters(format!(
            "moduli differ: |alpha| = {}, |beta| = {}",
            alpha.norm(),
            beta.norm()
        )));
    }
    if (alpha * alpha - beta * beta).norm() <= tol.tol_eq {
        return Err(Error::InvalidParameters(
            "alpha^2 = beta^2 gives a zero or anti-diagonal-degenerate difference".into(),
        ));
    }
    let a1 = AlgebraElement::new(ComplexMatrix::diagonal(&[alpha, beta])?)?;
    let a2 = AlgebraElement::new(ComplexMatrix::diagonal(&[beta, alpha])?)?;
    let family = CoisometryFamily {
        elems: vec![a1, a2],
        construction: Construction::DiagonalPair,
    };
    family.validate(tol)?;
    Ok(family)
}

/// The scalar family {α_j · identity_d}; every invariant is automatic.
pub fn make_scalar_family(alphas: &[Complex64], d: usize) -> Result<CoisometryFamily> {
    if let Some(index) = alphas.iter().position(|a| a.norm() == 0.0) {
        return Err(Error::ZeroScalar { index });
    }
    let elems = alphas
        .iter()
        .map(|&a| AlgebraElement::new(ComplexMatrix::identity(d).scale(a)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoisometryFamily {
        elems,
        construction: Construction::ScalarFamily,
    })
}

/// The scalar family α_j = 1/‖x_j‖ attached to a list of module elements.
pub fn make_reciprocal_norm_family(
    xs: &[ModuleElement],
    tol: &ToleranceConfig,
) -> Result<CoisometryFamily> {
    if xs.is_empty() {
        return Err(Error::InvalidParameters(
            "reciprocal-norm family needs at least one element".into(),
        ));
    }
    let d = xs[0].algebra_dim();
    let mut alphas = Vec::with_capacity(xs.len());
    for (j, x) in xs.iter().enumerate() {
        let nx = crate::module_space::module_norm(x, tol)?;
        if nx <= tol.tol_eq {
            return Err(Error::InvalidParameters(format!(
                "module element {j} has norm {nx:.3e}, too small to invert"
            )));
        }
        alphas.push(Complex64::new(1.0 / nx, 0.0));
    }
    let mut family = make_scalar_family(&alphas, d)?;
    family.construction = Construction::ReciprocalNormFamily;
    Ok(family)
}

/// Partial shift on finitely supported sequences: maps basis vector
/// `e_src` to `weight · e_dst` where `targets[src] = Some((dst, weight))`,
/// and to zero where `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOperator {
    targets: Vec<Option<(usize, Complex64)>>,
    truncation: usize,
}

/// Sparse vector in the truncated sequence space.
pub type SparseVec = BTreeMap<usize, Complex64>;

impl ShiftOperator {
    pub fn new(targets: Vec<Option<(usize, Complex64)>>, truncation: usize) -> Result<Self> {
        if targets.len() != truncation {
            return Err(Error::InvalidParameters(format!(
                "target table length {} differs from truncation {}",
                targets.len(),
                truncation
            )));
        }
        let mut seen = vec![false; truncation];
        for (src, t) in targets.iter().enumerate() {
            if let Some((dst, w)) = t {
                if *dst >= truncation {
                    return Err(Error::InvalidParameters(format!(
                        "target {dst} of source {src} outside truncation {truncation}"
                    )));
                }
                if w.norm() != 1.0 {
                    return Err(Error::InvalidParameters(format!(
                        "weight at source {src} has modulus {} != 1",
                        w.norm()
                    )));
                }
                if seen[*dst] {
                    return Err(Error::InvalidParameters(format!(
                        "target {dst} hit twice; map must be injective"
                    )));
                }
                seen[*dst] = true;
            }
        }
        Ok(Self {
            targets,
            truncation,
        })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Applies the operator to a sparse vector.
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&src, &coef) in v {
            if let Some(Some((dst, w))) = self.targets.get(src) {
                let entry = out.entry(*dst).or_insert(Complex64::ZERO);
                *entry += coef * w;
            }
        }
        prune(out)
    }

    /// Applies the adjoint: e_dst ↦ conj(weight)·e_src for each mapped pair.
    pub fn apply_adjoint(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (src, t) in self.targets.iter().enumerate() {
            if let Some((dst, w)) = t {
                if let Some(coef) = v.get(dst) {
                    let entry = out.entry(src).or_insert(Complex64::ZERO);
                    *entry += coef * w.conj();
                }
            }
        }
        prune(out)
    }

    /// Test hook: shifts one mapped source's target by `offset`, producing a
    /// deliberately wrong operator. Skips the constructor checks on purpose —
    /// the point is to feed invalid maps to the identity checker.
    pub fn corrupt_target(&self, src: usize, offset: usize) -> Result<Self> {
        let mut targets = self.targets.clone();
        match targets.get_mut(src) {
            Some(Some((dst, _))) => {
                *dst = (*dst + offset) % self.truncation;
            }
            _ => {
                return Err(Error::InvalidParameters(format!(
                    "source {src} has no target to corrupt"
                )))
            }
        }
        Ok(Self {
            targets,
            truncation: self.truncation,
        })
    }
}

fn prune(v: SparseVec) -> SparseVec {
    v.into_iter()
        .filter(|(_, z)| *z != Complex64::ZERO)
        .collect()
}

fn basis(t: usize) -> SparseVec {
    let mut v = SparseVec::new();
    v.insert(t, Complex64::ONE);
    v
}

fn sparse_sub(a: &SparseVec, b: &SparseVec) -> SparseVec {
    let mut out = a.clone();
    for (&k, &z) in b {
        let entry = out.entry(k).or_insert(Complex64::ZERO);
        *entry -= z;
    }
    prune(out)
}

fn sparse_scale(a: &SparseVec, s: Complex64) -> SparseVec {
    prune(a.iter().map(|(&k, &z)| (k, z * s)).collect())
}

/// Builds v_0..v_{n−1} on the first `cap` basis vectors, where v_j sends
/// e_{n·k+j} to e_k. Each v_j is the adjoint of the isometry e_k ↦ e_{n·k+j},
/// so v_j v_j* = identity and v_j* v_j is the projection onto indices
/// congruent to j mod n, exactly, on the window of indices below cap/n.
pub fn make_shift_family(n: usize, cap: usize) -> Result<Vec<ShiftOperator>> {
    if n < 2 {
        return Err(Error::InvalidParameters(format!(
            "need at least two shifts, got n = {n}"
        )));
    }
    if cap < n * n {
        return Err(Error::InvalidParameters(format!(
            "truncation {cap} below n^2 = {} leaves an empty window",
            n * n
        )));
    }
    let mut ops = Vec::with_capacity(n);
    for j in 0..n {
        let mut targets = vec![None; cap];
        let mut k = 0;
        while n * k + j < cap {
            targets[n * k + j] = Some((k, Complex64::ONE));
            k += 1;
        }
        ops.push(ShiftOperator::new(targets, cap)?);
    }
    Ok(ops)
}

/// Result of the exact identity check on a shift family.
#[derive(Debug, Clone, Serialize)]
pub struct ShiftCheckReport {
    pub n: usize,
    pub truncation: usize,
    /// Identities are verified on basis vectors e_0..e_{window−1}.
    pub window: usize,
    pub violations: Vec<String>,
}

/// Verifies, exactly and on every window basis vector, the five relations:
/// v_j v_j* = e, v_j* v_j = p_j, p_j p_k = 0, v_j v_k* = 0, and
/// (v_j − v_k)(v_j − v_k)* = 2e for j ≠ k.
pub fn exhaustive_index_check(ops: &[ShiftOperator]) -> Result<ShiftCheckReport> {
    let n = ops.len();
    if n < 2 {
        return Err(Error::InvalidParameters(
            "identity check needs at least two shift operators".into(),
        ));
    }
    let cap = ops[0].truncation();
    if ops.iter().any(|op| op.truncation() != cap) {
        return Err(Error::InvalidParameters(
            "shift operators disagree on truncation".into(),
        ));
    }
    let window = cap / n;
    let mut violations = Vec::new();
    let two = Complex64::new(2.0, 0.0);

    let proj = |j: usize, v: &SparseVec| ops[j].apply_adjoint(&ops[j].apply(v));

    for t in 0..window {
        let e_t = basis(t);
        for j in 0..n {
            let vv = ops[j].apply(&ops[j].apply_adjoint(&e_t));
            if vv != e_t {
                violations.push(format!("v_{j} v_{j}* e_{t} != e_{t}"));
            }
            let p = proj(j, &e_t);
            let expected = if t % n == j {
                e_t.clone()
            } else {
                SparseVec::new()
            };
            if p != expected {
                violations.push(format!("v_{j}* v_{j} e_{t} != p_{j} e_{t}"));
            }
            for k in 0..n {
                if k == j {
                    continue;
                }
                if !proj(j, &proj(k, &e_t)).is_empty() {
                    violations.push(format!("p_{j} p_{k} e_{t} != 0"));
                }
                if !ops[j].apply(&ops[k].apply_adjoint(&e_t)).is_empty() {
                    violations.push(format!("v_{j} v_{k}* e_{t} != 0"));
                }
                if k < j {
                    continue;
                }
                // (v_j − v_k)(v_j − v_k)* applied as a difference of the four cross terms.
                let adj_diff = sparse_sub(&ops[j].apply_adjoint(&e_t), &ops[k].apply_adjoint(&e_t));
                let full = sparse_sub(&ops[j].apply(&adj_diff), &ops[k].apply(&adj_diff));
                if full != sparse_scale(&e_t, two) {
                    violations.push(format!("(v_{j}-v_{k})(v_{j}-v_{k})* e_{t} != 2 e_{t}"));
                }
            }
        }
    }

    Ok(ShiftCheckReport {
        n,
        truncation: cap,
        window,
        violations,
    })
}
