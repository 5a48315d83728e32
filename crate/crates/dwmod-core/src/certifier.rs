//! Equality certification: state-feasibility problems whose solvability is
//! equivalent to the bound being attained, a projected-gradient solver over
//! density matrices, and certificate verification.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::eig::{herm_eig, op_norm};
use crate::engine::{norm_table, Instance, NormTable};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::module_space::{inner_product, module_norm, ModuleElement};
use crate::state::State;
use crate::tol::ToleranceConfig;

/// Seed for the randomized solver restarts. Fixed so results are
/// reproducible run to run.
const RESTART_SEED: u64 = 0x5ced_ab1e;
const RANDOM_RESTARTS: usize = 5;

/// Which equality characterization a certificate witnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    SumNonzero,
    SumZero,
}

/// One linear target: require tr(ρ b) = c with c real and nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub b: ComplexMatrix,
    pub c: f64,
}

/// A batch of targets over states on a fixed algebra dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    d: usize,
    targets: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn new(d: usize, targets: Vec<Constraint>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameters(
                "constraint set needs a positive dimension".into(),
            ));
        }
        for (k, t) in targets.iter().enumerate() {
            if t.b.rows() != d || t.b.cols() != d {
                return Err(Error::InvalidParameters(format!(
                    "target {k} is {}x{}, expected {d}x{d}",
                    t.b.rows(),
                    t.b.cols()
                )));
            }
            if !t.c.is_finite() || t.c < 0.0 {
                return Err(Error::InvalidParameters(format!(
                    "target {k} has right-hand side {}, expected finite and nonnegative",
                    t.c
                )));
            }
        }
        Ok(Self { d, targets })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn targets(&self) -> &[Constraint] {
        &self.targets
    }

    /// Per-target residuals |tr(ρ b_k) − c_k| for a given state.
    pub fn residuals(&self, state: &State) -> Result<Vec<f64>> {
        self.targets
            .iter()
            .map(|t| Ok((state.apply(&t.b)? - t.c).norm()))
            .collect()
    }
}

/// Solver outcome for one constraint set.
#[derive(Debug, Clone)]
pub enum FeasibilityStatus {
    Feasible(State),
    /// Some target demands more than the operator norm allows; no state can
    /// satisfy it.
    InfeasibleByNorm,
    /// Best l2 residual found across restarts, above tol_feas.
    ResidualAboveTol(f64),
}

#[derive(Debug, Clone)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    pub iterations: usize,
}

/// A witness for one equality case: the index (pair) it certifies, the state,
/// and the per-constraint residuals at that state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub case_tag: CaseTag,
    pub i: usize,
    #[serde(default)]
    pub l: Option<usize>,
    #[serde(rename = "rho")]
    pub state: State,
    pub residuals: Vec<f64>,
    pub feasible: bool,
}

/// Verification outcome: recomputed residuals and the overall verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub valid: bool,
    pub residuals: Vec<f64>,
}

fn trace_product(rho: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let d = rho.rows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += rho.get(i, j) * b.get(j, i);
        }
    }
    acc
}

fn l2_residual(rho: &ComplexMatrix, cs: &ConstraintSet) -> f64 {
    cs.targets
        .iter()
        .map(|t| (trace_product(rho, &t.b) - t.c).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Euclidean projection of a real vector onto the probability simplex.
fn simplex_project(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).expect("eigenvalues are finite"));
    let mut cum = 0.0;
    let mut theta = u[0] - 1.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j as f64 + 1.0);
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Nearest density matrix: Hermitize, then project the spectrum onto the
/// simplex in the eigenbasis.
fn project_to_density(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let herm = h.hermitian_part();
    let eig = herm_eig(&herm, tol)?;
    let probs = simplex_project(&eig.eigenvalues);
    let d = herm.rows();
    let v = &eig.eigenvectors;
    let mut out = ComplexMatrix::zeros(d, d);
    for (idx, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for i in 0..d {
            for j in 0..d {
                let add = v.get(i, idx) * v.get(j, idx).conj() * p;
                out.set(i, j, out.get(i, j) + add);
            }
        }
    }
    Ok(out.hermitian_part())
}

fn gradient(rho: &ComplexMatrix, cs: &ConstraintSet) -> ComplexMatrix {
    let d = rho.rows();
    let mut g = ComplexMatrix::zeros(d, d);
    for t in &cs.targets {
        let e = trace_product(rho, &t.b) - t.c;
        let badj = t.b.adjoint();
        for i in 0..d {
            for j in 0..d {
                let add = e.conj() * t.b.get(i, j) + e * badj.get(i, j);
                g.set(i, j, g.get(i, j) + add);
            }
        }
    }
    g
}

fn random_pure(rng: &mut ChaCha8Rng, d: usize) -> Result<State> {
    let v: Vec<Complex64> = (0..d)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect();
    State::pure(&v)
}

/// Decides whether a state satisfying all targets exists.
///
/// Fast rejection by operator norm, then projected gradient descent on
/// F(ρ) = Σ_k |tr(ρ b_k) − c_k|² from a deterministic warm start, the
/// maximally mixed state, and a few seeded random pure states. Feasible iff
/// the best l2 residual is at most tol_feas.
pub fn solve_state_feasibility(
    cs: &ConstraintSet,
    tol: &ToleranceConfig,
) -> Result<FeasibilityResult> {
    let d = cs.d;
    if cs.targets.is_empty() {
        return Ok(FeasibilityResult {
            status: FeasibilityStatus::Feasible(State::maximally_mixed(d)),
            iterations: 0,
        });
    }
    for t in &cs.targets {
        if t.c > op_norm(&t.b, tol)? + tol.tol_eq {
            return Ok(FeasibilityResult {
                status: FeasibilityStatus::InfeasibleByNorm,
                iterations: 0,
            });
        }
    }
    if d == 1 {
        // The unique state on a one-dimensional algebra.
        let rho = ComplexMatrix::identity(1);
        let f = l2_residual(&rho, cs);
        let status = if f <= tol.tol_feas {
            FeasibilityStatus::Feasible(State::new(rho, tol)?)
        } else {
            FeasibilityStatus::ResidualAboveTol(f)
        };
        return Ok(FeasibilityResult {
            status,
            iterations: 0,
        });
    }

    let lipschitz: f64 = 2.0
        * cs.targets
            .iter()
            .map(|t| {
                let fr = t.b.frobenius_norm();
                fr * fr
            })
            .sum::<f64>();
    if lipschitz <= f64::MIN_POSITIVE {
        // All targets are the zero matrix; any state gives tr(ρ b) = 0.
        let rho = ComplexMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0));
        let f = l2_residual(&rho, cs);
        let status = if f <= tol.tol_feas {
            FeasibilityStatus::Feasible(State::new(rho, tol)?)
        } else {
            FeasibilityStatus::ResidualAboveTol(f)
        };
        return Ok(FeasibilityResult {
            status,
            iterations: 0,
        });
    }
    let eta = 1.0 / lipschitz;

    // Warm start: the top-eigenvector projector of the Hermitian part of the
    // summed targets attains collinear equality sets exactly.
    let mut summed = ComplexMatrix::zeros(d, d);
    for t in &cs.targets {
        summed = (&summed + &t.b).hermitian_part();
    }
    let warm_eig = herm_eig(&summed.hermitian_part(), tol)?;
    let top: Vec<Complex64> = (0..d)
        .map(|r| warm_eig.eigenvectors.get(r, d - 1))
        .collect();
    let mut starts = vec![State::pure(&top)?.rho().clone()];
    starts.push(ComplexMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0)));
    let mut rng = ChaCha8Rng::seed_from_u64(RESTART_SEED);
    for _ in 0..RANDOM_RESTARTS {
        starts.push(random_pure(&mut rng, d)?.rho().clone());
    }

    let quick_exit = 0.01 * tol.tol_feas;
    let mut best_f = f64::INFINITY;
    let mut best_rho = starts[1].clone();
    let mut iterations = 0usize;
    'outer: for start in starts {
        let mut rho = start;
        let mut f = l2_residual(&rho, cs);
        if f < best_f {
            best_f = f;
            best_rho = rho.clone();
        }
        if f <= quick_exit {
            break 'outer;
        }
        for _ in 0..tol.max_iter {
            let g = gradient(&rho, cs);
            let stepped = &rho - &g.scale(Complex64::new(eta, 0.0));
            rho = project_to_density(&stepped, tol)?;
            iterations += 1;
            f = l2_residual(&rho, cs);
            if f < best_f {
                best_f = f;
                best_rho = rho.clone();
            }
            if f <= quick_exit {
                break 'outer;
            }
        }
    }

    let status = if best_f <= tol.tol_feas {
        FeasibilityStatus::Feasible(State::new(best_rho, tol)?)
    } else {
        FeasibilityStatus::ResidualAboveTol(best_f)
    };
    Ok(FeasibilityResult { status, iterations })
}

/// Feasibility test for triangle equality ‖Σ x_j‖ = Σ ‖x_j‖: a state must
/// pair every element with the last one at full norm.
pub fn triangle_equality_state(
    xs: &[ModuleElement],
    tol: &ToleranceConfig,
) -> Result<FeasibilityResult> {
    if xs.is_empty() {
        return Err(Error::PreconditionViolated("empty element list".into()));
    }
    let norms = xs
        .iter()
        .map(|x| module_norm(x, tol))
        .collect::<Result<Vec<_>>>()?;
    if let Some(j) = norms.iter().position(|&nx| nx <= tol.tol_eq) {
        return Err(Error::PreconditionViolated(format!(
            "element {j} has norm {:.3e}",
            norms[j]
        )));
    }
    let n = xs.len();
    let last = &xs[n - 1];
    let mut targets = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        targets.push(Constraint {
            b: inner_product(&xs[i], last)?.mat().clone(),
            c: norms[i] * norms[n - 1],
        });
    }
    let cs = ConstraintSet::new(xs[0].algebra_dim(), targets)?;
    solve_state_feasibility(&cs, tol)
}

fn min_candidates(vals: &[f64], tol_eq: f64) -> Vec<usize> {
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    (0..vals.len())
        .filter(|&i| vals[i] <= min + tol_eq)
        .collect()
}

fn check_certify_preconditions(
    inst: &Instance,
    nt: &NormTable,
    tol: &ToleranceConfig,
) -> Result<()> {
    if let Some(j) = nt.a_norms.iter().position(|&na| na <= tol.tol_eq) {
        return Err(Error::PreconditionViolated(format!(
            "algebra element {j} is zero; the characterization needs nonzero elements"
        )));
    }
    let n = inst.n();
    let any_differ = (0..n).any(|i| (0..n).any(|j| nt.diff_norms[i][j] > tol.tol_eq));
    if !any_differ {
        return Err(Error::PreconditionViolated(
            "all algebra elements coincide; no pair differs".into(),
        ));
    }
    Ok(())
}

/// Targets of the nonzero-sum characterization at index i: for every k with
/// a_k ≠ a_i, tr(ρ · a_i*⟨Σx, x_k⟩(a_k − a_i)) = ‖Σx‖‖a_i‖‖x_k‖‖a_k − a_i‖.
fn nonzero_constraint_set(
    inst: &Instance,
    nt: &NormTable,
    i: usize,
    tol: &ToleranceConfig,
) -> Result<ConstraintSet> {
    let a_i = &inst.algebra_elems()[i];
    let adj = a_i.mat().adjoint();
    let mut targets = Vec::new();
    for k in 0..inst.n() {
        if nt.diff_norms[i][k] <= tol.tol_eq {
            continue;
        }
        let gram = inner_product(&nt.sum_x, &inst.xs()[k])?;
        let diff = inst.algebra_elems()[k].sub(a_i)?;
        let b = adj.matmul(gram.mat())?.matmul(diff.mat())?;
        let c = nt.sum_norm * nt.a_norms[i] * nt.x_norms[k] * nt.diff_norms[i][k];
        targets.push(Constraint { b, c });
    }
    ConstraintSet::new(inst.d(), targets)
}

/// Targets of the zero-sum characterization at the pair (i, l): for every
/// k ≠ l with a_k ≠ a_i,
/// tr(ρ · (a_l − a_i)*⟨x_l, x_k⟩(a_k − a_i)) = ‖a_l − a_i‖‖a_k − a_i‖‖x_l‖‖x_k‖.
fn zero_constraint_set(
    inst: &Instance,
    nt: &NormTable,
    i: usize,
    l: usize,
    tol: &ToleranceConfig,
) -> Result<ConstraintSet> {
    let a_i = &inst.algebra_elems()[i];
    let dl_adj = inst.algebra_elems()[l].sub(a_i)?.mat().adjoint();
    let mut targets = Vec::new();
    for k in 0..inst.n() {
        if k == l || nt.diff_norms[i][k] <= tol.tol_eq {
            continue;
        }
        let gram = inner_product(&inst.xs()[l], &inst.xs()[k])?;
        let diff = inst.algebra_elems()[k].sub(a_i)?;
        let b = dl_adj.matmul(gram.mat())?.matmul(diff.mat())?;
        let c = nt.diff_norms[i][l] * nt.diff_norms[i][k] * nt.x_norms[l] * nt.x_norms[k];
        targets.push(Constraint { b, c });
    }
    ConstraintSet::new(inst.d(), targets)
}

fn package(
    case_tag: CaseTag,
    i: usize,
    l: Option<usize>,
    state: State,
    cs: &ConstraintSet,
    tol: &ToleranceConfig,
) -> Result<Certificate> {
    let residuals = cs.residuals(&state)?;
    let feasible = residuals.iter().all(|&r| r <= tol.tol_feas);
    Ok(Certificate {
        case_tag,
        i,
        l,
        state,
        residuals,
        feasible,
    })
}

/// Searches for an equality witness when Σ x_j ≠ 0. Equality of the upper
/// bound holds iff some minimizing index admits a feasible state.
pub fn certify_sum_nonzero(inst: &Instance, tol: &ToleranceConfig) -> Result<Option<Certificate>> {
    inst.validate(tol)?;
    let nt = norm_table(inst, tol)?;
    if nt.sum_norm <= tol.tol_eq {
        return Err(Error::PreconditionViolated(format!(
            "sum of module elements has norm {:.3e}; use the zero-sum case",
            nt.sum_norm
        )));
    }
    check_certify_preconditions(inst, &nt, tol)?;
    let uppers: Vec<f64> = (0..inst.n()).map(|i| nt.upper_at(i)).collect();
    for i in min_candidates(&uppers, tol.tol_eq) {
        let cs = nonzero_constraint_set(inst, &nt, i, tol)?;
        let result = solve_state_feasibility(&cs, tol)?;
        if let FeasibilityStatus::Feasible(state) = result.status {
            return Ok(Some(package(
                CaseTag::SumNonzero,
                i,
                None,
                state,
                &cs,
                tol,
            )?));
        }
    }
    Ok(None)
}

/// Searches for an equality witness when Σ x_j = 0. Pairs (i, l) are tried
/// in lexicographic order; an empty target set is vacuously feasible with
/// the maximally mixed state.
pub fn certify_sum_zero(inst: &Instance, tol: &ToleranceConfig) -> Result<Option<Certificate>> {
    inst.validate(tol)?;
    let nt = norm_table(inst, tol)?;
    if nt.sum_norm > tol.tol_eq {
        return Err(Error::PreconditionViolated(format!(
            "sum of module elements has norm {:.3e}; use the nonzero-sum case",
            nt.sum_norm
        )));
    }
    check_certify_preconditions(inst, &nt, tol)?;
    let sums: Vec<f64> = (0..inst.n()).map(|i| nt.diff_sum_at(i)).collect();
    for i in min_candidates(&sums, tol.tol_eq) {
        for l in 0..inst.n() {
            if nt.diff_norms[i][l] <= tol.tol_eq {
                continue;
            }
            let cs = zero_constraint_set(inst, &nt, i, l, tol)?;
            let result = solve_state_feasibility(&cs, tol)?;
            if let FeasibilityStatus::Feasible(state) = result.status {
                return Ok(Some(package(
                    CaseTag::SumZero,
                    i,
                    Some(l),
                    state,
                    &cs,
                    tol,
                )?));
            }
        }
    }
    Ok(None)
}

/// Recomputes every constraint of the certificate's case from the instance
/// and re-checks the state. Valid iff the state satisfies its invariants,
/// the indices are consistent with the case, and all residuals are within
/// tol_feas.
pub fn verify_certificate(
    inst: &Instance,
    cert: &Certificate,
    tol: &ToleranceConfig,
) -> Result<CertificateCheck> {
    if cert.state.dim() != inst.d() {
        return Err(Error::DimensionMismatch(format!(
            "certificate state has dimension {}, instance has {}",
            cert.state.dim(),
            inst.d()
        )));
    }
    inst.validate(tol)?;
    let rejected = CertificateCheck {
        valid: false,
        residuals: Vec::new(),
    };
    if cert.state.validate(tol).is_err() || cert.i >= inst.n() {
        return Ok(rejected);
    }
    let nt = norm_table(inst, tol)?;
    let cs = match cert.case_tag {
        CaseTag::SumNonzero => {
            let uppers: Vec<f64> = (0..inst.n()).map(|i| nt.upper_at(i)).collect();
            if nt.sum_norm <= tol.tol_eq
                || cert.l.is_some()
                || !min_candidates(&uppers, tol.tol_eq).contains(&cert.i)
            {
                return Ok(rejected);
            }
            nonzero_constraint_set(inst, &nt, cert.i, tol)?
        }
        CaseTag::SumZero => {
            let sums: Vec<f64> = (0..inst.n()).map(|i| nt.diff_sum_at(i)).collect();
            let l = match cert.l {
                Some(l) if l < inst.n() => l,
                _ => return Ok(rejected),
            };
            if nt.sum_norm > tol.tol_eq
                || nt.diff_norms[cert.i][l] <= tol.tol_eq
                || !min_candidates(&sums, tol.tol_eq).contains(&cert.i)
            {
                return Ok(rejected);
            }
            zero_constraint_set(inst, &nt, cert.i, l, tol)?
        }
    };
    let residuals = cs.residuals(&cert.state)?;
    let valid = residuals.iter().all(|&r| r <= tol.tol_feas);
    Ok(CertificateCheck { valid, residuals })
}

fn unit_phase(z: Complex64) -> Complex64 {
    z / z.norm()
}

/// Scalar-weight specialization: a_j = α_j·identity. Constraints are posed
/// in the phase-normalized form, dividing out |α_i| and |α_k − α_i|.
pub fn corollary_scalar_condition(
    xs: &[ModuleElement],
    alphas: &[Complex64],
    tol: &ToleranceConfig,
) -> Result<Option<Certificate>> {
    if xs.len() != alphas.len() {
        return Err(Error::InvalidInstance(format!(
            "{} elements but {} weights",
            xs.len(),
            alphas.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::PreconditionViolated(
            "need at least two elements".into(),
        ));
    }
    if let Some(j) = alphas.iter().position(|a| a.norm() <= tol.tol_eq) {
        return Err(Error::PreconditionViolated(format!("weight {j} is zero")));
    }
    let n = xs.len();
    if !(0..n).any(|i| (0..n).any(|j| (alphas[j] - alphas[i]).norm() > tol.tol_eq)) {
        return Err(Error::PreconditionViolated(
            "all weights coincide; no pair differs".into(),
        ));
    }
    let x_norms = xs
        .iter()
        .map(|x| module_norm(x, tol))
        .collect::<Result<Vec<_>>>()?;
    if let Some(j) = x_norms.iter().position(|&nx| nx <= tol.tol_eq) {
        return Err(Error::PreconditionViolated(format!(
            "element {j} has norm {:.3e}",
            x_norms[j]
        )));
    }
    let d = xs[0].algebra_dim();
    let mut sum_x = xs[0].clone();
    for x in &xs[1..] {
        sum_x = sum_x.add(x)?;
    }
    let sum_norm = module_norm(&sum_x, tol)?;

    if sum_norm > tol.tol_eq {
        let uppers: Vec<f64> = (0..n)
            .map(|i| {
                sum_norm * alphas[i].norm()
                    + (0..n)
                        .map(|j| x_norms[j] * (alphas[j] - alphas[i]).norm())
                        .sum::<f64>()
            })
            .collect();
        for i in min_candidates(&uppers, tol.tol_eq) {
            let mut targets = Vec::new();
            for k in 0..n {
                let w = alphas[k] - alphas[i];
                if w.norm() <= tol.tol_eq {
                    continue;
                }
                let unit = unit_phase(alphas[i].conj()) * unit_phase(w);
                let b = inner_product(&sum_x, &xs[k])?.mat().scale(unit);
                targets.push(Constraint {
                    b,
                    c: sum_norm * x_norms[k],
                });
            }
            let cs = ConstraintSet::new(d, targets)?;
            let result = solve_state_feasibility(&cs, tol)?;
            if let FeasibilityStatus::Feasible(state) = result.status {
                return Ok(Some(package(
                    CaseTag::SumNonzero,
                    i,
                    None,
                    state,
                    &cs,
                    tol,
                )?));
            }
        }
        return Ok(None);
    }

    let sums: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| x_norms[j] * (alphas[j] - alphas[i]).norm())
                .sum::<f64>()
        })
        .collect();
    for i in min_candidates(&sums, tol.tol_eq) {
        for l in 0..n {
            let wl = alphas[l] - alphas[i];
            if wl.norm() <= tol.tol_eq {
                continue;
            }
            let mut targets = Vec::new();
            for k in 0..n {
                let wk = alphas[k] - alphas[i];
                if k == l || wk.norm() <= tol.tol_eq {
                    continue;
                }
                let unit = unit_phase(wl.conj()) * unit_phase(wk);
                let b = inner_product(&xs[l], &xs[k])?.mat().scale(unit);
                targets.push(Constraint {
                    b,
                    c: x_norms[l] * x_norms[k],
                });
            }
            let cs = ConstraintSet::new(d, targets)?;
            let result = solve_state_feasibility(&cs, tol)?;
            if let FeasibilityStatus::Feasible(state) = result.status {
                return Ok(Some(package(
                    CaseTag::SumZero,
                    i,
                    Some(l),
                    state,
                    &cs,
                    tol,
                )?));
            }
        }
    }
    Ok(None)
}

/// Reciprocal-norm specialization: α_j = 1/‖x_j‖. The phase factors collapse
/// to signs of norm differences, which is asserted before delegating.
pub fn corollary_norm_reciprocal_condition(
    xs: &[ModuleElement],
    tol: &ToleranceConfig,
) -> Result<Option<Certificate>> {
    if xs.len() < 2 {
        return Err(Error::PreconditionViolated(
            "need at least two elements".into(),
        ));
    }
    let x_norms = xs
        .iter()
        .map(|x| module_norm(x, tol))
        .collect::<Result<Vec<_>>>()?;
    if let Some(j) = x_norms.iter().position(|&nx| nx <= tol.tol_eq) {
        return Err(Error::PreconditionViolated(format!(
            "element {j} has norm {:.3e}",
            x_norms[j]
        )));
    }
    let n = xs.len();
    if !(0..n).any(|i| (0..n).any(|j| (x_norms[i] - x_norms[j]).abs() > tol.tol_eq)) {
        return Err(Error::PreconditionViolated(
            "all elements share the same norm".into(),
        ));
    }
    let alphas: Vec<Complex64> = x_norms
        .iter()
        .map(|&nx| Complex64::new(1.0 / nx, 0.0))
        .collect();
    // With positive real weights the phase unit for (i, k) must equal
    // sgn(‖x_i‖ − ‖x_k‖) exactly.
    for i in 0..n {
        for k in 0..n {
            let w = alphas[k] - alphas[i];
            if w.norm() <= tol.tol_eq {
                continue;
            }
            let unit = unit_phase(alphas[i].conj()) * unit_phase(w);
            let sgn = if x_norms[i] > x_norms[k] { 1.0 } else { -1.0 };
            if (unit - sgn).norm() > 1e-12 {
                return Err(Error::InvalidParameters(format!(
                    "phase factor for pair ({i}, {k}) did not collapse to its sign"
                )));
            }
        }
    }
    corollary_scalar_condition(xs, &alphas, tol)
}
