//! Bound evaluation: the two-sided norm estimate for ‖Σ x_j a_j‖ over
//! coisometry-multiple families, its classical two-point and reciprocal-norm
//! specializations, and the triangle-refinement comparisons.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factory::Construction;
use crate::module_space::{algebra_norm, module_norm, right_action, AlgebraElement, ModuleElement};
use crate::tol::ToleranceConfig;

/// A problem instance: module elements x_j paired with algebra elements a_j
/// whose members and pairwise differences are coisometry multiples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct Instance {
    xs: Vec<ModuleElement>,
    as_: Vec<AlgebraElement>,
    d: usize,
    m: usize,
    family_tag: Option<Construction>,
}

/// Wire format: {"d","m","n","xs","as","family_tag"}.
#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    d: usize,
    m: usize,
    n: usize,
    xs: Vec<ModuleElement>,
    #[serde(rename = "as")]
    as_: Vec<AlgebraElement>,
    family_tag: Option<Construction>,
}

impl TryFrom<InstanceRepr> for Instance {
    type Error = Error;

    fn try_from(repr: InstanceRepr) -> Result<Self> {
        let inst = Instance {
            xs: repr.xs,
            as_: repr.as_,
            d: repr.d,
            m: repr.m,
            family_tag: repr.family_tag,
        };
        if inst.xs.len() != repr.n || inst.as_.len() != repr.n {
            return Err(Error::InvalidInstance(format!(
                "n = {} but {} module and {} algebra elements",
                repr.n,
                inst.xs.len(),
                inst.as_.len()
            )));
        }
        inst.check_shape()?;
        Ok(inst)
    }
}

impl From<Instance> for InstanceRepr {
    fn from(inst: Instance) -> Self {
        InstanceRepr {
            d: inst.d,
            m: inst.m,
            n: inst.xs.len(),
            xs: inst.xs,
            as_: inst.as_,
            family_tag: inst.family_tag,
        }
    }
}

impl Instance {
    /// Full constructor: shape checks plus the numeric invariants (nonzero
    /// x_j, coisometry conditions on every a_j and every difference).
    pub fn new(
        xs: Vec<ModuleElement>,
        as_: Vec<AlgebraElement>,
        family_tag: Option<Construction>,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        if xs.len() < 2 {
            return Err(Error::InvalidInstance(format!(
                "need at least two module elements, got {}",
                xs.len()
            )));
        }
        let inst = Self {
            d: xs[0].algebra_dim(),
            m: xs[0].rows(),
            xs,
            as_,
            family_tag,
        };
        inst.check_shape()?;
        inst.validate(tol)?;
        Ok(inst)
    }

    fn check_shape(&self) -> Result<()> {
        if self.xs.len() != self.as_.len() {
            return Err(Error::InvalidInstance(format!(
                "{} module elements but {} algebra elements",
                self.xs.len(),
                self.as_.len()
            )));
        }
        for (j, x) in self.xs.iter().enumerate() {
            if x.rows() != self.m || x.algebra_dim() != self.d {
                return Err(Error::InvalidInstance(format!(
                    "module element {j} is {}x{}, expected {}x{}",
                    x.rows(),
                    x.algebra_dim(),
                    self.m,
                    self.d
                )));
            }
        }
        for (j, a) in self.as_.iter().enumerate() {
            if a.algebra_dim() != self.d {
                return Err(Error::InvalidInstance(format!(
                    "algebra element {j} has dimension {}, expected {}",
                    a.algebra_dim(),
                    self.d
                )));
            }
        }
        Ok(())
    }

    /// Numeric invariants: every x_j bounded away from zero, every a_j and
    /// every pairwise difference a coisometry multiple.
    pub fn validate(&self, tol: &ToleranceConfig) -> Result<()> {
        self.check_shape()?;
        if self.xs.len() < 2 {
            return Err(Error::InvalidInstance(
                "instance needs at least two elements".into(),
            ));
        }
        for (j, x) in self.xs.iter().enumerate() {
            let nx = module_norm(x, tol)?;
            if nx <= tol.tol_eq {
                return Err(Error::InvalidInstance(format!(
                    "module element {j} has norm {nx:.3e}"
                )));
            }
        }
        for (j, a) in self.as_.iter().enumerate() {
            if a.coisometry_scale(tol.tol_eq).is_none() {
                return Err(Error::InvalidInstance(format!(
                    "algebra element {j} is not a coisometry multiple"
                )));
            }
            for (i, b) in self.as_.iter().enumerate() {
                if i < j {
                    let diff = a.sub(b)?;
                    if diff.coisometry_scale(tol.tol_eq).is_none() {
                        return Err(Error::InvalidInstance(format!(
                            "difference of algebra elements {j} and {i} is not a coisometry multiple"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn xs(&self) -> &[ModuleElement] {
        &self.xs
    }

    pub fn algebra_elems(&self) -> &[AlgebraElement] {
        &self.as_
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.xs.len()
    }

    pub fn family_tag(&self) -> Option<Construction> {
        self.family_tag
    }
}

/// All norms a bound evaluation needs, computed once per instance.
pub(crate) struct NormTable {
    /// ‖Σ x_j a_j‖.
    pub lhs: f64,
    /// ‖Σ x_j‖.
    pub sum_norm: f64,
    pub x_norms: Vec<f64>,
    pub a_norms: Vec<f64>,
    /// diff_norms[i][j] = ‖a_j − a_i‖.
    pub diff_norms: Vec<Vec<f64>>,
    pub sum_x: ModuleElement,
}

pub(crate) fn norm_table(inst: &Instance, tol: &ToleranceConfig) -> Result<NormTable> {
    let n = inst.n();
    let mut sum_x = inst.xs[0].clone();
    let mut sum_xa = right_action(&inst.xs[0], &inst.as_[0])?;
    for j in 1..n {
        sum_x = sum_x.add(&inst.xs[j])?;
        sum_xa = sum_xa.add(&right_action(&inst.xs[j], &inst.as_[j])?)?;
    }
    let lhs = module_norm(&sum_xa, tol)?;
    let sum_norm = module_norm(&sum_x, tol)?;
    let x_norms = inst
        .xs
        .iter()
        .map(|x| module_norm(x, tol))
        .collect::<Result<Vec<_>>>()?;
    let a_norms = inst
        .as_
        .iter()
        .map(|a| algebra_norm(a, tol))
        .collect::<Result<Vec<_>>>()?;
    let mut diff_norms = vec![vec![0.0; n]; n];
    // Symmetric fill; iterator forms cannot write both triangles.
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        for j in i + 1..n {
            let nd = algebra_norm(&inst.as_[j].sub(&inst.as_[i])?, tol)?;
            diff_norms[i][j] = nd;
            diff_norms[j][i] = nd;
        }
    }
    Ok(NormTable {
        lhs,
        sum_norm,
        x_norms,
        a_norms,
        diff_norms,
        sum_x,
    })
}

impl NormTable {
    /// ‖Σx‖·‖a_i‖ + Σ_j ‖x_j‖·‖a_j − a_i‖ for one index.
    pub fn upper_at(&self, i: usize) -> f64 {
        self.sum_norm * self.a_norms[i]
            + self
                .x_norms
                .iter()
                .zip(&self.diff_norms[i])
                .map(|(nx, nd)| nx * nd)
                .sum::<f64>()
    }

    pub fn lower_at(&self, i: usize) -> f64 {
        self.sum_norm * self.a_norms[i]
            - self
                .x_norms
                .iter()
                .zip(&self.diff_norms[i])
                .map(|(nx, nd)| nx * nd)
                .sum::<f64>()
    }

    /// Σ_j ‖x_j‖·‖a_j − a_i‖, the bound that remains when Σx = 0.
    pub fn diff_sum_at(&self, i: usize) -> f64 {
        self.x_norms
            .iter()
            .zip(&self.diff_norms[i])
            .map(|(nx, nd)| nx * nd)
            .sum()
    }
}

fn argmin_by(n: usize, f: impl Fn(usize) -> f64) -> (f64, usize) {
    let mut best = f(0);
    let mut arg = 0;
    for i in 1..n {
        let v = f(i);
        // Strict comparison keeps the smallest index on ties.
        if v < best {
            best = v;
            arg = i;
        }
    }
    (best, arg)
}

fn argmax_by(n: usize, f: impl Fn(usize) -> f64) -> (f64, usize) {
    let (neg_best, arg) = argmin_by(n, |i| -f(i));
    (-neg_best, arg)
}

/// min_i { ‖Σx‖·‖a_i‖ + Σ_j ‖x_j‖·‖a_j − a_i‖ } with its achieving index
/// (smallest on ties).
pub fn dw_upper_bound(inst: &Instance, tol: &ToleranceConfig) -> Result<(f64, usize)> {
    inst.validate(tol)?;
    let nt = norm_table(inst, tol)?;
    Ok(argmin_by(inst.n(), |i| nt.upper_at(i)))
}

/// max_i { ‖Σx‖·‖a_i‖ − Σ_j ‖x_j‖·‖a_j − a_i‖ } with its achieving index.
pub fn dw_lower_bound(inst: &Instance, tol: &ToleranceConfig) -> Result<(f64, usize)> {
    inst.validate(tol)?;
    let nt = norm_table(inst, tol)?;
    Ok(argmax_by(inst.n(), |i| nt.lower_at(i)))
}

/// Both sides of the two-sided bound with slacks and optimizing indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lhs: f64,
    pub upper: f64,
    pub upper_argmin: usize,
    pub lower: f64,
    pub lower_argmax: usize,
    pub slack_upper: f64,
    pub slack_lower: f64,
}

fn sandwich_report(
    lhs: f64,
    (upper, upper_argmin): (f64, usize),
    (lower, lower_argmax): (f64, usize),
    tol: &ToleranceConfig,
) -> Result<BoundReport> {
    if lhs > upper + tol.tol_eq || lhs < lower - tol.tol_eq {
        return Err(Error::BoundViolation { lhs, upper, lower });
    }
    Ok(BoundReport {
        lhs,
        upper,
        upper_argmin,
        lower,
        lower_argmax,
        slack_upper: upper - lhs,
        slack_lower: lhs - lower,
    })
}

/// Evaluates the full two-sided bound and asserts the sandwich.
pub fn check_theorem(inst: &Instance, tol: &ToleranceConfig) -> Result<BoundReport> {
    inst.validate(tol)?;
    let nt = norm_table(inst, tol)?;
    let n = inst.n();
    sandwich_report(
        nt.lhs,
        argmin_by(n, |i| nt.upper_at(i)),
        argmax_by(n, |i| nt.lower_at(i)),
        tol,
    )
}

/// Bounds for ‖Σ x_j/‖x_j‖‖ computed directly from the norm display
/// (‖Σx‖ ± Σ_j |‖x_i‖ − ‖x_j‖|)/‖x_i‖; an independent route that must agree
/// with `check_theorem` on the matching reciprocal-norm instance.
pub fn pecaric_rajic_bounds(xs: &[ModuleElement], tol: &ToleranceConfig) -> Result<BoundReport> {
    if xs.is_empty() {
        return Err(Error::InvalidInstance("empty element list".into()));
    }
    let n = xs.len();
    let norms = xs
        .iter()
        .map(|x| module_norm(x, tol))
        .collect::<Result<Vec<_>>>()?;
    if let Some(j) = norms.iter().position(|&nx| nx <= tol.tol_eq) {
        return Err(Error::InvalidInstance(format!(
            "element {j} has norm too small to normalize"
        )));
    }
    let mut normalized_sum = xs[0].scale(Complex64::new(1.0 / norms[0], 0.0));
    let mut raw_sum = xs[0].clone();
    for j in 1..n {
        normalized_sum = normalized_sum.add(&xs[j].scale(Complex64::new(1.0 / norms[j], 0.0)))?;
        raw_sum = raw_sum.add(&xs[j])?;
    }
    let lhs = module_norm(&normalized_sum, tol)?;
    let ns = module_norm(&raw_sum, tol)?;
    let spread = |i: usize| norms.iter().map(|nj| (norms[i] - nj).abs()).sum::<f64>();
    sandwich_report(
        lhs,
        argmin_by(n, |i| (ns + spread(i)) / norms[i]),
        argmax_by(n, |i| (ns - spread(i)) / norms[i]),
        tol,
    )
}

/// Outcome of the triangle-refinement comparison.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KatoReport {
    /// ‖Σx‖ + (n − ‖Σ x_j/‖x_j‖‖)·min‖x_i‖ ≤ Σ‖x_j‖.
    pub refined_upper_holds: bool,
    /// Σ‖x_j‖ ≤ ‖Σx‖ + (n − ‖Σ x_j/‖x_j‖‖)·max‖x_i‖.
    pub reverse_holds: bool,
    /// The reciprocal-norm bounds imply both refinements.
    pub pr_sharper: bool,
}

/// Checks the min/max triangle refinements and whether the reciprocal-norm
/// bounds are at least as sharp.
pub fn kato_bounds(xs: &[ModuleElement], tol: &ToleranceConfig) -> Result<KatoReport> {
    let pr = pecaric_rajic_bounds(xs, tol)?;
    let n = xs.len() as f64;
    let norms = xs
        .iter()
        .map(|x| module_norm(x, tol))
        .collect::<Result<Vec<_>>>()?;
    let mut raw_sum = xs[0].clone();
    for x in &xs[1..] {
        raw_sum = raw_sum.add(x)?;
    }
    let ns = module_norm(&raw_sum, tol)?;
    let s: f64 = norms.iter().sum();
    let mn = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let mx = norms.iter().cloned().fold(0.0, f64::max);
    let q = pr.lhs;

    let refined_upper_holds = ns + (n - q) * mn <= s + tol.tol_eq;
    let reverse_holds = s <= ns + (n - q) * mx + tol.tol_eq;
    // Rearranged, the two refinements bound q from both sides; the
    // reciprocal-norm bounds must sit inside them.
    let k_up = n - (s - ns) / mx;
    let k_low = n - (s - ns) / mn;
    let pr_sharper = pr.upper <= k_up + tol.tol_eq && pr.lower >= k_low - tol.tol_eq;
    Ok(KatoReport {
        refined_upper_holds,
        reverse_holds,
        pr_sharper,
    })
}

/// One inequality instance: lhs against rhs with the orientation folded into
/// `holds`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// The two-point comparisons in difference form ‖x/‖x‖ − y/‖y‖‖.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TwoPointReport {
    /// Upper bound 4‖x−y‖/(‖x‖+‖y‖).
    pub dw: InequalityCheck,
    /// Refined upper bound (‖x−y‖ + |‖x‖−‖y‖|)/max(‖x‖,‖y‖).
    pub maligranda: InequalityCheck,
    /// Lower bound (‖x−y‖ − |‖x‖−‖y‖|)/min(‖x‖,‖y‖).
    pub mercer: InequalityCheck,
}

/// Evaluates the classical two-point bounds. The summation engine covers the
/// same ground through the pair (x, −y), which the cross-checks exploit.
pub fn classical_two_point(
    x: &ModuleElement,
    y: &ModuleElement,
    tol: &ToleranceConfig,
) -> Result<TwoPointReport> {
    let nx = module_norm(x, tol)?;
    let ny = module_norm(y, tol)?;
    if nx <= tol.tol_eq || ny <= tol.tol_eq {
        return Err(Error::InvalidInstance(
            "two-point comparison needs nonzero elements".into(),
        ));
    }
    let unit_diff = x
        .scale(Complex64::new(1.0 / nx, 0.0))
        .add(&y.scale(Complex64::new(-1.0 / ny, 0.0)))?;
    let lhs = module_norm(&unit_diff, tol)?;
    let nd = module_norm(&x.add(&y.neg())?, tol)?;
    let gap = (nx - ny).abs();

    let dw_rhs = 4.0 * nd / (nx + ny);
    let mal_rhs = (nd + gap) / nx.max(ny);
    let mer_rhs = (nd - gap) / nx.min(ny);
    Ok(TwoPointReport {
        dw: InequalityCheck {
            lhs,
            rhs: dw_rhs,
            holds: lhs <= dw_rhs + tol.tol_eq,
        },
        maligranda: InequalityCheck {
            lhs,
            rhs: mal_rhs,
            holds: lhs <= mal_rhs + tol.tol_eq,
        },
        mercer: InequalityCheck {
            lhs,
            rhs: mer_rhs,
            holds: lhs >= mer_rhs - tol.tol_eq,
        },
    })
}
