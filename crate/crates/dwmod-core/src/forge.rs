//! Seeded instance generators and the d = 2 grid oracle that independently
//! decides small state-feasibility problems.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::certifier::ConstraintSet;
use crate::eig::op_norm;
use crate::engine::Instance;
use crate::error::{Error, Result};
use crate::factory::{
    make_diagonal_pair, make_reciprocal_norm_family, make_scalar_family, Construction,
};
use crate::matrix::ComplexMatrix;
use crate::module_space::{module_norm, AlgebraElement, ModuleElement};
use crate::tol::ToleranceConfig;

/// Smallest norm accepted for any generated element; draws below are
/// rejected and retried so downstream normalizations stay stable.
const MIN_NORM: f64 = 0.05;

/// Which coisometry family construction to attach to generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyTag {
    DiagPair,
    Scalar,
    RecipNorm,
}

/// Shape of the generated instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Random,
    /// Positively collinear build x_j = t_j·y, a_j = α_j·u; attains both
    /// bounds exactly.
    Equality,
    /// Equality build with eps-scaled noise added to the module elements.
    NearEquality(f64),
    /// Last module element forced to the negated sum of the others.
    SumZero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForgeSpec {
    pub seed: u64,
    pub d: usize,
    pub m: usize,
    pub n: usize,
    pub family: FamilyTag,
    pub kind: Kind,
}

/// One generator per instance component, all derived from the same seed:
/// stream 0 feeds the module elements, stream 1 the family parameters,
/// stream 2 the near-equality perturbation.
fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// iid entries (N(0,1) + i·N(0,1))/√2, so E‖column‖² = rows.
pub fn rand_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let entries: Vec<Complex64> = (0..rows * cols)
        .map(|_| Complex64::new(gauss(rng), gauss(rng)) * std::f64::consts::FRAC_1_SQRT_2)
        .collect();
    ComplexMatrix::new(rows, cols, entries).expect("gaussian entries are finite")
}

/// Haar-ish random unitary via Gram-Schmidt on a gaussian matrix; redraws on
/// near-singular input.
pub fn rand_unitary(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    'redraw: loop {
        let g = rand_matrix(rng, d, d);
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
        for j in 0..d {
            let mut v: Vec<Complex64> = (0..d).map(|i| g.get(i, j)).collect();
            for prev in &cols {
                let proj: Complex64 = prev.iter().zip(&v).map(|(p, x)| p.conj() * x).sum();
                for (vi, pi) in v.iter_mut().zip(prev) {
                    *vi -= proj * pi;
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                continue 'redraw;
            }
            for vi in &mut v {
                *vi /= norm;
            }
            cols.push(v);
        }
        return ComplexMatrix::from_fn(d, d, |i, j| cols[j][i]).expect("unit columns are finite");
    }
}

fn rand_module_element(
    rng: &mut ChaCha8Rng,
    m: usize,
    d: usize,
    tol: &ToleranceConfig,
) -> ModuleElement {
    loop {
        let x = ModuleElement::new(rand_matrix(rng, m, d));
        if module_norm(&x, tol)
            .map(|nx| nx >= MIN_NORM)
            .unwrap_or(false)
        {
            return x;
        }
    }
}

fn rand_nonzero_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let z = Complex64::new(gauss(rng), gauss(rng)) * std::f64::consts::FRAC_1_SQRT_2;
        if z.norm() >= MIN_NORM {
            return z;
        }
    }
}

fn uniform_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    use rand::Rng;
    rng.random_range(lo..hi)
}

fn build_family(
    spec: &ForgeSpec,
    xs: &[ModuleElement],
    rng: &mut ChaCha8Rng,
    tol: &ToleranceConfig,
) -> Result<(Vec<AlgebraElement>, Construction)> {
    match spec.family {
        FamilyTag::Scalar => {
            let alphas: Vec<Complex64> = (0..spec.n).map(|_| rand_nonzero_complex(rng)).collect();
            let fam = make_scalar_family(&alphas, spec.d)?;
            Ok((fam.elems, Construction::ScalarFamily))
        }
        FamilyTag::RecipNorm => {
            let fam = make_reciprocal_norm_family(xs, tol)?;
            Ok((fam.elems, Construction::ReciprocalNormFamily))
        }
        FamilyTag::DiagPair => loop {
            let alpha = rand_nonzero_complex(rng);
            let phase = uniform_in(rng, 0.0, std::f64::consts::TAU);
            let beta = alpha * Complex64::new(phase.cos(), phase.sin());
            if (alpha * alpha - beta * beta).norm() <= 100.0 * tol.tol_eq {
                continue;
            }
            let fam = make_diagonal_pair(alpha, beta, tol)?;
            return Ok((fam.elems, Construction::DiagonalPair));
        },
    }
}

/// Deterministic instance generator; identical specs produce identical
/// instances.
pub fn forge(spec: &ForgeSpec, tol: &ToleranceConfig) -> Result<Instance> {
    if spec.d == 0 || spec.m == 0 || spec.n < 2 {
        return Err(Error::InvalidSpec(format!(
            "dimensions d={}, m={}, n={} out of range",
            spec.d, spec.m, spec.n
        )));
    }
    if spec.d > crate::eig::JACOBI_MAX_DIM {
        return Err(Error::InvalidSpec(format!(
            "d={} exceeds the eigensolver cap {}",
            spec.d,
            crate::eig::JACOBI_MAX_DIM
        )));
    }
    if spec.family == FamilyTag::DiagPair && (spec.d != 2 || spec.n != 2) {
        return Err(Error::InvalidSpec(
            "the diagonal-pair family needs d = 2 and n = 2".into(),
        ));
    }
    if let Kind::NearEquality(eps) = spec.kind {
        if !eps.is_finite() || eps <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "near-equality noise scale {eps} must be positive and finite"
            )));
        }
    }

    let mut xs_rng = stream_rng(spec.seed, 0);
    let mut fam_rng = stream_rng(spec.seed, 1);

    match spec.kind {
        Kind::Random => {
            let xs: Vec<ModuleElement> = (0..spec.n)
                .map(|_| rand_module_element(&mut xs_rng, spec.m, spec.d, tol))
                .collect();
            let (as_, tag) = build_family(spec, &xs, &mut fam_rng, tol)?;
            Instance::new(xs, as_, Some(tag), tol)
        }
        Kind::SumZero => loop {
            let mut xs: Vec<ModuleElement> = (0..spec.n - 1)
                .map(|_| rand_module_element(&mut xs_rng, spec.m, spec.d, tol))
                .collect();
            let mut sum = xs[0].clone();
            for x in &xs[1..] {
                sum = sum.add(x)?;
            }
            let last = sum.neg();
            if module_norm(&last, tol)? < MIN_NORM {
                continue;
            }
            xs.push(last);
            let (as_, tag) = build_family(spec, &xs, &mut fam_rng, tol)?;
            return Instance::new(xs, as_, Some(tag), tol);
        },
        Kind::Equality | Kind::NearEquality(_) => {
            // The family flag is ignored: the construction fixes the algebra
            // elements to positive multiples of one unitary.
            let y = rand_module_element(&mut xs_rng, spec.m, spec.d, tol);
            let ts: Vec<f64> = (0..spec.n)
                .map(|_| uniform_in(&mut fam_rng, 0.2, 2.0))
                .collect();
            let alphas: Vec<f64> = (0..spec.n)
                .map(|_| uniform_in(&mut fam_rng, 0.2, 2.0))
                .collect();
            let u = rand_unitary(&mut fam_rng, spec.d);
            let mut xs: Vec<ModuleElement> = ts
                .iter()
                .map(|&tj| y.scale(Complex64::new(tj, 0.0)))
                .collect();
            if let Kind::NearEquality(eps) = spec.kind {
                let mut noise_rng = stream_rng(spec.seed, 2);
                xs = xs
                    .into_iter()
                    .map(|x| {
                        let noise = rand_matrix(&mut noise_rng, spec.m, spec.d)
                            .scale(Complex64::new(eps, 0.0));
                        ModuleElement::new(x.mat() + &noise)
                    })
                    .collect();
            }
            let as_: Vec<AlgebraElement> = alphas
                .iter()
                .map(|&aj| AlgebraElement::new(u.scale(Complex64::new(aj, 0.0))))
                .collect::<Result<Vec<_>>>()?;
            Instance::new(xs, as_, None, tol)
        }
    }
}

/// Grid-oracle outcome for one d = 2 constraint set.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BlochOracleReport {
    pub feasible: bool,
    /// Smallest max-residual over all admissible grid states.
    pub margin: f64,
    /// Bloch coordinates attaining the margin.
    pub witness: [f64; 3],
}

/// Exhaustive search over ρ = (I + xσ₁ + yσ₂ + zσ₃)/2 on the ball grid with
/// step 0.02. Decides feasibility up to the Lipschitz slack L·h with
/// L = Σ_k ‖b_k‖.
pub fn bloch_grid_oracle(cs: &ConstraintSet, tol: &ToleranceConfig) -> Result<BlochOracleReport> {
    if cs.dim() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            got: cs.dim(),
        });
    }
    const H: f64 = 0.02;
    const STEPS: i64 = 50;

    // tr(ρ b) = w0 + x·w1 + y·w2 + z·w3 with w0 = tr(b)/2, wi = tr(σi b)/2.
    struct Affine {
        w0: Complex64,
        w: [Complex64; 3],
        c: f64,
    }
    let mut lipschitz = 0.0;
    let affine: Vec<Affine> = cs
        .targets()
        .iter()
        .map(|t| {
            lipschitz += op_norm(&t.b, tol)?;
            let b = &t.b;
            let half = Complex64::new(0.5, 0.0);
            let w0 = b.trace() * half;
            // tr(σ1 b) = b10 + b01, tr(σ2 b) = i(b01 − b10), tr(σ3 b) = b00 − b11.
            let w1 = (b.get(1, 0) + b.get(0, 1)) * half;
            let w2 = (b.get(0, 1) - b.get(1, 0)) * Complex64::new(0.0, 0.5);
            let w3 = (b.get(0, 0) - b.get(1, 1)) * half;
            Ok(Affine {
                w0,
                w: [w1, w2, w3],
                c: t.c,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best_sq = f64::INFINITY;
    let mut witness = [0.0; 3];
    for ix in -STEPS..=STEPS {
        let x = ix as f64 * H;
        for iy in -STEPS..=STEPS {
            let y = iy as f64 * H;
            let xy = x * x + y * y;
            if xy > 1.0 + 1e-12 {
                continue;
            }
            for iz in -STEPS..=STEPS {
                let z = iz as f64 * H;
                if xy + z * z > 1.0 + 1e-12 {
                    continue;
                }
                let mut worst = 0.0f64;
                for a in &affine {
                    let val = a.w0 + a.w[0] * x + a.w[1] * y + a.w[2] * z;
                    let r = (val - a.c).norm_sqr();
                    if r > worst {
                        worst = r;
                    }
                }
                if worst < best_sq {
                    best_sq = worst;
                    witness = [x, y, z];
                }
            }
        }
    }
    let margin = best_sq.sqrt();
    Ok(BlochOracleReport {
        feasible: margin <= tol.tol_feas + lipschitz * H,
        margin,
        witness,
    })
}
