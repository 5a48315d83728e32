//! Batch front end: seeded sweeps through the bound engine, certificate
//! search and verification, instance generation, CSV aggregation, and the
//! exact shift-model check.
//!
//! Exit codes: 0 success, 1 violation or invalid certificate, 2 inconclusive
//! equality decision, 64 input or parse error, 70 internal error. Identical
//! configurations produce byte-identical outputs regardless of --jobs.

use std::fmt;
use std::fs;
use std::io::Write;
use std::ops::Range;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use dwmod_core::{
    certify_sum_nonzero, certify_sum_zero, check_theorem, classical_two_point,
    exhaustive_index_check, forge, kato_bounds, make_shift_family, module_norm,
    pecaric_rajic_bounds, verify_certificate, BoundReport, Certificate, Construction, Error,
    FamilyTag, ForgeSpec, Instance, Kind, ToleranceConfig,
};

const EXIT_VIOLATION: i32 = 1;
const EXIT_INCONCLUSIVE: i32 = 2;
const EXIT_INPUT: i32 = 64;
const EXIT_INTERNAL: i32 = 70;

enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "{m}"),
            Failure::Internal(m) => write!(f, "internal: {m}"),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn input_err(msg: impl fmt::Display) -> Failure {
    Failure::Input(msg.to_string())
}

/// Errors that indicate bad user input keep exit 64; anything else is an
/// internal failure.
fn core_err(e: Error) -> Failure {
    match e {
        Error::InvalidInstance(_)
        | Error::InvalidParameters(_)
        | Error::InvalidTolerance(_)
        | Error::InvalidSpec(_)
        | Error::InvalidMatrix(_)
        | Error::PreconditionViolated(_)
        | Error::ZeroScalar { .. }
        | Error::DimensionMismatch(_) => Failure::Input(e.to_string()),
        other => Failure::Internal(other.to_string()),
    }
}

#[derive(Parser)]
#[command(
    name = "dwmod",
    version,
    about = "Norm-bound laboratory for matrix modules over matrix algebras"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sweep seeded instances through the bound engine and the classical
    /// specializations, writing one CSV row per seed.
    Check(CheckArgs),
    /// Decide equality and search state certificates, writing a JSON record
    /// per instance.
    Certify(CertifyArgs),
    /// Re-check a stored certificate against its instance.
    Verify(VerifyArgs),
    /// Generate instances and write them as a JSON array.
    Forge(ForgeCmdArgs),
    /// Aggregate check CSVs into slack statistics.
    Report(ReportArgs),
    /// Verify the truncated-shift identities exactly.
    Shiftcheck(ShiftArgs),
}

#[derive(Args)]
struct TolArgs {
    /// Override the norm-equality tolerance.
    #[arg(long = "tol-eq")]
    tol_eq: Option<f64>,
    /// Override the feasibility-residual tolerance.
    #[arg(long = "tol-feas")]
    tol_feas: Option<f64>,
}

impl TolArgs {
    fn resolve(&self) -> CliResult<ToleranceConfig> {
        let mut t = ToleranceConfig::default();
        if let Some(v) = self.tol_eq {
            t.tol_eq = v;
        }
        if let Some(v) = self.tol_feas {
            t.tol_feas = v;
        }
        t.validate().map_err(core_err)?;
        Ok(t)
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Seed range A..B (half-open); defaults to 100 seeds from the seed base.
    #[arg(long)]
    seeds: Option<String>,
    /// Base seed used when --seeds is omitted.
    #[arg(long, env = "DWMOD_SEED", default_value_t = 0)]
    seed_base: u64,
    /// Algebra dimension.
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Module element rows.
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Number of summands.
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, value_enum, default_value_t = FamilyArg::Scalar)]
    family: FamilyArg,
    #[arg(long, value_enum, default_value_t = KindArg::Random)]
    kind: KindArg,
    /// Perturbation size for --kind nearequality.
    #[arg(long, default_value_t = 1e-2)]
    eps: f64,
    /// Worker threads (0 = all cores). Output order is seed order either way.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Diagpair,
    Scalar,
    Recipnorm,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Random,
    Equality,
    Nearequality,
    Sumzero,
}

impl SweepArgs {
    fn seed_range(&self) -> CliResult<Range<u64>> {
        match &self.seeds {
            None => Ok(self.seed_base..self.seed_base + 100),
            Some(s) => {
                let (a, b) = s.split_once("..").ok_or_else(|| {
                    input_err(format!("seed range '{s}' is not of the form A..B"))
                })?;
                let a: u64 = a
                    .trim()
                    .parse()
                    .map_err(|_| input_err(format!("bad seed range start '{a}'")))?;
                let b: u64 = b
                    .trim()
                    .parse()
                    .map_err(|_| input_err(format!("bad seed range end '{b}'")))?;
                if b <= a {
                    return Err(input_err(format!("seed range {a}..{b} is empty")));
                }
                Ok(a..b)
            }
        }
    }

    fn spec_for(&self, seed: u64) -> ForgeSpec {
        let family = match self.family {
            FamilyArg::Diagpair => FamilyTag::DiagPair,
            FamilyArg::Scalar => FamilyTag::Scalar,
            FamilyArg::Recipnorm => FamilyTag::RecipNorm,
        };
        let kind = match self.kind {
            KindArg::Random => Kind::Random,
            KindArg::Equality => Kind::Equality,
            KindArg::Nearequality => Kind::NearEquality(self.eps),
            KindArg::Sumzero => Kind::SumZero,
        };
        ForgeSpec {
            seed,
            d: self.d,
            m: self.m,
            n: self.n,
            family,
            kind,
        }
    }

    /// Runs `f` over the seed range on a pool of `jobs` threads, returning
    /// results in seed order.
    fn run_ordered<T: Send>(
        &self,
        f: impl Fn(u64) -> CliResult<T> + Sync,
    ) -> CliResult<Vec<(u64, T)>> {
        let seeds: Vec<u64> = self.seed_range()?.collect();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| Failure::Internal(e.to_string()))?;
        pool.install(|| {
            seeds
                .par_iter()
                .map(|&s| f(s).map(|v| (s, v)))
                .collect::<CliResult<Vec<_>>>()
        })
    }
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    #[command(flatten)]
    tol: TolArgs,
    /// CSV destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    #[command(flatten)]
    tol: TolArgs,
    /// JSON array of instances to certify instead of forging a sweep.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// JSON destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance JSON (a single instance).
    #[arg(long = "in")]
    input: PathBuf,
    /// Certificate JSON.
    #[arg(long)]
    cert: PathBuf,
    #[command(flatten)]
    tol: TolArgs,
    /// JSON destination for the verification record (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ForgeCmdArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    #[command(flatten)]
    tol: TolArgs,
    /// JSON destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// One or more check CSVs.
    #[arg(long = "in", required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    /// JSON destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ShiftArgs {
    /// Number of shift operators.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Truncation of the sequence space; defaults to n².
    #[arg(long)]
    trunc: Option<usize>,
    /// JSON destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                eprint!("{e}");
                std::process::exit(EXIT_INPUT);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    let outcome = match cli.cmd {
        Cmd::Check(a) => run_check(a),
        Cmd::Certify(a) => run_certify(a),
        Cmd::Verify(a) => run_verify(a),
        Cmd::Forge(a) => run_forge(a),
        Cmd::Report(a) => run_report(a),
        Cmd::Shiftcheck(a) => run_shiftcheck(a),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(f) => {
            eprintln!("error: {f}");
            std::process::exit(f.code());
        }
    }
}

fn write_output(out: &Option<PathBuf>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => {
            fs::write(path, bytes).map_err(|e| input_err(format!("{}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::Internal(e.to_string())),
    }
}

fn to_json_bytes<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut bytes =
        serde_json::to_vec_pretty(value).map_err(|e| Failure::Internal(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> CliResult<T> {
    let text =
        fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct CheckRow {
    seed: u64,
    lhs: f64,
    upper: f64,
    lower: f64,
    slack_upper: f64,
    slack_lower: f64,
    upper_argmin: usize,
    lower_argmax: usize,
    kato_refined: bool,
    kato_reverse: bool,
    kato_sharper: bool,
    dw_holds: Option<bool>,
    maligranda_holds: Option<bool>,
    mercer_holds: Option<bool>,
    pr_dev: Option<f64>,
    violation: bool,
}

fn check_row(seed: u64, inst: &Instance, t: &ToleranceConfig) -> CliResult<CheckRow> {
    let (rep, mut violation) = match check_theorem(inst, t) {
        Ok(rep) => (rep, false),
        Err(Error::BoundViolation { lhs, upper, lower }) => {
            let (u, ua) = dwmod_core::dw_upper_bound(inst, t).map_err(core_err)?;
            let (l, la) = dwmod_core::dw_lower_bound(inst, t).map_err(core_err)?;
            debug_assert_eq!((u, l), (upper, lower));
            (
                BoundReport {
                    lhs,
                    upper: u,
                    upper_argmin: ua,
                    lower: l,
                    lower_argmax: la,
                    slack_upper: u - lhs,
                    slack_lower: lhs - l,
                },
                true,
            )
        }
        Err(e) => return Err(core_err(e)),
    };

    let kato = kato_bounds(inst.xs(), t).map_err(core_err)?;
    if !(kato.refined_upper_holds && kato.reverse_holds && kato.pr_sharper) {
        violation = true;
    }

    let (mut dw_holds, mut maligranda_holds, mut mercer_holds) = (None, None, None);
    if inst.n() == 2 {
        let tp = classical_two_point(&inst.xs()[0], &inst.xs()[1].neg(), t).map_err(core_err)?;
        dw_holds = Some(tp.dw.holds);
        maligranda_holds = Some(tp.maligranda.holds);
        mercer_holds = Some(tp.mercer.holds);
        if !(tp.dw.holds && tp.maligranda.holds && tp.mercer.holds) {
            violation = true;
        }
    }

    let mut pr_dev = None;
    if inst.family_tag() == Some(Construction::ReciprocalNormFamily) {
        let pr = pecaric_rajic_bounds(inst.xs(), t).map_err(core_err)?;
        let dev = (pr.lhs - rep.lhs)
            .abs()
            .max((pr.upper - rep.upper).abs())
            .max((pr.lower - rep.lower).abs());
        if dev > t.tol_eq {
            violation = true;
        }
        pr_dev = Some(dev);
    }

    Ok(CheckRow {
        seed,
        lhs: rep.lhs,
        upper: rep.upper,
        lower: rep.lower,
        slack_upper: rep.slack_upper,
        slack_lower: rep.slack_lower,
        upper_argmin: rep.upper_argmin,
        lower_argmax: rep.lower_argmax,
        kato_refined: kato.refined_upper_holds,
        kato_reverse: kato.reverse_holds,
        kato_sharper: kato.pr_sharper,
        dw_holds,
        maligranda_holds,
        mercer_holds,
        pr_dev,
        violation,
    })
}

fn run_check(args: CheckArgs) -> CliResult<i32> {
    let t = args.tol.resolve()?;
    let rows = args.sweep.run_ordered(|seed| {
        let inst = forge(&args.sweep.spec_for(seed), &t).map_err(core_err)?;
        check_row(seed, &inst, &t)
    })?;

    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut violations = 0usize;
    for (_, row) in &rows {
        if row.violation {
            violations += 1;
        }
        wtr.serialize(row)
            .map_err(|e| Failure::Internal(e.to_string()))?;
    }
    let bytes = wtr
        .into_inner()
        .map_err(|e| Failure::Internal(e.to_string()))?;
    write_output(&args.out, &bytes)?;
    Ok(if violations == 0 { 0 } else { EXIT_VIOLATION })
}

#[derive(Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Classification {
    /// Equality detected and certified.
    Equal,
    /// Strict inequality, no certificate.
    Strict,
    /// Certificate found although the bound is clearly strict.
    Mismatch,
    /// Equality detected without a certificate, or a certificate inside the
    /// tolerance gray band.
    Inconclusive,
}

#[derive(Serialize)]
struct CertifyRecord {
    id: String,
    sum_zero_route: bool,
    lhs: f64,
    slack_upper: f64,
    classification: Classification,
    certificate: Option<Certificate>,
}

fn certify_instance(id: String, inst: &Instance, t: &ToleranceConfig) -> CliResult<CertifyRecord> {
    let rep = check_theorem(inst, t).map_err(core_err)?;
    let sum = inst.xs()[1..]
        .iter()
        .try_fold(inst.xs()[0].clone(), |acc, x| acc.add(x))
        .map_err(core_err)?;
    let sum_zero = module_norm(&sum, t).map_err(core_err)? <= t.tol_eq;
    let cert = if sum_zero {
        certify_sum_zero(inst, t).map_err(core_err)?
    } else {
        certify_sum_nonzero(inst, t).map_err(core_err)?
    };

    let eq_detected = rep.slack_upper <= t.tol_eq;
    let classification = match (cert.is_some(), eq_detected) {
        (true, true) => Classification::Equal,
        (false, false) => Classification::Strict,
        (false, true) => Classification::Inconclusive,
        (true, false) => {
            if rep.slack_upper > 10.0 * t.tol_feas {
                Classification::Mismatch
            } else {
                Classification::Inconclusive
            }
        }
    };
    Ok(CertifyRecord {
        id,
        sum_zero_route: sum_zero,
        lhs: rep.lhs,
        slack_upper: rep.slack_upper,
        classification,
        certificate: cert,
    })
}

fn run_certify(args: CertifyArgs) -> CliResult<i32> {
    let t = args.tol.resolve()?;
    let records: Vec<CertifyRecord> = match &args.input {
        Some(path) => {
            let instances: Vec<Instance> = read_json(path)?;
            instances
                .iter()
                .enumerate()
                .map(|(i, inst)| certify_instance(i.to_string(), inst, &t))
                .collect::<CliResult<Vec<_>>>()?
        }
        None => args
            .sweep
            .run_ordered(|seed| {
                let inst = forge(&args.sweep.spec_for(seed), &t).map_err(core_err)?;
                certify_instance(seed.to_string(), &inst, &t)
            })?
            .into_iter()
            .map(|(_, r)| r)
            .collect(),
    };

    let bytes = to_json_bytes(&records)?;
    write_output(&args.out, &bytes)?;
    let any_mismatch = records
        .iter()
        .any(|r| r.classification == Classification::Mismatch);
    let any_inconclusive = records
        .iter()
        .any(|r| r.classification == Classification::Inconclusive);
    Ok(if any_mismatch {
        EXIT_VIOLATION
    } else if any_inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        0
    })
}

fn run_verify(args: VerifyArgs) -> CliResult<i32> {
    let t = args.tol.resolve()?;
    let inst: Instance = read_json(&args.input)?;
    let cert: Certificate = read_json(&args.cert)?;
    let check = match verify_certificate(&inst, &cert, &t) {
        Ok(check) => check,
        // A state of the wrong dimension is an invalid certificate, not a
        // malformed input.
        Err(Error::DimensionMismatch(_)) => dwmod_core::CertificateCheck {
            valid: false,
            residuals: Vec::new(),
        },
        Err(e) => return Err(core_err(e)),
    };
    let bytes = to_json_bytes(&check)?;
    write_output(&args.out, &bytes)?;
    Ok(if check.valid { 0 } else { EXIT_VIOLATION })
}

fn run_forge(args: ForgeCmdArgs) -> CliResult<i32> {
    let t = args.tol.resolve()?;
    let instances: Vec<Instance> = args
        .sweep
        .run_ordered(|seed| forge(&args.sweep.spec_for(seed), &t).map_err(core_err))?
        .into_iter()
        .map(|(_, inst)| inst)
        .collect();
    let bytes = to_json_bytes(&instances)?;
    write_output(&args.out, &bytes)?;
    Ok(0)
}

#[derive(Serialize)]
struct ReportSummary {
    files: usize,
    rows: usize,
    violations: usize,
    min_slack_upper: Option<f64>,
    median_slack_upper: Option<f64>,
    min_slack_lower: Option<f64>,
    median_slack_lower: Option<f64>,
}

fn median(sorted: &[f64]) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    })
}

fn run_report(args: ReportArgs) -> CliResult<i32> {
    let mut slack_upper = Vec::new();
    let mut slack_lower = Vec::new();
    let mut violations = 0usize;
    for path in &args.inputs {
        let mut rdr = csv::Reader::from_path(path)
            .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
        let headers = rdr
            .headers()
            .map_err(|e| input_err(format!("{}: {e}", path.display())))?
            .clone();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let (su, sl, vi) = match (col("slack_upper"), col("slack_lower"), col("violation")) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => {
                return Err(input_err(format!(
                    "{}: missing slack_upper/slack_lower/violation columns",
                    path.display()
                )))
            }
        };
        for record in rdr.records() {
            let record = record.map_err(|e| input_err(format!("{}: {e}", path.display())))?;
            let parse = |idx: usize| -> CliResult<f64> {
                record
                    .get(idx)
                    .ok_or_else(|| input_err("short CSV record"))?
                    .parse::<f64>()
                    .map_err(|e| input_err(format!("{}: {e}", path.display())))
            };
            slack_upper.push(parse(su)?);
            slack_lower.push(parse(sl)?);
            if record.get(vi) == Some("true") {
                violations += 1;
            }
        }
    }
    slack_upper.sort_by(f64::total_cmp);
    slack_lower.sort_by(f64::total_cmp);
    let summary = ReportSummary {
        files: args.inputs.len(),
        rows: slack_upper.len(),
        violations,
        min_slack_upper: slack_upper.first().copied(),
        median_slack_upper: median(&slack_upper),
        min_slack_lower: slack_lower.first().copied(),
        median_slack_lower: median(&slack_lower),
    };
    let bytes = to_json_bytes(&summary)?;
    write_output(&args.out, &bytes)?;
    Ok(0)
}

fn run_shiftcheck(args: ShiftArgs) -> CliResult<i32> {
    let trunc = args.trunc.unwrap_or(args.n * args.n);
    let ops = make_shift_family(args.n, trunc).map_err(core_err)?;
    let report = exhaustive_index_check(&ops).map_err(core_err)?;
    let clean = report.violations.is_empty();
    let bytes = to_json_bytes(&report)?;
    write_output(&args.out, &bytes)?;
    Ok(if clean { 0 } else { EXIT_VIOLATION })
}
