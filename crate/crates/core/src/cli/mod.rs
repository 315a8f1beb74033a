//! Command-line front end: `upblab <group> <command>`.

pub mod report;
pub mod statefile;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::constructions::{
    build_complement_nupb, build_cupb_bundle, build_npt_nupb_2x3, build_three_qubit_bundle,
};
use crate::discrimination::{many_copy_certificate, three_qubit_report};
use crate::error::Error;
use crate::feasibility::{
    add_solver_agreement, feasibility_certificate, ppt_povm_two_state,
    structural_infeasibility_cupb, validate_povm, FeasibilityOptions, FeasibilityResult, PovmPair,
};
use crate::linalg::{ComplexMatrix, DimVec, C64};
use crate::states::{orthogonal_complement, parse_cut, Bipartition, PureState, PPT_TOL};
use crate::verify::{
    ppt_certificate, sample_npt_subspace, verify_cupb_upb, verify_ppt_uncompletable,
    verify_product_basis, verify_upb, Certificate, CertificateKind, Check, SeesawOptions, Status,
};

use report::{render_product, RunReport};
use statefile::{format_decimal, StateFile, StateKind};

/// Environment variable overriding the default seed.
pub const SEED_ENV: &str = "UPBLAB_SEED";

/// Tolerance on `sum a_i^2 - 1` below which Schmidt input is rescaled.
pub const SCHMIDT_NORM_TOL: f64 = 1e-6;

const NPT_SAMPLES: usize = 1000;

#[derive(Debug, Parser)]
#[command(name = "upblab", version, about = "Unextendible product bases: construction and verification")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Seed for seesaw restarts and sampling [default: $UPBLAB_SEED or 1]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Seesaw restarts
    #[arg(long, global = true, default_value_t = 200)]
    pub restarts: usize,
    /// Residual tolerance of the POVM solver, or the PPT tolerance for `check ppt`
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Print the machine-readable run report
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Nonorthogonal UPBs from entangled pure states
    #[command(subcommand)]
    Nupb(NupbCommand),
    /// Built-in constructions with their full verification
    #[command(subcommand)]
    Demo(DemoCommand),
    /// Certificates about pairs of states
    #[command(subcommand)]
    Certify(CertifyCommand),
    /// Entanglement tests on state files
    #[command(subcommand)]
    Check(CheckCommand),
}

#[derive(Debug, Subcommand)]
pub enum NupbCommand {
    /// Product basis of the complement of sum_i a_i |i>|i>
    Build {
        /// Local dimensions
        #[arg(long, num_args = 2, value_names = ["D1", "D2"], required = true)]
        dims: Vec<usize>,
        /// Comma-separated Schmidt coefficients, squares summing to 1
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        schmidt: Vec<f64>,
        /// Write the basis here and print a report; otherwise the basis goes to stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a product basis file
    Verify {
        file: PathBuf,
        /// Pure state whose complement the basis should span
        #[arg(long)]
        psi: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum DemoCommand {
    /// The 20-state UPB in 5x5 and its PPT-POVM discrimination
    Cupb,
    /// Three-qubit states from the Shifts UPB
    ThreeQubit,
    /// A product basis whose complement is an NPT subspace in 2x3
    #[command(name = "npt-2x3")]
    Npt2x3,
}

#[derive(Debug, Subcommand)]
pub enum CertifyCommand {
    /// Many-copy indistinguishability of a pure state and a mixed state
    ManyCopy {
        #[arg(long)]
        psi: PathBuf,
        #[arg(long)]
        rho: PathBuf,
        /// Number of copies to certify
        #[arg(long, default_value_t = 1)]
        copies: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Partial-transpose test of a pure, density or subspace file
    Ppt {
        file: PathBuf,
        /// Parties on side A, e.g. "0|1,2" or "0"
        #[arg(long)]
        cut: String,
    },
}

/// Why a command stopped before producing a report.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, unreadable or malformed files. Exit 1.
    Usage(String),
    /// Inputs violating a numeric invariant. Exit 4.
    Invalid(Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Invalid(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(s) => f.write_str(s),
            Failure::Invalid(e) => write!(f, "{e}"),
        }
    }
}

/// What a command hands back: a report, or raw text for stdout.
pub enum Output {
    Report(RunReport),
    Raw { text: String, exit_code: i32 },
}

/// Runs with the process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(Output::Report(r)) => {
            let text = if cli.global.json { r.to_json() } else { r.to_text() };
            let _ = out.write_all(text.as_bytes());
            r.exit_code
        }
        Ok(Output::Raw { text, exit_code }) => {
            let _ = out.write_all(text.as_bytes());
            exit_code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            f.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Output, Failure> {
    let seed = resolve_seed(cli.global.seed)?;
    let seesaw = SeesawOptions {
        restarts: cli.global.restarts,
        seed,
        ..SeesawOptions::default()
    };
    if seesaw.restarts == 0 {
        return Err(Failure::Usage("--restarts must be positive".into()));
    }
    if let Some(t) = cli.global.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Failure::Usage(format!("--tol must be positive, got {t}")));
        }
    }
    let mut report = match &cli.command {
        Command::Nupb(NupbCommand::Build { dims, schmidt, out }) => {
            return nupb_build(dims, schmidt, out.as_deref());
        }
        Command::Nupb(NupbCommand::Verify { file, psi }) => nupb_verify(file, psi.as_deref(), &seesaw)?,
        Command::Demo(DemoCommand::Cupb) => demo_cupb(cli.global.tol)?,
        Command::Demo(DemoCommand::ThreeQubit) => demo_three_qubit(&seesaw)?,
        Command::Demo(DemoCommand::Npt2x3) => demo_npt(&seesaw)?,
        Command::Certify(CertifyCommand::ManyCopy { psi, rho, copies }) => {
            certify_many_copy(psi, rho, *copies, &seesaw)?
        }
        Command::Check(CheckCommand::Ppt { file, cut }) => {
            check_ppt(file, cut, cli.global.tol.unwrap_or(PPT_TOL))?
        }
    };
    report.param("seed", seed);
    report.param("restarts", seesaw.restarts);
    if let Some(t) = cli.global.tol {
        report.param("tol", format_decimal(t));
    }
    Ok(Output::Report(report.finish()))
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(SeesawOptions::default().seed),
    }
}

fn read_input(path: &Path, report: &mut RunReport) -> Result<StateFile, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    report.input(&path.display().to_string(), &bytes);
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| Failure::Usage(format!("{}: not UTF-8: {e}", path.display())))?;
    StateFile::parse(text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn usage_on_cut(e: Error) -> Failure {
    match e {
        Error::InvalidBipartition(s) => Failure::Usage(format!("invalid cut: {s}")),
        other => Failure::Invalid(other),
    }
}

/// `sum_i a_i |i>|i>` from CLI coefficients, rescaled when nearly normalized.
pub fn schmidt_state(dims: &[usize], coefficients: &[f64]) -> Result<PureState, Failure> {
    let &[d1, d2] = dims else {
        return Err(Failure::Usage("--dims takes two dimensions".into()));
    };
    let dims = DimVec::bipartite(d1, d2).map_err(|e| Failure::Usage(e.to_string()))?;
    if coefficients.len() > d1.min(d2) {
        return Err(Failure::Usage(format!(
            "{} Schmidt coefficients for dims {d1} x {d2}",
            coefficients.len()
        )));
    }
    if let Some(a) = coefficients.iter().find(|a| !a.is_finite() || **a < 0.0) {
        return Err(Failure::Invalid(Error::InvalidState(format!(
            "Schmidt coefficient {a} is not a nonnegative number"
        ))));
    }
    let sum: f64 = coefficients.iter().map(|a| a * a).sum();
    if (sum - 1.0).abs() >= SCHMIDT_NORM_TOL {
        return Err(Failure::Invalid(Error::InvalidState(format!(
            "sum of squared Schmidt coefficients is {sum}, not 1"
        ))));
    }
    let scale = sum.sqrt().recip();
    let mut amps = vec![C64::new(0.0, 0.0); d1 * d2];
    for (i, a) in coefficients.iter().enumerate() {
        amps[i * d2 + i] = C64::new(a * scale, 0.0);
    }
    Ok(PureState::new(dims, amps)?)
}

fn nupb_build(dims: &[usize], schmidt: &[f64], out: Option<&Path>) -> Result<Output, Failure> {
    let psi = schmidt_state(dims, schmidt)?;
    let basis = build_complement_nupb(&psi)?;
    let cert = verify_product_basis(&basis, &orthogonal_complement(&psi)?)?;
    let mut file = StateFile::from_product_basis(&basis);
    let normalized: Vec<String> = (0..schmidt.len())
        .map(|i| format_decimal(psi.amplitudes()[i * dims[1] + i].re))
        .collect();
    file.meta.insert("schmidt".into(), normalized.join(","));
    let text = file.to_json();
    let Some(path) = out else {
        return Ok(Output::Raw {
            exit_code: cert.exit_code(),
            text,
        });
    };
    fs::write(path, &text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut report = RunReport::new("nupb build");
    report.param("dims", format!("{} {}", dims[0], dims[1]));
    report.param("schmidt", normalized.join(","));
    report.line(format!(
        "wrote {} product states to {} (complement dimension {})",
        basis.len(),
        path.display(),
        basis.claimed_complement_dim()
    ));
    for (i, s) in basis.states().iter().enumerate() {
        report.line(format!("  state {} [{i}]: {}", i + 1, render_product(s)));
    }
    report.details = json!({
        "states": basis.len(),
        "orthogonal": basis.orthogonal(),
        "sha256": report::sha256_hex(text.as_bytes()),
    });
    report.push(cert);
    Ok(Output::Report(report.finish()))
}

fn nupb_verify(file: &Path, psi: Option<&Path>, seesaw: &SeesawOptions) -> Result<RunReport, Failure> {
    let mut report = RunReport::new("nupb verify");
    let basis = read_input(file, &mut report)?.to_product_basis()?;
    let expected = match psi {
        Some(p) => orthogonal_complement(&read_input(p, &mut report)?.to_pure()?)?,
        None => basis.span()?,
    };
    report.line(format!(
        "{} product states in dims {} ({}), claimed complement dimension {}",
        basis.len(),
        basis.dims(),
        if basis.orthogonal() { "orthogonal" } else { "nonorthogonal" },
        basis.claimed_complement_dim()
    ));
    report.details = json!({
        "states": basis.len(),
        "dims": basis.dims().as_slice(),
        "orthogonal": basis.orthogonal(),
        "claimed_complement_dim": basis.claimed_complement_dim(),
    });
    report.push(verify_product_basis(&basis, &expected)?);
    report.push(verify_upb(&basis, seesaw)?);
    Ok(report)
}

/// Certificate form of a POVM validation, with the detection conditions
/// `Tr(target E) = 1`, `Tr(other E) = 0`.
pub fn povm_certificate(
    pair: &PovmPair,
    dims: &DimVec,
    cut: &Bipartition,
    target: &ComplexMatrix,
    other: &ComplexMatrix,
) -> Result<Certificate, Error> {
    let v = validate_povm(pair, dims, cut)?;
    let mut cert = Certificate::new(CertificateKind::PptPovm);
    cert.push(Check::at_most("hermiticity_defect", v.hermiticity_defect, 1e-10));
    cert.push(Check::at_least("min_eigenvalue_e", v.min_eigenvalue_e, -1e-10));
    cert.push(Check::at_least(
        "min_eigenvalue_complement",
        v.min_eigenvalue_complement,
        -1e-10,
    ));
    cert.push(Check::at_least("min_pt_eigenvalue_e", v.min_pt_eigenvalue_e, -1e-10));
    cert.push(Check::at_least(
        "min_pt_eigenvalue_complement",
        v.min_pt_eigenvalue_complement,
        -1e-10,
    ));
    cert.push(Check::at_most("completeness_gap", v.completeness_gap, 1e-12));
    cert.push(Check::close_to(
        "target_detection",
        target.trace_product(&pair.element_e).re,
        1.0,
        1e-12,
    ));
    cert.push(Check::close_to(
        "other_false_alarm",
        other.trace_product(&pair.element_e).re,
        0.0,
        1e-12,
    ));
    Ok(cert.conclude(Status::Proven))
}

fn solver_summary(r: &FeasibilityResult) -> serde_json::Value {
    json!({
        "status": r.status,
        "cycles": r.iterations,
        "best_objective": r.best_objective,
        "final_objective": r.final_objective,
        "final_residual": r.residuals.last().copied(),
    })
}

fn demo_cupb(tol: Option<f64>) -> Result<RunReport, Failure> {
    let mut report = RunReport::new("demo cupb");
    let bundle = build_cupb_bundle()?;
    let dims = bundle.cupb.dims().clone();
    let cut = Bipartition::first_vs_rest(2)?;
    let span = bundle.cupb.span()?;
    let complement = span.complement()?;
    let opts = FeasibilityOptions {
        tol: tol.unwrap_or(FeasibilityOptions::default().tol),
        ..FeasibilityOptions::default()
    };

    report.push(verify_product_basis(&bundle.cupb, &span)?);
    report.push(verify_cupb_upb(&bundle)?);
    report.push(verify_ppt_uncompletable(&span, &bundle.rho1, &bundle.rho2)?);
    let pair = PovmPair::from_effect(bundle.p_prime.clone())?;
    report.push(povm_certificate(
        &pair,
        &dims,
        &cut,
        bundle.rho2.matrix(),
        bundle.rho1.matrix(),
    )?);

    let feasible = ppt_povm_two_state(&bundle.rho2, &bundle.rho1, &cut, &opts)?;
    report.push(feasibility_certificate(&feasible, &bundle.rho2, &bundle.rho1));
    let infeasible = ppt_povm_two_state(&bundle.rho3, &bundle.rho1, &cut, &opts)?;
    let mut structural = structural_infeasibility_cupb(&bundle)?;
    add_solver_agreement(&mut structural, &infeasible);
    let structural_status = structural.status;
    report.push(structural);

    report.param("solver_budget", opts.budget);
    report.param("solver_tol", format_decimal(opts.tol));
    report.line(format!(
        "cUPB: {} product states in 5x5, complement dimension {}",
        bundle.cupb.len(),
        complement.dim()
    ));
    report.line("chi = (|4>|4> - |5>|5>)/sqrt2, internal |3>|3>, |4>|4>");
    report.line(format!(
        "rho2 vs rho1: solver {:?} after {} cycles",
        feasible.status, feasible.iterations
    ));
    report.line(format!(
        "rho3 vs rho1: infeasible {structural_status:?}, solver {:?} after {} cycles",
        infeasible.status, infeasible.iterations
    ));
    report.details = json!({
        "cardinality": bundle.cupb.len(),
        "complement_dimension": complement.dim(),
        "chi": {"label": "(|44> - |55>)/sqrt2", "internal": "(|33> - |44>)/sqrt2"},
        "rho2_vs_rho1": {
            "verdict": feasible.status,
            "solver": solver_summary(&feasible),
        },
        "rho3_vs_rho1": {
            "verdict": "INFEASIBLE",
            "infeasibility": structural_status,
            "solver": solver_summary(&infeasible),
        },
    });
    Ok(report)
}

fn demo_three_qubit(seesaw: &SeesawOptions) -> Result<RunReport, Failure> {
    let mut report = RunReport::new("demo three-qubit");
    let bundle = build_three_qubit_bundle()?;
    let r = three_qubit_report(&bundle, seesaw)?;
    for (i, s) in bundle.oupb.states().iter().enumerate() {
        report.line(format!("  UPB state {} [{i}]: {}", i + 1, render_product(s)));
    }
    report.line(format!(
        "fragile indistinguishability: {}; bipartite distinguishability: {} ({})",
        r.fragile_indistinguishability,
        r.bipartite_distinguishability.statement,
        "PAPER-CITED"
    ));
    report.details = json!({
        "full_separation_certified": r.full_separation_certified,
        "ppt_tables_pass": r.ppt_tables_pass,
        "fragile_indistinguishability": r.fragile_indistinguishability,
        "bipartite_distinguishability": r.bipartite_distinguishability,
    });
    for c in r.certificates() {
        report.push(c.clone());
    }
    Ok(report)
}

fn demo_npt(seesaw: &SeesawOptions) -> Result<RunReport, Failure> {
    let mut report = RunReport::new("demo npt-2x3");
    let (basis, npt) = build_npt_nupb_2x3()?;
    let cut = Bipartition::first_vs_rest(2)?;
    for (i, s) in basis.states().iter().enumerate() {
        report.line(format!("  state {} [{i}]: {}", i + 1, render_product(s)));
    }
    report.line("complement: span{|12>-|21>, |13>-|22>}, internal span{|01>-|10>, |02>-|11>}");
    report.details = json!({
        "states": basis.len(),
        "npt_subspace_dimension": npt.dim(),
        "samples": NPT_SAMPLES,
    });
    report.push(verify_product_basis(&basis, &npt.complement()?)?);
    report.push(verify_upb(&basis, seesaw)?);
    report.push(sample_npt_subspace(&npt, &cut, NPT_SAMPLES, seesaw.seed)?);
    Ok(report)
}

fn certify_many_copy(
    psi: &Path,
    rho: &Path,
    copies: usize,
    seesaw: &SeesawOptions,
) -> Result<RunReport, Failure> {
    let mut report = RunReport::new("certify many-copy");
    let psi = read_input(psi, &mut report)?.to_pure()?;
    let rho = read_input(rho, &mut report)?.to_density()?;
    let c = many_copy_certificate(&psi, &rho, copies, seesaw)?;
    report.line(format!("{} copies: {:?}", c.copies_checked, c.verdict));
    report.details = json!({"copies": c.copies_checked, "verdict": c.verdict});
    report.certificates = c.chain;
    Ok(report)
}

fn check_ppt(file: &Path, cut: &str, tol: f64) -> Result<RunReport, Failure> {
    let mut report = RunReport::new("check ppt");
    let f = read_input(file, &mut report)?;
    let (op, dims) = match f.kind {
        StateKind::Pure => {
            let p = f.to_pure()?;
            (p.projector(), p.dims().clone())
        }
        StateKind::Density => {
            let r = f.to_density()?;
            (r.matrix().clone(), r.dims().clone())
        }
        StateKind::Subspace => {
            let s = f.to_subspace()?;
            (s.projector(), s.dims().clone())
        }
        StateKind::ProductBasis => {
            return Err(Failure::Usage("check ppt takes a pure, density or subspace file".into()));
        }
    };
    let cut = parse_cut(cut, dims.parties()).map_err(usage_on_cut)?;
    report.param("cut", &cut);
    report.details = json!({"kind": f.kind, "dims": dims.as_slice()});
    report.push(ppt_certificate(&op, &dims, &cut, tol)?);
    Ok(report)
}
