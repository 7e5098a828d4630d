//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 when a maximum-entropy fit
//! did not converge (the best available spectrum is still printed). A
//! depolarization schedule that runs out before successive spectra agree is
//! not an error; it shows as `"extrapolation_converged": false`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::correlations::{
    ghz_state, spectrum_continuity_up_to, spectrum_full_rank_up_to, theorem3_spectrum,
    ContinuitySchedule, CorrelationSpectrum, GhzSpec, FULL_RANK_GATE,
};
use crate::error::Error;
use crate::io::{parse_state_json, spectrum_to_csv, spectrum_to_json};
use crate::maxent::SolverOptions;
use crate::qstate::{DensityMatrix, DEFAULT_DENSE_LIMIT};
use crate::stabilizer::{parse_generators, validate_group};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

/// Largest qubit count for `--verify` cross-checks.
pub const VERIFY_MAX_QUBITS: usize = 4;

#[derive(Debug, Parser)]
#[command(name = "irrcorr", version, about = "Irreducible multi-particle correlation spectra of qubit states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Numeric spectrum of a state read from a JSON file.
    Analyze(AnalyzeArgs),
    /// Exact spectrum of a stabilizer state given by its generators.
    Stabilizer(StabilizerArgs),
    /// Closed-form spectrum of a generalized GHZ state.
    Ghz(GhzArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Numeric,
    Continuity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Comma-separated, strictly decreasing depolarization strengths.
    #[arg(long, value_delimiter = ',')]
    pub eps_schedule: Option<Vec<f64>>,
    /// Solver tolerance on the dual gradient max-norm.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
    pub dense_limit: usize,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// JSON file holding a density matrix or a state vector.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    /// Only fit reconstructions up to this order.
    #[arg(long)]
    pub max_order: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct StabilizerArgs {
    /// Generators such as "+XXX,+ZZI,+IZZ".
    pub generators: String,
    /// Also run the continuity pipeline on the dense state (n <= 4).
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct GhzArgs {
    #[arg(short = 'n', long = "qubits")]
    pub n_qubits: usize,
    /// |alpha|^2, strictly between 0 and 1.
    #[arg(long)]
    pub alpha_sq: f64,
    /// Relative phase of the |1...1> amplitude.
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    /// Also run the continuity pipeline on the dense state (n <= 4).
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Reportable failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotConverged { .. } | Error::Diverged { .. } => EXIT_NOT_CONVERGED,
            _ => EXIT_INVALID,
        };
        Failure { code, message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INVALID, message: message.into() }
}

impl CommonArgs {
    fn solver(&self) -> Result<SolverOptions, Failure> {
        let mut opts = SolverOptions::default();
        if let Some(tol) = self.tol {
            if !(tol > 0.0) {
                return Err(invalid(format!("--tol must be positive, got {tol}")));
            }
            opts.tol = tol;
        }
        if let Some(max_iter) = self.max_iter {
            opts.max_iter = max_iter;
        }
        Ok(opts)
    }

    fn schedule(&self) -> Result<ContinuitySchedule, Failure> {
        match &self.eps_schedule {
            None => Ok(ContinuitySchedule::default()),
            Some(eps) => Ok(ContinuitySchedule::new(
                eps.clone(),
                ContinuitySchedule::default().convergence_tol(),
            )?),
        }
    }
}

/// Output document: the spectrum itself, or an object embedding it.
struct Report {
    spectrum: CorrelationSpectrum,
    json: Value,
    converged: bool,
}

fn emit(report: &Report, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report.json).unwrap()),
        Format::Csv => write!(out, "{}", spectrum_to_csv(&report.spectrum)),
    }
}

/// Runs a parsed command line, writing results to `out` and diagnostics to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (result, format) = match &cli.command {
        Command::Analyze(a) => (cmd_analyze(a), a.common.format),
        Command::Stabilizer(a) => (cmd_stabilizer(a), a.common.format),
        Command::Ghz(a) => (cmd_ghz(a), a.common.format),
    };
    match result {
        Ok(report) => {
            if let Err(e) = emit(&report, format, out) {
                let _ = writeln!(err, "error: cannot write output: {e}");
                return EXIT_INVALID;
            }
            if report.converged {
                EXIT_OK
            } else {
                let _ = writeln!(err, "warning: result did not converge");
                EXIT_NOT_CONVERGED
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            if f.code == EXIT_NOT_CONVERGED {
                let doc = json!({ "error": f.message, "converged": false });
                let _ = match format {
                    Format::Json => writeln!(out, "{doc}"),
                    Format::Csv => writeln!(out, "k,C_k,uncertainty"),
                };
            }
            f.code
        }
    }
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<Report, Failure> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| invalid(format!("cannot read {}: {e}", args.input.display())))?;
    let rho = parse_state_json(&text, args.common.dense_limit)?.into_density_matrix();
    let n = rho.n_qubits();
    let max_order = args.max_order.unwrap_or(n);
    if max_order == 0 || max_order > n {
        return Err(invalid(format!("--max-order {max_order} outside 1..={n}")));
    }
    let opts = args.common.solver()?;
    let sched = args.common.schedule()?;
    let full_rank = rho.min_eigenvalue() >= FULL_RANK_GATE;
    let spectrum = match (args.method, full_rank) {
        (Method::Numeric, false) => {
            return Err(invalid(format!(
                "method numeric needs a full-rank state (smallest eigenvalue below {FULL_RANK_GATE:e}); use --method continuity"
            )))
        }
        (Method::Numeric, true) | (Method::Auto, true) => spectrum_full_rank_up_to(&rho, &opts, max_order)?,
        _ => spectrum_continuity_up_to(&rho, &sched, &opts, max_order)?,
    };
    Ok(Report {
        json: spectrum_to_json(&spectrum),
        converged: spectrum.converged,
        spectrum,
    })
}

fn verification(
    rho: &DensityMatrix,
    exact: &CorrelationSpectrum,
    common: &CommonArgs,
) -> Result<(Value, bool), Failure> {
    let n = rho.n_qubits();
    let numeric = spectrum_continuity_up_to(rho, &common.schedule()?, &common.solver()?, n)?;
    let deviation = exact.max_deviation(&numeric);
    let converged = numeric.converged;
    Ok((json!({ "spectrum": spectrum_to_json(&numeric), "max_deviation": deviation }), converged))
}

fn check_verify_size(n: usize) -> Result<(), Failure> {
    if n > VERIFY_MAX_QUBITS {
        return Err(invalid(format!(
            "--verify runs the dense pipeline and supports at most {VERIFY_MAX_QUBITS} qubits, got {n}"
        )));
    }
    Ok(())
}

fn cmd_stabilizer(args: &StabilizerArgs) -> Result<Report, Failure> {
    let group = validate_group(&parse_generators(&args.generators)?)?;
    let n = group.n_qubits();
    if args.verify {
        check_verify_size(n)?;
    }
    let profile = group.rank_profile()?;
    let spectrum = profile.spectrum(n);
    let mut json = json!({
        "spectrum": spectrum_to_json(&spectrum),
        "rank_profile": serde_json::to_value(&profile).unwrap(),
    });
    let mut converged = true;
    if args.verify {
        let rho = group.to_density_matrix_with_limit(args.common.dense_limit)?;
        let (v, ok) = verification(&rho, &spectrum, &args.common)?;
        json["verification"] = v;
        converged = ok;
    }
    Ok(Report { spectrum, json, converged })
}

fn cmd_ghz(args: &GhzArgs) -> Result<Report, Failure> {
    let spec = GhzSpec::new(args.n_qubits, args.alpha_sq, args.phi)?;
    if args.verify {
        check_verify_size(spec.n_qubits())?;
    }
    let spectrum = theorem3_spectrum(&spec);
    let mut json = json!({ "spectrum": spectrum_to_json(&spectrum) });
    let mut converged = true;
    if args.verify {
        let rho = ghz_state(&spec).to_density_matrix();
        let (v, ok) = verification(&rho, &spectrum, &args.common)?;
        json["verification"] = v;
        converged = ok;
    }
    Ok(Report { spectrum, json, converged })
}
