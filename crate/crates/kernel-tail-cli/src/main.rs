//! Command-line front end: parses a model file, runs the analysis pipeline
//! for its family, and writes the singularity report (JSON or text), with
//! optional oracle verification and plot data for discrete walks.
//!
//! Exit codes: 0 success (warnings allowed), 2 validation error, 3 analysis
//! error, 4 oracle error or disagreement beyond tolerance. Failures print a
//! machine-readable JSON object on stderr. All configuration comes from
//! flags; no environment variables are consulted.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kernel_tail::model::Model;
use kernel_tail::report::{
    analyze, dump_kernel, plot_data, AnalysisOptions, SingularityReport, DEFAULT_TRUNCATION,
};
use kernel_tail::singularity::EPS_EQ_DEFAULT;
use kernel_tail::Error;

#[derive(Parser)]
#[command(
    name = "kernel-tail",
    version,
    about = "Exact tail asymptotics of two-dimensional stochastic networks \
             via the kernel method"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a model file and emit a singularity report.
    Analyze(AnalyzeArgs),
    /// Analyze with the verification oracle enabled (`analyze --verify`).
    Verify(AnalyzeArgs),
    /// Print the kernel and its coefficient polynomials as JSON.
    DumpKernel(DumpArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Model file (JSON with a `family` tag: rwqp, srbm, or fluid).
    #[arg(long)]
    model: PathBuf,

    /// Write the report to this path (atomically) instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,

    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Solve the truncated lattice chain and attach an oracle comparison
    /// block (discrete walks only).
    #[arg(long)]
    verify: bool,

    /// Truncation level of the verification oracle.
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    truncation: usize,

    /// Relative tolerance deciding when two singularity candidates coincide.
    #[arg(long = "eps-eq", default_value_t = EPS_EQ_DEFAULT)]
    eps_eq: f64,

    /// Write oracle plot data (CSV: n, pi_n0, predicted, ratio) to this
    /// path; requires --verify.
    #[arg(long = "plot-data")]
    plot_data: Option<PathBuf>,
}

#[derive(Args)]
struct DumpArgs {
    /// Model file (JSON with a `family` tag).
    #[arg(long)]
    model: PathBuf,

    /// Write the dump to this path (atomically) instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// A failure bound for stderr: machine-readable kind, human message, and
/// the process exit code.
struct Failure {
    kind: String,
    message: String,
    exit_code: i32,
}

impl Failure {
    fn io(message: String) -> Failure {
        Failure { kind: "io".into(), message, exit_code: 2 }
    }

    fn to_stderr_json(&self) -> String {
        serde_json::json!({
            "error": {
                "kind": self.kind,
                "message": self.message,
                "exit_code": self.exit_code,
            }
        })
        .to_string()
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure { kind: e.kind().into(), message: e.to_string(), exit_code: e.exit_code() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => run_analyze(args, false),
        Command::Verify(args) => run_analyze(args, true),
        Command::DumpKernel(args) => run_dump(args),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("{}", failure.to_stderr_json());
            ExitCode::from(failure.exit_code as u8)
        }
    }
}

fn read_model(path: &Path) -> Result<Model, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
    Model::from_json(&text).map_err(|e| Failure::from(Error::from(e)))
}

/// Write through a temp file in the destination directory and rename, so a
/// crash never leaves a truncated report behind.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let fail = |e: std::fmt::Arguments| Failure::io(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir).map_err(|e| fail(format_args!("{e}")))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| fail(format_args!("{e}")))?;
    tmp.persist(path).map_err(|e| fail(format_args!("{}", e.error)))?;
    Ok(())
}

fn emit(target: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match target {
        Some(path) => write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn run_analyze(args: AnalyzeArgs, force_verify: bool) -> Result<ExitCode, Failure> {
    let verify = args.verify || force_verify;
    if args.plot_data.is_some() && !verify {
        return Err(Failure {
            kind: "no_oracle".into(),
            message: "--plot-data needs oracle results; add --verify".into(),
            exit_code: 4,
        });
    }
    let model = read_model(&args.model)?;
    let opts = AnalysisOptions { eps_eq: args.eps_eq, truncation: args.truncation, verify };
    let report: SingularityReport = analyze(&model, &opts)?;

    let rendered = match args.format {
        Format::Json => report.to_json_string(),
        Format::Text => report.to_text(),
    };
    emit(args.report.as_deref(), &rendered)?;

    if let Some(path) = &args.plot_data {
        let csv = plot_data(&report).map_err(Error::from)?;
        write_atomic(path, &csv)?;
    }

    if let Some(ob) = report.oracle() {
        if !ob.agrees {
            let c_part = match ob.c_rel_error {
                Some(rel) => format!(", constant relative error {rel:e}"),
                None => String::new(),
            };
            return Err(Failure {
                kind: "oracle_disagreement".into(),
                message: format!(
                    "oracle fit disagrees with the predicted tail law (theta error \
                     {:e}, alpha error {:e}{c_part}); the report was still written",
                    ob.theta_error, ob.alpha_error
                ),
                exit_code: 4,
            });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_dump(args: DumpArgs) -> Result<ExitCode, Failure> {
    let model = read_model(&args.model)?;
    let doc = dump_kernel(&model)?;
    let mut rendered =
        serde_json::to_string_pretty(&doc).expect("kernel dump serializes");
    rendered.push('\n');
    emit(args.report.as_deref(), &rendered)?;
    Ok(ExitCode::SUCCESS)
}
