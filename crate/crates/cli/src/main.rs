//! `rankone`: batch front-end for the left-invertibility diagnostics.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rankone_core::batch::{self, Report, RunOptions, SpecFile, Stages};

#[derive(Parser)]
#[command(name = "rankone", version, about = "Left-invertibility of rank-one perturbations of shifts and diagonal operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verdicts and closed-form consistency checks.
    Check(SpecArgs),
    /// Verdicts plus left-inverse construction and residuals.
    LeftInverse(SpecArgs),
    /// Verdicts plus diagonal solves and basis preimages.
    Solve(SpecArgs),
    /// Verdicts plus analyticity, power-formula and intertwining probes.
    Probe(SpecArgs),
    /// Dense-truncation cross-checks only.
    Oracle(SpecArgs),
    /// Every stage.
    Run(SpecArgs),
    /// Every stage on the bundled worked examples.
    Corpus(Flags),
}

#[derive(Args)]
struct SpecArgs {
    /// Spec file (JSON).
    spec: PathBuf,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct Flags {
    /// Zero threshold for c and r.
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    tolerance: f64,
    /// Probe RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Truncation sizes for the oracle.
    #[arg(long, value_delimiter = ',', default_value = "64,128,256", value_parser = clap::value_parser!(usize))]
    oracle_dims: Vec<usize>,
    /// Random probes per residual sweep.
    #[arg(long, default_value_t = 20)]
    probes: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Run only this problem id.
    #[arg(long)]
    problem: Option<String>,
    /// Omit per-problem timings so reports are byte-identical across runs.
    #[arg(long)]
    no_timing: bool,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(format!("expected a positive finite number, got {s:?}")),
    }
}

impl Flags {
    fn options(&self, stages: Stages) -> Result<RunOptions, String> {
        if self.oracle_dims.contains(&0) {
            return Err("--oracle-dims entries must be positive".into());
        }
        Ok(RunOptions {
            tolerance: self.tolerance,
            seed: self.seed,
            oracle_dims: self.oracle_dims.clone(),
            probes: self.probes,
            stages,
            problem: self.problem.clone(),
            timing: !self.no_timing,
        })
    }
}

fn only(f: impl FnOnce(&mut Stages)) -> Stages {
    let mut s = Stages::NONE;
    f(&mut s);
    s
}

fn load(path: &PathBuf) -> Result<SpecFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    batch::parse_spec(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Write errors (a closed pipe) are ignored; the exit code still reports
/// the outcome.
fn emit(report: &Report, format: Format) {
    let text = match format {
        Format::Json => report.to_json() + "\n",
        Format::Text => batch::render_text(report),
    };
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn execute(cli: Cli) -> Result<Report, String> {
    let (spec, flags, stages) = match &cli.command {
        Command::Check(a) => (Some(&a.spec), &a.flags, only(|s| s.verdict = true)),
        Command::LeftInverse(a) => (
            Some(&a.spec),
            &a.flags,
            only(|s| {
                s.verdict = true;
                s.left_inverse = true
            }),
        ),
        Command::Solve(a) => (
            Some(&a.spec),
            &a.flags,
            only(|s| {
                s.verdict = true;
                s.solve = true
            }),
        ),
        Command::Probe(a) => (
            Some(&a.spec),
            &a.flags,
            only(|s| {
                s.verdict = true;
                s.probe = true
            }),
        ),
        Command::Oracle(a) => (Some(&a.spec), &a.flags, only(|s| s.oracle = true)),
        Command::Run(a) => (Some(&a.spec), &a.flags, Stages::ALL),
        Command::Corpus(f) => (None, f, Stages::ALL),
    };
    let opts = flags.options(stages)?;
    let spec = match spec {
        Some(path) => load(path)?,
        None => batch::parse_spec(batch::REFERENCE_EXAMPLES).map_err(|e| e.to_string())?,
    };
    let report = batch::run(&spec, &opts).map_err(|e| e.to_string())?;
    emit(&report, flags.format);
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(report) if report.passed() => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
