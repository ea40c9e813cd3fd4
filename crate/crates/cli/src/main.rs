//! `qarrow` — simulate two-time Pauli correlator experiments, extract the
//! process behind a table, and decide which time labeling the data supports.
//!
//! Exit codes separate classification from failure: any verdict (FORWARD,
//! BACKWARD, EITHER, INCONSISTENT, INDETERMINATE) exits 0 with the report on
//! stdout; input and validation problems exit 2; tables whose extraction
//! residual shows they fit no state + linear-map pair exit 3.

mod spec;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qarrow_core::error::Error;
use qarrow_core::extract::{
    extract_choi_inverse, extract_choi_pseudoinverse, extract_choi_sylvester,
};
use qarrow_core::infer::{infer_arrow, ArrowReport, InferOptions};
use qarrow_core::pdm::{
    correlators_from_process, correlators_from_process_sampled, pdm_from_correlators,
    CorrelatorTable, Direction,
};

const EXIT_INPUT: u8 = 2;
const EXIT_CORRUPT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qarrow",
    version,
    about = "Arrow-of-time inference for two-time quantum correlator data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an experiment and write its complete correlator table.
    Simulate(SimulateArgs),
    /// Classify a correlator table as FORWARD / BACKWARD / EITHER /
    /// INCONSISTENT / INDETERMINATE.
    Infer(InferArgs),
    /// Extract the process CJ matrix from a table.
    Extract(ExtractArgs),
    /// Transpose the (σ_1, σ_2) index pairs of a table.
    Swap(SwapArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Initial state: |0>, mixed, rhoA:a=X, or file=PATH.
    #[arg(long)]
    state: String,
    /// Channel: identity, decohere, depolarize:p=X, unitary:file=PATH,
    /// or file=PATH.
    #[arg(long)]
    channel: String,
    /// Qubit count.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Sample each correlator from this many shots instead of reporting the
    /// exact value.
    #[arg(long)]
    shots: Option<u64>,
    /// RNG seed for --shots.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct InferArgs {
    /// Correlator table JSON file.
    table: PathBuf,
    /// PSD tolerance for the T1 eigenvalue tests (default 1e-9).
    #[arg(long)]
    psd_tol: Option<f64>,
    /// Shot count the table was sampled with; sets psd-tol = 3/sqrt(shots)
    /// unless --psd-tol is given.
    #[arg(long)]
    shots: Option<u64>,
    /// Emit the report as JSON (default is a human-readable summary).
    #[arg(long, conflicts_with = "pretty")]
    json: bool,
    /// Emit the human-readable summary (the default).
    #[arg(long)]
    pretty: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Fwd,
    Bwd,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Inverse,
    Pinv,
    Sylvester,
}

#[derive(Args)]
struct ExtractArgs {
    /// Correlator table JSON file.
    table: PathBuf,
    /// Which PDM to invert: fwd extracts M from R, bwd extracts M̄ from R̄.
    #[arg(long, value_enum, default_value_t = DirectionArg::Fwd)]
    direction: DirectionArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Sylvester)]
    method: MethodArg,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SwapArgs {
    /// Correlator table JSON file.
    table: PathBuf,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CorruptData(_) | Error::CorruptPdm(_) => EXIT_CORRUPT,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Infer(args) => infer(args),
        Command::Extract(args) => extract(args),
        Command::Swap(args) => swap(args),
    }
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let rho = spec::parse_state(&args.state, args.n).map_err(Failure::input)?;
    let ch = spec::parse_channel(&args.channel, args.n).map_err(Failure::input)?;
    let table = match args.shots {
        Some(shots) => correlators_from_process_sampled(&rho, &ch, shots, args.seed)?,
        None => correlators_from_process(&rho, &ch)?,
    };
    emit_json(&table, args.output.as_deref())
}

fn infer(args: InferArgs) -> Result<(), Failure> {
    let table = read_table(&args.table)?;
    let mut opts = InferOptions::default();
    if let Some(shots) = args.shots {
        if shots == 0 {
            return Err(Failure::input("--shots must be ≥ 1"));
        }
        opts.psd_tol = 3.0 / (shots as f64).sqrt();
    }
    if let Some(tol) = args.psd_tol {
        if !tol.is_finite() || tol < 0.0 {
            return Err(Failure::input("--psd-tol must be a nonnegative number"));
        }
        opts.psd_tol = tol;
    }
    let report = infer_arrow(&table, &opts)?;
    let text = if args.json {
        serde_json::to_string_pretty(&report).map_err(|e| Failure::input(e.to_string()))?
    } else {
        pretty_report(&report)
    };
    write_stdout(&text)
}

fn pretty_report(report: &ArrowReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "verdict: {}", verdict_name(report));
    match report.arrow_measure {
        Some(m) => {
            let _ = writeln!(out, "arrow measure A = F(Mbar^T1) - F(M^T1) = {m:.6e}");
        }
        None => {
            let _ = writeln!(out, "arrow measure: undefined (projected extraction)");
        }
    }
    let _ = writeln!(
        out,
        "min eig M^T1  = {:+.6e}   (forward reading)",
        report.min_eig_fwd_t1
    );
    let _ = writeln!(
        out,
        "min eig Mbar^T1 = {:+.6e}   (backward reading)",
        report.min_eig_bwd_t1
    );
    let _ = writeln!(
        out,
        "marginal ranks: rho {} / gamma {}",
        report.rank_rho, report.rank_gamma
    );
    let _ = writeln!(
        out,
        "extraction residuals: fwd {:.3e}, bwd {:.3e}",
        report.residual_fwd, report.residual_bwd
    );
    for note in &report.notes {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

fn verdict_name(report: &ArrowReport) -> &'static str {
    use qarrow_core::infer::Verdict::*;
    match report.verdict {
        Forward => "FORWARD",
        Backward => "BACKWARD",
        Either => "EITHER",
        Inconsistent => "INCONSISTENT",
        Indeterminate => "INDETERMINATE",
    }
}

fn extract(args: ExtractArgs) -> Result<(), Failure> {
    let table = read_table(&args.table)?;
    let direction = match args.direction {
        DirectionArg::Fwd => Direction::Forward,
        DirectionArg::Bwd => Direction::Backward,
    };
    let pdm = pdm_from_correlators(&table, direction);
    let multiplier = pdm.multiplier_marginal(&Default::default())?;
    let result = match args.method {
        MethodArg::Inverse => extract_choi_inverse(&pdm, &multiplier),
        MethodArg::Pinv => extract_choi_pseudoinverse(&pdm, &multiplier),
        MethodArg::Sylvester => extract_choi_sylvester(&pdm, &multiplier),
    };
    let result = match result {
        Err(Error::RankDeficient(msg)) => {
            return Err(Failure::input(format!(
                "the requested method needs a full-rank marginal: {msg}"
            )))
        }
        other => other?,
    };
    emit_json(&result, args.output.as_deref())
}

fn swap(args: SwapArgs) -> Result<(), Failure> {
    let table = read_table(&args.table)?;
    emit_json(&table.swapped(), args.output.as_deref())
}

fn read_table(path: &std::path::Path) -> Result<CorrelatorTable, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("table JSON {}: {e}", path.display())))
}

fn emit_json<T: serde::Serialize>(
    value: &T,
    output: Option<&std::path::Path>,
) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::input(format!("serialization: {e}")))?;
    match output {
        Some(path) => fs::write(path, text.as_bytes())
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?,
        None => {
            text.push('\n');
            write_stdout(&text)?;
        }
    }
    Ok(())
}

/// Writes to stdout, treating a closed pipe as a clean exit rather than a
/// panic (e.g. `qarrow infer t.json | head -1`).
fn write_stdout(text: &str) -> Result<(), Failure> {
    use std::io::Write;
    let mut out = std::io::stdout();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(Failure::input(format!("stdout: {e}"))),
    }
}
