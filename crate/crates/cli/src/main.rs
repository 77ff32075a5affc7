//! `qenv`: validate channel files, inspect Choi matrices, and run the
//! environment searches from the command line.
//!
//! Output is JSON on stdout unless `--pretty` asks for a readable summary.
//! Exit status: 0 success, 1 domain failure, 2 usage or input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use qenv::depolarizing::solution_set_sweep;
use qenv::io::{verdict, write_sweep_csv, ChannelFile, DilationFile, SearchReport};
use qenv::search::{
    sampling_experiment, search_environment, two_pauli_infeasibility, DEFAULT_SEED, POLY_SYSTEM_FLOOR,
};
use qenv::{Channel, Dilation, Error, SearchConfig, DEFAULT_TOLERANCE};

#[derive(Parser, Debug)]
#[command(name = "qenv", version, about = "Quantum channels and the environments that implement them")]
struct Cli {
    /// Print a human-readable summary instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check trace preservation and complete positivity of a channel file.
    Validate {
        path: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Choi matrix, spectrum, rank and extremality of a channel or dilation file.
    Report {
        path: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// Also write a Stinespring dilation of the channel to this path.
        #[arg(long)]
        dilation_out: Option<PathBuf>,
    },
    /// Search for a dilation with a d-dimensional mixed environment.
    Search {
        path: PathBuf,
        #[arg(long = "dim")]
        dim: usize,
        #[command(flatten)]
        budget: Budget,
        /// Success threshold on the squared Choi distance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        seed: SeedArg,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Point cloud of the qubit-environment depolarizing family as CSV.
    Sweep {
        #[arg(long)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Residual minimization of the two-Pauli polynomial system.
    TwoPauli {
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Fraction of Haar-random qubit channels reproduced with a d-dimensional environment.
    Sample {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long = "dim", default_value_t = 2)]
        dim: usize,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        seed: SeedArg,
    },
}

#[derive(Args, Debug)]
struct Budget {
    #[arg(long, default_value_t = 200)]
    restarts: usize,
    #[arg(long, default_value_t = 20_000)]
    max_evals: usize,
}

#[derive(Args, Debug)]
struct SeedArg {
    /// Base seed; defaults to $QENV_SEED, then to a fixed value.
    #[arg(long, env = "QENV_SEED")]
    seed: Option<u64>,
}

impl SeedArg {
    fn value(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

/// A failed run: what to say and which exit status to use.
#[derive(Debug)]
enum Failure {
    Domain(String),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Usage(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Usage(m) => m,
        }
    }
}

/// Malformed input is a usage problem; everything else the library rejects
/// is a domain failure.
impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Format(_) | Error::Indivisible { .. } | Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

/// What a subcommand produced: the text to print and its exit status.
struct Outcome {
    text: String,
    code: u8,
}

fn emit<S: Serialize>(pretty: bool, value: &S, summary: impl FnOnce() -> String, code: u8) -> Outcome {
    let text = if pretty { summary() } else { serde_json::to_string(value).expect("reports serialize") };
    Outcome { text, code }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn config(budget: &Budget, tol: f64, seed: u64) -> SearchConfig {
    SearchConfig { restarts: budget.restarts, max_evals_per_restart: budget.max_evals, success_tol: tol, seed, ..SearchConfig::default() }
}

fn validate(path: &Path, tol: f64, pretty: bool) -> Result<Outcome, Failure> {
    let ch = ChannelFile::parse(&read(path)?)?.to_channel_unvalidated()?;
    let tp_residual = ch.tp_residual();
    let choi = ch.choi();
    let min_eig = choi.min_eigenvalue();
    let tp = tp_residual <= tol;
    let cp = min_eig >= -tol;
    let rank = choi.rank(tol);
    let extremal = rank <= ch.out_dim();
    let report = json!({
        "tp_residual": tp_residual,
        "min_choi_eigenvalue": min_eig,
        "kraus_rank": rank,
        "extremal": extremal,
        "trace_preserving": tp,
        "completely_positive": cp,
    });
    let code = if tp && cp { 0 } else { 1 };
    Ok(emit(
        pretty,
        &report,
        || {
            format!(
                "trace-preservation residual  {tp_residual:.3e} ({})\n\
                 minimum Choi eigenvalue      {min_eig:.3e} ({})\n\
                 Kraus rank                   {rank}\n\
                 extremal (rank <= {})         {extremal}",
                if tp { "ok" } else { "FAIL" },
                if cp { "ok" } else { "FAIL" },
                ch.out_dim()
            )
        },
        code,
    ))
}

fn report(path: &Path, tol: f64, dilation_out: Option<&Path>, pretty: bool) -> Result<Outcome, Failure> {
    let text = read(path)?;
    let (source, ch): (&str, Channel) = match ChannelFile::parse(&text) {
        Ok(file) => ("channel", file.to_channel(tol)?),
        Err(channel_err) => match DilationFile::parse(&text) {
            Ok(file) => ("dilation", file.to_model()?.induced_channel().to_channel_unvalidated()?),
            Err(_) => return Err(channel_err.into()),
        },
    };
    let choi = ch.choi();
    let eigen = choi.eigen();
    let rank = choi.rank(tol);
    let extremal = rank <= ch.out_dim();
    if let Some(out) = dilation_out {
        let model = Dilation::stinespring(&ch)?;
        write(out, &DilationFile::from_model(&model).to_json())?;
    }
    let value = json!({
        "source": source,
        "in_dim": ch.in_dim(),
        "out_dim": ch.out_dim(),
        "tp_residual": ch.tp_residual(),
        "choi": qenv::io::matrix_to_rows(choi.matrix()),
        "choi_eigenvalues": eigen.eigenvalues,
        "kraus_rank": rank,
        "extremal": extremal,
    });
    Ok(emit(
        pretty,
        &value,
        || {
            let eigs: Vec<String> = eigen.eigenvalues.iter().map(|l| format!("{l:.6}")).collect();
            format!(
                "{source} {}->{}\nChoi eigenvalues  {}\nKraus rank        {rank}\nextremal          {extremal}",
                ch.in_dim(),
                ch.out_dim(),
                eigs.join(" ")
            )
        },
        0,
    ))
}

fn search(
    path: &Path,
    dim: usize,
    cfg: &SearchConfig,
    out: Option<&Path>,
    pretty: bool,
) -> Result<Outcome, Failure> {
    let ch = ChannelFile::parse(&read(path)?)?.to_channel(DEFAULT_TOLERANCE)?;
    let result = search_environment(&ch, dim, cfg)?;
    let report = SearchReport::new(&ch, dim, cfg, &result);
    let code = if result.success { 0 } else { 1 };
    if let Some(out) = out {
        write(out, &report.to_json())?;
    }
    let mut outcome = emit(
        pretty,
        &report,
        || {
            format!(
                "environment dimension {dim}: {} (best squared Choi distance {:.3e}, {} restarts, {} evaluations)",
                report.verdict,
                report.best_residual,
                report.per_restart.len(),
                report.evals_used
            )
        },
        code,
    );
    if out.is_some() && !pretty {
        outcome.text = json!({"verdict": report.verdict, "best_residual": report.best_residual}).to_string();
    }
    Ok(outcome)
}

fn sweep(resolution: usize, out: &Path, pretty: bool) -> Result<Outcome, Failure> {
    let points = solution_set_sweep(resolution)?;
    let file = fs::File::create(out).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", out.display())))?;
    write_sweep_csv(&points, std::io::BufWriter::new(file))
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", out.display())))?;
    let value = json!({"rows": points.len(), "out": out.display().to_string()});
    Ok(emit(pretty, &value, || format!("wrote {} points to {}", points.len(), out.display()), 0))
}

fn two_pauli(cfg: &SearchConfig, pretty: bool) -> Result<Outcome, Failure> {
    let result = two_pauli_infeasibility(cfg)?;
    let threshold = POLY_SYSTEM_FLOOR / 2.0;
    let above = result.best_residual > threshold;
    let value = json!({
        "best_residual": result.best_residual,
        "reference_floor": POLY_SYSTEM_FLOOR,
        "threshold": threshold,
        "above_threshold": above,
        "verdict": "evidence",
        "evals_used": result.evals_used,
        "per_restart": result.per_restart_residuals,
        "best_point": result.best_unitary_params,
    });
    Ok(emit(
        pretty,
        &value,
        || {
            format!(
                "best residual {:.4e} over {} restarts; reference floor {:.4e}, threshold {:.4e}: {}",
                result.best_residual,
                result.per_restart_residuals.len(),
                POLY_SYSTEM_FLOOR,
                threshold,
                if above { "no solution found (evidence)" } else { "residual below threshold" }
            )
        },
        if above { 0 } else { 1 },
    ))
}

fn sample(count: usize, dim: usize, cfg: &SearchConfig, pretty: bool) -> Result<Outcome, Failure> {
    let report = sampling_experiment(count, dim, cfg)?;
    Ok(emit(
        pretty,
        &report,
        || {
            let hits = report.samples.iter().filter(|s| s.success).count();
            let mut lines = vec![format!(
                "{hits} of {count} sampled channels reproduced with a {dim}-dimensional environment (fraction {:.4})",
                report.fraction
            )];
            for s in &report.samples {
                lines.push(format!("  seed {:>20}  {:<11}  {:.3e}", s.seed, verdict(s.success), s.best_residual));
            }
            lines.join("\n")
        },
        0,
    ))
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let pretty = cli.pretty;
    match cli.command {
        Command::Validate { path, tol } => validate(&path, tol, pretty),
        Command::Report { path, tol, dilation_out } => report(&path, tol, dilation_out.as_deref(), pretty),
        Command::Search { path, dim, budget, tol, seed, out } => {
            search(&path, dim, &config(&budget, tol, seed.value()), out.as_deref(), pretty)
        }
        Command::Sweep { resolution, out } => sweep(resolution, &out, pretty),
        Command::TwoPauli { budget, seed } => {
            two_pauli(&config(&budget, SearchConfig::default().success_tol, seed.value()), pretty)
        }
        Command::Sample { count, dim, budget, seed } => {
            sample(count, dim, &config(&budget, SearchConfig::default().success_tol, seed.value()), pretty)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome { text, code }) => {
            println!("{text}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
