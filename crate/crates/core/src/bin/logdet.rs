use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use logdet::bench::{InputSource, RunConfig, DEFAULT_EXACT_BUDGET};
use logdet::report::write_report;
use logdet::{
    cmd_validate, emit_report, run_benchmark, select_parameters, EstimatorConfig, ExactMethod,
    Family, GeneratorSpec, LogDetError, OutputFormat,
};

#[derive(Parser)]
#[command(
    name = "logdet",
    version,
    about = "Randomized log-determinant estimation and benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate log det of a loaded or generated matrix and report.
    Run(RunArgs),
    /// Check a Matrix Market file.
    Validate { file: PathBuf },
    /// Series length and trace accuracy for a condition number.
    Params {
        #[arg(long)]
        kappa: f64,
        #[arg(long = "target-eps")]
        target_eps: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExactArg {
    Cholesky,
    Eig,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(clap::Args)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "gen"])))]
struct RunArgs {
    /// Matrix Market file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Generator family: dense, dense_dd or sparse_dd.
    #[arg(long)]
    gen: Option<Family>,
    #[arg(long, requires = "gen")]
    n: Option<usize>,
    /// Target nonzeros for sparse_dd.
    #[arg(long, requires = "gen")]
    nnz: Option<usize>,
    /// Series terms.
    #[arg(long)]
    m: usize,
    /// Comma-separated list of m values; overrides --m.
    #[arg(long = "sweep-m", value_delimiter = ',')]
    sweep_m: Option<Vec<usize>>,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// Power iterations (default ceil(log2(4n))).
    #[arg(long)]
    t: Option<usize>,
    /// Power-method repetitions.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Probe count (default derived from --eps and --delta).
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "cholesky")]
    exact: ExactArg,
    /// Exact-baseline memory budget in bytes.
    #[arg(long = "exact-budget", default_value_t = DEFAULT_EXACT_BUDGET)]
    exact_budget: u64,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, env = "LOGDET_THREADS")]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Report path (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(err: &LogDetError) -> u8 {
    match err {
        LogDetError::InvalidParameter { .. } => 2,
        LogDetError::NotPositiveDefinite { .. }
        | LogDetError::Numerical(_)
        | LogDetError::ShiftTooSmall { .. }
        | LogDetError::DiagnosticsMissing => 4,
        _ => 3,
    }
}

fn run(args: RunArgs) -> logdet::Result<()> {
    let input = match (args.input, args.gen) {
        (Some(path), _) => InputSource::MatrixMarket(path),
        (None, Some(family)) => InputSource::Generated(GeneratorSpec {
            family,
            n: args.n.ok_or_else(|| LogDetError::InvalidParameter {
                name: "n",
                reason: "--gen requires --n".into(),
            })?,
            nnz_target: args.nnz,
            seed: args.seed,
        }),
        (None, None) => unreachable!("clap enforces one input source"),
    };
    let estimator = EstimatorConfig {
        delta: args.delta,
        t: args.t,
        power_repetitions: args.reps,
        p_override: args.p,
        seed: args.seed,
        ..EstimatorConfig::new(args.m, args.eps)
    };
    let config = RunConfig {
        exact: match args.exact {
            ExactArg::Cholesky => Some(ExactMethod::Cholesky),
            ExactArg::Eig => Some(ExactMethod::Eig),
            ExactArg::None => None,
        },
        exact_budget_bytes: args.exact_budget,
        repeats: args.repeats,
        sweep: args.sweep_m,
        threads: args.threads,
        ..RunConfig::new(input, estimator)
    };
    let outcome = run_benchmark(&config)?;
    if let Some(reason) = &outcome.exact_error {
        eprintln!("exact baseline unavailable: {reason}");
    }
    for f in &outcome.failures {
        eprintln!("m={} repeat={} failed: {}", f.m, f.repeat, f.message);
    }
    let format = match args.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    match args.out {
        Some(path) => emit_report(&outcome.records, format, path),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_report(&outcome.records, format, &mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Validate { file } => cmd_validate(&file).map(|report| println!("{report}")),
        Command::Params { kappa, target_eps } => select_parameters(kappa, target_eps).map(|s| {
            println!("m: {}", s.m);
            println!("epsilon: {}", s.epsilon);
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
