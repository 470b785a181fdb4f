use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ergodiclab::experiments::write_config_echo;
use ergodiclab::{describe, emit_csv, run_experiment, Error, ExperimentConfig, ExperimentKind};
use log::{info, warn};

// I/O, numerical failures and rows that break their bound.
const EXIT_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_BUDGET: u8 = 3;

/// Convergence experiments for Cesaro means of unitary powers.
#[derive(Parser, Debug)]
#[command(name = "ergodiclab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// (1/N) sum U^n against the fixed-space projection.
    MeanErgodic(RunArgs),
    /// Entangled multi-index means for a partition of the slots.
    Entangled(RunArgs),
    /// (1/N) sum U^n A U^-n against the conditional expectation.
    Adjoint(RunArgs),
    /// Single-index means with power exponents m_1..m_k.
    PowerChain(RunArgs),
    /// (1/N) sum U^n A U^n x in the cyclic model.
    Furstenberg(RunArgs),
    /// Trace pairing of the adjoint mean against a trace-class T.
    KdynTrace(RunArgs),
    /// Recurrence sums in the weakly mixing measure model.
    Recurrence(RunArgs),
    /// Multiple correlation means G_N of circle measures.
    MeasureGn(RunArgs),
}

impl Command {
    fn split(&self) -> (ExperimentKind, &RunArgs) {
        match self {
            Command::MeanErgodic(a) => (ExperimentKind::MeanErgodic, a),
            Command::Entangled(a) => (ExperimentKind::Entangled, a),
            Command::Adjoint(a) => (ExperimentKind::Adjoint, a),
            Command::PowerChain(a) => (ExperimentKind::PowerChain, a),
            Command::Furstenberg(a) => (ExperimentKind::Furstenberg, a),
            Command::KdynTrace(a) => (ExperimentKind::KdynTrace, a),
            Command::Recurrence(a) => (ExperimentKind::Recurrence, a),
            Command::MeasureGn(a) => (ExperimentKind::MeasureGn, a),
        }
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// CSV output. The config echo is written next to it.
    #[arg(long, required_unless_present = "describe")]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Print the resolved spectrum, resonance count and limit formula.
    #[arg(long)]
    describe: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } => EXIT_CONFIG,
        Error::Budget { .. } => EXIT_BUDGET,
        _ => EXIT_FAILED,
    }
}

fn run(kind: ExperimentKind, args: &RunArgs) -> Result<u8, Error> {
    let config = ExperimentConfig::from_path(&args.config)?;
    if config.kind != kind {
        return Err(Error::Config {
            path: "kind".into(),
            message: format!("config is for `{}`, subcommand is `{kind}`", config.kind),
        });
    }
    if args.describe {
        print!("{}", describe(&config)?);
    }
    let Some(out) = &args.out else {
        return Ok(0);
    };
    let report = run_experiment(&config)?;
    emit_csv(&report, out)?;
    let echo = write_config_echo(&config, out)?;
    info!("wrote {} and {}", out.display(), echo.display());
    if let Some(n0) = report.descriptor.n0 {
        println!("N_0 = {n0}");
    }
    if report.passed {
        Ok(0)
    } else {
        for r in report.rows.iter().filter(|r| !r.consistent(config.tolerance)) {
            warn!(
                "row N={} breaks an invariant: weak {:e}, strong {:e}, bound {:?}",
                r.n, r.weak_error, r.strong_error, r.bound
            );
        }
        eprintln!("error: some rows exceed their analytic bound; see {}", out.display());
        Ok(EXIT_FAILED)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    if args.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build_global()
        {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    match run(kind, args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
