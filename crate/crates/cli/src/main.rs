use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hetnet_cli::{load_config, run_sweep, write_csv, CliError, Metric, RunOptions};

/// Coverage probability and average rate sweeps for K-tier HetNets under
/// Nakagami-m fading.
#[derive(Debug, Parser)]
#[command(name = "hetnet", version)]
struct Args {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,

    /// Write the CSV here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,

    /// Override the simulation seed from the configuration.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads; the output does not depend on this.
    #[arg(long)]
    threads: Option<usize>,

    /// Report the average rate conditioned on coverage instead of the
    /// coverage probability.
    #[arg(long)]
    rate: bool,

    /// Rates in bits rather than nats.
    #[arg(long, requires = "rate")]
    bits: bool,

    /// Repeat the simulation on a disk of twice the radius and add an
    /// `mc_2r` column.
    #[arg(long)]
    radius_check: bool,
}

fn run(args: Args) -> Result<(), CliError> {
    let mut config = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.sim.seed = seed;
    }
    let options = RunOptions {
        metric: if args.rate { Metric::Rate } else { Metric::Coverage },
        radius_check: args.radius_check,
    };
    let table = run_sweep(&config, options)?;
    match &args.output {
        Some(path) => {
            let file = File::create(path).map_err(csv::Error::from)?;
            write_csv(&table, args.bits, BufWriter::new(file))
        }
        None => write_csv(&table, args.bits, io::stdout().lock()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // Usage errors count as invalid input, not as numerical failures.
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };

    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(1);
        }
    }

    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
