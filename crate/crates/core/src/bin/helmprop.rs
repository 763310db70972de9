use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use helmprop::sim::{compare_runs, keys_help, parse_config, run_simulation};
use helmprop::{ray_period, Error};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "helmprop",
    version,
    about = "One-way Helmholtz beam propagation via truncated SVD",
    after_help = concat!(
        "Environment: HELMPROP_THREADS caps kernel parallelism.\n",
        "Exit codes: 0 success, 1 I/O or other failure, 2 config error, 3 numerical abort.\n",
        "Run `helmprop run --help` for the config keys."
    )
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate the configured beam and write its trajectory.
    #[command(after_help = keys_help())]
    Run { config: PathBuf },
    /// Compare centroid_y across 2-3 trajectory files.
    Compare {
        #[arg(num_args = 2..=3, required = true)]
        trajectories: Vec<PathBuf>,
        /// Also write the comparison as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the paraxial ray period of the configured profile.
    RayPeriod { config: PathBuf },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_config() => EXIT_CONFIG,
        Some(e) if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_FAILURE,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run { config } => {
            let cfg = parse_config(&config)?;
            let summary = run_simulation(&cfg)?;
            println!("method      {}", summary.method);
            println!("total z     {} um", summary.total_z);
            println!(
                "centroid    ({:.6}, {:.6}) um",
                summary.final_centroid.0, summary.final_centroid.1
            );
            println!("l2 norm     {:.12}", summary.final_norm);
            println!("svd calls   {}", summary.factorizations);
            println!("elapsed     {:.3} s", summary.elapsed.as_secs_f64());
            println!("trajectory  {}", summary.trajectory_path.display());
            for p in &summary.snapshot_paths {
                println!("snapshot    {}", p.display());
            }
        }
        Command::Compare { trajectories, out } => {
            let report = compare_runs(&trajectories)?;
            print!("{report}");
            if let Some(out) = out {
                report.write_csv(&out)?;
                println!("report      {}", out.display());
            }
        }
        Command::RayPeriod { config } => {
            let cfg = parse_config(&config)?;
            println!("{:.6}", ray_period(&cfg.profile)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    if let Ok(raw) = std::env::var("HELMPROP_THREADS") {
        match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                helmprop::par::init_thread_pool(n);
            }
            _ => {
                eprintln!("error: HELMPROP_THREADS must be a positive integer, got {raw:?}");
                return ExitCode::from(EXIT_CONFIG);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
