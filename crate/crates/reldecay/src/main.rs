//! Command-line front end: `reldecay run|scan|validate <config>`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use reldecay::config::{parse_config, RunConfig};
use reldecay::runner;
use reldecay::Error;

/// Survival probabilities of moving unstable particles: decay laws at
/// rest, at definite momentum, and in a boosted frame, with dilation-law
/// comparison and kinematic consistency scans.
#[derive(Parser)]
#[command(name = "reldecay", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Directory for output files (default: alongside the config)
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Worker threads (default: all cores); results are identical for
    /// any thread count
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Use the brute-force midpoint engine instead of the adaptive one
    /// (slow; for cross-checking)
    #[arg(long, global = true)]
    oracle: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compute all series and analyses requested by the config
    Run { config: PathBuf },
    /// Run only the kinematic consistency scan
    Scan { config: PathBuf },
    /// Parse and validate the config, reporting warnings; writes nothing
    Validate { config: PathBuf },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Parameter(_) | Error::Domain(_) | Error::Io(_) => EXIT_CONFIG,
        Error::Convergence { .. } | Error::OracleRefusal(_) => EXIT_NUMERICAL,
    }
}

fn load(config_path: &Path) -> Result<(RunConfig, PathBuf), Error> {
    let text = std::fs::read_to_string(config_path)?;
    let base = config_path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
        .to_path_buf();
    let cfg = parse_config(&text, &base)?;
    Ok((cfg, base))
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be ≥ 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: failed to configure thread pool: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }

    let config_path = match &cli.command {
        Command::Run { config } | Command::Scan { config } | Command::Validate { config } => config,
    };
    let (cfg, base) = match load(config_path) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let out_dir = cli.output_dir.clone().unwrap_or(base);

    match &cli.command {
        Command::Validate { .. } => {
            for w in &cfg.warnings {
                println!("warning: {w}");
            }
            println!("config ok");
            ExitCode::SUCCESS
        }
        Command::Scan { .. } => {
            if let Err(e) = std::fs::create_dir_all(&out_dir) {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
            let mut files = Vec::new();
            match runner::run_scan(&cfg, &out_dir, &mut files) {
                Ok(line) => {
                    println!("{line}");
                    for f in files {
                        println!("wrote {}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_for(&e))
                }
            }
        }
        Command::Run { .. } => match runner::run(&cfg, &out_dir, cli.oracle) {
            Ok(report) => {
                print!("{}", report.summary);
                for f in &report.files {
                    println!("wrote {}", f.display());
                }
                if report.numerical_failure {
                    eprintln!("error: at least one series failed to converge at every point");
                    ExitCode::from(EXIT_NUMERICAL)
                } else {
                    ExitCode::SUCCESS
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(exit_for(&e))
            }
        },
    }
}
