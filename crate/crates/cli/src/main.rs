use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use speclab_cli::config::RunConfig;
use speclab_cli::{execute, Overrides};

#[derive(Parser)]
#[command(name = "speclab", about = "Spectral-window laboratory for confining Schrödinger operators")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the ensemble seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Rayon worker threads (0 = library default).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Validate and print the execution plan without computing.
    #[arg(long, global = true)]
    dry_run: bool,

    /// Output directory override.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured operator and emit trusted eigenvalues.
    Spectrum,
    /// Counting function vs phase-space volume and the Weyl slope.
    WeylLaw,
    /// Spectral function diagonal along an axis.
    SpectralFunction,
    /// Sup-norm law scan over the h ladder.
    SobolevScan,
    /// Weighted L^r medians against the sqrt(r) law.
    LrScan,
    /// Two-sided window integrals (exact quadrature).
    TwoSided,
    /// Spectral-function increment uniformity.
    WindowUniformity,
    /// Random quantum ergodicity statistics.
    Ergodicity,
    /// Random-basis QUE trend on harmonic levels.
    Que,
    /// Heat-kernel diagonal bound.
    HeatBound,
    /// No-smoothing ratios and the divergence ladder.
    NoSmoothing,
    /// Moyal product / operator identity checks.
    MoyalCheck,
    /// Run the experiment list from the config.
    Suite,
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Spectrum => "spectrum",
        Command::WeylLaw => "weyl-law",
        Command::SpectralFunction => "spectral-function",
        Command::SobolevScan => "sobolev-scan",
        Command::LrScan => "lr-scan",
        Command::TwoSided => "two-sided",
        Command::WindowUniformity => "window-uniformity",
        Command::Ergodicity => "ergodicity",
        Command::Que => "que",
        Command::HeatBound => "heat-bound",
        Command::NoSmoothing => "no-smoothing",
        Command::MoyalCheck => "moyal-check",
        Command::Suite => "suite",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config_path = match &cli.config {
        Some(p) => p.clone(),
        None => {
            eprintln!("error: --config <file.toml> is required");
            return ExitCode::from(2);
        }
    };
    let cfg = match RunConfig::load(&config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.threads {
        // the rayon pool is set up once per process
        if n > 0 {
            if let Err(e) = speclab_core::par::configure_threads(n) {
                eprintln!("thread pool error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    let names: Vec<String> = match &cli.command {
        Command::Suite => vec![],
        c => vec![command_name(c).to_string()],
    };
    let ov = Overrides {
        seed: cli.seed,
        threads: cli.threads,
        out_dir: cli.out,
        dry_run: cli.dry_run,
    };
    match execute(&cfg, &names, &ov) {
        Ok(summary) => {
            if summary.all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("compute error: {e}");
            ExitCode::from(3)
        }
    }
}
