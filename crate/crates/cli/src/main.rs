use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand};
use fpplab_cli::{run_with_threads, ConfigError, Experiment, ExperimentConfig, EXIT_CONFIG};

#[derive(Parser, Debug)]
#[command(name = "fpplab", version, about = "First-passage percolation experiments")]
struct Cli {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory for report files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Build a graph and write it with its element table.
    Build,
    /// Certify or refute detours at given (ε, C).
    CertifyDetours,
    /// Paired estimate of (E T − E T̃)/d.
    FppGap,
    /// Estimate E T/d.
    TimeConstant,
    /// Count regions holding feasible pairs along geodesics.
    FeasiblePairs,
    /// Fraction of geodesic edges with weight in a set.
    EmpiricalMeasure,
    /// Bottleneck radii along a geodesic.
    Bottleneck,
    /// Bernoulli connection decay and Voronoi diagnostics.
    PercolationScan,
    /// Probability of unusually cheap passage.
    CheapPassage,
}

impl Command {
    fn experiment(self) -> Experiment {
        match self {
            Command::Build => Experiment::Build,
            Command::CertifyDetours => Experiment::CertifyDetours,
            Command::FppGap => Experiment::FppGap,
            Command::TimeConstant => Experiment::TimeConstant,
            Command::FeasiblePairs => Experiment::FeasiblePairs,
            Command::EmpiricalMeasure => Experiment::EmpiricalMeasure,
            Command::Bottleneck => Experiment::Bottleneck,
            Command::PercolationScan => Experiment::PercolationScan,
            Command::CheapPassage => Experiment::CheapPassage,
        }
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig, ConfigError> {
    let path = cli.config.as_ref().ok_or_else(|| ConfigError("--config is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_toml(&text)?;
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let experiment = cli.command.experiment();
    let report = match load(&cli).and_then(|cfg| run_with_threads(experiment, &cfg, cli.threads)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    if let Err(e) = report.write_to(&cli.out).with_context(|| format!("writing reports to {}", cli.out.display())) {
        eprintln!("{e:#}");
        return ExitCode::FAILURE;
    }
    print!("{}", report.to_text());
    eprintln!("wall-clock: {:.3} s", started.elapsed().as_secs_f64());
    ExitCode::from(report.status.exit_code() as u8)
}
