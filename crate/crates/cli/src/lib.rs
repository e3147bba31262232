//! Experiment runner: configs in, reproducible reports out.

pub mod config;
pub mod experiments;
pub mod graphs;
pub mod report;

pub use config::{ConfigError, ExperimentConfig};
pub use experiments::{run_experiment, Experiment};
pub use report::{Report, Status};

/// Exit code for configuration errors.
pub const EXIT_CONFIG: i32 = 2;

/// Runs an experiment on a dedicated pool of `threads` workers (all cores
/// when `None`). Reports do not depend on the thread count.
pub fn run_with_threads(
    experiment: Experiment,
    cfg: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<Report, ConfigError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(ConfigError("--threads must be positive".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| ConfigError(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(experiment, cfg))
}
