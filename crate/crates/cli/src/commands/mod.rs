pub mod characteristics;
pub mod jump;
pub mod levelsets;
pub mod optics;
pub mod simulate;

use crate::config::Scenario;
use crate::failure::{Failure, EXIT_CONFIG, EXIT_HALT, EXIT_NUMERICAL, EXIT_OK};
use rayon::prelude::*;
use std::path::PathBuf;

pub const THREADS_ENV: &str = "FOLD_DYNAMICS_THREADS";

/// Worst exit code of a set: config, numerical, halt, success.
pub fn combine(codes: impl IntoIterator<Item = u8>) -> u8 {
    let rank = |c: u8| match c {
        EXIT_CONFIG => 3,
        EXIT_NUMERICAL => 2,
        EXIT_HALT => 1,
        _ => 0,
    };
    codes.into_iter().max_by_key(|&c| rank(c)).unwrap_or(EXIT_OK)
}

/// Output directory of each scenario: the configured directory, or a
/// per-run subdirectory in a batch.
pub fn run_dirs(scenarios: &[Scenario]) -> Vec<PathBuf> {
    let batch = scenarios.len() > 1;
    scenarios
        .iter()
        .map(|s| {
            let base = PathBuf::from(&s.output.dir);
            if batch {
                base.join(&s.name)
            } else {
                base
            }
        })
        .collect()
}

/// Number of batch workers, from the environment when set.
pub fn thread_count() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

/// Runs `job` on every scenario in parallel, preserving input order.
pub fn batch<T, F>(scenarios: &[Scenario], job: F) -> Result<Vec<Result<T, Failure>>, Failure>
where
    T: Send,
    F: Fn(&Scenario, &std::path::Path) -> Result<T, Failure> + Sync,
{
    let dirs = run_dirs(scenarios);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Failure::config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| scenarios.par_iter().zip(dirs.par_iter()).map(|(s, d)| job(s, d)).collect()))
}
