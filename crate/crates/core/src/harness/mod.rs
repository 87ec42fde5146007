//! Configuration, sweeps, output and the canned figure bundles behind the
//! `skyline` command-line tool.

pub mod config;
pub mod emit;
pub mod figures;
pub mod selftest;
pub mod sweep;

pub use config::{parse_config, parse_config_str, RunConfig};
pub use emit::{emit, read_csv, write_csv, write_json, write_result, Format, CSV_HEADER, SCHEMA_VERSION};
pub use figures::{figure, run_figure, write_bundle, Calibration, Figure, FIGURE_IDS};
pub use selftest::{special_function_report, OracleReport};
pub use sweep::{run_config, run_sweep, Mode, SweepMetric, SweepResult, SweepRow, SweepSpec, SweepVariable};

use crate::error::{Error, Result};

/// Runs `f` on a pool sized by `SKYLINE_THREADS` when set, otherwise on
/// the global pool.
pub fn with_thread_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var("SKYLINE_THREADS") {
        Ok(s) => {
            let n: usize = s.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| Error::InvalidParameter {
                field: "SKYLINE_THREADS".into(),
                reason: format!("expected a positive integer, got `{s}`"),
            })?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Io(e.to_string()))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}
