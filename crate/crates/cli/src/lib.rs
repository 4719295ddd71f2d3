//! Sweep engine, figure presets and output writers behind the `fas`
//! command.

pub mod error;
pub mod output;
pub mod preset;
pub mod sweep;

pub use error::{CliError, Result};
pub use output::{emit, render, Format};
pub use preset::{FigurePreset, PresetName};
pub use sweep::{
    run_sweep, Axis, AxisName, Fixed, Metric, PartialSweep, Row, SimOverrides, SweepSpec,
};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "FAS_THREADS";

/// Runs several specs and concatenates their rows in order.
pub fn run_all(specs: &[SweepSpec], record_timing: bool) -> Result<Vec<Row>> {
    for s in specs {
        s.validate()?;
    }
    let mut rows = Vec::new();
    for s in specs {
        rows.extend(run_sweep(s, record_timing)?);
    }
    Ok(rows)
}
