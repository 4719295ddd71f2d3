//! CSV and JSON writers for sweep rows.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, CliError, Result};
use crate::sweep::Row;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub const COLUMNS: [&str; 7] = [
    "series",
    "metric",
    "axis",
    "axis_value",
    "metric_value",
    "error_estimate",
    "wall_time_ms",
];

/// Shortest text that parses back to the same `f64`. Very small and very
/// large magnitudes use exponent notation.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

pub fn render(rows: &[Row], format: Format) -> Result<Vec<u8>> {
    if rows.is_empty() {
        return Err(invalid("no rows to emit"));
    }
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Validation(format!("csv encoding failed: {e}"));
            w.write_record(COLUMNS).map_err(io)?;
            for r in rows {
                w.write_record([
                    r.series.clone(),
                    r.metric.name().to_string(),
                    r.axis.name().to_string(),
                    format_f64(r.axis_value),
                    format_f64(r.metric_value),
                    opt(r.error_estimate),
                    opt(r.wall_time_ms),
                ])
                .map_err(io)?;
            }
            w.into_inner()
                .map_err(|e| CliError::Validation(format!("csv encoding failed: {e}")))
        }
        Format::Json => {
            let mut buf = serde_json::to_vec_pretty(rows)
                .map_err(|e| CliError::Validation(format!("json encoding failed: {e}")))?;
            buf.push(b'\n');
            Ok(buf)
        }
    }
}

/// Writes `rows` to `destination`, or to standard output when it is `None`.
pub fn emit(rows: &[Row], format: Format, destination: Option<&Path>) -> Result<()> {
    let bytes = render(rows, format)?;
    match destination {
        Some(path) => std::fs::write(path, bytes).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes)
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_text_round_trips() {
        for x in [
            0.2, 1.0, 1e-5, 9.99e-6, 1e-300, 123456.789, 1e16, -0.1, 0.0, 5e-324,
        ] {
            let s = format_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(format_f64(0.2), "0.2");
        assert_eq!(format_f64(10.0), "10");
        assert_eq!(format_f64(9.772e-24), "9.772e-24");
    }

    #[test]
    fn refuses_empty_output() {
        assert!(render(&[], Format::Csv).is_err());
    }
}
