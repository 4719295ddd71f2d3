//! Grid sweeps over one parameter.

use std::fmt;
use std::time::Instant;

use fas_core::analysis::{
    er_exact, er_lower_closed, er_upper, op_exact, op_lower_bound, op_lower_series, op_mrc,
    op_upper_bound, NumericsConfig, OutageQuery, ER_LOWER_MAX_PORTS,
};
use fas_core::channel::{correlation_profile, rician_from_kappa, LayoutKind, PortLayout};
use fas_core::montecarlo::{er_empirical, mrc_empirical, op_empirical, SimConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CliError, Result};

/// Default sample counts when the spec leaves `sim.num_samples` unset.
pub const OP_MC_SAMPLES: u64 = 1_000_000;
pub const ER_MC_SAMPLES: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Metric {
    OpExact,
    OpLower,
    OpUpper,
    OpSeries,
    ErExact,
    ErLower,
    ErUpper,
    OpMc,
    ErMc,
    OpMrc,
    MrcMc,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::OpExact => "op_exact",
            Metric::OpLower => "op_lower",
            Metric::OpUpper => "op_upper",
            Metric::OpSeries => "op_series",
            Metric::ErExact => "er_exact",
            Metric::ErLower => "er_lower",
            Metric::ErUpper => "er_upper",
            Metric::OpMc => "op_mc",
            Metric::ErMc => "er_mc",
            Metric::OpMrc => "op_mrc",
            Metric::MrcMc => "mrc_mc",
        }
    }

    fn is_mrc(self) -> bool {
        matches!(self, Metric::OpMrc | Metric::MrcMc)
    }

    fn is_rate(self) -> bool {
        matches!(
            self,
            Metric::ErExact | Metric::ErLower | Metric::ErUpper | Metric::ErMc
        )
    }

    fn is_mc(self) -> bool {
        matches!(self, Metric::OpMc | Metric::ErMc | Metric::MrcMc)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum AxisName {
    #[serde(rename = "N")]
    #[value(name = "N")]
    N,
    #[serde(rename = "gamma_th_db")]
    #[value(name = "gamma_th_db")]
    GammaThDb,
    #[serde(rename = "kappa")]
    #[value(name = "kappa")]
    Kappa,
    #[serde(rename = "W")]
    #[value(name = "W")]
    W,
}

impl AxisName {
    pub fn name(self) -> &'static str {
        match self {
            AxisName::N => "N",
            AxisName::GammaThDb => "gamma_th_db",
            AxisName::Kappa => "kappa",
            AxisName::W => "W",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: AxisName,
    pub values: Vec<f64>,
}

/// Parameters held constant across a sweep. `gamma_th_db` is in dB.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fixed {
    pub ports: Option<usize>,
    pub aperture: Option<f64>,
    pub kappa: Option<f64>,
    pub gamma_th_db: Option<f64>,
    /// MRC branch count `L`.
    pub branches: Option<u32>,
}

impl Fixed {
    /// Fields of `over` that are set replace those of `self`.
    pub fn overlay(&self, over: &Fixed) -> Fixed {
        Fixed {
            ports: over.ports.or(self.ports),
            aperture: over.aperture.or(self.aperture),
            kappa: over.kappa.or(self.kappa),
            gamma_th_db: over.gamma_th_db.or(self.gamma_th_db),
            branches: over.branches.or(self.branches),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimOverrides {
    pub num_samples: Option<u64>,
    pub master_seed: Option<u64>,
    pub chunk_size: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Label for the output rows; derived from the parameters when absent.
    #[serde(default)]
    pub series: Option<String>,
    pub metric: Metric,
    #[serde(default = "default_layout")]
    pub layout: LayoutKind,
    pub axis: Axis,
    #[serde(default)]
    pub fixed: Fixed,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub sim: SimOverrides,
}

fn default_layout() -> LayoutKind {
    LayoutKind::Ula
}

/// A sweep description where every field may be missing, as read from a
/// config file or assembled from command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartialSweep {
    pub series: Option<String>,
    pub metric: Option<Metric>,
    pub layout: Option<LayoutKind>,
    pub axis: Option<Axis>,
    pub fixed: Fixed,
    pub numerics: Option<NumericsConfig>,
    pub sim: SimOverrides,
}

impl PartialSweep {
    pub fn overlay(&self, over: &PartialSweep) -> PartialSweep {
        PartialSweep {
            series: over.series.clone().or_else(|| self.series.clone()),
            metric: over.metric.or(self.metric),
            layout: over.layout.or(self.layout),
            axis: over.axis.clone().or_else(|| self.axis.clone()),
            fixed: self.fixed.overlay(&over.fixed),
            numerics: over.numerics.or(self.numerics),
            sim: SimOverrides {
                num_samples: over.sim.num_samples.or(self.sim.num_samples),
                master_seed: over.sim.master_seed.or(self.sim.master_seed),
                chunk_size: over.sim.chunk_size.or(self.sim.chunk_size),
            },
        }
    }

    pub fn into_spec(self) -> Result<SweepSpec> {
        let spec = SweepSpec {
            series: self.series,
            metric: self.metric.ok_or_else(|| invalid("missing metric"))?,
            layout: self.layout.unwrap_or(LayoutKind::Ula),
            axis: self.axis.ok_or_else(|| invalid("missing axis"))?,
            fixed: self.fixed,
            numerics: self.numerics.unwrap_or_default(),
            sim: self.sim,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// One fully specified grid point. `gamma_th` is linear.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Point {
    ports: Option<usize>,
    aperture: Option<f64>,
    kappa: f64,
    gamma_th: Option<f64>,
    branches: Option<u32>,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Seed of grid point `index`: output `index + 1` of a SplitMix64 stream
/// started at `master_seed`.
pub fn point_seed(master_seed: u64, index: u64) -> u64 {
    let mut z = master_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fmt_value(v: f64) -> String {
    format!("{v}")
}

impl SweepSpec {
    pub fn label(&self) -> String {
        if let Some(s) = &self.series {
            return s.clone();
        }
        let mut parts = vec![self.metric.name().to_string()];
        if !self.metric.is_mrc() {
            parts.push(match self.layout {
                LayoutKind::Ula => "ula".into(),
                LayoutKind::Upa => "upa".into(),
            });
        }
        let f = &self.fixed;
        if let Some(v) = f.branches {
            parts.push(format!("L={v}"));
        }
        if let Some(v) = f.ports {
            parts.push(format!("N={v}"));
        }
        if let Some(v) = f.aperture {
            parts.push(format!("W={}", fmt_value(v)));
        }
        if let Some(v) = f.kappa {
            parts.push(format!("kappa={}", fmt_value(v)));
        }
        if let Some(v) = f.gamma_th_db {
            parts.push(format!("gamma_th_db={}", fmt_value(v)));
        }
        parts.join(" ")
    }

    fn sim_config(&self, index: u64) -> SimConfig {
        let default_samples = if self.metric == Metric::ErMc {
            ER_MC_SAMPLES
        } else {
            OP_MC_SAMPLES
        };
        let base = SimConfig::default();
        SimConfig {
            num_samples: self.sim.num_samples.unwrap_or(default_samples),
            master_seed: point_seed(self.sim.master_seed.unwrap_or(base.master_seed), index),
            chunk_size: self.sim.chunk_size.unwrap_or(base.chunk_size),
        }
    }

    /// Checks the whole grid without computing anything.
    pub fn validate(&self) -> Result<()> {
        self.points().map(|_| ())
    }

    fn points(&self) -> Result<Vec<Point>> {
        self.collect_points().map_err(|e| match e {
            CliError::Compute(c) => invalid(c.to_string()),
            other => other,
        })
    }

    fn collect_points(&self) -> Result<Vec<Point>> {
        let axis = &self.axis;
        if axis.values.is_empty() {
            return Err(invalid("axis has no values"));
        }
        if let Some(v) = axis.values.iter().find(|v| !v.is_finite()) {
            return Err(invalid(format!("axis value {v} is not finite")));
        }
        if axis.values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid(format!(
                "{} values must be strictly increasing",
                axis.name.name()
            )));
        }
        let f = &self.fixed;
        let swept_and_fixed = match axis.name {
            AxisName::N => f.ports.is_some(),
            AxisName::GammaThDb => f.gamma_th_db.is_some(),
            AxisName::Kappa => f.kappa.is_some(),
            AxisName::W => f.aperture.is_some(),
        };
        if swept_and_fixed {
            return Err(invalid(format!(
                "{} is both swept and fixed",
                axis.name.name()
            )));
        }
        self.numerics.validate()?;
        if self.metric.is_mc() {
            self.sim_config(0).validate()?;
        }

        let mut out = Vec::with_capacity(axis.values.len());
        for &x in &axis.values {
            let mut p = Point {
                ports: f.ports,
                aperture: f.aperture,
                kappa: f.kappa.unwrap_or(f64::NAN),
                gamma_th: f.gamma_th_db.map(db_to_linear),
                branches: f.branches,
            };
            match axis.name {
                AxisName::N => {
                    if x < 1.0 || x.fract() != 0.0 {
                        return Err(invalid(format!("N must be a positive integer, got {x}")));
                    }
                    p.ports = Some(x as usize);
                }
                AxisName::GammaThDb => p.gamma_th = Some(db_to_linear(x)),
                AxisName::Kappa => p.kappa = x,
                AxisName::W => p.aperture = Some(x),
            }
            self.check_point(&p)?;
            out.push(p);
        }
        Ok(out)
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        let missing = |name: &str| invalid(format!("{} requires parameter {name}", self.metric));
        if p.kappa.is_nan() {
            return Err(missing("kappa"));
        }
        rician_from_kappa(p.kappa)?;
        if !self.metric.is_rate() {
            let g = p.gamma_th.ok_or_else(|| missing("gamma_th_db"))?;
            if g <= 0.0 || !g.is_finite() {
                return Err(invalid(format!("threshold {g} out of range")));
            }
        }
        if self.metric.is_mrc() {
            if p.branches.ok_or_else(|| missing("branches"))? == 0 {
                return Err(invalid("branches must be at least 1"));
            }
            return Ok(());
        }
        let n = p.ports.ok_or_else(|| missing("ports"))?;
        let w = p.aperture.ok_or_else(|| missing("aperture"))?;
        let layout = PortLayout {
            kind: self.layout,
            num_ports: n,
            aperture: w,
        };
        layout.validate()?;
        if self.metric == Metric::ErLower && n > ER_LOWER_MAX_PORTS {
            return Err(invalid(format!(
                "er_lower supports at most {ER_LOWER_MAX_PORTS} ports, got {n}"
            )));
        }
        Ok(())
    }

    fn evaluate(&self, p: &Point, index: u64) -> Result<(f64, Option<f64>)> {
        let cfg = &self.numerics;
        let rician = rician_from_kappa(p.kappa)?;
        if self.metric.is_mrc() {
            let (l, g) = (p.branches.unwrap_or(1), p.gamma_th.unwrap_or(f64::NAN));
            return Ok(match self.metric {
                Metric::OpMrc => (op_mrc(l, p.kappa, g, &cfg.series)?, None),
                _ => {
                    let e = mrc_empirical(l, p.kappa, g, &self.sim_config(index))?;
                    (e.value, Some(e.std_error))
                }
            });
        }
        let layout = PortLayout {
            kind: self.layout,
            num_ports: p.ports.unwrap_or(0),
            aperture: p.aperture.unwrap_or(f64::NAN),
        };
        let corr = correlation_profile(&layout)?;
        if self.metric.is_rate() {
            return Ok(match self.metric {
                Metric::ErExact => {
                    let r = er_exact(&rician, &corr, cfg)?;
                    (r.value, Some(r.abs_error_estimate))
                }
                Metric::ErUpper => {
                    let r = er_upper(&rician, &corr, cfg)?;
                    (r.value, Some(r.abs_error_estimate))
                }
                Metric::ErLower => (er_lower_closed(&rician, &corr, cfg)?, None),
                _ => {
                    let e = er_empirical(&rician, &corr, &self.sim_config(index))?;
                    (e.value, Some(e.std_error))
                }
            });
        }
        let q = OutageQuery::new(p.gamma_th.unwrap_or(f64::NAN), rician, corr)?;
        Ok(match self.metric {
            Metric::OpExact => {
                let r = op_exact(&q, cfg)?;
                (r.value, Some(r.abs_error_estimate))
            }
            Metric::OpLower => (op_lower_bound(&q, cfg)?, None),
            Metric::OpUpper => (op_upper_bound(&q, cfg)?.value, None),
            Metric::OpSeries => (op_lower_series(&q, &cfg.series)?, None),
            _ => {
                let e = op_empirical(&q, &self.sim_config(index))?;
                (e.value, Some(e.std_error))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub series: String,
    pub metric: Metric,
    pub axis: AxisName,
    pub axis_value: f64,
    pub metric_value: f64,
    /// Quadrature error bound or Monte Carlo standard error.
    pub error_estimate: Option<f64>,
    pub wall_time_ms: Option<f64>,
}

/// Evaluates every grid point, possibly in parallel, and returns rows in
/// axis order. Wall times are recorded only when `record_timing` is set,
/// so that untimed output is reproducible byte for byte.
pub fn run_sweep(spec: &SweepSpec, record_timing: bool) -> Result<Vec<Row>> {
    let points = spec.points()?;
    let label = spec.label();
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let start = Instant::now();
            let (value, err) = spec.evaluate(p, i as u64)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            Ok(Row {
                series: label.clone(),
                metric: spec.metric,
                axis: spec.axis.name,
                axis_value: spec.axis.values[i],
                metric_value: value,
                error_estimate: err,
                wall_time_ms: record_timing.then_some(ms),
            })
        })
        .collect()
}
