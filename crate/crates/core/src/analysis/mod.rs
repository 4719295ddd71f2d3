//! Outage probability, ergodic rate and the MRC baseline.
//!
//! Thresholds are linear normalized SNR values. Every operation is a pure
//! function of its arguments.

mod mrc;
mod outage;
mod rate;

pub use mrc::op_mrc;
pub use outage::{
    op_exact, op_lower_bound, op_lower_series, op_phase_resolved, op_rayleigh_lower,
    op_upper_bound, snr_cdf,
};
pub use rate::{er_exact, er_lower_closed, er_upper, ER_LOWER_MAX_PORTS};

use serde::{Deserialize, Serialize};

use crate::channel::{CorrelationProfile, RicianSpec};
use crate::quad::QuadConfig;
use crate::specfun::SeriesControl;
use crate::{Error, Result};

/// Everything needed to evaluate one outage probability.
#[derive(Debug, Clone, PartialEq)]
pub struct OutageQuery {
    pub gamma_th: f64,
    pub rician: RicianSpec,
    pub corr: CorrelationProfile,
}

impl OutageQuery {
    pub fn new(gamma_th: f64, rician: RicianSpec, corr: CorrelationProfile) -> Result<Self> {
        let q = OutageQuery {
            gamma_th,
            rician,
            corr,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_th > 0.0) || !self.gamma_th.is_finite() {
            return Err(Error::domain(
                "outage query",
                format!(
                    "threshold must be positive and finite, got {}",
                    self.gamma_th
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericsConfig {
    pub quad_rel_tol: f64,
    pub quad_max_subdiv: usize,
    /// Largest truncation point tried for the ergodic-rate integral.
    pub er_upper_limit: f64,
    /// Target for the neglected tail mass `1 - F(U)` of the rate integral.
    pub er_tail_tol: f64,
    /// Constant `c > 1` of the exponential Gaussian-Q bound.
    pub bound_c: f64,
    pub series: SeriesControl,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            quad_rel_tol: 1e-9,
            quad_max_subdiv: 1000,
            er_upper_limit: 1_048_576.0,
            er_tail_tol: 1e-10,
            bound_c: 1.1,
            series: SeriesControl::default(),
        }
    }
}

impl NumericsConfig {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| v > 0.0 && v < 1.0;
        if !in_unit(self.quad_rel_tol) {
            return Err(Error::Config(format!(
                "quad_rel_tol must lie in (0, 1), got {}",
                self.quad_rel_tol
            )));
        }
        if !in_unit(self.er_tail_tol) {
            return Err(Error::Config(format!(
                "er_tail_tol must lie in (0, 1), got {}",
                self.er_tail_tol
            )));
        }
        if self.quad_max_subdiv == 0 {
            return Err(Error::Config("quad_max_subdiv must be at least 1".into()));
        }
        if !(self.er_upper_limit >= 8.0) || !self.er_upper_limit.is_finite() {
            return Err(Error::Config(format!(
                "er_upper_limit must be finite and at least 8, got {}",
                self.er_upper_limit
            )));
        }
        if !(self.bound_c > 1.0) || !self.bound_c.is_finite() {
            return Err(Error::Config(format!(
                "bound_c must exceed 1, got {}",
                self.bound_c
            )));
        }
        self.series.validate()
    }

    pub(crate) fn quad(&self) -> QuadConfig {
        QuadConfig {
            abs_tol: 0.0,
            rel_tol: self.quad_rel_tol,
            max_subdiv: self.quad_max_subdiv,
        }
    }
}

/// A numerically integrated quantity with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// A closed-form bound after clamping to `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: f64,
    /// The raw value left `[0, 1]` by more than `1e-12`.
    pub clamped: bool,
    /// 1-based ports whose factor was replaced by 1.
    pub degenerate_ports: Vec<usize>,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn slope_loglog(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::domain("slope_loglog", "xs and ys differ in length"));
    }
    if xs.len() < 2 {
        return Err(Error::domain("slope_loglog", "need at least two points"));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) || !(xs[0] > 0.0) {
        return Err(Error::domain(
            "slope_loglog",
            "xs must be positive and strictly increasing",
        ));
    }
    if let Some(y) = ys.iter().find(|y| !(**y > 0.0) || !y.is_finite()) {
        return Err(Error::domain(
            "slope_loglog",
            format!("ys must be positive, got {y}"),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

fn check_ports(corr: &CorrelationProfile) -> Result<()> {
    corr.ensure_nonsingular()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::rician_from_kappa;

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 5.0, 10.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| x.powi(-3)).collect();
        assert!((slope_loglog(&xs, &ys).unwrap() + 3.0).abs() < 1e-12);
    }

    #[test]
    fn slope_rejects_nonpositive() {
        assert!(slope_loglog(&[1.0, 2.0], &[1.0, 0.0]).is_err());
        assert!(slope_loglog(&[1.0], &[1.0]).is_err());
        assert!(slope_loglog(&[2.0, 1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn query_rejects_bad_threshold() {
        let corr = CorrelationProfile::from_rho(vec![0.0]).unwrap();
        let r = rician_from_kappa(1.0).unwrap();
        assert!(OutageQuery::new(0.0, r, corr.clone()).is_err());
        assert!(OutageQuery::new(f64::NAN, r, corr).is_err());
    }

    #[test]
    fn numerics_validation() {
        assert!(NumericsConfig::default().validate().is_ok());
        let bad = NumericsConfig {
            bound_c: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = NumericsConfig {
            quad_rel_tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
