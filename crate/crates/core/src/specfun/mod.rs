//! Special functions used by the outage and rate formulas.
//!
//! Every routine is pure and safe to call from any thread.

mod bessel;
mod expint;
mod gamma;
mod marcum;

pub use bessel::{bessel_i0_scaled, bessel_j0};
pub use expint::{exp_e1_scaled, exp_integral_e1, exp_integral_ei};
pub use gamma::{ln_gamma, reg_gamma_lower, reg_gamma_pair, reg_gamma_upper};
pub use marcum::{marcum_q, marcum_q_complement, marcum_q_pair, MarcumPair};

use crate::{Error, Result};

/// Truncation policy for the infinite series behind the Marcum Q-function.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SeriesControl {
    pub max_terms: usize,
    pub rel_tol: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            max_terms: 10_000,
            rel_tol: 1e-12,
        }
    }
}

impl SeriesControl {
    pub fn new(max_terms: usize, rel_tol: f64) -> Result<Self> {
        let ctrl = SeriesControl { max_terms, rel_tol };
        ctrl.validate()?;
        Ok(ctrl)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_terms == 0 {
            return Err(Error::Config("series max_terms must be at least 1".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::Config(format!(
                "series rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

/// Prefactor of the exponential lower bound on the Gaussian Q-function,
/// `Q(x) >= alpha(c) * exp(-c x^2 / 2)` for `c > 1`.
pub fn gaussian_q_alpha(c: f64) -> Result<f64> {
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::domain(
            "gaussian_q_alpha",
            format!("c must exceed 1, got {c}"),
        ));
    }
    let k = std::f64::consts::PI * (c - 1.0) + 2.0;
    Ok((1.0 / k).exp() / (2.0 * c) * ((c - 1.0) * k / std::f64::consts::PI).sqrt())
}

/// Exponential lower bound `alpha(c) * exp(-c x^2 / 2)` on `Q(x)`.
pub fn gaussian_q_lower(x: f64, c: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(
            "gaussian_q_lower",
            format!("x must be nonnegative, got {x}"),
        ));
    }
    let alpha = gaussian_q_alpha(c)?;
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(alpha * (-0.5 * c * x * x).exp())
}
