use crate::specfun::{marcum_q_complement, SeriesControl};
use crate::{Error, Result};

/// Outage of `L`-branch maximum ratio combining over i.i.d. unit-power
/// Rician branches: `1 - Q_L(sqrt(2Lκ), sqrt(2(κ+1)γ))`, i.e. the
/// probability that the summed branch power falls below `γ`.
pub fn op_mrc(branches: u32, kappa: f64, gamma_th: f64, ctrl: &SeriesControl) -> Result<f64> {
    if branches == 0 {
        return Err(Error::domain("op_mrc", "need at least one branch"));
    }
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::domain(
            "op_mrc",
            format!("kappa must be nonnegative, got {kappa}"),
        ));
    }
    if !(gamma_th > 0.0) || !gamma_th.is_finite() {
        return Err(Error::domain(
            "op_mrc",
            format!("threshold must be positive and finite, got {gamma_th}"),
        ));
    }
    let l = branches as f64;
    let a = (2.0 * l * kappa).sqrt();
    let b = (2.0 * (kappa + 1.0) * gamma_th).sqrt();
    marcum_q_complement(branches, a, b, ctrl)
}
