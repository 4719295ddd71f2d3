use std::f64::consts::PI;

use super::{check_ports, BoundValue, MetricResult, NumericsConfig, OutageQuery};
use crate::channel::{CorrelationProfile, RicianSpec};
use crate::quad::{integrate_with_breaks, QuadConfig};
use crate::specfun::{
    bessel_i0_scaled, gaussian_q_alpha, marcum_q_complement, reg_gamma_lower, SeriesControl,
};
use crate::{Error, Result};

// Marcum arguments of port n conditioned on the reference gain t = |h1|^2
// (with the reference port's Rician CDF at threshold gamma as ρ = 0, t = 0).
fn port_args(rho: f64, kappa: f64, t: f64, gamma: f64) -> (f64, f64) {
    let one_m = 1.0 - rho * rho;
    let a = (2.0 * rho * rho * (kappa + 1.0) * t / one_m + 2.0 * kappa).sqrt();
    let b = (2.0 * (1.0 + kappa) / one_m).sqrt() * gamma.sqrt();
    (a, b)
}

/// Density of the reference port's normalized gain `|h1|^2`.
fn reference_pdf(t: f64, kappa: f64) -> Result<f64> {
    let k1 = kappa + 1.0;
    let z = 2.0 * (kappa * k1 * t).sqrt();
    // -((κ+1)t + κ) + z, written as a square to avoid cancellation.
    let d = (k1 * t).sqrt() - kappa.sqrt();
    let log_pdf = k1.ln() - d * d + bessel_i0_scaled(z)?.ln();
    Ok(log_pdf.exp())
}

/// Breakpoints of `[0, end]` around the peak of the reference-gain density,
/// which narrows as `κ` grows.
fn peak_breaks(center: f64, width: f64, end: f64) -> Vec<f64> {
    let mut pts = vec![0.0, end];
    if width > 0.0 {
        for k in [-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0] {
            let p = center + k * width;
            if p > 0.0 && p < end {
                pts.push(p);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts
}

/// Exact outage probability by integrating over the reference port's gain.
///
/// The per-port conditional law uses the LoS amplitude
/// `sqrt(ρ² |h1|² + (1 - ρ²) A²)`, so the result is exact for `κ = 0`;
/// see [`op_phase_resolved`] for the form that conditions on the full
/// complex reference gain.
pub fn op_exact(q: &OutageQuery, cfg: &NumericsConfig) -> Result<MetricResult> {
    q.validate()?;
    cfg.validate()?;
    check_ports(&q.corr)?;
    let kappa = q.rician.kappa;
    let gamma = q.gamma_th;
    let others = q.corr.others();
    let series = cfg.series;

    let integrand = |t: f64| -> Result<f64> {
        let mut v = reference_pdf(t, kappa)?;
        for &rho in others {
            if v == 0.0 {
                break;
            }
            let (a, b) = port_args(rho, kappa, t, gamma);
            v *= marcum_q_complement(1, a, b, &series)?;
        }
        Ok(v)
    };

    let a2 = q.rician.los_power();
    let width = (2.0 * a2 * q.rician.nlos_power).sqrt();
    let pts = peak_breaks(a2, width, gamma);
    let r = integrate_with_breaks(integrand, &pts, &cfg.quad())?;
    Ok(MetricResult {
        value: r.value.clamp(0.0, 1.0),
        abs_error_estimate: r.abs_error,
        evaluations: r.evaluations,
    })
}

/// Outage probability of the constructive channel model, conditioning each
/// port on the complex reference gain `h1 = m e^{jφ}`.
///
/// Given `h1`, port `n` is complex Gaussian with mean `A + ρ (h1 - A)` and
/// per-component variance `σ² (1 - ρ²) / 2`. Agrees with [`op_exact`] at
/// `κ = 0` and with Monte Carlo for every `κ`. Costs a nested quadrature.
pub fn op_phase_resolved(q: &OutageQuery, cfg: &NumericsConfig) -> Result<MetricResult> {
    q.validate()?;
    cfg.validate()?;
    check_ports(&q.corr)?;
    let amp = q.rician.los_amplitude;
    let s2 = q.rician.nlos_power;
    let sigma = s2.sqrt();
    let root_g = q.gamma_th.sqrt();
    let others = q.corr.others();
    let series = cfg.series;
    let inner_cfg = QuadConfig {
        rel_tol: 0.1 * cfg.quad_rel_tol,
        ..cfg.quad()
    };
    let mut evaluations = 0usize;

    let outer = |m: f64| -> Result<f64> {
        let phase_density = |phi: f64| -> Result<f64> {
            let (s, c) = phi.sin_cos();
            let dx = m * c - amp;
            let dy = m * s;
            let mut v = (-(dx * dx + dy * dy) / s2).exp();
            for &rho in others {
                if v == 0.0 {
                    break;
                }
                let mx = amp + rho * dx;
                let my = rho * dy;
                let scale = (s2 * (1.0 - rho * rho) / 2.0).sqrt();
                let mu = mx.hypot(my);
                v *= marcum_q_complement(1, mu / scale, root_g / scale, &series)?;
            }
            Ok(v)
        };
        let mut pts = vec![0.0, PI];
        if m > 0.0 && amp > 0.0 {
            let spread = 6.0 * sigma / m;
            if spread < PI {
                pts.insert(1, spread);
            }
        }
        let r = integrate_with_breaks(phase_density, &pts, &inner_cfg)?;
        evaluations += r.evaluations;
        // Symmetric in φ; the factor 2 restores [0, 2π).
        Ok(2.0 * r.value * m / (PI * s2))
    };

    let pts = peak_breaks(amp, sigma / 2f64.sqrt(), root_g);
    let r = integrate_with_breaks(outer, &pts, &cfg.quad())?;
    Ok(MetricResult {
        value: r.value.clamp(0.0, 1.0),
        abs_error_estimate: r.abs_error,
        evaluations,
    })
}

/// Reference-port outage `1 - Q1(sqrt(2κ), sqrt(2(κ+1)γ))`.
fn reference_cdf(rician: &RicianSpec, gamma: f64, series: &SeriesControl) -> Result<f64> {
    let (a, b) = port_args(0.0, rician.kappa, 0.0, gamma);
    marcum_q_complement(1, a, b, series)
}

/// Closed-form lower bound: the conditional port CDFs evaluated at the
/// largest reference gain `t = γ`.
pub fn op_lower_bound(q: &OutageQuery, cfg: &NumericsConfig) -> Result<f64> {
    q.validate()?;
    check_ports(&q.corr)?;
    let kappa = q.rician.kappa;
    let gamma = q.gamma_th;
    let mut v = reference_cdf(&q.rician, gamma, &cfg.series)?;
    for &rho in q.corr.others() {
        let (a, b) = port_args(rho, kappa, gamma, gamma);
        v *= marcum_q_complement(1, a, b, &cfg.series)?;
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Closed-form upper bound from the exponential lower bound on the
/// Gaussian Q-function.
///
/// A port factor is replaced by 1 (and reported in `degenerate_ports`)
/// when `ρ_n = 0`, where `α_n` is undefined, or when `α_n e^{...} >= 1`,
/// where the factor would not be a probability.
pub fn op_upper_bound(q: &OutageQuery, cfg: &NumericsConfig) -> Result<BoundValue> {
    q.validate()?;
    cfg.validate()?;
    check_ports(&q.corr)?;
    let kappa = q.rician.kappa;
    let gamma = q.gamma_th;
    let c = cfg.bound_c;
    let alpha = gaussian_q_alpha(c)?;
    let d = (gamma * (kappa + 1.0)).sqrt() - kappa.sqrt();
    let gamma_k = d * d;
    let g4 = (gamma * (1.0 + kappa)).powf(0.25);

    let mut raw = reference_cdf(&q.rician, gamma, &cfg.series)?;
    let mut degenerate_ports = Vec::new();
    for (i, &rho) in q.corr.others().iter().enumerate() {
        let one_m = 1.0 - rho * rho;
        if rho == 0.0 {
            degenerate_ports.push(i + 2);
            continue;
        }
        let alpha_n = alpha * g4 / (rho.abs().sqrt() * g4 + (kappa * one_m).powf(0.25));
        let e = alpha_n * (-c * gamma_k / one_m).exp();
        if !(e < 1.0) {
            degenerate_ports.push(i + 2);
            continue;
        }
        raw *= 1.0 - e;
    }
    let value = raw.clamp(0.0, 1.0);
    Ok(BoundValue {
        value,
        clamped: (raw - value).abs() > 1e-12,
        degenerate_ports,
    })
}

/// The lower bound evaluated term by term from the Poisson / incomplete
/// gamma series, summed forward from `k = 0`.
pub fn op_lower_series(q: &OutageQuery, ctrl: &SeriesControl) -> Result<f64> {
    q.validate()?;
    ctrl.validate()?;
    check_ports(&q.corr)?;
    let kappa = q.rician.kappa;
    let gamma = q.gamma_th;
    let mut v = 1.0;
    for &rho in q.corr.rho() {
        let t = if rho == 0.0 { 0.0 } else { gamma };
        let (a, b) = port_args(rho, kappa, t, gamma);
        v *= cdf_series(a, b, ctrl)?;
    }
    Ok(v.clamp(0.0, 1.0))
}

// e^{-λ} Σ_k λ^k/k! P(1+k, y) with λ = a²/2, y = b²/2.
fn cdf_series(a: f64, b: f64, ctrl: &SeriesControl) -> Result<f64> {
    let lam = 0.5 * a * a;
    let y = 0.5 * b * b;
    let ln_w = |k: f64| {
        if lam == 0.0 {
            if k == 0.0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        } else {
            k * lam.ln() - lam - libm::lgamma(k + 1.0)
        }
    };
    let mut sum = 0.0;
    for k in 0..ctrl.max_terms {
        let kf = k as f64;
        let p = reg_gamma_lower(1.0 + kf, y)?;
        sum += ln_w(kf).exp() * p;
        // P(1+k, y) decreases in k, and past the mode the remaining Poisson
        // mass is at most w_{k+1} / (1 - λ/(k+2)).
        if kf + 2.0 > lam {
            let w_next = ln_w(kf + 1.0).exp();
            let tail = w_next / (1.0 - lam / (kf + 2.0)) * p;
            if tail <= ctrl.rel_tol * sum || tail < f64::MIN_POSITIVE {
                return Ok(sum);
            }
        }
    }
    Err(Error::Accuracy {
        op: "op_lower_series",
        achieved: f64::NAN,
        target: ctrl.rel_tol,
    })
}

/// Rayleigh (`κ = 0`) specialization of [`op_lower_bound`].
pub fn op_rayleigh_lower(
    gamma_th: f64,
    corr: &CorrelationProfile,
    ctrl: &SeriesControl,
) -> Result<f64> {
    if !(gamma_th > 0.0) || !gamma_th.is_finite() {
        return Err(Error::domain(
            "op_rayleigh_lower",
            format!("threshold must be positive and finite, got {gamma_th}"),
        ));
    }
    check_ports(corr)?;
    let mut v = -(-gamma_th).exp_m1();
    for &rho in corr.others() {
        let one_m = 1.0 - rho * rho;
        let a = (2.0 * rho * rho * gamma_th / one_m).sqrt();
        let b = (2.0 * gamma_th / one_m).sqrt();
        v *= marcum_q_complement(1, a, b, ctrl)?;
    }
    Ok(v)
}

/// CDF of the selected port's normalized SNR; the same kernel as
/// [`op_exact`] with the threshold set to `x`.
pub fn snr_cdf(
    x: f64,
    rician: &RicianSpec,
    corr: &CorrelationProfile,
    cfg: &NumericsConfig,
) -> Result<MetricResult> {
    let q = OutageQuery::new(x, *rician, corr.clone())?;
    op_exact(&q, cfg)
}
