use crate::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral `Ei(x)`; Cauchy principal value for `x > 0` and
/// `Ei(x) = -E1(-x)` for `x < 0`.
pub fn exp_integral_ei(x: f64) -> Result<f64> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::domain(
            "exp_integral_ei",
            format!("argument must be finite and nonzero, got {x}"),
        ));
    }
    if x < 0.0 {
        return Ok(-exp_integral_e1(-x)?);
    }
    if x <= EI_ASYMPTOTIC_FROM {
        Ok(ei_series(x))
    } else {
        Ok(ei_asymptotic(x))
    }
}

const EI_ASYMPTOTIC_FROM: f64 = 40.0;

fn ei_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..500 {
        let kf = k as f64;
        term *= x / kf;
        let add = term / kf;
        sum += add;
        if add < 1e-17 * sum {
            break;
        }
    }
    EULER_GAMMA + x.ln() + sum
}

fn ei_asymptotic(x: f64) -> f64 {
    // Ei(x) ~ e^x / x Σ k! / x^k
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let next = term * k as f64 / x;
        if next >= term || next < 1e-17 {
            break;
        }
        term = next;
        sum += term;
    }
    x.exp() / x * sum
}

/// `E1(z) = ∫_z^∞ e^{-t}/t dt` for `z > 0`.
pub fn exp_integral_e1(z: f64) -> Result<f64> {
    if !(z > 0.0) || z.is_nan() {
        return Err(Error::domain(
            "exp_integral_e1",
            format!("argument must be positive, got {z}"),
        ));
    }
    if z.is_infinite() {
        return Ok(0.0);
    }
    if z <= 1.0 {
        Ok(e1_series(z))
    } else {
        Ok((-z).exp() * e1_scaled_cf(z))
    }
}

/// `e^z E1(z)`, which equals `∫_0^∞ e^{-z x} / (1 + x) dx` and stays
/// representable for large `z` where `E1` itself underflows.
pub fn exp_e1_scaled(z: f64) -> Result<f64> {
    if !(z > 0.0) || z.is_nan() {
        return Err(Error::domain(
            "exp_e1_scaled",
            format!("argument must be positive, got {z}"),
        ));
    }
    if z.is_infinite() {
        return Ok(0.0);
    }
    if z <= 1.0 {
        Ok(z.exp() * e1_series(z))
    } else {
        Ok(e1_scaled_cf(z))
    }
}

fn e1_series(z: f64) -> f64 {
    // E1(z) = -γ - ln z - Σ_{k≥1} (-z)^k / (k k!)
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -z / kf;
        let add = term / kf;
        sum += add;
        if add.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

fn e1_scaled_cf(z: f64) -> f64 {
    // Modified Lentz on E1(z) e^z = 1/(z+1- 1/(z+3- 4/(z+5- ...)))
    let tiny = 1e-300;
    let mut b = z + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}
