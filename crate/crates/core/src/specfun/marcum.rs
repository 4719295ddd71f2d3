//! Generalized Marcum Q-function of positive integer order.
//!
//! Uses the Poisson-mixture form of the noncentral chi-square law:
//!
//! ```text
//! Q_v(a, b)     = Σ_k w_k Q(v + k, b²/2)
//! 1 - Q_v(a, b) = Σ_k w_k P(v + k, b²/2),   w_k = e^{-a²/2} (a²/2)^k / k!
//! ```
//!
//! where `P`/`Q` are the regularized incomplete gammas. Both sums have
//! nonnegative terms, so `Q` and its complement are each accurate to
//! `rel_tol` in the relative sense even deep in the tails.
//!
//! The sums start at the mode of the Poisson weights and walk outwards.
//! Successive gamma values differ by a Poisson mass, so each direction
//! updates them by recurrence; the subtractive side is re-anchored with a
//! direct evaluation whenever it has lost three digits.
//!
//! For order 1 with a very large Poisson mean the walk needs too many terms,
//! and the defining integral is evaluated instead.

use super::bessel::bessel_i0_scaled;
use super::gamma::{ln_gamma, poisson_pmf, reg_gamma_pair};
use super::SeriesControl;
use crate::quad::{integrate_with_breaks, QuadConfig};
use crate::{Error, Result};

/// `Q_v(a, b)` together with its complement `1 - Q_v(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarcumPair {
    pub q: f64,
    pub complement: f64,
}

pub fn marcum_q(order: u32, a: f64, b: f64, ctrl: &SeriesControl) -> Result<f64> {
    marcum_q_pair(order, a, b, ctrl).map(|m| m.q)
}

/// `1 - Q_v(a, b)`, the CDF of a noncentral chi variable, accurate when small.
pub fn marcum_q_complement(order: u32, a: f64, b: f64, ctrl: &SeriesControl) -> Result<f64> {
    marcum_q_pair(order, a, b, ctrl).map(|m| m.complement)
}

const REANCHOR: f64 = 1e-3;
const INTEGRAL_FROM: f64 = 5e3;
// e^{-w²/2} underflows relative to the peak beyond this distance.
const WINDOW: f64 = 40.0;

// Q_1(a, b) = ∫_b^∞ x e^{-(x-a)²/2} I0e(ax) dx, a bump of unit width at
// x ≈ a. The side of the cut that excludes the bump is the small one.
fn marcum_q1_integral(a: f64, b: f64, ctrl: &SeriesControl) -> Result<MarcumPair> {
    let f = |x: f64| -> Result<f64> {
        let d = x - a;
        Ok(x * (-0.5 * d * d).exp() * bessel_i0_scaled(a * x)?)
    };
    let cfg = QuadConfig {
        abs_tol: 0.0,
        rel_tol: ctrl.rel_tol.max(1e-14),
        max_subdiv: 1000,
    };
    let steps = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, WINDOW];
    if b >= a {
        let pts: Vec<f64> = steps.iter().map(|s| b + s).collect();
        let q = integrate_with_breaks(f, &pts, &cfg)?.value.clamp(0.0, 1.0);
        Ok(MarcumPair {
            q,
            complement: 1.0 - q,
        })
    } else {
        let pts: Vec<f64> = steps.iter().rev().map(|s| (b - s).max(0.0)).collect();
        let c = integrate_with_breaks(f, &pts, &cfg)?.value.clamp(0.0, 1.0);
        Ok(MarcumPair {
            q: 1.0 - c,
            complement: c,
        })
    }
}

pub fn marcum_q_pair(order: u32, a: f64, b: f64, ctrl: &SeriesControl) -> Result<MarcumPair> {
    if order == 0 {
        return Err(Error::domain(
            "marcum_q",
            "order must be a positive integer",
        ));
    }
    if !(a >= 0.0) || !a.is_finite() || !(b >= 0.0) {
        return Err(Error::domain(
            "marcum_q",
            format!("arguments must be finite and nonnegative, got a={a}, b={b}"),
        ));
    }
    if b == 0.0 {
        return Ok(MarcumPair {
            q: 1.0,
            complement: 0.0,
        });
    }
    if b.is_infinite() {
        return Ok(MarcumPair {
            q: 0.0,
            complement: 1.0,
        });
    }

    let v = order as f64;
    let y = 0.5 * b * b;
    let lam = 0.5 * a * a;
    if lam == 0.0 {
        let (p, q) = reg_gamma_pair(v, y)?;
        return Ok(MarcumPair { q, complement: p });
    }
    if order == 1 && lam > INTEGRAL_FROM {
        return marcum_q1_integral(a, b, ctrl);
    }

    let weight = |k: f64| (k * lam.ln() - lam - ln_gamma(k + 1.0)).exp();
    let small = f64::MIN_POSITIVE;
    let within = |tail: f64, sum: f64| tail <= ctrl.rel_tol * sum || tail < small;

    let mode = lam.floor();
    let (p_mode, q_mode) = reg_gamma_pair(v + mode, y)?;
    let mut p_sum = 0.0;
    let mut q_sum = 0.0;
    let mut terms = 0usize;

    // Downward from the mode: P(m-1) = P(m) + d, Q(m-1) = Q(m) - d.
    let (mut k, mut p_k, mut q_k) = (mode, p_mode, q_mode);
    let mut q_anchor = q_k;
    loop {
        let w = weight(k);
        p_sum += w * p_k;
        q_sum += w * q_k;
        terms += 1;
        if k == 0.0 {
            break;
        }
        // Σ_{j<k} w_j <= w_{k-1} / (1 - (k-1)/λ); P rises and Q falls downward.
        let w_prev = weight(k - 1.0);
        let tail = w_prev / (1.0 - (k - 1.0) / lam);
        if within(tail, p_sum) && within(tail * q_k, q_sum) {
            break;
        }
        if terms >= ctrl.max_terms {
            return Err(Error::Accuracy {
                op: "marcum_q",
                achieved: tail,
                target: ctrl.rel_tol,
            });
        }
        let d = poisson_pmf(v + k - 1.0, y);
        p_k = (p_k + d).min(1.0);
        q_k -= d;
        k -= 1.0;
        if q_k < REANCHOR * q_anchor {
            let (p, q) = reg_gamma_pair(v + k, y)?;
            p_k = p;
            q_k = q;
            q_anchor = q;
        }
    }

    // Upward from the mode: Q(m+1) = Q(m) + d, P(m+1) = P(m) - d.
    let (mut k, mut p_k, mut q_k) = (mode, p_mode, q_mode);
    let mut p_anchor = p_k;
    loop {
        // Σ_{j>k} w_j <= w_{k+1} / (1 - λ/(k+2)); Q rises and P falls upward.
        let w_next = weight(k + 1.0);
        let tail = w_next / (1.0 - lam / (k + 2.0));
        if within(tail, q_sum) && within(tail * p_k, p_sum) {
            break;
        }
        if terms >= ctrl.max_terms {
            return Err(Error::Accuracy {
                op: "marcum_q",
                achieved: tail,
                target: ctrl.rel_tol,
            });
        }
        let d = poisson_pmf(v + k, y);
        q_k = (q_k + d).min(1.0);
        p_k -= d;
        k += 1.0;
        if p_k < REANCHOR * p_anchor {
            let (p, q) = reg_gamma_pair(v + k, y)?;
            p_k = p;
            q_k = q;
            p_anchor = p;
        }
        p_sum += w_next * p_k;
        q_sum += w_next * q_k;
        terms += 1;
    }

    // The smaller sum is the accurate one in absolute terms.
    let (q, complement) = if q_sum < p_sum {
        (q_sum, 1.0 - q_sum)
    } else {
        (1.0 - p_sum, p_sum)
    };
    Ok(MarcumPair {
        q: q.clamp(0.0, 1.0),
        complement: complement.clamp(0.0, 1.0),
    })
}
