use std::f64::consts::LN_2;

use super::outage::{op_exact, op_lower_bound};
use super::{check_ports, MetricResult, NumericsConfig, OutageQuery};
use crate::channel::{CorrelationProfile, RicianSpec};
use crate::quad::{integrate, integrate_with_breaks, QuadConfig};
use crate::specfun::{exp_e1_scaled, gaussian_q_alpha, marcum_q_pair};
use crate::{Error, Result};

/// Largest port count accepted by [`er_lower_closed`]; its expansion has
/// `2^N - 1` terms.
pub const ER_LOWER_MAX_PORTS: usize = 20;

const FIRST_CUTOFF: f64 = 8.0;

/// Ergodic rate `(1/ln 2) ∫_0^∞ (1 - F(x)) / (1 + x) dx` with `F` the CDF of
/// the selected port's normalized SNR.
///
/// The integral is truncated at the first `U = 8·2^k` where the union bound
/// `N·Q1(sqrt(2κ), sqrt(2(κ+1)U))` on `1 - F(U)` drops below `er_tail_tol`.
/// The neglected tail, bounded by integrating the same union bound, is
/// added to `abs_error_estimate`.
pub fn er_exact(
    rician: &RicianSpec,
    corr: &CorrelationProfile,
    cfg: &NumericsConfig,
) -> Result<MetricResult> {
    cfg.validate()?;
    check_ports(corr)?;
    let kappa = rician.kappa;
    let n = corr.num_ports() as f64;
    let series = cfg.series;
    let union = move |x: f64| -> Result<f64> {
        let a = (2.0 * kappa).sqrt();
        let b = (2.0 * (kappa + 1.0) * x).sqrt();
        Ok((n * marcum_q_pair(1, a, b, &series)?.q).min(1.0))
    };
    let inner = NumericsConfig {
        quad_rel_tol: 0.01 * cfg.quad_rel_tol,
        ..*cfg
    };
    let survival = |x: f64| -> Result<f64> {
        if x == 0.0 {
            return Ok(1.0);
        }
        let q = OutageQuery::new(x, *rician, corr.clone())?;
        Ok(1.0 - op_exact(&q, &inner)?.value)
    };
    rate_integral(survival, union, cfg)
}

/// Upper bound on the ergodic rate obtained by replacing `F` with the
/// closed-form outage lower bound at threshold `x`.
pub fn er_upper(
    rician: &RicianSpec,
    corr: &CorrelationProfile,
    cfg: &NumericsConfig,
) -> Result<MetricResult> {
    cfg.validate()?;
    check_ports(corr)?;
    let kappa = rician.kappa;
    let series = cfg.series;
    let rho = corr.rho().to_vec();
    // 1 - Π(1 - q_n) <= Σ q_n over the same per-port factors.
    let union = move |x: f64| -> Result<f64> {
        let mut s = 0.0;
        for (i, &r) in rho.iter().enumerate() {
            let one_m = 1.0 - r * r;
            let t = if i == 0 { 0.0 } else { x };
            let a = (2.0 * r * r * (kappa + 1.0) * t / one_m + 2.0 * kappa).sqrt();
            let b = (2.0 * (1.0 + kappa) * x / one_m).sqrt();
            s += marcum_q_pair(1, a, b, &series)?.q;
        }
        Ok(s.min(1.0))
    };
    let survival = |x: f64| -> Result<f64> {
        if x == 0.0 {
            return Ok(1.0);
        }
        let q = OutageQuery::new(x, *rician, corr.clone())?;
        Ok(1.0 - op_lower_bound(&q, cfg)?)
    };
    rate_integral(survival, union, cfg)
}

fn rate_integral<S, T>(survival: S, tail_bound: T, cfg: &NumericsConfig) -> Result<MetricResult>
where
    S: FnMut(f64) -> Result<f64>,
    T: Fn(f64) -> Result<f64>,
{
    let mut cutoff = FIRST_CUTOFF;
    loop {
        if tail_bound(cutoff)? < cfg.er_tail_tol {
            break;
        }
        cutoff *= 2.0;
        if cutoff > cfg.er_upper_limit {
            return Err(Error::Accuracy {
                op: "ergodic rate truncation",
                achieved: tail_bound(cutoff / 2.0)?,
                target: cfg.er_tail_tol,
            });
        }
    }

    let mut pts = vec![0.0, 0.5, 1.0, 2.0, 4.0];
    let mut p = FIRST_CUTOFF;
    while p <= cutoff {
        pts.push(p);
        p *= 2.0;
    }
    let mut survival = survival;
    let body = integrate_with_breaks(|x| Ok(survival(x)? / (1.0 + x)), &pts, &cfg.quad())?;

    // ∫_U^∞ T(x)/(1+x) dx with x = U/s.
    let tail_cfg = QuadConfig {
        abs_tol: 1e-3 * cfg.er_tail_tol,
        rel_tol: 1e-3,
        max_subdiv: cfg.quad_max_subdiv,
    };
    let tail = integrate(
        |s: f64| {
            if s == 0.0 {
                return Ok(0.0);
            }
            let x = cutoff / s;
            Ok(tail_bound(x)? / (1.0 + x) * cutoff / (s * s))
        },
        0.0,
        1.0,
        &tail_cfg,
    )?;

    Ok(MetricResult {
        value: body.value / LN_2,
        abs_error_estimate: (body.abs_error + tail.value + tail.abs_error) / LN_2,
        evaluations: body.evaluations + tail.evaluations,
    })
}

/// Closed-form lower bound on the ergodic rate.
///
/// The selected-port CDF is bounded above by `Π_i (1 - a_i e^{-b_i x})`
/// with `a_1 = 1`, `b_1 = κ + 1` for the reference port and
/// `a_i = min(1, α e^{-κ} / sqrt|ρ_i|)`, `b_i = c(κ+1)/(1-ρ_i²)` for the
/// others. Expanding the product over all nonempty subsets `s` and using
/// `∫_0^∞ e^{-μx}/(1+x) dx = e^{μ} E1(μ)` gives
///
/// ```text
/// R >= (1/ln 2) Σ_s (-1)^{|s|+1} (Π_{i∈s} a_i) e^{B_s} E1(B_s),   B_s = Σ_{i∈s} b_i
/// ```
pub fn er_lower_closed(
    rician: &RicianSpec,
    corr: &CorrelationProfile,
    cfg: &NumericsConfig,
) -> Result<f64> {
    cfg.validate()?;
    check_ports(corr)?;
    let n = corr.num_ports();
    if n > ER_LOWER_MAX_PORTS {
        return Err(Error::Capacity {
            op: "er_lower_closed",
            msg: format!(
                "{n} ports need 2^{n} - 1 terms; the limit is {ER_LOWER_MAX_PORTS}, use er_exact"
            ),
        });
    }
    let kappa = rician.kappa;
    let c = cfg.bound_c;
    let alpha = gaussian_q_alpha(c)?;
    let mut a = vec![1.0];
    let mut b = vec![kappa + 1.0];
    for &rho in corr.others() {
        a.push((alpha * (-kappa).exp() / rho.abs().sqrt()).min(1.0));
        b.push(c * (kappa + 1.0) / (1.0 - rho * rho));
    }

    fn walk(a: &[f64], b: &[f64], i: usize, prod: f64, sum_b: f64, size: usize) -> Result<f64> {
        if i == a.len() {
            if size == 0 {
                return Ok(0.0);
            }
            let sign = if size % 2 == 1 { 1.0 } else { -1.0 };
            return Ok(sign * prod * exp_e1_scaled(sum_b)?);
        }
        let without = walk(a, b, i + 1, prod, sum_b, size)?;
        let with = walk(a, b, i + 1, prod * a[i], sum_b + b[i], size + 1)?;
        Ok(without + with)
    }

    Ok(walk(&a, &b, 0, 1.0, 0.0, 0)? / LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{correlation_profile, rician_from_kappa, PortLayout};
    use crate::specfun::exp_integral_ei;

    fn ula(n: usize, w: f64) -> CorrelationProfile {
        correlation_profile(&PortLayout::ula(n, w).unwrap()).unwrap()
    }

    #[test]
    fn single_port_rayleigh_rate() {
        let r = er_exact(
            &rician_from_kappa(0.0).unwrap(),
            &ula(1, 1.0),
            &Default::default(),
        )
        .unwrap();
        let expected = -std::f64::consts::E * exp_integral_ei(-1.0).unwrap() / LN_2;
        assert!(
            (r.value - expected).abs() < 1e-7,
            "{} {}",
            r.value,
            expected
        );
        assert!(r.abs_error_estimate < 1e-6);
    }

    #[test]
    fn upper_equals_exact_at_one_port() {
        let rc = rician_from_kappa(2.0).unwrap();
        let e = er_exact(&rc, &ula(1, 1.0), &Default::default())
            .unwrap()
            .value;
        let u = er_upper(&rc, &ula(1, 1.0), &Default::default())
            .unwrap()
            .value;
        assert!((e - u).abs() < 1e-7);
    }

    #[test]
    fn lower_closed_single_term() {
        // One port with b = κ + 1 = 1 leaves the single term e E1(1).
        let v = er_lower_closed(
            &rician_from_kappa(0.0).unwrap(),
            &ula(1, 1.0),
            &Default::default(),
        )
        .unwrap();
        assert!((v * LN_2 - 0.596_347_362_323_194_1).abs() < 1e-12);
    }

    #[test]
    fn lower_closed_capacity_limit() {
        let err = er_lower_closed(
            &rician_from_kappa(0.0).unwrap(),
            &ula(21, 2.0),
            &Default::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }

    #[test]
    fn ordering_two_ports() {
        let rc = rician_from_kappa(0.0).unwrap();
        let corr = ula(2, 1.0);
        let cfg = NumericsConfig::default();
        let lo = er_lower_closed(&rc, &corr, &cfg).unwrap();
        let ex = er_exact(&rc, &corr, &cfg).unwrap().value;
        let up = er_upper(&rc, &corr, &cfg).unwrap().value;
        assert!(lo <= ex && ex <= up, "{lo} {ex} {up}");
    }
}
