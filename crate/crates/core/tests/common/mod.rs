//! Test-side reference implementations, written independently of the
//! library kernels they check.

#![allow(dead_code)]

use std::f64::consts::PI;

use fas_core::quad::{integrate, QuadConfig};

/// Trapezoid rule on `[0, π]`. For smooth integrands that extend to even
/// `2π`-periodic functions the error decays exponentially in `panels`.
fn periodic_trapezoid<F: Fn(f64) -> f64>(f: F, panels: usize) -> f64 {
    let h = PI / panels as f64;
    let mut s = 0.5 * (f(0.0) + f(PI));
    for i in 1..panels {
        s += f(i as f64 * h);
    }
    s * h
}

/// `J0(x) = (1/π) ∫_0^π cos(x sin θ) dθ`.
pub fn j0(x: f64) -> f64 {
    let panels = 100 + 2 * x.abs().ceil() as usize;
    periodic_trapezoid(|t| (x * t.sin()).cos(), panels) / PI
}

/// `e^{-x} I_n(x) = (1/π) ∫_0^π e^{x (cos θ - 1)} cos(nθ) dθ`.
pub fn bessel_in_scaled(n: u32, x: f64) -> f64 {
    let panels = 100 + 2 * x.ceil() as usize;
    periodic_trapezoid(
        |t| (x * (t.cos() - 1.0)).exp() * (n as f64 * t).cos(),
        panels,
    ) / PI
}

/// `I0(x)` by its power series `Σ (x/2)^{2k} / (k!)^2`.
pub fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > 1e-18 * sum {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

fn ln_factorial(k: u32) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

// (x/a)^n e^{-(x²+a²)/2} I_n(ax), without dividing by a.
fn marcum_kernel(n: u32, a: f64, x: f64) -> f64 {
    let z = a * x;
    if z < 5.0 {
        // (x/a)^n I_n(ax) = (x²/2)^n Σ_k (a²x²/4)^k / (k! (k+n)!)
        let base = (-(x * x + a * a) / 2.0).exp();
        let lead = (x * x / 2.0).powi(n as i32);
        let q = 0.25 * z * z;
        let mut sum = 0.0;
        let mut term = (-ln_factorial(n)).exp();
        let mut k = 0u32;
        loop {
            sum += term;
            k += 1;
            term *= q / (k as f64 * (k + n) as f64);
            if term < 1e-18 * sum {
                break;
            }
        }
        base * lead * sum
    } else {
        let scaled = bessel_in_scaled(n, z);
        (x / a).powi(n as i32) * (-(x - a) * (x - a) / 2.0).exp() * scaled
    }
}

/// `Q_M(a, b) = ∫_b^∞ x (x/a)^{M-1} e^{-(x²+a²)/2} I_{M-1}(ax) dx`.
pub fn marcum_q(order: u32, a: f64, b: f64) -> f64 {
    let upper = b.max(a) + 40.0;
    let mut pts = vec![b];
    for c in [a - 5.0, a, a + 5.0, a + 15.0] {
        if c > b && c < upper {
            pts.push(c);
        }
    }
    pts.push(upper);
    let cfg = QuadConfig {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_subdiv: 2000,
    };
    pts.windows(2)
        .map(|w| {
            integrate(|x| Ok(x * marcum_kernel(order - 1, a, x)), w[0], w[1], &cfg)
                .unwrap()
                .value
        })
        .sum()
}

/// `E1(z) = ∫_0^1 e^{-z/u} / u du`.
pub fn e1(z: f64) -> f64 {
    let cfg = QuadConfig {
        abs_tol: 1e-300,
        rel_tol: 1e-13,
        max_subdiv: 2000,
    };
    integrate(
        |u| Ok(if u == 0.0 { 0.0 } else { (-z / u).exp() / u }),
        0.0,
        1.0,
        &cfg,
    )
    .unwrap()
    .value
}

/// `P(s, x)` by quadrature of `t^{s-1} e^{-t} / Γ(s)`.
pub fn reg_gamma_lower(s: f64, x: f64, gamma_s: f64) -> f64 {
    let cfg = QuadConfig {
        abs_tol: 0.0,
        rel_tol: 1e-13,
        max_subdiv: 2000,
    };
    integrate(|t| Ok(t.powf(s - 1.0) * (-t).exp()), 0.0, x, &cfg)
        .unwrap()
        .value
        / gamma_s
}

/// `Q(x) = erfc(x/√2)/2` from the complementary error function.
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}
