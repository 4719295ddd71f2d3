use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::{Error, Result};

const J0_ASYMPTOTIC_FROM: f64 = 25.0;
const I0_ASYMPTOTIC_FROM: f64 = 25.0;

/// Bessel function of the first kind, order zero.
///
/// Miller's backward recurrence (normalized by `J0 + 2 Σ J_2k = 1`) below
/// `|x| = 25`, Hankel's asymptotic expansion above.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(
            "bessel_j0",
            format!("argument must be finite, got {x}"),
        ));
    }
    let x = x.abs();
    if x < 1e-8 {
        return Ok(1.0 - 0.25 * x * x);
    }
    if x < J0_ASYMPTOTIC_FROM {
        Ok(j0_miller(x))
    } else {
        Ok(j0_hankel(x))
    }
}

fn j0_miller(x: f64) -> f64 {
    // Start well above x so the dominant solution has died out.
    let mut m = (1.5 * x + 40.0) as usize;
    m += m % 2;

    let two_over_x = 2.0 / x;
    let mut j_next = 0.0;
    let mut j_cur = 1e-30;
    let mut norm = 0.0;
    let mut j0 = 0.0;
    for k in (1..=m).rev() {
        let j_prev = k as f64 * two_over_x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        // j_cur now holds J_{k-1}
        let order = k - 1;
        if order == 0 {
            j0 = j_cur;
        } else if order % 2 == 0 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += j0;
    j0 / norm
}

fn j0_hankel(x: f64) -> f64 {
    // P ~ Σ_{k even} (-1)^{k/2} t_k, Q ~ Σ_{k odd} (-1)^{(k-1)/2} t_k with
    // t_k = Π_{j≤k} (0 - (2j-1)^2) / (k! (8x)^k).
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut t = 1.0_f64;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        t *= -odd * odd / (k as f64 * eight_x);
        if t.abs() >= prev || t.abs() < 1e-17 {
            break;
        }
        prev = t.abs();
        let sign = if ((k - k % 2) / 2) % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        if k % 2 == 0 {
            p += sign * t;
        } else {
            q += sign * t;
        }
    }
    let (s, c) = x.sin_cos();
    let cos_chi = (c + s) * FRAC_1_SQRT_2;
    let sin_chi = (s - c) * FRAC_1_SQRT_2;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Exponentially scaled modified Bessel function `e^{-x} I0(x)` for `x >= 0`.
pub fn bessel_i0_scaled(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "bessel_i0_scaled",
            format!("argument must be finite and nonnegative, got {x}"),
        ));
    }
    if x < I0_ASYMPTOTIC_FROM {
        Ok(i0_series(x) * (-x).exp())
    } else {
        Ok(i0_scaled_asymptotic(x))
    }
}

fn i0_series(x: f64) -> f64 {
    let quarter_sq = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        let kf = k as f64;
        term *= quarter_sq / (kf * kf);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

fn i0_scaled_asymptotic(x: f64) -> f64 {
    // e^{-x} I0(x) ~ (2πx)^{-1/2} Σ t_k, t_k = t_{k-1} (2k-1)^2 / (8kx).
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * odd * odd / (8.0 * k as f64 * x);
        if next >= term || next < 1e-17 * sum {
            break;
        }
        term = next;
        sum += term;
    }
    sum / (2.0 * PI * x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j0_at_zero() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
    }

    #[test]
    fn j0_is_even() {
        for &x in &[0.3, 4.0, 31.0] {
            assert_eq!(bessel_j0(x).unwrap(), bessel_j0(-x).unwrap());
        }
    }

    #[test]
    fn j0_rejects_non_finite() {
        assert!(bessel_j0(f64::NAN).is_err());
        assert!(bessel_j0(f64::INFINITY).is_err());
    }

    #[test]
    fn j0_is_continuous_across_method_switch() {
        let x = J0_ASYMPTOTIC_FROM;
        assert!((j0_miller(x) - j0_hankel(x)).abs() < 1e-15);
    }

    #[test]
    fn j0_bounded_by_one() {
        for i in 0..5000 {
            let x = i as f64 * 0.1;
            assert!(bessel_j0(x).unwrap().abs() <= 1.0);
        }
    }

    #[test]
    fn i0_scaled_at_zero() {
        assert_eq!(bessel_i0_scaled(0.0).unwrap(), 1.0);
    }

    #[test]
    fn i0_scaled_continuous_across_switch() {
        let x = I0_ASYMPTOTIC_FROM;
        let lo = i0_series(x) * (-x).exp();
        let hi = i0_scaled_asymptotic(x);
        assert!((lo / hi - 1.0).abs() < 1e-14);
    }

    #[test]
    fn i0_scaled_large_argument_matches_leading_asymptote() {
        let v = bessel_i0_scaled(100.0).unwrap();
        let lead = 1.0 / (2.0 * PI * 100.0).sqrt();
        assert!((v / lead - 1.0).abs() < 5e-3);
        assert!(bessel_i0_scaled(1e4).unwrap() > 0.0);
    }

    #[test]
    fn i0_scaled_decreasing() {
        let mut prev = 1.0;
        for i in 1..4000 {
            let v = bessel_i0_scaled(i as f64 * 0.05).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn i0_scaled_rejects_negative() {
        assert!(bessel_i0_scaled(-1.0).is_err());
        assert!(bessel_i0_scaled(f64::NAN).is_err());
    }
}
