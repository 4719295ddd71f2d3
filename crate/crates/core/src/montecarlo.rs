//! Monte Carlo oracle built directly on the constructive channel model.
//!
//! Samples are split into fixed-size chunks. Chunk `i` draws from a ChaCha8
//! generator seeded with `master_seed` on stream `i`, and per-chunk
//! partial sums are merged in chunk order, so results do not depend on the
//! number of worker threads.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::OutageQuery;
use crate::channel::{rician_from_kappa, CorrelationProfile, RicianSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub num_samples: u64,
    pub master_seed: u64,
    pub chunk_size: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            num_samples: 1_000_000,
            master_seed: 0,
            chunk_size: 1 << 14,
        }
    }
}

impl SimConfig {
    pub fn new(num_samples: u64, master_seed: u64) -> Result<Self> {
        let sim = SimConfig {
            num_samples,
            master_seed,
            ..Default::default()
        };
        sim.validate()?;
        Ok(sim)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_samples == 0 {
            return Err(Error::Config("num_samples must be at least 1".into()));
        }
        if self.chunk_size == 0 {
            return Err(Error::Config("chunk_size must be at least 1".into()));
        }
        Ok(())
    }

    fn chunks(&self) -> Vec<(u64, u64)> {
        let n = self.num_samples.div_ceil(self.chunk_size);
        (0..n)
            .map(|i| {
                let start = i * self.chunk_size;
                (i, (self.num_samples - start).min(self.chunk_size))
            })
            .collect()
    }

    fn rng(&self, chunk: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(chunk);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples_used: u64,
}

// Normal(0, 1/2).
fn half_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    z * FRAC_1_SQRT_2
}

/// Draws one realization of every port and returns the envelopes `|h_n|`.
///
/// ```text
/// h_1 = σ x_0 + j σ y_0 + A
/// h_n = σ(sqrt(1-ρ_n²) x_n + ρ_n x_0) + j σ(sqrt(1-ρ_n²) y_n + ρ_n y_0) + A
/// ```
///
/// with every `x`, `y` independent `N(0, 1/2)`.
pub fn sample_port_gains<R: Rng + ?Sized>(
    rician: &RicianSpec,
    corr: &CorrelationProfile,
    rng: &mut R,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(corr.num_ports());
    draw_ports(rician, corr, rng, |re, im| out.push(re.hypot(im)));
    out
}

/// Like [`sample_port_gains`] but returns the complex channels as
/// `(re, im)` pairs.
pub fn sample_port_channels<R: Rng + ?Sized>(
    rician: &RicianSpec,
    corr: &CorrelationProfile,
    rng: &mut R,
) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(corr.num_ports());
    draw_ports(rician, corr, rng, |re, im| out.push((re, im)));
    out
}

fn draw_ports<R: Rng + ?Sized, F: FnMut(f64, f64)>(
    rician: &RicianSpec,
    corr: &CorrelationProfile,
    rng: &mut R,
    mut sink: F,
) {
    let sigma = rician.nlos_power.sqrt();
    let amp = rician.los_amplitude;
    let x0 = half_normal(rng);
    let y0 = half_normal(rng);
    sink(sigma * x0 + amp, sigma * y0);
    for &rho in corr.others() {
        let s = (1.0 - rho * rho).sqrt();
        let re = sigma * (s * half_normal(rng) + rho * x0) + amp;
        let im = sigma * (s * half_normal(rng) + rho * y0);
        sink(re, im);
    }
}

fn max_gain<R: Rng + ?Sized>(rician: &RicianSpec, corr: &CorrelationProfile, rng: &mut R) -> f64 {
    let mut best = 0.0f64;
    draw_ports(rician, corr, rng, |re, im| {
        best = best.max(re * re + im * im)
    });
    best
}

fn count_fraction<F>(sim: &SimConfig, hit: F) -> Result<EmpiricalEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    sim.validate()?;
    let counts: Vec<u64> = sim
        .chunks()
        .into_par_iter()
        .map(|(i, len)| {
            let mut rng = sim.rng(i);
            (0..len).filter(|_| hit(&mut rng)).count() as u64
        })
        .collect();
    let m = sim.num_samples as f64;
    let p = counts.iter().sum::<u64>() as f64 / m;
    Ok(EmpiricalEstimate {
        value: p,
        std_error: (p * (1.0 - p) / m).sqrt(),
        samples_used: sim.num_samples,
    })
}

/// Fraction of draws whose best port gain `max_n |h_n|²` is below the
/// threshold.
pub fn op_empirical(q: &OutageQuery, sim: &SimConfig) -> Result<EmpiricalEstimate> {
    q.validate()?;
    let gamma = q.gamma_th;
    count_fraction(sim, |rng| max_gain(&q.rician, &q.corr, rng) < gamma)
}

/// Sample mean of `log2(1 + max_n |h_n|²)`.
pub fn er_empirical(
    rician: &RicianSpec,
    corr: &CorrelationProfile,
    sim: &SimConfig,
) -> Result<EmpiricalEstimate> {
    sim.validate()?;
    let partial: Vec<(f64, f64)> = sim
        .chunks()
        .into_par_iter()
        .map(|(i, len)| {
            let mut rng = sim.rng(i);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..len {
                let r = max_gain(rician, corr, &mut rng).ln_1p() / std::f64::consts::LN_2;
                s += r;
                s2 += r * r;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = partial
        .iter()
        .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let m = sim.num_samples as f64;
    let mean = s / m;
    let var = if sim.num_samples > 1 {
        ((s2 - m * mean * mean) / (m - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(EmpiricalEstimate {
        value: mean,
        std_error: (var / m).sqrt(),
        samples_used: sim.num_samples,
    })
}

/// Fraction of draws where the combined power `Σ_l |g_l|²` of `L` i.i.d.
/// unit-power Rician branches is below `γ`.
pub fn mrc_empirical(
    branches: u32,
    kappa: f64,
    gamma_th: f64,
    sim: &SimConfig,
) -> Result<EmpiricalEstimate> {
    if branches == 0 {
        return Err(Error::domain("mrc_empirical", "need at least one branch"));
    }
    if !(gamma_th > 0.0) || !gamma_th.is_finite() {
        return Err(Error::domain(
            "mrc_empirical",
            format!("threshold must be positive and finite, got {gamma_th}"),
        ));
    }
    let rician = rician_from_kappa(kappa)?;
    let sigma = rician.nlos_power.sqrt();
    let amp = rician.los_amplitude;
    count_fraction(sim, |rng| {
        let mut total = 0.0;
        for _ in 0..branches {
            let re = sigma * half_normal(rng) + amp;
            let im = sigma * half_normal(rng);
            total += re * re + im * im;
        }
        total < gamma_th
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{correlation_profile, PortLayout};

    fn ula(n: usize, w: f64) -> CorrelationProfile {
        correlation_profile(&PortLayout::ula(n, w).unwrap()).unwrap()
    }

    #[test]
    fn chunks_cover_all_samples() {
        let sim = SimConfig {
            num_samples: 10,
            master_seed: 1,
            chunk_size: 4,
        };
        assert_eq!(sim.chunks(), vec![(0, 4), (1, 4), (2, 2)]);
    }

    #[test]
    fn reproducible() {
        let q = OutageQuery::new(1.0, rician_from_kappa(1.0).unwrap(), ula(3, 1.0)).unwrap();
        let sim = SimConfig::new(20_000, 42).unwrap();
        let a = op_empirical(&q, &sim).unwrap();
        let b = op_empirical(&q, &sim).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn independent_of_thread_count() {
        let rc = rician_from_kappa(0.5).unwrap();
        let corr = ula(4, 1.0);
        let sim = SimConfig {
            num_samples: 50_000,
            master_seed: 9,
            chunk_size: 1000,
        };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| er_empirical(&rc, &corr, &sim).unwrap())
        };
        assert_eq!(run(1).value.to_bits(), run(4).value.to_bits());
    }

    #[test]
    fn seeds_differ() {
        let q = OutageQuery::new(1.0, rician_from_kappa(0.0).unwrap(), ula(1, 1.0)).unwrap();
        let a = op_empirical(&q, &SimConfig::new(10_000, 1).unwrap()).unwrap();
        let b = op_empirical(&q, &SimConfig::new(10_000, 2).unwrap()).unwrap();
        assert_ne!(a.value, b.value);
    }

    #[test]
    fn certain_outage() {
        let q = OutageQuery::new(1e3, rician_from_kappa(1.0).unwrap(), ula(5, 2.0)).unwrap();
        let e = op_empirical(&q, &SimConfig::new(10_000, 3).unwrap()).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn gains_have_one_entry_per_port() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let g = sample_port_gains(&rician_from_kappa(1.0).unwrap(), &ula(6, 2.0), &mut rng);
        assert_eq!(g.len(), 6);
        assert!(g.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn rejects_empty_config() {
        assert!(SimConfig::new(0, 1).is_err());
        assert!(mrc_empirical(0, 1.0, 1.0, &SimConfig::default()).is_err());
    }
}
