//! Port geometry, Jakes spatial correlation and Rician parameterization.
//!
//! Distances are expressed in wavelengths. Port 1 is the reference port;
//! its correlation coefficient is stored as `0` so that the reference
//! port's marginal law falls out of the same formulas used for the
//! others.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::specfun::bessel_j0;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutKind {
    Ula,
    Upa,
}

/// `N` ports spread uniformly over a line of length `Wλ` (ULA) or over a
/// `Wλ × Wλ` square (UPA, `√N` ports per side).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortLayout {
    pub kind: LayoutKind,
    pub num_ports: usize,
    pub aperture: f64,
}

impl PortLayout {
    pub fn ula(num_ports: usize, aperture: f64) -> Result<Self> {
        let layout = PortLayout {
            kind: LayoutKind::Ula,
            num_ports,
            aperture,
        };
        layout.validate()?;
        Ok(layout)
    }

    pub fn upa(num_ports: usize, aperture: f64) -> Result<Self> {
        let layout = PortLayout {
            kind: LayoutKind::Upa,
            num_ports,
            aperture,
        };
        layout.validate()?;
        Ok(layout)
    }

    /// A single ULA port is accepted as the degenerate one-port receiver.
    pub fn validate(&self) -> Result<()> {
        if !(self.aperture > 0.0) || !self.aperture.is_finite() {
            return Err(Error::Layout(format!(
                "aperture must be positive and finite, got {}",
                self.aperture
            )));
        }
        match self.kind {
            LayoutKind::Ula => {
                if self.num_ports == 0 {
                    return Err(Error::Layout("ULA needs at least one port".into()));
                }
            }
            LayoutKind::Upa => {
                let side = self.upa_side();
                if side.is_none() {
                    return Err(Error::Layout(format!(
                        "UPA needs a perfect-square port count of at least 4, got {}",
                        self.num_ports
                    )));
                }
            }
        }
        Ok(())
    }

    fn upa_side(&self) -> Option<usize> {
        let side = (self.num_ports as f64).sqrt().round() as usize;
        (side >= 2 && side * side == self.num_ports).then_some(side)
    }
}

/// Displacement of each ULA port from the reference, in wavelengths.
pub fn ula_displacements(layout: &PortLayout) -> Result<Vec<f64>> {
    if layout.kind != LayoutKind::Ula {
        return Err(Error::Layout(
            "ula_displacements requires a ULA layout".into(),
        ));
    }
    layout.validate()?;
    let n = layout.num_ports;
    if n == 1 {
        return Ok(vec![0.0]);
    }
    let span = (n - 1) as f64;
    Ok((0..n).map(|i| i as f64 / span * layout.aperture).collect())
}

/// Euclidean distance of each UPA port from the top-left reference port,
/// in wavelengths, flattened row-major.
pub fn upa_distances(layout: &PortLayout) -> Result<Vec<f64>> {
    if layout.kind != LayoutKind::Upa {
        return Err(Error::Layout("upa_distances requires a UPA layout".into()));
    }
    layout.validate()?;
    let side = layout.upa_side().expect("validated");
    let step = layout.aperture / (side - 1) as f64;
    let mut out = Vec::with_capacity(layout.num_ports);
    for row in 0..side {
        for col in 0..side {
            out.push((row as f64 * step).hypot(col as f64 * step));
        }
    }
    Ok(out)
}

/// Distances of every port from the reference port, whatever the layout.
pub fn port_distances(layout: &PortLayout) -> Result<Vec<f64>> {
    match layout.kind {
        LayoutKind::Ula => ula_displacements(layout),
        LayoutKind::Upa => upa_distances(layout),
    }
}

/// Correlation coefficients of each port with the reference port.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationProfile {
    rho: Vec<f64>,
    layout: Option<PortLayout>,
}

impl CorrelationProfile {
    /// Builds a profile from explicit coefficients. `rho[0]` is the reference
    /// port and must be exactly zero.
    pub fn from_rho(rho: Vec<f64>) -> Result<Self> {
        if rho.is_empty() {
            return Err(Error::Layout(
                "correlation profile needs at least one port".into(),
            ));
        }
        if rho[0] != 0.0 {
            return Err(Error::Layout(format!(
                "reference port coefficient must be 0, got {}",
                rho[0]
            )));
        }
        if let Some((i, r)) = rho.iter().enumerate().find(|(_, r)| !(r.abs() <= 1.0)) {
            return Err(Error::Layout(format!(
                "rho[{}] = {r} is outside [-1, 1]",
                i + 1
            )));
        }
        Ok(CorrelationProfile { rho, layout: None })
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn num_ports(&self) -> usize {
        self.rho.len()
    }

    pub fn layout(&self) -> Option<&PortLayout> {
        self.layout.as_ref()
    }

    /// Coefficients of the non-reference ports (ports 2..=N).
    pub fn others(&self) -> &[f64] {
        &self.rho[1..]
    }

    /// Fails if any non-reference port is fully correlated with the reference.
    pub fn ensure_nonsingular(&self) -> Result<()> {
        match self.others().iter().position(|r| r.abs() >= 1.0) {
            Some(i) => Err(Error::Singular { port: i + 2 }),
            None => Ok(()),
        }
    }
}

/// Jakes correlation `J0(2π d)` of each port with the reference port.
pub fn correlation_profile(layout: &PortLayout) -> Result<CorrelationProfile> {
    let dist = port_distances(layout)?;
    let mut rho = dist
        .iter()
        .map(|d| bessel_j0(2.0 * PI * d))
        .collect::<Result<Vec<_>>>()?;
    rho[0] = 0.0;
    Ok(CorrelationProfile {
        rho,
        layout: Some(*layout),
    })
}

/// Power-normalized Rician fading: `A² = κ/(κ+1)`, `σ² = 1/(κ+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicianSpec {
    pub kappa: f64,
    /// LoS amplitude `A`.
    pub los_amplitude: f64,
    /// Scattered power `σ²`.
    pub nlos_power: f64,
}

pub fn rician_from_kappa(kappa: f64) -> Result<RicianSpec> {
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::domain(
            "rician_from_kappa",
            format!("Rician factor must be finite and nonnegative, got {kappa}"),
        ));
    }
    Ok(RicianSpec {
        kappa,
        los_amplitude: (kappa / (kappa + 1.0)).sqrt(),
        nlos_power: 1.0 / (kappa + 1.0),
    })
}

impl RicianSpec {
    pub fn los_power(&self) -> f64 {
        self.los_amplitude * self.los_amplitude
    }
}

/// Link parameters in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub distance: f64,
    pub wavelength: f64,
    pub tx_power: f64,
    pub noise_power: f64,
    pub signal_power: f64,
}

impl LinkBudget {
    pub fn new(distance: f64, wavelength: f64, tx_power: f64, noise_power: f64) -> Result<Self> {
        let b = LinkBudget {
            distance,
            wavelength,
            tx_power,
            noise_power,
            signal_power: 1.0,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("distance", self.distance),
            ("wavelength", self.wavelength),
            ("tx_power", self.tx_power),
            ("noise_power", self.noise_power),
            ("signal_power", self.signal_power),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Free-space large-scale coefficient `d^{-2} (λ/4π)^2`.
    pub fn path_gain(&self) -> f64 {
        (self.wavelength / (4.0 * PI * self.distance)).powi(2)
    }
}

/// Average received SNR per port (fading power is normalized to one).
pub fn average_snr(budget: &LinkBudget) -> Result<f64> {
    budget.validate()?;
    Ok(budget.path_gain() * budget.tx_power * budget.signal_power / budget.noise_power)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ula_examples() {
        assert_eq!(
            ula_displacements(&PortLayout::ula(2, 1.0).unwrap()).unwrap(),
            vec![0.0, 1.0]
        );
        assert_eq!(
            ula_displacements(&PortLayout::ula(3, 1.0).unwrap()).unwrap(),
            vec![0.0, 0.5, 1.0]
        );
        assert_eq!(
            ula_displacements(&PortLayout::ula(5, 2.0).unwrap()).unwrap(),
            vec![0.0, 0.5, 1.0, 1.5, 2.0]
        );
    }

    #[test]
    fn ula_rejects_upa() {
        let l = PortLayout::upa(4, 1.0).unwrap();
        assert!(matches!(ula_displacements(&l), Err(Error::Layout(_))));
        let l = PortLayout::ula(4, 1.0).unwrap();
        assert!(matches!(upa_distances(&l), Err(Error::Layout(_))));
    }

    #[test]
    fn upa_examples() {
        let d = upa_distances(&PortLayout::upa(4, 1.0).unwrap()).unwrap();
        assert_eq!(d, vec![0.0, 1.0, 1.0, 2f64.sqrt()]);
        let d = upa_distances(&PortLayout::upa(9, 1.0).unwrap()).unwrap();
        let expected = [
            0.0,
            0.5,
            1.0,
            0.5,
            0.5f64.sqrt(),
            1.25f64.sqrt(),
            1.0,
            1.25f64.sqrt(),
            2f64.sqrt(),
        ];
        for (a, b) in d.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let d = upa_distances(&PortLayout::upa(4, 2.0).unwrap()).unwrap();
        assert_eq!(d, vec![0.0, 2.0, 2.0, 2.0 * 2f64.sqrt()]);
    }

    #[test]
    fn upa_rejects_non_square() {
        assert!(matches!(PortLayout::upa(8, 1.0), Err(Error::Layout(_))));
        assert!(matches!(PortLayout::upa(1, 1.0), Err(Error::Layout(_))));
        assert!(matches!(PortLayout::ula(0, 1.0), Err(Error::Layout(_))));
        assert!(matches!(PortLayout::ula(3, 0.0), Err(Error::Layout(_))));
    }

    #[test]
    fn reference_port_forced_to_zero() {
        let p = correlation_profile(&PortLayout::ula(6, 2.0).unwrap()).unwrap();
        assert_eq!(p.rho()[0], 0.0);
        assert!(p.others().iter().all(|r| r.abs() < 1.0));
    }

    #[test]
    fn spacing_invariance() {
        let a = correlation_profile(&PortLayout::ula(3, 1.0).unwrap()).unwrap();
        let b = correlation_profile(&PortLayout::ula(5, 2.0).unwrap()).unwrap();
        assert_eq!(a.rho()[1], b.rho()[1]);
    }

    #[test]
    fn from_rho_validation() {
        assert!(CorrelationProfile::from_rho(vec![]).is_err());
        assert!(CorrelationProfile::from_rho(vec![0.5, 0.1]).is_err());
        assert!(CorrelationProfile::from_rho(vec![0.0, 1.5]).is_err());
        let p = CorrelationProfile::from_rho(vec![0.0, 1.0]).unwrap();
        assert_eq!(p.ensure_nonsingular(), Err(Error::Singular { port: 2 }));
    }

    #[test]
    fn rician_examples() {
        let r = rician_from_kappa(0.0).unwrap();
        assert_eq!((r.los_amplitude, r.nlos_power), (0.0, 1.0));
        let r = rician_from_kappa(1.0).unwrap();
        assert!((r.los_power() - 0.5).abs() < 1e-15);
        assert_eq!(r.nlos_power, 0.5);
        let r = rician_from_kappa(1e6).unwrap();
        assert!((r.nlos_power - 1e-6).abs() < 1e-11);
        assert!((r.los_power() - 1.0).abs() < 1e-5);
        assert!(rician_from_kappa(-0.1).is_err());
        assert!(rician_from_kappa(f64::INFINITY).is_err());
    }

    #[test]
    fn average_snr_examples() {
        let lambda = 0.1;
        let base = LinkBudget::new(lambda / (4.0 * PI), lambda, 1.0, 1.0).unwrap();
        assert!((average_snr(&base).unwrap() - 1.0).abs() < 1e-12);
        let far = LinkBudget {
            distance: 2.0 * base.distance,
            ..base
        };
        assert!((average_snr(&far).unwrap() - 0.25).abs() < 1e-12);
        let loud = LinkBudget {
            tx_power: 10.0,
            ..base
        };
        assert!((average_snr(&loud).unwrap() - 10.0).abs() < 1e-11);
        assert!(LinkBudget::new(0.0, 1.0, 1.0, 1.0).is_err());
    }
}
