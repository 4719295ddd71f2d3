//! Named grids that regenerate the standard result figures.
//!
//! Unless a figure varies it, the aperture is `W = 2`.
//!
//! `fig_op_vs_W` samples only W = 1, 2, 5. On a finer grid the outage at
//! N = 10 is not monotone in W (it rises between W = 4 and W = 5), because
//! the Jakes correlation oscillates with port spacing.

use fas_core::analysis::{NumericsConfig, ER_LOWER_MAX_PORTS};
use fas_core::channel::LayoutKind;
use serde::{Deserialize, Serialize};

use crate::sweep::{Axis, AxisName, Fixed, Metric, SimOverrides, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[allow(non_camel_case_types)]
#[value(rename_all = "verbatim")]
pub enum PresetName {
    fig_op_vs_N,
    fig_op_vs_snr,
    fig_op_vs_kappa,
    fig_bounds,
    fig_op_vs_W,
    fig_fas_vs_mrc,
    fig_er_vs_N,
    fig_ula_vs_upa_op,
    fig_ula_vs_upa_er,
}

impl PresetName {
    pub const ALL: [PresetName; 9] = [
        PresetName::fig_op_vs_N,
        PresetName::fig_op_vs_snr,
        PresetName::fig_op_vs_kappa,
        PresetName::fig_bounds,
        PresetName::fig_op_vs_W,
        PresetName::fig_fas_vs_mrc,
        PresetName::fig_er_vs_N,
        PresetName::fig_ula_vs_upa_op,
        PresetName::fig_ula_vs_upa_er,
    ];

    /// Rician factors plotted when the caller does not choose.
    pub fn default_kappas(self) -> Vec<f64> {
        match self {
            PresetName::fig_op_vs_kappa => vec![],
            PresetName::fig_bounds => vec![1.0, 10.0],
            PresetName::fig_op_vs_W => vec![0.0, 1.0],
            PresetName::fig_ula_vs_upa_op => vec![1.0],
            PresetName::fig_ula_vs_upa_er => vec![0.0, 10.0],
            _ => vec![0.0, 1.0, 10.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigurePreset {
    pub name: PresetName,
    /// Replaces the default κ set. Ignored by `fig_op_vs_kappa`, whose
    /// axis is κ.
    pub kappas: Vec<f64>,
}

const APERTURE: f64 = 2.0;

fn range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

fn ports_grid(max: usize) -> Vec<f64> {
    let mut v = vec![1.0, 2.0];
    v.extend((5..=max).step_by(5).map(|n| n as f64));
    v
}

fn square_grid() -> Vec<f64> {
    (2..=10).map(|s| (s * s) as f64).collect()
}

fn series(
    metric: Metric,
    layout: LayoutKind,
    axis: AxisName,
    values: Vec<f64>,
    fixed: Fixed,
) -> SweepSpec {
    SweepSpec {
        series: None,
        metric,
        layout,
        axis: Axis { name: axis, values },
        fixed,
        numerics: NumericsConfig::default(),
        sim: SimOverrides::default(),
    }
}

fn fas(ports: Option<usize>, aperture: Option<f64>, kappa: Option<f64>, db: Option<f64>) -> Fixed {
    Fixed {
        ports,
        aperture,
        kappa,
        gamma_th_db: db,
        branches: None,
    }
}

impl FigurePreset {
    pub fn new(name: PresetName) -> Self {
        FigurePreset {
            name,
            kappas: name.default_kappas(),
        }
    }

    pub fn with_kappas(name: PresetName, kappas: Vec<f64>) -> Self {
        FigurePreset { name, kappas }
    }

    /// One spec per plotted curve.
    pub fn expand(&self) -> Vec<SweepSpec> {
        use AxisName::*;
        use LayoutKind::*;
        use Metric::*;
        let w = Some(APERTURE);
        let mut out = Vec::new();
        match self.name {
            PresetName::fig_op_vs_N => {
                for &k in &self.kappas {
                    for db in [0.0, 5.0] {
                        for m in [OpExact, OpMc] {
                            out.push(series(
                                m,
                                Ula,
                                N,
                                ports_grid(50),
                                fas(None, w, Some(k), Some(db)),
                            ));
                        }
                    }
                }
            }
            PresetName::fig_op_vs_snr => {
                for &k in &self.kappas {
                    for n in [5, 20] {
                        for m in [OpExact, OpMc] {
                            let g = range(-10.0, 10.0, 2.0);
                            out.push(series(m, Ula, GammaThDb, g, fas(Some(n), w, Some(k), None)));
                        }
                    }
                }
            }
            PresetName::fig_op_vs_kappa => {
                let ks = vec![0.0, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 15.0, 20.0];
                for db in [3.0, 6.0] {
                    for n in [5, 20, 50] {
                        for m in [OpExact, OpMc] {
                            out.push(series(
                                m,
                                Ula,
                                Kappa,
                                ks.clone(),
                                fas(Some(n), w, None, Some(db)),
                            ));
                        }
                    }
                }
            }
            PresetName::fig_bounds => {
                for db in [0.0, 5.0] {
                    for &k in &self.kappas {
                        for m in [OpLower, OpUpper, OpMc] {
                            out.push(series(
                                m,
                                Ula,
                                N,
                                ports_grid(50),
                                fas(None, w, Some(k), Some(db)),
                            ));
                        }
                    }
                }
            }
            PresetName::fig_op_vs_W => {
                for &k in &self.kappas {
                    for n in [10, 50] {
                        for m in [OpExact, OpMc] {
                            let ws = vec![1.0, 2.0, 5.0];
                            out.push(series(
                                m,
                                Ula,
                                W,
                                ws,
                                fas(Some(n), None, Some(k), Some(2.0)),
                            ));
                        }
                    }
                }
            }
            PresetName::fig_fas_vs_mrc => {
                let ns = ports_grid(100);
                for &k in &self.kappas {
                    for m in [OpExact, OpMc] {
                        out.push(series(
                            m,
                            Ula,
                            N,
                            ns.clone(),
                            fas(None, w, Some(k), Some(2.0)),
                        ));
                    }
                    for l in [5, 8] {
                        let fixed = Fixed {
                            kappa: Some(k),
                            gamma_th_db: Some(2.0),
                            branches: Some(l),
                            ..Default::default()
                        };
                        out.push(series(OpMrc, Ula, N, ns.clone(), fixed));
                    }
                }
            }
            PresetName::fig_er_vs_N => {
                let small: Vec<f64> = (1..=ER_LOWER_MAX_PORTS).map(|n| n as f64).collect();
                for &k in &self.kappas {
                    let f = fas(None, w, Some(k), None);
                    out.push(series(ErMc, Ula, N, ports_grid(50), f.clone()));
                    out.push(series(ErUpper, Ula, N, ports_grid(50), f.clone()));
                    out.push(series(ErLower, Ula, N, small.clone(), f));
                }
            }
            PresetName::fig_ula_vs_upa_op => {
                for &k in &self.kappas {
                    for db in [0.0, 2.0] {
                        for layout in [Ula, Upa] {
                            for m in [OpExact, OpMc] {
                                let f = fas(None, w, Some(k), Some(db));
                                out.push(series(m, layout, N, square_grid(), f));
                            }
                        }
                    }
                }
            }
            PresetName::fig_ula_vs_upa_er => {
                for &k in &self.kappas {
                    for layout in [Ula, Upa] {
                        out.push(series(
                            ErMc,
                            layout,
                            N,
                            square_grid(),
                            fas(None, w, Some(k), None),
                        ));
                    }
                }
            }
        }
        out
    }
}
