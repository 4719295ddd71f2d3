use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fas_cli::{
    emit, run_all, Axis, AxisName, CliError, FigurePreset, Fixed, Format, Metric, PartialSweep,
    PresetName, Result, SimOverrides, SweepSpec, THREADS_ENV,
};
use fas_core::channel::LayoutKind;

#[derive(Parser)]
#[command(
    name = "fas",
    version,
    about = "Outage and rate of fluid antenna receivers in Rician fading"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Master seed for Monte Carlo metrics.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo sample count per grid point.
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
    /// Constant c > 1 of the outage upper bound.
    #[arg(long, global = true)]
    bound_c: Option<f64>,
    /// Fill the wall_time_ms column.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args, Default)]
struct Params {
    /// Rician factor (linear).
    #[arg(long)]
    kappa: Option<f64>,
    /// Number of ports N.
    #[arg(long)]
    ports: Option<usize>,
    /// Aperture W in wavelengths.
    #[arg(long)]
    aperture: Option<f64>,
    /// Outage threshold in dB.
    #[arg(long)]
    gamma_db: Option<f64>,
    #[arg(long, value_enum)]
    layout: Option<Layout>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Layout {
    Ula,
    Upa,
}

impl From<Layout> for LayoutKind {
    fn from(l: Layout) -> Self {
        match l {
            Layout::Ula => LayoutKind::Ula,
            Layout::Upa => LayoutKind::Upa,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OpMethod {
    Exact,
    Lower,
    Upper,
    Series,
}

#[derive(Clone, Copy, ValueEnum)]
enum ErMethod {
    Exact,
    Lower,
    Upper,
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    Op,
    Er,
}

#[derive(Subcommand)]
enum Command {
    /// Outage probability at one operating point.
    Op {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value = "exact")]
        method: OpMethod,
    },
    /// Ergodic rate at one operating point.
    Er {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value = "exact")]
        method: ErMethod,
    },
    /// Monte Carlo estimate at one operating point.
    Mc {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value = "op")]
        quantity: Quantity,
    },
    /// Outage of an L-branch MRC receiver.
    Mrc {
        #[arg(long)]
        branches: u32,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        gamma_db: f64,
        /// Estimate by Monte Carlo instead of the closed form.
        #[arg(long)]
        simulate: bool,
    },
    /// Sweep one metric over one parameter.
    Sweep {
        /// JSON file with sweep fields; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        metric: Option<Metric>,
        #[arg(long, value_enum)]
        axis: Option<AxisName>,
        /// Comma-separated, strictly increasing.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Option<Vec<f64>>,
        #[arg(long)]
        branches: Option<u32>,
        #[arg(long)]
        series: Option<String>,
        #[command(flatten)]
        params: Params,
    },
    /// Data for one of the standard figures.
    Figure {
        #[arg(value_enum)]
        name: PresetName,
        /// Comma-separated Rician factors replacing the preset's set.
        #[arg(long, value_delimiter = ',')]
        kappa: Option<Vec<f64>>,
    },
}

impl Params {
    fn fixed(&self) -> Fixed {
        Fixed {
            ports: self.ports,
            aperture: self.aperture,
            kappa: self.kappa,
            gamma_th_db: self.gamma_db,
            branches: None,
        }
    }
}

/// A one-point sweep whose axis is the threshold, or `N` for rate metrics.
fn single(metric: Metric, p: &Params) -> Result<SweepSpec> {
    let mut fixed = p.fixed();
    let axis = if matches!(
        metric,
        Metric::ErExact | Metric::ErLower | Metric::ErUpper | Metric::ErMc
    ) {
        let n = fixed
            .ports
            .take()
            .ok_or_else(|| CliError::Usage("--ports is required".into()))?;
        Axis {
            name: AxisName::N,
            values: vec![n as f64],
        }
    } else {
        let g = fixed
            .gamma_th_db
            .take()
            .ok_or_else(|| CliError::Usage("--gamma-db is required".into()))?;
        Axis {
            name: AxisName::GammaThDb,
            values: vec![g],
        }
    };
    PartialSweep {
        metric: Some(metric),
        layout: p.layout.map(Into::into),
        axis: Some(axis),
        fixed,
        ..Default::default()
    }
    .into_spec()
}

fn read_config(path: &PathBuf) -> Result<PartialSweep> {
    let err = |msg: String| CliError::Config {
        path: path.clone(),
        msg,
    };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| err(e.to_string()))
}

impl Global {
    fn apply(&self, spec: &mut SweepSpec) {
        if let Some(s) = self.seed {
            spec.sim.master_seed = Some(s);
        }
        if let Some(n) = self.samples {
            spec.sim.num_samples = Some(n);
        }
        if let Some(t) = self.quad_tol {
            spec.numerics.quad_rel_tol = t;
        }
        if let Some(c) = self.bound_c {
            spec.numerics.bound_c = c;
        }
    }
}

fn specs(command: Command) -> Result<Vec<SweepSpec>> {
    Ok(match command {
        Command::Op { params, method } => {
            let m = match method {
                OpMethod::Exact => Metric::OpExact,
                OpMethod::Lower => Metric::OpLower,
                OpMethod::Upper => Metric::OpUpper,
                OpMethod::Series => Metric::OpSeries,
            };
            vec![single(m, &params)?]
        }
        Command::Er { params, method } => {
            let m = match method {
                ErMethod::Exact => Metric::ErExact,
                ErMethod::Lower => Metric::ErLower,
                ErMethod::Upper => Metric::ErUpper,
            };
            vec![single(m, &params)?]
        }
        Command::Mc { params, quantity } => {
            let m = match quantity {
                Quantity::Op => Metric::OpMc,
                Quantity::Er => Metric::ErMc,
            };
            vec![single(m, &params)?]
        }
        Command::Mrc {
            branches,
            kappa,
            gamma_db,
            simulate,
        } => {
            let spec = PartialSweep {
                metric: Some(if simulate {
                    Metric::MrcMc
                } else {
                    Metric::OpMrc
                }),
                axis: Some(Axis {
                    name: AxisName::GammaThDb,
                    values: vec![gamma_db],
                }),
                fixed: Fixed {
                    kappa: Some(kappa),
                    branches: Some(branches),
                    ..Default::default()
                },
                ..Default::default()
            };
            vec![spec.into_spec()?]
        }
        Command::Sweep {
            config,
            metric,
            axis,
            values,
            branches,
            series,
            params,
        } => {
            let base = match &config {
                Some(path) => read_config(path)?,
                None => PartialSweep::default(),
            };
            let axis = match (axis, values) {
                (Some(name), Some(values)) => Some(Axis { name, values }),
                (None, None) => None,
                (Some(name), None) => {
                    let values = base
                        .axis
                        .as_ref()
                        .filter(|a| a.name == name)
                        .map(|a| a.values.clone())
                        .ok_or_else(|| CliError::Usage("--axis needs --values".into()))?;
                    Some(Axis { name, values })
                }
                (None, Some(values)) => {
                    let name = base
                        .axis
                        .as_ref()
                        .map(|a| a.name)
                        .ok_or_else(|| CliError::Usage("--values needs --axis".into()))?;
                    Some(Axis { name, values })
                }
            };
            let mut fixed = params.fixed();
            fixed.branches = branches;
            let flags = PartialSweep {
                series,
                metric,
                layout: params.layout.map(Into::into),
                axis,
                fixed,
                numerics: None,
                sim: SimOverrides::default(),
            };
            vec![base.overlay(&flags).into_spec()?]
        }
        Command::Figure { name, kappa } => {
            let preset = match kappa {
                Some(k) => FigurePreset::with_kappas(name, k),
                None => FigurePreset::new(name),
            };
            preset.expand()
        }
    })
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "{THREADS_ENV} must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let global = cli.global;
    let mut specs = specs(cli.command)?;
    for s in &mut specs {
        global.apply(s);
    }
    let rows = run_all(&specs, global.timing)?;
    emit(&rows, global.format, global.out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ");
            eprintln!("{}", CliError::Usage(first.to_string()).to_json_line());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::FAILURE
        }
    }
}
