use std::process::Command;

use fas_cli::*;
use fas_core::analysis::NumericsConfig;
use fas_core::channel::LayoutKind;

fn fas() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fas"))
}

fn op_grid(metric: Metric, n_max: usize) -> SweepSpec {
    SweepSpec {
        series: None,
        metric,
        layout: LayoutKind::Ula,
        axis: Axis {
            name: AxisName::N,
            values: (1..=n_max).map(|n| n as f64).collect(),
        },
        fixed: Fixed {
            aperture: Some(2.0),
            kappa: Some(0.0),
            gamma_th_db: Some(2.0),
            ..Default::default()
        },
        numerics: NumericsConfig::default(),
        sim: SimOverrides {
            num_samples: Some(20_000),
            master_seed: Some(42),
            chunk_size: None,
        },
    }
}

fn parse_csv(bytes: &[u8]) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(bytes)
        .records()
        .map(|r| r.unwrap())
        .collect()
}

#[test]
fn exact_outage_nonincreasing_in_ports() {
    let rows = run_sweep(&op_grid(Metric::OpExact, 10), false).unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows
        .windows(2)
        .all(|w| w[1].metric_value <= w[0].metric_value));
    assert!(rows.windows(2).all(|w| w[1].axis_value > w[0].axis_value));
    assert!(rows.iter().all(|r| r.wall_time_ms.is_none()));
}

#[test]
fn monte_carlo_csv_is_byte_identical() {
    let spec = op_grid(Metric::OpMc, 10);
    let a = render(&run_sweep(&spec, false).unwrap(), Format::Csv).unwrap();
    let b = render(&run_sweep(&spec, false).unwrap(), Format::Csv).unwrap();
    assert_eq!(a, b);
}

#[test]
fn monte_carlo_independent_of_thread_count() {
    let spec = op_grid(Metric::OpMc, 6);
    let run = |t| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .unwrap()
            .install(|| run_sweep(&spec, false).unwrap())
    };
    assert_eq!(run(1), run(5));
}

#[test]
fn csv_has_header_and_one_line_per_row() {
    let rows = run_sweep(&op_grid(Metric::OpExact, 3), false).unwrap();
    let text = String::from_utf8(render(&rows, Format::Csv).unwrap()).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(
        lines[0],
        "series,metric,axis,axis_value,metric_value,error_estimate,wall_time_ms"
    );
    assert!(text.ends_with('\n'));
}

#[test]
fn json_is_array_of_rows() {
    let rows = run_sweep(&op_grid(Metric::OpExact, 3), false).unwrap();
    let v: serde_json::Value =
        serde_json::from_slice(&render(&rows, Format::Json).unwrap()).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 3);
    for key in output::COLUMNS {
        assert!(arr[0].get(key).is_some(), "{key}");
    }
    assert!(arr[0]["wall_time_ms"].is_null());
}

#[test]
fn values_round_trip_exactly() {
    let mut row = run_sweep(&op_grid(Metric::OpExact, 1), false)
        .unwrap()
        .remove(0);
    for x in [0.2, 0.1 + 0.2, 1.0 / 3.0, 9.772e-24, 1.0 - 1e-16] {
        row.metric_value = x;
        let rows = vec![row.clone()];
        let rec = &parse_csv(&render(&rows, Format::Csv).unwrap())[0];
        assert_eq!(rec[4].parse::<f64>().unwrap().to_bits(), x.to_bits());
        let back: Vec<Row> = serde_json::from_slice(&render(&rows, Format::Json).unwrap()).unwrap();
        assert_eq!(back[0].metric_value.to_bits(), x.to_bits());
    }
}

#[test]
fn zero_db_equals_unit_threshold() {
    let mut spec = op_grid(Metric::OpExact, 1);
    spec.axis = Axis {
        name: AxisName::GammaThDb,
        values: vec![0.0],
    };
    spec.fixed.gamma_th_db = None;
    spec.fixed.ports = Some(1);
    let v = run_sweep(&spec, false).unwrap()[0].metric_value;
    assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
    assert_eq!(sweep::db_to_linear(0.0), 1.0);
}

#[test]
fn preset_expansion_is_pure() {
    for name in PresetName::ALL {
        assert_eq!(
            FigurePreset::new(name).expand(),
            FigurePreset::new(name).expand()
        );
    }
}

#[test]
fn outage_decreases_with_aperture() {
    let specs: Vec<SweepSpec> = FigurePreset::new(PresetName::fig_op_vs_W)
        .expand()
        .into_iter()
        .filter(|s| s.metric == Metric::OpExact)
        .collect();
    assert!(!specs.is_empty());
    for s in &specs {
        let rows = run_sweep(s, false).unwrap();
        assert!(
            rows.windows(2)
                .all(|w| w[1].metric_value < w[0].metric_value),
            "{}: {:?}",
            s.label(),
            rows.iter().map(|r| r.metric_value).collect::<Vec<_>>()
        );
    }
}

#[test]
fn upa_needs_square_port_count() {
    let mut spec = op_grid(Metric::OpExact, 1);
    spec.layout = LayoutKind::Upa;
    spec.axis.values = vec![4.0, 9.0, 10.0];
    let err = run_sweep(&spec, false).unwrap_err();
    assert!(matches!(err, CliError::Validation(_)), "{err:?}");
}

#[test]
fn timing_only_when_requested() {
    let rows = run_sweep(&op_grid(Metric::OpExact, 2), true).unwrap();
    assert!(rows
        .iter()
        .all(|r| r.wall_time_ms.is_some_and(|t| t >= 0.0)));
}

#[test]
fn unwritable_destination_names_path() {
    let rows = run_sweep(&op_grid(Metric::OpExact, 1), false).unwrap();
    let path = std::path::Path::new("/nonexistent-dir/out.csv");
    let err = emit(&rows, Format::Csv, Some(path)).unwrap_err();
    assert!(err.to_string().contains("/nonexistent-dir/out.csv"));
}

#[test]
fn binary_writes_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("op.csv");
    let status = fas()
        .args([
            "op",
            "--kappa",
            "0",
            "--ports",
            "1",
            "--aperture",
            "2",
            "--gamma-db",
            "0",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let recs = parse_csv(&std::fs::read(&out).unwrap());
    assert_eq!(recs.len(), 1);
    let v: f64 = recs[0][4].parse().unwrap();
    assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
}

#[test]
fn binary_reports_errors_as_one_json_line() {
    let out = fas()
        .args([
            "op",
            "--kappa",
            "0",
            "--ports",
            "10",
            "--aperture",
            "2",
            "--gamma-db",
            "2",
            "--layout",
            "upa",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"], "validation");

    let out = fas().args(["op", "--kappa", "zero"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"], "usage");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    std::fs::write(
        &cfg,
        r#"{"metric": "op_exact", "axis": {"name": "N", "values": [1, 2]},
            "fixed": {"aperture": 2, "kappa": 5, "gamma_th_db": 0}}"#,
    )
    .unwrap();
    let run = |extra: &[&str]| {
        let out = fas()
            .args(["sweep", "--format", "json", "--config"])
            .arg(&cfg)
            .args(extra)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        serde_json::from_slice::<Vec<Row>>(&out.stdout).unwrap()
    };
    let base = run(&[]);
    let over = run(&["--kappa", "0"]);
    assert_eq!(base.len(), 2);
    assert!(base[0].series.contains("kappa=5"));
    assert!((over[0].metric_value - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
}

#[test]
fn figure_kappa_override_reaches_output() {
    let out = fas()
        .args([
            "figure",
            "fig_fas_vs_mrc",
            "--kappa",
            "2",
            "--samples",
            "1000",
        ])
        .env("FAS_THREADS", "2")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let recs = parse_csv(&out.stdout);
    assert!(!recs.is_empty());
    assert!(recs.iter().all(|r| r[0].contains("kappa=2")));
}
