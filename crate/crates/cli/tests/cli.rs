//! Config parsing, experiment output, and end-to-end binary checks.

use std::process::Command;

use otto_cli::config::{parse_config, write_config, SweepKind, SweepSpec};
use otto_cli::run::{emit_plotdata, run_experiment};
use otto_core::{MeasurementPolicy, StepPolicy, StrokeTimes};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_otto-ion"))
}

#[test]
fn empty_config_gives_single_cycle_defaults() {
    let spec = parse_config("", "test").unwrap();
    assert_eq!(spec, SweepSpec::default());
    assert_eq!(spec.kind, SweepKind::SingleCycle);
    assert_eq!(spec.params.b_high, 10.0);
    assert_eq!(spec.times.t_heat, 100.0);
    assert_eq!(spec.times.tau, 256.0);
}

#[test]
fn range_grid_expands_inclusively() {
    let spec = parse_config("kind=sweep_t1\ngrid=10:100:5\n", "test").unwrap();
    assert_eq!(spec.kind, SweepKind::SweepT1);
    assert_eq!(spec.grid.len(), 19);
    assert_eq!(spec.grid[0], 10.0);
    assert_eq!(*spec.grid.last().unwrap(), 100.0);
}

#[test]
fn list_grid_and_comments_parse() {
    let text = "# comment line\n\nkind=sweep_tau\ngrid=4, 8, 16\ntau=11\n";
    let spec = parse_config(text, "test").unwrap();
    assert_eq!(spec.grid, vec![4.0, 8.0, 16.0]);
    assert_eq!(spec.times.tau, 11.0);
}

#[test]
fn field_ordering_violation_names_the_field() {
    let err = parse_config("B_low=12\nB_high=10\n", "test").unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("B_low"), "message was: {msg}");
}

#[test]
fn unknown_key_reports_line_number() {
    let err = parse_config("g=0.2\nbogus=1\n", "test").unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("test:2"), "message was: {msg}");
    assert!(msg.contains("bogus"), "message was: {msg}");
}

#[test]
fn bad_number_reports_line_number() {
    let err = parse_config("gamma=fast\n", "cfg").unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("cfg:1"), "message was: {msg}");
}

#[test]
fn non_increasing_grid_is_rejected() {
    let err = parse_config("kind=sweep_tau\ngrid=8,8,16\n", "test").unwrap_err();
    assert!(err.to_string().contains("strictly increasing"));
}

#[test]
fn grid_on_single_cycle_is_rejected() {
    let err = parse_config("grid=1,2\n", "test").unwrap_err();
    assert!(err.to_string().contains("sweep"));
}

#[test]
fn config_round_trips() {
    let mut spec = SweepSpec::default();
    spec.kind = SweepKind::SweepTau;
    spec.grid = vec![4.0, 8.0, 11.5, 256.0];
    spec.params.gamma = 0.0425;
    spec.params.n_meas = 0.05;
    spec.params.ramp_dissipator = true;
    spec.times = StrokeTimes {
        t_heat: 25.0,
        tau: 11.0,
    };
    spec.step = StepPolicy {
        step_size: 5e-4,
        ..StepPolicy::default()
    };
    spec.policy = MeasurementPolicy::FeedbackPiPulse;
    spec.out = Some("runs/out.csv".into());

    let text = write_config(&spec);
    let back = parse_config(&text, "round-trip").unwrap();
    assert_eq!(back, spec);

    let multi = SweepSpec {
        kind: SweepKind::MultiCycle,
        grid: Vec::new(),
        cycles: 7,
        policy: MeasurementPolicy::FeedbackPiPulse,
        ..SweepSpec::default()
    };
    let back = parse_config(&write_config(&multi), "round-trip").unwrap();
    assert_eq!(back, multi);
}

fn quick_single_spec() -> SweepSpec {
    SweepSpec {
        times: StrokeTimes {
            t_heat: 1.0,
            tau: 0.5,
        },
        ..SweepSpec::default()
    }
}

#[test]
fn single_cycle_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("single.csv");
    let outcome = run_experiment(&quick_single_spec(), &out).unwrap();
    assert_eq!(outcome.failed, 0);

    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("t_heat,tau,Q_H,Q_L,W1,W2,w_net"));
    let row = lines.next().unwrap();
    assert!(row.ends_with(",ok"));
    assert_eq!(lines.next(), None);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&outcome.manifest).unwrap()).unwrap();
    assert_eq!(manifest["kind"], "single");
    assert_eq!(manifest["points"].as_array().unwrap().len(), 1);
    assert_eq!(manifest["integrator"]["method"], "rk4");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    run_experiment(&quick_single_spec(), &a).unwrap();
    run_experiment(&quick_single_spec(), &b).unwrap();
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "identical configs must produce identical CSV bytes"
    );
}

#[test]
fn failing_points_keep_their_rows_and_the_sweep_continues() {
    // A step size far beyond the stability limit trips the accuracy guard.
    let spec = SweepSpec {
        kind: SweepKind::SweepT1,
        grid: vec![1.0, 2.0],
        times: StrokeTimes {
            t_heat: 1.0,
            tau: 0.5,
        },
        step: StepPolicy {
            step_size: 0.5,
            ..StepPolicy::default()
        },
        ..SweepSpec::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let outcome = run_experiment(&spec, &out).unwrap();
    assert_eq!(outcome.failed, 2);

    let csv = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2, "every requested point keeps a row");
    for row in rows {
        assert!(!row.ends_with(",ok"), "row should carry an error: {row}");
        assert!(!row.contains('\n'));
    }
}

#[test]
fn plotdata_extracts_clean_series() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("sweep_t1.csv");
    std::fs::write(
        &csv_path,
        "t1,Q_H,W1,W2,w_net,eta,operational,status\n\
         5e0,1.0e0,2.0e0,-3.0e0,1.0e0,4.9e-1,true,ok\n\
         1e1,NaN,NaN,NaN,NaN,NaN,false,accuracy guard tripped\n\
         2e1,1.5e0,2.0e0,-3.6e0,1.6e0,5.0e-1,true,ok\n",
    )
    .unwrap();

    let written = emit_plotdata(&csv_path).unwrap();
    assert_eq!(written.len(), 2);
    let heat = std::fs::read_to_string(dir.path().join("sweep_t1.heat.dat")).unwrap();
    let rows: Vec<&str> = heat.lines().collect();
    assert!(rows[0].starts_with('#'));
    assert_eq!(rows.len(), 3, "error row is dropped: {heat}");
    assert!(rows[1].starts_with("5"));

    let eff = std::fs::read_to_string(dir.path().join("sweep_t1.efficiency.dat")).unwrap();
    assert!(eff.lines().count() == 3);
}

#[test]
fn plotdata_rejects_unknown_schema() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("odd.csv");
    std::fs::write(&csv_path, "a,b\n1,2\n").unwrap();
    assert!(emit_plotdata(&csv_path).is_err());
}

#[test]
fn binary_single_run_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("quick.cfg");
    std::fs::write(&config, "t_heat=1\ntau=0.5\n").unwrap();
    let out = dir.path().join("single.csv");

    let status = bin()
        .arg("single")
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.exists());
    assert!(dir.path().join("single.manifest.json").exists());
}

#[test]
fn binary_config_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.cfg");
    std::fs::write(&config, "B_low=12\nB_high=10\n").unwrap();
    let output = bin()
        .arg("single")
        .arg("--config")
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("B_low"), "stderr was: {stderr}");
}

#[test]
fn binary_accuracy_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("unstable.cfg");
    std::fs::write(&config, "t_heat=1\ntau=0.5\nstep_size=0.5\n").unwrap();
    let out = dir.path().join("single.csv");
    let status = bin()
        .arg("single")
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.lines().count() == 2, "row with error status still written");
}

#[test]
fn binary_unknown_flag_exits_one() {
    let status = bin().arg("single").arg("--frobnicate").status().unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn worker_pool_cap_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.cfg");
    std::fs::write(&config, "kind=sweep_t1\ngrid=0.5,1\ntau=0.5\n").unwrap();
    let out = dir.path().join("sweep.csv");
    let status = bin()
        .arg("sweep-t1")
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .env("OTTO_ION_THREADS", "1")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 3);
}
