//! Experiment orchestration: sweep evaluation, CSV and manifest output,
//! plot-data extraction, and the built-in validation checks.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use otto_core::qcore::eig::eigh4;
use otto_core::{
    convergence_order, curzon_ahlborn, effective_temperature, evolve, gibbs_state, h_full,
    h_system, initial_state, run_cycle, run_cycles, stroke_measurement, stroke_ramp,
    ComplexMatrix, CycleRecord, DensityMatrix, EngineParams, FieldProfile, LindbladGenerator,
    MeasurementPolicy, RampDirection, StateLabel, StepPolicy, StrokeTimes, C64,
};

use crate::config::{SweepKind, SweepSpec};

/// Paths written by one experiment plus how many points failed.
pub struct ExperimentOutcome {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub failed: usize,
}

/// Formats a value with 12 significant digits.
fn fmt_f(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Error text safe to embed in a CSV cell.
fn sanitize(msg: &str) -> String {
    msg.replace(',', ";").replace('\n', " ")
}

fn max_trace_drift(record: &CycleRecord) -> f64 {
    record
        .strokes
        .iter()
        .map(|s| s.trace_drift)
        .fold(0.0, f64::max)
}

fn min_eigenvalue(record: &CycleRecord) -> f64 {
    record
        .strokes
        .iter()
        .map(|s| s.min_eigenvalue)
        .fold(f64::INFINITY, f64::min)
}

fn worker_pool() -> Result<rayon::ThreadPool> {
    let threads = std::env::var("OTTO_ION_THREADS")
        .ok()
        .map(|v| {
            v.parse::<usize>()
                .map_err(|_| anyhow!("OTTO_ION_THREADS must be a nonnegative integer, got `{v}`"))
        })
        .transpose()?
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("cannot build worker pool")
}

struct Point {
    x: f64,
    outcome: std::result::Result<CycleRecord, otto_core::Error>,
}

impl Point {
    fn status(&self) -> String {
        match &self.outcome {
            Ok(_) => "ok".to_string(),
            Err(e) => sanitize(&e.to_string()),
        }
    }
}

fn evaluate_sweep(spec: &SweepSpec) -> Result<Vec<Point>> {
    let pool = worker_pool()?;
    let points = pool.install(|| {
        spec.grid
            .par_iter()
            .map(|&x| {
                let times = match spec.kind {
                    SweepKind::SweepT1 => StrokeTimes {
                        t_heat: x,
                        tau: spec.times.tau,
                    },
                    SweepKind::SweepTau => StrokeTimes {
                        t_heat: spec.times.t_heat,
                        tau: x,
                    },
                    _ => spec.times,
                };
                let outcome = initial_state(&spec.params).and_then(|start| {
                    run_cycle(&start, &spec.params, &times, spec.policy, &spec.step)
                });
                Point { x, outcome }
            })
            .collect()
    });
    Ok(points)
}

fn sweep_t1_csv(points: &[Point]) -> String {
    let mut csv = String::from("t1,Q_H,W1,W2,w_net,eta,operational,status\n");
    for p in points {
        match &p.outcome {
            Ok(r) => {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},ok\n",
                    fmt_f(p.x),
                    fmt_f(r.q_hot),
                    fmt_f(r.strokes[1].w),
                    fmt_f(r.strokes[3].w),
                    fmt_f(r.w_net),
                    fmt_f(r.eta),
                    r.operational
                ));
            }
            Err(_) => {
                csv.push_str(&format!(
                    "{},NaN,NaN,NaN,NaN,NaN,false,{}\n",
                    fmt_f(p.x),
                    p.status()
                ));
            }
        }
    }
    csv
}

fn sweep_tau_csv(points: &[Point]) -> String {
    let mut csv = String::from("tau,W_ir_energy,W_ir_entropy,w_net,eta_ir,operational,status\n");
    for p in points {
        match &p.outcome {
            Ok(r) => {
                let w_ir_energy = r.strokes[1].w_ir_energy + r.strokes[3].w_ir_energy;
                csv.push_str(&format!(
                    "{},{},{},{},{},{},ok\n",
                    fmt_f(p.x),
                    fmt_f(w_ir_energy),
                    fmt_f(r.w_ir_total),
                    fmt_f(r.w_net),
                    fmt_f(r.eta_ir),
                    r.operational
                ));
            }
            Err(_) => {
                csv.push_str(&format!(
                    "{},NaN,NaN,NaN,NaN,false,{}\n",
                    fmt_f(p.x),
                    p.status()
                ));
            }
        }
    }
    csv
}

fn single_cycle_csv(spec: &SweepSpec, point: &Point) -> String {
    let mut csv = String::from(
        "t_heat,tau,Q_H,Q_L,W1,W2,w_net,W_ir_energy,W_ir_entropy,eta,eta_ir,M,eta_m,\
         cycle_time,operational,status\n",
    );
    match &point.outcome {
        Ok(r) => {
            let w_ir_energy = r.strokes[1].w_ir_energy + r.strokes[3].w_ir_energy;
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},ok\n",
                fmt_f(spec.times.t_heat),
                fmt_f(spec.times.tau),
                fmt_f(r.q_hot),
                fmt_f(r.strokes[2].q),
                fmt_f(r.strokes[1].w),
                fmt_f(r.strokes[3].w),
                fmt_f(r.w_net),
                fmt_f(w_ir_energy),
                fmt_f(r.w_ir_total),
                fmt_f(r.eta),
                fmt_f(r.eta_ir),
                fmt_f(r.meas_cost),
                fmt_f(r.eta_m),
                fmt_f(r.cycle_time),
                r.operational
            ));
        }
        Err(_) => {
            csv.push_str(&format!(
                "{},{},NaN,NaN,NaN,NaN,NaN,NaN,NaN,NaN,NaN,NaN,NaN,NaN,false,{}\n",
                fmt_f(spec.times.t_heat),
                fmt_f(spec.times.tau),
                point.status()
            ));
        }
    }
    csv
}

fn multicycle_csv(
    spec: &SweepSpec,
    outcome: &std::result::Result<otto_core::MultiCycleReport, otto_core::Error>,
) -> String {
    let mut csv =
        String::from("cycle_index,Q_H,w_net,W_ir,eta_avg_pairwise,power,cycle_time,status\n");
    match outcome {
        Ok(report) => {
            for (i, cycle) in report.cycles.iter().enumerate() {
                // Pairwise quantities average cycle i with its predecessor,
                // so the first cycle has none.
                let (eta_avg, power) = if i == 0 {
                    (f64::NAN, f64::NAN)
                } else {
                    (report.eta_avg_pairwise[i - 1], report.power[i - 1])
                };
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},ok\n",
                    i + 1,
                    fmt_f(cycle.q_hot),
                    fmt_f(cycle.w_net),
                    fmt_f(cycle.w_ir_total),
                    fmt_f(eta_avg),
                    fmt_f(power),
                    fmt_f(cycle.cycle_time)
                ));
            }
        }
        Err(e) => {
            for i in 1..=spec.cycles {
                csv.push_str(&format!(
                    "{i},NaN,NaN,NaN,NaN,NaN,NaN,{}\n",
                    sanitize(&e.to_string())
                ));
            }
        }
    }
    csv
}

/// Runs the experiment a spec describes, writing the CSV and its manifest.
pub fn run_experiment(spec: &SweepSpec, out: &Path) -> Result<ExperimentOutcome> {
    let clock = Instant::now();
    let mut point_entries = Vec::new();
    let mut failed = 0;

    let csv = match spec.kind {
        SweepKind::SweepT1 | SweepKind::SweepTau => {
            let points = evaluate_sweep(spec)?;
            for p in &points {
                let (drift, min_eig) = match &p.outcome {
                    Ok(r) => (max_trace_drift(r), min_eigenvalue(r)),
                    Err(_) => {
                        failed += 1;
                        (f64::NAN, f64::NAN)
                    }
                };
                point_entries.push(serde_json::json!({
                    "x": p.x,
                    "status": p.status(),
                    "trace_drift": drift,
                    "min_eigenvalue": min_eig,
                }));
            }
            match spec.kind {
                SweepKind::SweepT1 => sweep_t1_csv(&points),
                _ => sweep_tau_csv(&points),
            }
        }
        SweepKind::SingleCycle => {
            let outcome = initial_state(&spec.params).and_then(|start| {
                run_cycle(&start, &spec.params, &spec.times, spec.policy, &spec.step)
            });
            let point = Point {
                x: spec.times.t_heat,
                outcome,
            };
            let (drift, min_eig) = match &point.outcome {
                Ok(r) => (max_trace_drift(r), min_eigenvalue(r)),
                Err(_) => {
                    failed += 1;
                    (f64::NAN, f64::NAN)
                }
            };
            point_entries.push(serde_json::json!({
                "status": point.status(),
                "trace_drift": drift,
                "min_eigenvalue": min_eig,
            }));
            single_cycle_csv(spec, &point)
        }
        SweepKind::MultiCycle => {
            let outcome = run_cycles(
                spec.cycles,
                &spec.params,
                &spec.times,
                spec.policy,
                &spec.step,
            );
            match &outcome {
                Ok(report) => {
                    for (i, cycle) in report.cycles.iter().enumerate() {
                        point_entries.push(serde_json::json!({
                            "cycle_index": i + 1,
                            "status": "ok",
                            "trace_drift": max_trace_drift(cycle),
                            "min_eigenvalue": min_eigenvalue(cycle),
                        }));
                    }
                }
                Err(e) => {
                    failed = spec.cycles;
                    for i in 1..=spec.cycles {
                        point_entries.push(serde_json::json!({
                            "cycle_index": i,
                            "status": sanitize(&e.to_string()),
                            "trace_drift": f64::NAN,
                            "min_eigenvalue": f64::NAN,
                        }));
                    }
                }
            }
            multicycle_csv(spec, &outcome)
        }
    };

    std::fs::write(out, &csv).with_context(|| format!("cannot write {}", out.display()))?;

    let manifest_path = out.with_extension("manifest.json");
    let p = &spec.params;
    let manifest = serde_json::json!({
        "tool": { "name": "otto-ion", "version": env!("CARGO_PKG_VERSION") },
        "kind": spec.kind.as_str(),
        "grid": spec.grid,
        "cycles": if spec.kind == SweepKind::MultiCycle { Some(spec.cycles) } else { None },
        "parameters": {
            "g": p.g, "k": p.k, "omega": p.omega, "gamma": p.gamma, "n_th": p.n_th,
            "T_hot": p.t_hot, "B_high": p.b_high, "B_low": p.b_low,
            "n_vib0": p.n_vib0, "n_meas": p.n_meas, "ramp_dissipator": p.ramp_dissipator,
        },
        "times": { "t_heat": spec.times.t_heat, "tau": spec.times.tau },
        "policy": spec.policy.as_str(),
        "integrator": {
            "method": "rk4",
            "step_size": spec.step.step_size,
            "max_trace_drift": spec.step.max_trace_drift,
            "max_negativity": spec.step.max_negativity,
        },
        "wall_clock_seconds": clock.elapsed().as_secs_f64(),
        "points": point_entries,
    });
    let mut manifest_text = serde_json::to_string_pretty(&manifest)?;
    manifest_text.push('\n');
    std::fs::write(&manifest_path, manifest_text)
        .with_context(|| format!("cannot write {}", manifest_path.display()))?;

    Ok(ExperimentOutcome {
        csv: out.to_path_buf(),
        manifest: manifest_path,
        failed,
    })
}

/// One parsed CSV: header names plus rows of raw cells.
struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| anyhow!("{}: empty file", path.display()))?;
    let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
    let rows = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|c| c.trim().to_string()).collect())
        .collect();
    Ok(Table { columns, rows })
}

impl Table {
    fn column(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| anyhow!("column `{name}` missing"))
    }

    /// Finite (x, y) pairs from rows whose status is `ok`.
    fn series(&self, x: &str, y: &str) -> Result<Vec<(f64, f64)>> {
        let (xi, yi) = (self.column(x)?, self.column(y)?);
        let si = self.column("status")?;
        let mut out = Vec::new();
        for row in &self.rows {
            if row.get(si).map(String::as_str) != Some("ok") {
                continue;
            }
            let px = row[xi].parse::<f64>().unwrap_or(f64::NAN);
            let py = row[yi].parse::<f64>().unwrap_or(f64::NAN);
            if px.is_finite() && py.is_finite() {
                out.push((px, py));
            }
        }
        Ok(out)
    }
}

fn write_series(path: &Path, x_name: &str, y_name: &str, series: &[(f64, f64)]) -> Result<()> {
    let mut text = format!("# {x_name} {y_name}\n");
    for (x, y) in series {
        text.push_str(&format!("{} {}\n", fmt_f(*x), fmt_f(*y)));
    }
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Extracts gnuplot-ready two-column files from an experiment CSV.  The
/// schema is recognized from the header; each known schema maps to the plots
/// it supports.
pub fn emit_plotdata(csv_path: &Path) -> Result<Vec<PathBuf>> {
    let table = read_table(csv_path)?;
    let stem = csv_path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| anyhow!("{}: no file stem", csv_path.display()))?
        .to_string();
    let dir = csv_path.parent().unwrap_or_else(|| Path::new("."));
    let target = |suffix: &str| dir.join(format!("{stem}.{suffix}.dat"));

    let first = table.columns.first().map(String::as_str);
    let mut written = Vec::new();
    match first {
        Some("t1") => {
            for (suffix, y) in [("heat", "Q_H"), ("efficiency", "eta")] {
                let path = target(suffix);
                write_series(&path, "t1", y, &table.series("t1", y)?)?;
                written.push(path);
            }
        }
        Some("tau") => {
            for (suffix, y) in [("efficiency_ir", "eta_ir"), ("irr_work", "W_ir_entropy")] {
                let path = target(suffix);
                write_series(&path, "tau", y, &table.series("tau", y)?)?;
                written.push(path);
            }
        }
        Some("cycle_index") => {
            let path = target("power_curve");
            write_series(
                &path,
                "eta_avg_pairwise",
                "power",
                &table.series("eta_avg_pairwise", "power")?,
            )?;
            written.push(path);
        }
        _ => bail!(
            "{}: header does not match a sweep or multicycle schema",
            csv_path.display()
        ),
    }
    Ok(written)
}

fn check(name: &str, pass: bool, detail: String, all_ok: &mut bool) {
    if pass {
        println!("check: {name} ... ok");
    } else {
        println!("check: {name} ... FAIL ({detail})");
        *all_ok = false;
    }
}

/// Fast self-contained consistency checks of the numerical core.  Returns
/// true when every check passes.
pub fn run_validation() -> bool {
    let mut ok = true;
    let params = EngineParams::default();
    let step = StepPolicy::default();

    let ca = curzon_ahlborn(&params).unwrap();
    let ca_expected = 1.0 - (params.b_low / params.b_high).sqrt();
    check(
        "Curzon-Ahlborn closed form",
        (ca - ca_expected).abs() < 1e-12,
        format!("{ca} vs {ca_expected}"),
        &mut ok,
    );

    // Dissipative evolution must conserve trace and stay positive.
    let start = initial_state(&params).unwrap();
    let gen = LindbladGenerator::new(&params, FieldProfile::Fixed(params.b_high), true);
    let evolved = evolve(&gen, &start, 2.0, &step).unwrap();
    check(
        "trace conservation and positivity",
        evolved.trace_drift < 1e-10 && evolved.min_eigenvalue_seen >= -1e-9,
        format!(
            "drift {:.2e}, min eigenvalue {:.2e}",
            evolved.trace_drift, evolved.min_eigenvalue_seen
        ),
        &mut ok,
    );

    let psi = [
        C64::new(0.6, 0.1),
        C64::new(0.2, -0.3),
        C64::new(0.5, 0.2),
        C64::new(0.1, 0.4),
    ];
    let rho = DensityMatrix::from_pure(&psi, StateLabel::Joint).unwrap();
    let order = convergence_order(&gen, &rho, 1.0, 4e-3).unwrap();
    check(
        "integrator convergence order",
        (3.7..=4.3).contains(&order),
        format!("measured {order:.3}"),
        &mut ok,
    );

    // Closed system against the matrix-exponential propagator.
    let closed = EngineParams {
        gamma: 0.0,
        ..params.clone()
    };
    let closed_gen = LindbladGenerator::new(&closed, FieldProfile::Fixed(closed.b_high), false);
    let fine = StepPolicy {
        step_size: 2e-4,
        ..StepPolicy::default()
    };
    let out = evolve(&closed_gen, &rho, 2.0, &fine).unwrap();
    let h = h_full(closed.b_high, &closed);
    let (values, vectors) = eigh4(&h).unwrap();
    let mut u = ComplexMatrix::zeros(4);
    for (k, lam) in values.iter().enumerate() {
        let phase = C64::new(0.0, -lam * 2.0).exp();
        for i in 0..4 {
            for j in 0..4 {
                let add = vectors.get(i, k) * phase * vectors.get(j, k).conj();
                u.set(i, j, u.get(i, j) + add);
            }
        }
    }
    let oracle = u.matmul(rho.matrix()).matmul(&u.adjoint());
    let expm_err = out.final_state.matrix().max_abs_diff(&oracle);
    check(
        "matrix-exponential oracle",
        expm_err < 1e-8,
        format!("deviation {expm_err:.2e}"),
        &mut ok,
    );

    // Slow decoupled ramp against the adiabatic closed form.
    let qp = EngineParams {
        gamma: 0.0,
        k: 0.0,
        ..params.clone()
    };
    let e_high = (qp.g * qp.g + qp.b_high * qp.b_high).sqrt();
    let e_low = (qp.g * qp.g + qp.b_low * qp.b_low).sqrt();
    let x = (-2.0 * e_high / qp.t_hot).exp();
    let (p_minus, p_plus) = (1.0 / (1.0 + x), x / (1.0 + x));
    let electronic =
        gibbs_state(&h_system(qp.b_high, &qp), qp.t_hot, StateLabel::Electronic).unwrap();
    let phonon = DensityMatrix::from_populations(&[1.0, 0.0], StateLabel::Vibrational).unwrap();
    let product = DensityMatrix::product(&electronic, &phonon).unwrap();
    let ramp = stroke_ramp(&product, &qp, RampDirection::Expand, 200.0, &step).unwrap();
    let w_expected = (p_minus - p_plus) * (e_high - e_low);
    let w_err = ((ramp.w - w_expected) / w_expected).abs();
    check(
        "quasistatic work closed form",
        w_err < 1e-5,
        format!("rel err {w_err:.2e}"),
        &mut ok,
    );

    // A short full cycle: per-stroke first law, Klein positivity of the
    // irreversible work, and the measurement-cost bound.
    let times = StrokeTimes {
        t_heat: 5.0,
        tau: 3.0,
    };
    let cycle = run_cycle(
        &start,
        &params,
        &times,
        MeasurementPolicy::PostSelectGround,
        &step,
    )
    .unwrap();
    let first_law = cycle
        .strokes
        .iter()
        .map(|s| (s.delta_u - s.q - s.w).abs())
        .fold(0.0, f64::max);
    check(
        "per-stroke first law",
        first_law < 1e-12,
        format!("max residual {first_law:.2e}"),
        &mut ok,
    );
    let klein = cycle.strokes[1]
        .w_ir_entropy
        .min(cycle.strokes[3].w_ir_entropy);
    check(
        "Klein positivity of irreversible work",
        klein >= -1e-10,
        format!("min {klein:.2e}"),
        &mut ok,
    );

    let t_low = effective_temperature(params.n_meas, params.omega).unwrap();
    let bound = t_low * std::f64::consts::LN_2;
    let mixed = DensityMatrix::product(
        &DensityMatrix::maximally_mixed(StateLabel::Electronic),
        &phonon,
    )
    .unwrap();
    let meas = stroke_measurement(&mixed, &params, MeasurementPolicy::FeedbackPiPulse).unwrap();
    let cost = meas.meas_cost.unwrap();
    let cycle_cost = cycle.meas_cost;
    check(
        "measurement-cost bound",
        (cost - bound).abs() < 1e-12 && cycle_cost >= 0.0 && cycle_cost <= bound + 1e-12,
        format!("mixed-input cost {cost:.6e} vs bound {bound:.6e}, cycle cost {cycle_cost:.6e}"),
        &mut ok,
    );

    ok
}
