//! Flat key=value experiment configuration.
//!
//! One key per line, `#` starts a comment line, blank lines are ignored.
//! Missing keys fall back to the default engine parameters; unknown keys are
//! rejected with the offending line number.  Grids accept either a
//! comma-separated list (`4,8,16`) or an inclusive range `start:stop:step`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use otto_core::{EngineParams, MeasurementPolicy, StepPolicy, StrokeTimes};

/// Which experiment a config describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    /// One cycle at fixed times; every ledger entry in one row.
    SingleCycle,
    /// Sweep the bath-contact duration, one cycle per grid point.
    SweepT1,
    /// Sweep the ramp duration, one cycle per grid point.
    SweepTau,
    /// Chained cycles with the feedback measurement policy.
    MultiCycle,
}

impl SweepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepKind::SingleCycle => "single",
            SweepKind::SweepT1 => "sweep_t1",
            SweepKind::SweepTau => "sweep_tau",
            SweepKind::MultiCycle => "multicycle",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "single" | "single_cycle" => Ok(SweepKind::SingleCycle),
            "sweep_t1" => Ok(SweepKind::SweepT1),
            "sweep_tau" => Ok(SweepKind::SweepTau),
            "multicycle" => Ok(SweepKind::MultiCycle),
            other => bail!(
                "unknown kind `{other}` (expected single, sweep_t1, sweep_tau, or multicycle)"
            ),
        }
    }
}

/// Fully resolved experiment description.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    /// Swept values (t_heat or tau); empty for single and multicycle runs.
    pub grid: Vec<f64>,
    /// Cycle count for multicycle runs.
    pub cycles: usize,
    pub params: EngineParams,
    pub times: StrokeTimes,
    pub step: StepPolicy,
    pub policy: MeasurementPolicy,
    pub out: Option<PathBuf>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            kind: SweepKind::SingleCycle,
            grid: Vec::new(),
            cycles: 20,
            params: EngineParams::default(),
            times: StrokeTimes {
                t_heat: 100.0,
                tau: 256.0,
            },
            step: StepPolicy::default(),
            policy: MeasurementPolicy::PostSelectGround,
            out: None,
        }
    }
}

fn parse_policy(s: &str) -> Result<MeasurementPolicy> {
    match s {
        "postselect" => Ok(MeasurementPolicy::PostSelectGround),
        "feedback" => Ok(MeasurementPolicy::FeedbackPiPulse),
        other => bail!("unknown policy `{other}` (expected postselect or feedback)"),
    }
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| anyhow!("{key} expects a number, got `{s}`"))
}

fn parse_bool(key: &str, s: &str) -> Result<bool> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        other => bail!("{key} expects true or false, got `{other}`"),
    }
}

/// Expands `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            bail!("range grid must be start:stop:step, got `{s}`");
        }
        let start = parse_f64("grid start", parts[0])?;
        let stop = parse_f64("grid stop", parts[1])?;
        let step = parse_f64("grid step", parts[2])?;
        if !(step > 0.0) {
            bail!("grid step must be > 0, got {step}");
        }
        if stop < start {
            bail!("grid stop {stop} lies below start {start}");
        }
        let count = ((stop - start) / step + 1.0 + 1e-9).floor() as usize;
        (0..count).map(|i| start + step * i as f64).collect()
    } else {
        s.split(',')
            .map(|v| parse_f64("grid entry", v.trim()))
            .collect::<Result<Vec<f64>>>()?
    };
    if values.is_empty() {
        bail!("grid is empty");
    }
    if values.iter().any(|v| !v.is_finite()) {
        bail!("grid entries must be finite");
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        bail!("grid must be strictly increasing");
    }
    Ok(values)
}

/// Parses config text.  `source` names the input in error messages.
pub fn parse_config(text: &str, source: &str) -> Result<SweepSpec> {
    let mut spec = SweepSpec::default();
    let mut grid_set = false;
    let mut cycles_set = false;
    let mut policy_set = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{source}:{line_no}: expected key=value, got `{line}`"))?;
        let (key, value) = (key.trim(), value.trim());
        let located = |e: anyhow::Error| anyhow!("{source}:{line_no}: {e}");

        match key {
            "kind" => spec.kind = SweepKind::parse(value).map_err(located)?,
            "grid" => {
                spec.grid = parse_grid(value).map_err(located)?;
                grid_set = true;
            }
            "cycles" => {
                spec.cycles = value
                    .parse::<usize>()
                    .map_err(|_| located(anyhow!("cycles expects a positive integer, got `{value}`")))?;
                cycles_set = true;
            }
            "t_heat" => spec.times.t_heat = parse_f64(key, value).map_err(located)?,
            "tau" => spec.times.tau = parse_f64(key, value).map_err(located)?,
            "g" => spec.params.g = parse_f64(key, value).map_err(located)?,
            "k" => spec.params.k = parse_f64(key, value).map_err(located)?,
            "omega" => spec.params.omega = parse_f64(key, value).map_err(located)?,
            "gamma" => spec.params.gamma = parse_f64(key, value).map_err(located)?,
            "n_th" => spec.params.n_th = parse_f64(key, value).map_err(located)?,
            "T_hot" => spec.params.t_hot = parse_f64(key, value).map_err(located)?,
            "B_high" => spec.params.b_high = parse_f64(key, value).map_err(located)?,
            "B_low" => spec.params.b_low = parse_f64(key, value).map_err(located)?,
            "n_vib0" => spec.params.n_vib0 = parse_f64(key, value).map_err(located)?,
            "n_meas" => spec.params.n_meas = parse_f64(key, value).map_err(located)?,
            "ramp_dissipator" => {
                spec.params.ramp_dissipator = parse_bool(key, value).map_err(located)?
            }
            "step_size" => spec.step.step_size = parse_f64(key, value).map_err(located)?,
            "policy" => {
                spec.policy = parse_policy(value).map_err(located)?;
                policy_set = true;
            }
            "out" => spec.out = Some(PathBuf::from(value)),
            other => bail!("{source}:{line_no}: unknown key `{other}`"),
        }
    }

    if !policy_set && spec.kind == SweepKind::MultiCycle {
        spec.policy = MeasurementPolicy::FeedbackPiPulse;
    }
    match spec.kind {
        SweepKind::SweepT1 | SweepKind::SweepTau => {
            if !grid_set {
                bail!("{source}: kind={} requires a grid", spec.kind.as_str());
            }
            if cycles_set {
                bail!("{source}: cycles applies only to kind=multicycle");
            }
        }
        SweepKind::MultiCycle => {
            if grid_set {
                bail!("{source}: grid applies only to sweep kinds; use cycles");
            }
            if spec.cycles < 1 {
                bail!("{source}: cycles must be >= 1");
            }
        }
        SweepKind::SingleCycle => {
            if grid_set {
                bail!("{source}: grid applies only to sweep kinds");
            }
            if cycles_set {
                bail!("{source}: cycles applies only to kind=multicycle");
            }
        }
    }

    spec.params
        .validate()
        .map_err(|e| anyhow!("{source}: {e}"))?;
    spec.times.validate().map_err(|e| anyhow!("{source}: {e}"))?;
    spec.step.validate().map_err(|e| anyhow!("{source}: {e}"))?;
    Ok(spec)
}

/// Loads and parses a config file.
pub fn load_config(path: &Path) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    parse_config(&text, &path.display().to_string())
}

/// Serializes a spec so that `parse_config(write_config(spec)) == spec`.
pub fn write_config(spec: &SweepSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "kind={}", spec.kind.as_str());
    match spec.kind {
        SweepKind::SweepT1 | SweepKind::SweepTau => {
            let grid: Vec<String> = spec.grid.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(s, "grid={}", grid.join(","));
        }
        SweepKind::MultiCycle => {
            let _ = writeln!(s, "cycles={}", spec.cycles);
        }
        SweepKind::SingleCycle => {}
    }
    let _ = writeln!(s, "t_heat={}", spec.times.t_heat);
    let _ = writeln!(s, "tau={}", spec.times.tau);
    let p = &spec.params;
    let _ = writeln!(s, "g={}", p.g);
    let _ = writeln!(s, "k={}", p.k);
    let _ = writeln!(s, "omega={}", p.omega);
    let _ = writeln!(s, "gamma={}", p.gamma);
    let _ = writeln!(s, "n_th={}", p.n_th);
    let _ = writeln!(s, "T_hot={}", p.t_hot);
    let _ = writeln!(s, "B_high={}", p.b_high);
    let _ = writeln!(s, "B_low={}", p.b_low);
    let _ = writeln!(s, "n_vib0={}", p.n_vib0);
    let _ = writeln!(s, "n_meas={}", p.n_meas);
    let _ = writeln!(s, "ramp_dissipator={}", p.ramp_dissipator);
    let _ = writeln!(s, "step_size={}", spec.step.step_size);
    let _ = writeln!(s, "policy={}", spec.policy.as_str());
    if let Some(out) = &spec.out {
        let _ = writeln!(s, "out={}", out.display());
    }
    s
}
