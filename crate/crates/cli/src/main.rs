//! `otto-ion`: finite-time single-ion Otto engine experiments.
//!
//! Exit codes: 0 on success, 1 on configuration or I/O errors, 2 when any
//! simulation point fails an accuracy guard or a validation check fails.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use otto_cli::config::{load_config, SweepKind, SweepSpec};
use otto_cli::run::{emit_plotdata, run_experiment, run_validation};
use otto_core::{MeasurementPolicy, StrokeTimes};

#[derive(Parser)]
#[command(
    name = "otto-ion",
    version,
    about = "Finite-time quantum Otto engine on a single trapped ion: \
             cycle simulation, parameter sweeps, and figure data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolicyArg {
    /// Keep only the ground-state measurement branch.
    Postselect,
    /// Deterministic pi-pulse correction of the excited branch.
    Feedback,
}

impl From<PolicyArg> for MeasurementPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Postselect => MeasurementPolicy::PostSelectGround,
            PolicyArg::Feedback => MeasurementPolicy::FeedbackPiPulse,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Key=value config file; missing keys take the defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path; the manifest lands next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integrator step size.
    #[arg(long = "step-size")]
    step_size: Option<f64>,
    /// Measurement policy.
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
}

#[derive(Subcommand)]
enum Command {
    /// One cycle at the configured times; full ledger in one row.
    Single(RunArgs),
    /// Sweep the bath-contact duration t_heat over the configured grid.
    #[command(name = "sweep-t1")]
    SweepT1(RunArgs),
    /// Sweep the ramp duration tau over the configured grid.
    #[command(name = "sweep-tau")]
    SweepTau(RunArgs),
    /// Chained cycles; reports pairwise efficiency and power per cycle.
    Multicycle(RunArgs),
    /// Heat uptake vs. bath-contact time (preset sweep plus plot data).
    Fig3(RunArgs),
    /// Efficiency vs. bath-contact time (preset sweep plus plot data).
    Fig4(RunArgs),
    /// Irreversible efficiency vs. ramp time (preset sweep plus plot data).
    Fig5(RunArgs),
    /// Twenty chained cycles; efficiency-power curve (preset plus plot data).
    Fig6(RunArgs),
    /// Run the built-in numerical consistency checks.
    Validate,
}

/// How a subcommand shapes the spec beyond the config file.
struct Preset {
    kind: SweepKind,
    grid: Option<Vec<f64>>,
    times: Option<StrokeTimes>,
    policy: Option<MeasurementPolicy>,
    default_out: &'static str,
    plotdata: bool,
}

fn range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1.0 + 1e-9).floor() as usize;
    (0..count).map(|i| start + step * i as f64).collect()
}

fn preset_for(command: &Command) -> Option<Preset> {
    let preset = match command {
        Command::Single(_) => Preset {
            kind: SweepKind::SingleCycle,
            grid: None,
            times: None,
            policy: None,
            default_out: "single.csv",
            plotdata: false,
        },
        Command::SweepT1(_) => Preset {
            kind: SweepKind::SweepT1,
            grid: None,
            times: None,
            policy: None,
            default_out: "sweep_t1.csv",
            plotdata: false,
        },
        Command::SweepTau(_) => Preset {
            kind: SweepKind::SweepTau,
            grid: None,
            times: None,
            policy: None,
            default_out: "sweep_tau.csv",
            plotdata: false,
        },
        Command::Multicycle(_) => Preset {
            kind: SweepKind::MultiCycle,
            grid: None,
            times: None,
            policy: None,
            default_out: "multicycle.csv",
            plotdata: false,
        },
        Command::Fig3(_) => Preset {
            kind: SweepKind::SweepT1,
            grid: Some(range(5.0, 100.0, 5.0)),
            times: None,
            policy: None,
            default_out: "fig3.csv",
            plotdata: true,
        },
        Command::Fig4(_) => Preset {
            kind: SweepKind::SweepT1,
            grid: Some(range(10.0, 100.0, 5.0)),
            times: None,
            policy: None,
            default_out: "fig4.csv",
            plotdata: true,
        },
        Command::Fig5(_) => Preset {
            kind: SweepKind::SweepTau,
            grid: Some(vec![
                4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 24.0, 32.0, 48.0, 64.0, 96.0, 128.0,
                192.0, 256.0,
            ]),
            times: None,
            policy: None,
            default_out: "fig5.csv",
            plotdata: true,
        },
        Command::Fig6(_) => Preset {
            kind: SweepKind::MultiCycle,
            grid: None,
            times: Some(StrokeTimes {
                t_heat: 25.0,
                tau: 11.0,
            }),
            policy: Some(MeasurementPolicy::FeedbackPiPulse),
            default_out: "fig6.csv",
            plotdata: true,
        },
        Command::Validate => return None,
    };
    Some(preset)
}

fn args_of(command: &Command) -> &RunArgs {
    match command {
        Command::Single(a)
        | Command::SweepT1(a)
        | Command::SweepTau(a)
        | Command::Multicycle(a)
        | Command::Fig3(a)
        | Command::Fig4(a)
        | Command::Fig5(a)
        | Command::Fig6(a) => a,
        Command::Validate => unreachable!("validate takes no run arguments"),
    }
}

/// Builds the final spec: config file first, then the subcommand preset,
/// then explicit flags.
fn resolve_spec(command: &Command, preset: &Preset) -> anyhow::Result<(SweepSpec, PathBuf)> {
    let args = args_of(command);
    let mut spec = match &args.config {
        Some(path) => load_config(path)?,
        None => SweepSpec::default(),
    };

    spec.kind = preset.kind;
    if let Some(grid) = &preset.grid {
        spec.grid = grid.clone();
    }
    if let Some(times) = preset.times {
        spec.times = times;
    }
    if let Some(policy) = preset.policy {
        spec.policy = policy;
    } else if args.config.is_none() && preset.kind == SweepKind::MultiCycle {
        spec.policy = MeasurementPolicy::FeedbackPiPulse;
    }

    if let Some(h) = args.step_size {
        spec.step.step_size = h;
        spec.step.validate()?;
    }
    if let Some(policy) = args.policy {
        spec.policy = policy.into();
    }
    if let Some(out) = &args.out {
        spec.out = Some(out.clone());
    }

    match spec.kind {
        SweepKind::SweepT1 | SweepKind::SweepTau => {
            if spec.grid.is_empty() {
                anyhow::bail!(
                    "kind={} needs a grid; set grid= in the config file",
                    spec.kind.as_str()
                );
            }
        }
        SweepKind::MultiCycle | SweepKind::SingleCycle => spec.grid.clear(),
    }

    let out = spec
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(preset.default_out));
    Ok((spec, out))
}

fn execute(command: &Command) -> anyhow::Result<u8> {
    let Some(preset) = preset_for(command) else {
        // validate
        return Ok(if run_validation() { 0 } else { 2 });
    };
    let (spec, out) = resolve_spec(command, &preset)?;
    let outcome = run_experiment(&spec, &out)?;
    eprintln!(
        "wrote {} and {}",
        outcome.csv.display(),
        outcome.manifest.display()
    );
    if preset.plotdata {
        for path in emit_plotdata(&outcome.csv)? {
            eprintln!("wrote {}", path.display());
        }
    }
    if outcome.failed > 0 {
        eprintln!(
            "{} of {} points failed; see the status column",
            outcome.failed,
            outcome.failed.max(spec.grid.len().max(1))
        );
        return Ok(2);
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
