//! The four-stroke engine protocol and its thermodynamic ledger.
//!
//! One cycle runs: hot-bath contact at fixed high field, field ramp down,
//! projective electronic measurement standing in for the cold bath, field
//! ramp back up.  Every stroke books the internal-energy change of the
//! electronic subsystem against `H_S(B)` at the stroke's endpoint fields, and
//! the ramps additionally record two estimates of the irreversible work.
//!
//! Sign conventions: `delta_u`, `q`, and `w` are internal-energy differences
//! (energy gained by the electron is positive).  The cycle-level `w_net`
//! flips the sign of the summed ramp work so that a working engine reports
//! `w_net > 0`.

mod cycle;
mod stroke;

pub use cycle::{curzon_ahlborn, initial_state, run_cycle, run_cycles};
pub use stroke::{
    adiabatic_reference_state, irr_work_energy, irr_work_entropy, stroke_heating,
    stroke_measurement, stroke_ramp,
};

use crate::error::{Error, Result};
use crate::qcore::density::DensityMatrix;

/// Which stroke a record belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrokeKind {
    Heating,
    Expansion,
    Measurement,
    Compression,
}

impl StrokeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StrokeKind::Heating => "heating",
            StrokeKind::Expansion => "expansion",
            StrokeKind::Measurement => "measurement",
            StrokeKind::Compression => "compression",
        }
    }
}

/// Ramp direction for [`stroke_ramp`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RampDirection {
    /// `B_high` down to `B_low`.
    Expand,
    /// `B_low` up to `B_high`.
    Compress,
}

/// How the measurement stroke resets the electronic state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasurementPolicy {
    /// Keep only the ground-outcome branch; fails when its probability
    /// vanishes.
    PostSelectGround,
    /// Flip the excited branch back to the ground state and keep the full
    /// phonon mixture; deterministic, suited to multi-cycle averaging.
    FeedbackPiPulse,
}

impl MeasurementPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasurementPolicy::PostSelectGround => "postselect",
            MeasurementPolicy::FeedbackPiPulse => "feedback",
        }
    }
}

/// Stroke durations: `t_heat` for the bath contact, `tau` for each ramp.
/// The measurement is instantaneous, so a cycle takes `t_heat + 2 tau`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrokeTimes {
    pub t_heat: f64,
    pub tau: f64,
}

impl StrokeTimes {
    pub fn new(t_heat: f64, tau: f64) -> Result<Self> {
        let times = Self { t_heat, tau };
        times.validate()?;
        Ok(times)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_heat > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "t_heat must be > 0, got {}",
                self.t_heat
            )));
        }
        if !(self.tau > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tau must be > 0, got {}",
                self.tau
            )));
        }
        Ok(())
    }

    pub fn cycle_time(&self) -> f64 {
        self.t_heat + 2.0 * self.tau
    }
}

/// Per-stroke ledger entry.
///
/// `delta_u`, `q`, and `w` refer to the electronic subsystem (reduced state
/// against `H_S` at the endpoint fields).  The irreversible-work fields are
/// zero except on ramps; the probability and cost fields are present only on
/// the measurement stroke.
#[derive(Clone, Debug)]
pub struct StrokeRecord {
    pub kind: StrokeKind,
    /// Electronic internal-energy change over the stroke.
    pub delta_u: f64,
    /// Heat attributed to the stroke (nonzero on heating and measurement).
    pub q: f64,
    /// Work attributed to the stroke (nonzero on ramps, equal to `delta_u`).
    pub w: f64,
    /// Irreversible work as the energy excess over the adiabatic endpoint.
    pub w_ir_energy: f64,
    /// Irreversible work as hot-bath temperature times the relative entropy
    /// to the thermal reference at the final field.
    pub w_ir_entropy: f64,
    /// Ground-outcome probability (measurement only).
    pub p_minus: Option<f64>,
    /// Excited-outcome probability (measurement only).
    pub p_plus: Option<f64>,
    /// Information cost of the measurement reset (measurement only).
    pub meas_cost: Option<f64>,
    pub end_state_joint: DensityMatrix,
    /// Reduced electronic state at the end of the stroke.
    pub end_state_system: DensityMatrix,
    /// Largest trace deviation seen while integrating this stroke.
    pub trace_drift: f64,
    /// Smallest state eigenvalue seen while integrating this stroke.
    pub min_eigenvalue: f64,
}

/// Cycle-level ledger aggregated from the four strokes.
///
/// Efficiencies are reported as NaN when `q_hot <= 0`; `operational` flags
/// whether the cycle both absorbed heat and delivered work.
#[derive(Clone, Debug)]
pub struct CycleRecord {
    pub strokes: [StrokeRecord; 4],
    /// Heat absorbed during the bath contact.
    pub q_hot: f64,
    /// Work output of the cycle: minus the summed ramp work.
    pub w_net: f64,
    /// Total irreversible work of the two ramps (relative-entropy estimate).
    pub w_ir_total: f64,
    /// `w_net / q_hot`.
    pub eta: f64,
    /// `(w_net - w_ir_total) / q_hot`.
    pub eta_ir: f64,
    /// Information cost `M` of the measurement reset.
    pub meas_cost: f64,
    /// `w_net / (q_hot + meas_cost)`.
    pub eta_m: f64,
    pub cycle_time: f64,
    pub operational: bool,
}

/// Outcome of chaining several cycles, each starting from the previous end
/// state.
#[derive(Clone, Debug)]
pub struct MultiCycleReport {
    pub cycles: Vec<CycleRecord>,
    /// Pairwise-averaged irreversible efficiency, defined from the second
    /// cycle on: `[(w_n + w_{n-1}) - (wir_n + wir_{n-1})] / (q_n + q_{n-1})`.
    pub eta_avg_pairwise: Vec<f64>,
    /// `eta_avg_pairwise / cycle_time`, aligned with `eta_avg_pairwise`.
    pub power: Vec<f64>,
    /// Per-cycle `w_net / cycle_time`, aligned with `cycles`.
    pub power_work: Vec<f64>,
}
