//! The four strokes: bath contact, the two field ramps, and the projective
//! measurement, plus the irreversible-work estimators used on ramps.

use crate::engine::{MeasurementPolicy, RampDirection, StrokeKind, StrokeRecord};
use crate::error::{Error, Result};
use crate::integrator::{evolve, StepPolicy};
use crate::model::{h_system, EngineParams, FieldProfile, LindbladGenerator, RampSchedule};
use crate::qcore::density::{DensityMatrix, StateLabel, Subsystem};
use crate::qcore::eig::eigh2;
use crate::qcore::entropy::{gibbs_state, relative_entropy};
use crate::qcore::expectation;
use crate::qcore::matrix::ComplexMatrix;

/// Reduced electronic state and its energy against `H_S(b)`.
fn system_energy(rho_joint: &DensityMatrix, b: f64, params: &EngineParams)
    -> Result<(DensityMatrix, f64)> {
    let reduced = rho_joint.partial_trace(Subsystem::Electronic)?;
    let u = expectation(&reduced, &h_system(b, params))?;
    Ok((reduced, u))
}

/// Stroke 1: contact with the hot bath at fixed `B_high` for `t_heat`.
///
/// The field does no work, so the electronic energy change is booked entirely
/// as heat.
pub fn stroke_heating(
    rho_joint: &DensityMatrix,
    params: &EngineParams,
    t_heat: f64,
    policy: &StepPolicy,
) -> Result<StrokeRecord> {
    if !(t_heat > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t_heat must be > 0, got {t_heat}"
        )));
    }
    let (_, u_start) = system_energy(rho_joint, params.b_high, params)?;
    let gen = LindbladGenerator::new(params, FieldProfile::Fixed(params.b_high), true);
    let out = evolve(&gen, rho_joint, t_heat, policy)?;
    let (reduced, u_end) = system_energy(&out.final_state, params.b_high, params)?;
    let q = u_end - u_start;
    Ok(StrokeRecord {
        kind: StrokeKind::Heating,
        delta_u: q,
        q,
        w: 0.0,
        w_ir_energy: 0.0,
        w_ir_entropy: 0.0,
        p_minus: None,
        p_plus: None,
        meas_cost: None,
        end_state_joint: out.final_state,
        end_state_system: reduced,
        trace_drift: out.trace_drift,
        min_eigenvalue: out.min_eigenvalue_seen,
    })
}

/// Strokes 2 and 4: linear field ramp over `tau`.
///
/// The energy change is booked entirely as work.  Two irreversibility
/// estimates are recorded: the energy excess over the adiabatic endpoint
/// built by [`adiabatic_reference_state`], and the hot-bath temperature times
/// the relative entropy to the Gibbs state of `H_S` at the final field.  The
/// bath stays connected during the ramp only when `params.ramp_dissipator`
/// is set.
pub fn stroke_ramp(
    rho_joint: &DensityMatrix,
    params: &EngineParams,
    direction: RampDirection,
    tau: f64,
    policy: &StepPolicy,
) -> Result<StrokeRecord> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be > 0, got {tau}")));
    }
    let (b_start, b_end, kind) = match direction {
        RampDirection::Expand => (params.b_high, params.b_low, StrokeKind::Expansion),
        RampDirection::Compress => (params.b_low, params.b_high, StrokeKind::Compression),
    };
    let (reduced_start, u_start) = system_energy(rho_joint, b_start, params)?;
    let schedule = RampSchedule::new(b_start, b_end, tau)?;
    let gen = LindbladGenerator::new(
        params,
        FieldProfile::Ramp(schedule),
        params.ramp_dissipator,
    );
    let out = evolve(&gen, rho_joint, tau, policy)?;
    let (reduced_end, u_end) = system_energy(&out.final_state, b_end, params)?;
    let w = u_end - u_start;

    let h_end = h_system(b_end, params);
    let rho_adia = adiabatic_reference_state(&reduced_start, b_start, b_end, params)?;
    let w_ir_energy = irr_work_energy(&reduced_end, &rho_adia, &h_end)?;
    let rho_ref = gibbs_state(&h_end, params.t_hot, StateLabel::Electronic)?;
    let w_ir_entropy = irr_work_entropy(&reduced_end, &rho_ref, params.t_hot)?;

    Ok(StrokeRecord {
        kind,
        delta_u: w,
        q: 0.0,
        w,
        w_ir_energy,
        w_ir_entropy,
        p_minus: None,
        p_plus: None,
        meas_cost: None,
        end_state_joint: out.final_state,
        end_state_system: reduced_end,
        trace_drift: out.trace_drift,
        min_eigenvalue: out.min_eigenvalue_seen,
    })
}

/// Endpoint of an ideal (infinitely slow) ramp: the populations of
/// `rho_s_start` in the eigenbasis of `H_S(b_start)` carried unchanged onto
/// the eigenbasis of `H_S(b_end)`, coherences dropped.
pub fn adiabatic_reference_state(
    rho_s_start: &DensityMatrix,
    b_start: f64,
    b_end: f64,
    params: &EngineParams,
) -> Result<DensityMatrix> {
    if rho_s_start.matrix().dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rho_s_start.matrix().dim(),
        });
    }
    let spec_start = eigh2(&h_system(b_start, params))?;
    let spec_end = eigh2(&h_system(b_end, params))?;
    let mut out = ComplexMatrix::zeros(2);
    for level in 0..2 {
        let p = spec_start.population(rho_s_start.matrix(), level).max(0.0);
        let projector = ComplexMatrix::outer(&spec_end.eigenvectors[level]);
        out.axpy(p, &projector);
    }
    Ok(DensityMatrix::trusted(
        out.hermitized(),
        rho_s_start.label(),
    ))
}

/// Irreversible work as an energy difference: the final state's energy minus
/// the adiabatic endpoint's energy, both against the final Hamiltonian.
pub fn irr_work_energy(
    rho_s_final: &DensityMatrix,
    rho_s_adia: &DensityMatrix,
    h_final: &ComplexMatrix,
) -> Result<f64> {
    Ok(expectation(rho_s_final, h_final)? - expectation(rho_s_adia, h_final)?)
}

/// Irreversible work as `t_hot` times the relative entropy between the final
/// state and the thermal reference at the final field.  Nonnegative; infinite
/// only for a rank-deficient reference.
pub fn irr_work_entropy(
    rho_s_final: &DensityMatrix,
    rho_ref: &DensityMatrix,
    t_hot: f64,
) -> Result<f64> {
    if !(t_hot > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t_hot must be > 0, got {t_hot}"
        )));
    }
    Ok(t_hot * relative_entropy(rho_s_final, rho_ref)?)
}

/// Stroke 3: instantaneous projective measurement of the electronic state at
/// `B_low`.
///
/// The electron is reset to the ground state; the phonon keeps either the
/// ground-conditioned state (post-selection) or the full outcome mixture
/// (feedback flip).  Books the released heat `Q_L` and the information cost
/// `M = -T_L (p_- ln p_- + p_+ ln p_+)` with `T_L` derived from the
/// configured measurement-stage occupation.
pub fn stroke_measurement(
    rho_joint: &DensityMatrix,
    params: &EngineParams,
    policy: MeasurementPolicy,
) -> Result<StrokeRecord> {
    let (_, u_start) = system_energy(rho_joint, params.b_low, params)?;
    let outcome = crate::qcore::project_electronic_ground(rho_joint)?;

    let phonon = match policy {
        MeasurementPolicy::PostSelectGround => match outcome.phonon_given_minus {
            Some(ref state) if outcome.p_minus >= 1e-14 => state.clone(),
            _ => {
                return Err(Error::MeasurementFailed {
                    p_minus: outcome.p_minus,
                })
            }
        },
        MeasurementPolicy::FeedbackPiPulse => rho_joint.partial_trace(Subsystem::Vibrational)?,
    };

    let ground = DensityMatrix::from_populations(&[1.0, 0.0], StateLabel::Electronic)?;
    let end_joint = DensityMatrix::product(&ground, &phonon)?;
    let u_end = expectation(&ground, &h_system(params.b_low, params))?;
    let q = u_end - u_start;

    let meas_cost = if params.n_meas > 0.0 {
        let t_low = crate::model::effective_temperature(params.n_meas, params.omega)?;
        let plogp = |p: f64| if p > 0.0 { p * p.ln() } else { 0.0 };
        -t_low * (plogp(outcome.p_minus) + plogp(outcome.p_plus))
    } else {
        0.0
    };

    let min_eigenvalue = end_joint.min_eigenvalue()?;
    Ok(StrokeRecord {
        kind: StrokeKind::Measurement,
        delta_u: q,
        q,
        w: 0.0,
        w_ir_energy: 0.0,
        w_ir_entropy: 0.0,
        p_minus: Some(outcome.p_minus),
        p_plus: Some(outcome.p_plus),
        meas_cost: Some(meas_cost),
        end_state_joint: end_joint,
        end_state_system: ground,
        trace_drift: 0.0,
        min_eigenvalue,
    })
}
