//! Fixed-step classical Runge-Kutta (RK4) propagation of the master equation,
//! with trace and positivity monitoring.
//!
//! The stepper never renormalizes the state: trace drift and negative
//! eigenvalues are diagnostics of integration accuracy, and exceeding the
//! configured limits is reported as an error rather than masked.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::LindbladGenerator;
use crate::qcore::density::DensityMatrix;
use crate::qcore::eig::{eigh2, eigvalsh4};
use crate::qcore::matrix::ComplexMatrix;

/// How often (in steps) the trace and spectrum checks run.
const CHECK_INTERVAL: u64 = 100;

/// Step size and accuracy limits for [`evolve`].
#[derive(Clone, Debug, PartialEq)]
pub struct StepPolicy {
    /// Integration step.
    pub step_size: f64,
    /// Largest tolerated |Tr rho - 1| before the run aborts.
    pub max_trace_drift: f64,
    /// Largest tolerated negative eigenvalue magnitude before the run aborts.
    pub max_negativity: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self {
            step_size: 1e-3,
            max_trace_drift: 1e-8,
            max_negativity: 1e-9,
        }
    }
}

impl StepPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "step_size must be > 0, got {}",
                self.step_size
            )));
        }
        if !(self.max_trace_drift > 0.0) {
            return Err(Error::InvalidArgument(
                "max_trace_drift must be > 0".into(),
            ));
        }
        if !(self.max_negativity >= 0.0) {
            return Err(Error::InvalidArgument(
                "max_negativity must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Final state plus the accuracy diagnostics accumulated along the way.
#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub final_state: DensityMatrix,
    /// Largest |Tr rho - 1| seen at any checkpoint.
    pub trace_drift: f64,
    /// Smallest eigenvalue seen at any checkpoint.
    pub min_eigenvalue_seen: f64,
    pub steps_taken: u64,
}

fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    let h = m.hermitized();
    match h.dim() {
        2 => eigh2(&h).expect("hermitized input").eigenvalues[0],
        4 => eigvalsh4(&h).expect("hermitized input")[0],
        d => unreachable!("unsupported dimension {d}"),
    }
}

/// One RK4 step of size `h` starting at time `t`.  Evaluation times are
/// clamped to `[0, t_max]` so the final partial step cannot poke past the
/// profile domain by a rounding ulp.
fn rk4_step(
    gen: &LindbladGenerator,
    t: f64,
    h: f64,
    t_max: f64,
    y: &ComplexMatrix,
) -> ComplexMatrix {
    let clamp = |x: f64| x.clamp(0.0, t_max);

    let k1 = gen.rhs(clamp(t), y);
    let mut stage = y.clone();
    stage.axpy(0.5 * h, &k1);
    let k2 = gen.rhs(clamp(t + 0.5 * h), &stage);
    stage = y.clone();
    stage.axpy(0.5 * h, &k2);
    let k3 = gen.rhs(clamp(t + 0.5 * h), &stage);
    stage = y.clone();
    stage.axpy(h, &k3);
    let k4 = gen.rhs(clamp(t + h), &stage);

    let mut next = y.clone();
    next.axpy(h / 6.0, &k1);
    next.axpy(h / 3.0, &k2);
    next.axpy(h / 3.0, &k3);
    next.axpy(h / 6.0, &k4);
    next
}

/// Propagates `rho` for `duration` with fixed step `h`, no checks, no final
/// re-Hermitization.  Returns the raw matrix and the step count.
fn evolve_raw(
    gen: &LindbladGenerator,
    rho: &ComplexMatrix,
    duration: f64,
    h: f64,
) -> (ComplexMatrix, u64) {
    let n_full = (duration / h).floor() as u64;
    let mut y = rho.clone();
    for i in 0..n_full {
        let t = i as f64 * h;
        y = rk4_step(gen, t, h, duration, &y);
    }
    let t_done = n_full as f64 * h;
    let remainder = duration - t_done;
    let mut steps = n_full;
    if remainder > 1e-12 * duration.max(1.0) {
        y = rk4_step(gen, t_done, remainder, duration, &y);
        steps += 1;
    }
    (y, steps)
}

/// Integrates the master equation for `duration` starting from `rho0`.
///
/// Runs fixed-step RK4 with a shorter final step when `duration` is not a
/// multiple of the step size.  Every [`CHECK_INTERVAL`] steps, and again at
/// the end, the trace and the smallest eigenvalue are checked against the
/// policy; a violation aborts with [`Error::IntegrationAccuracy`].  The final
/// state is re-Hermitized once before being returned.
pub fn evolve(
    gen: &LindbladGenerator,
    rho0: &DensityMatrix,
    duration: f64,
    policy: &StepPolicy,
) -> Result<EvolutionResult> {
    policy.validate()?;
    if !(duration >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "duration must be >= 0, got {duration}"
        )));
    }
    if rho0.matrix().dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho0.matrix().dim(),
        });
    }

    let h = policy.step_size;
    let n_full = (duration / h).floor() as u64;
    let mut y = rho0.matrix().clone();
    let mut steps: u64 = 0;
    let mut trace_drift: f64 = 0.0;
    let mut min_eig_seen: f64 = f64::INFINITY;

    let mut check = |y: &ComplexMatrix, steps: u64| -> Result<()> {
        let drift = (y.trace() - C64::new(1.0, 0.0)).norm();
        trace_drift = trace_drift.max(drift);
        let lam = min_eigenvalue(y);
        min_eig_seen = min_eig_seen.min(lam);
        if drift > policy.max_trace_drift || lam < -policy.max_negativity {
            return Err(Error::IntegrationAccuracy {
                trace_drift: drift,
                min_eigenvalue: lam,
                steps,
            });
        }
        Ok(())
    };

    check(&y, 0)?;
    for i in 0..n_full {
        let t = i as f64 * h;
        y = rk4_step(gen, t, h, duration, &y);
        steps += 1;
        if steps % CHECK_INTERVAL == 0 {
            check(&y, steps)?;
        }
    }
    let t_done = n_full as f64 * h;
    let remainder = duration - t_done;
    if remainder > 1e-12 * duration.max(1.0) {
        y = rk4_step(gen, t_done, remainder, duration, &y);
        steps += 1;
    }
    check(&y, steps)?;

    let final_state = DensityMatrix::trusted(y.hermitized(), rho0.label());
    Ok(EvolutionResult {
        final_state,
        trace_drift,
        min_eigenvalue_seen: min_eig_seen,
        steps_taken: steps,
    })
}

/// Empirical convergence order of the stepper on the given problem.
///
/// Propagates with steps `h`, `h/2`, and `h/4` and returns
/// `log2(|y_h - y_{h/2}| / |y_{h/2} - y_{h/4}|)`.  Successive refinement
/// differences of an order-`p` method shrink by `2^p`, so RK4 should report
/// close to 4.
pub fn convergence_order(
    gen: &LindbladGenerator,
    rho0: &DensityMatrix,
    duration: f64,
    coarse_step: f64,
) -> Result<f64> {
    if !(coarse_step > 0.0) || !(duration > 0.0) {
        return Err(Error::InvalidArgument(
            "convergence probe needs positive duration and step".into(),
        ));
    }
    let (y1, _) = evolve_raw(gen, rho0.matrix(), duration, coarse_step);
    let (y2, _) = evolve_raw(gen, rho0.matrix(), duration, coarse_step / 2.0);
    let (y4, _) = evolve_raw(gen, rho0.matrix(), duration, coarse_step / 4.0);
    let d1 = y1.max_abs_diff(&y2);
    let d2 = y2.max_abs_diff(&y4);
    if d2 == 0.0 {
        return Err(Error::InvalidArgument(
            "refinement differences vanished; step too small to resolve".into(),
        ));
    }
    Ok((d1 / d2).log2())
}
