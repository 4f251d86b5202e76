//! Density matrices over the electronic qubit, the two-level vibrational
//! mode, and their joint space.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qcore::eig::eigvalsh4;
use crate::qcore::matrix::ComplexMatrix;

/// Which Hilbert space a density matrix lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateLabel {
    /// 4x4 electron (x) vibration state.
    Joint,
    /// 2x2 electronic qubit state.
    Electronic,
    /// 2x2 vibrational mode state.
    Vibrational,
}

impl StateLabel {
    pub fn dim(self) -> usize {
        match self {
            StateLabel::Joint => 4,
            StateLabel::Electronic | StateLabel::Vibrational => 2,
        }
    }
}

/// Subsystem selector for partial traces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    Electronic,
    Vibrational,
}

/// Validated density matrix: Hermitian, unit trace (to within the integration
/// budget), eigenvalues bounded below by a small negativity allowance.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    label: StateLabel,
}

/// Construction-time trace tolerance.  States coming straight out of the
/// integrator may carry up to this much trace drift.
const TRACE_TOL: f64 = 1e-8;
const HERM_TOL: f64 = 1e-10;
const NEGATIVITY_TOL: f64 = 1e-9;

impl DensityMatrix {
    /// Validates and wraps a raw matrix.
    pub fn new(matrix: ComplexMatrix, label: StateLabel) -> Result<Self> {
        if matrix.dim() != label.dim() {
            return Err(Error::DimensionMismatch {
                expected: label.dim(),
                got: matrix.dim(),
            });
        }
        let dev = matrix.hermiticity_deviation();
        if dev > HERM_TOL {
            return Err(Error::NotHermitian { max_dev: dev });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace {} + {}i is not 1 within {TRACE_TOL:e}",
                tr.re, tr.im
            )));
        }
        let min_eig = min_eigenvalue(&matrix)?;
        if min_eig < -NEGATIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { matrix, label })
    }

    /// Wraps a matrix that is trusted by construction (pure states, convex
    /// mixtures of validated states).  Crate-internal.
    pub(crate) fn trusted(matrix: ComplexMatrix, label: StateLabel) -> Self {
        debug_assert_eq!(matrix.dim(), label.dim());
        Self { matrix, label }
    }

    /// Pure state `|v><v|` from an unnormalized vector.
    pub fn from_pure(v: &[C64], label: StateLabel) -> Result<Self> {
        if v.len() != label.dim() {
            return Err(Error::DimensionMismatch {
                expected: label.dim(),
                got: v.len(),
            });
        }
        let norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm_sqr <= 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let scaled: Vec<C64> = v.iter().map(|z| z / norm_sqr.sqrt()).collect();
        Ok(Self {
            matrix: ComplexMatrix::outer(&scaled),
            label,
        })
    }

    /// Diagonal mixture from classical probabilities (must sum to 1).
    pub fn from_populations(p: &[f64], label: StateLabel) -> Result<Self> {
        if p.len() != label.dim() {
            return Err(Error::DimensionMismatch {
                expected: label.dim(),
                got: p.len(),
            });
        }
        if p.iter().any(|&x| x < 0.0) {
            return Err(Error::InvalidArgument("negative population".into()));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "populations sum to {total}, not 1"
            )));
        }
        Ok(Self {
            matrix: ComplexMatrix::diagonal(p),
            label,
        })
    }

    pub fn maximally_mixed(label: StateLabel) -> Self {
        let d = label.dim();
        Self {
            matrix: ComplexMatrix::identity(d).scale_re(1.0 / d as f64),
            label,
        }
    }

    /// Product state `rho_e (x) rho_v` on the joint space.
    pub fn product(electronic: &DensityMatrix, vibrational: &DensityMatrix) -> Result<Self> {
        if electronic.label != StateLabel::Electronic {
            return Err(Error::InvalidArgument(
                "first factor must be electronic".into(),
            ));
        }
        if vibrational.label != StateLabel::Vibrational {
            return Err(Error::InvalidArgument(
                "second factor must be vibrational".into(),
            ));
        }
        let joint = crate::qcore::matrix::tensor_product(&electronic.matrix, &vibrational.matrix)?;
        Ok(Self {
            matrix: joint,
            label: StateLabel::Joint,
        })
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    #[inline]
    pub fn label(&self) -> StateLabel {
        self.label
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Smallest eigenvalue; the positivity diagnostic.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        min_eigenvalue(&self.matrix)
    }

    /// Traces out one subsystem of a joint state.
    ///
    /// `keep` names the subsystem that remains.  With the electronic-first
    /// index convention `i = 2 e + v`:
    /// keeping the electron sums over `v`, keeping the mode sums over `e`.
    pub fn partial_trace(&self, keep: Subsystem) -> Result<DensityMatrix> {
        if self.label != StateLabel::Joint {
            return Err(Error::InvalidArgument(
                "partial trace requires a joint state".into(),
            ));
        }
        let rho = &self.matrix;
        let mut out = ComplexMatrix::zeros(2);
        match keep {
            Subsystem::Electronic => {
                for e in 0..2 {
                    for ep in 0..2 {
                        let mut acc = C64::new(0.0, 0.0);
                        for v in 0..2 {
                            acc += rho.get(2 * e + v, 2 * ep + v);
                        }
                        out.set(e, ep, acc);
                    }
                }
                Ok(DensityMatrix::trusted(out, StateLabel::Electronic))
            }
            Subsystem::Vibrational => {
                for v in 0..2 {
                    for vp in 0..2 {
                        let mut acc = C64::new(0.0, 0.0);
                        for e in 0..2 {
                            acc += rho.get(2 * e + v, 2 * e + vp);
                        }
                        out.set(v, vp, acc);
                    }
                }
                Ok(DensityMatrix::trusted(out, StateLabel::Vibrational))
            }
        }
    }
}

fn min_eigenvalue(matrix: &ComplexMatrix) -> Result<f64> {
    match matrix.dim() {
        2 => {
            let s = crate::qcore::eig::eigh2(&matrix.hermitized())?;
            Ok(s.eigenvalues[0])
        }
        4 => {
            let values = eigvalsh4(&matrix.hermitized())?;
            Ok(values[0])
        }
        d => Err(Error::InvalidArgument(format!("unsupported dimension {d}"))),
    }
}

/// Real expectation value `Tr[rho h]` of a Hermitian observable.
pub fn expectation(rho: &DensityMatrix, h: &ComplexMatrix) -> Result<f64> {
    if rho.matrix().dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.matrix().dim(),
            got: h.dim(),
        });
    }
    let n = h.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += rho.matrix().get(i, k) * h.get(k, i);
        }
    }
    assert!(
        acc.im.abs() < 1e-10,
        "expectation value has imaginary part {:e}",
        acc.im
    );
    Ok(acc.re)
}

/// Outcome of the projective electronic measurement `{|-><-|, |+><+|}`.
///
/// Conditional phonon states are `None` when the matching branch probability
/// is below 1e-14 and the conditional state is undefined.
#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    pub p_minus: f64,
    pub p_plus: f64,
    pub phonon_given_minus: Option<DensityMatrix>,
    pub phonon_given_plus: Option<DensityMatrix>,
}

/// Projects the electronic factor of a joint state onto `{|->, |+>}` and
/// returns branch probabilities with the conditional phonon states.
pub fn project_electronic_ground(rho: &DensityMatrix) -> Result<MeasurementOutcome> {
    if rho.label() != StateLabel::Joint {
        return Err(Error::InvalidArgument(
            "projective measurement requires a joint state".into(),
        ));
    }
    let m = rho.matrix();
    // <e| rho |e> blocks: indices (2e, 2e+1).
    let block = |e: usize| {
        let mut b = ComplexMatrix::zeros(2);
        for v in 0..2 {
            for vp in 0..2 {
                b.set(v, vp, m.get(2 * e + v, 2 * e + vp));
            }
        }
        b
    };
    let minus_block = block(0);
    let plus_block = block(1);
    let p_minus = minus_block.trace().re;
    let p_plus = plus_block.trace().re;

    let conditional = |b: &ComplexMatrix, p: f64| -> Option<DensityMatrix> {
        if p < 1e-14 {
            None
        } else {
            Some(DensityMatrix::trusted(
                b.scale_re(1.0 / p).hermitized(),
                StateLabel::Vibrational,
            ))
        }
    };

    Ok(MeasurementOutcome {
        p_minus,
        p_plus,
        phonon_given_minus: conditional(&minus_block, p_minus),
        phonon_given_plus: conditional(&plus_block, p_plus),
    })
}
