//! Gibbs states and entropy functionals on the 2x2 subsystems.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qcore::eig::eigh2;
use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::density::{DensityMatrix, StateLabel};

/// Eigenvalues below this threshold count as outside the support when
/// deciding whether a relative entropy diverges.
const SUPPORT_TOL: f64 = 1e-12;

/// Thermal state `exp(-h/T) / Z` of a Hermitian 2x2 Hamiltonian.
///
/// Computed through the eigendecomposition with the smallest eigenvalue
/// subtracted before exponentiating, so large gaps over small temperatures
/// underflow gracefully instead of overflowing.
pub fn gibbs_state(h: &ComplexMatrix, temperature: f64, label: StateLabel) -> Result<DensityMatrix> {
    if temperature <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let s = eigh2(h)?;
    let w0 = 1.0f64; // exp(-(lambda0 - lambda0)/T)
    let w1 = (-(s.eigenvalues[1] - s.eigenvalues[0]) / temperature).exp();
    let z = w0 + w1;
    let mut m = ComplexMatrix::zeros(2);
    for (k, w) in [w0, w1].into_iter().enumerate() {
        let p = w / z;
        let v = s.eigenvectors[k];
        for i in 0..2 {
            for j in 0..2 {
                m.set(i, j, m.get(i, j) + v[i] * v[j].conj() * p);
            }
        }
    }
    Ok(DensityMatrix::trusted(m.hermitized(), label))
}

/// Zero-temperature limit: the projector onto the ground eigenvector of `h`.
pub fn ground_state_projector(h: &ComplexMatrix, label: StateLabel) -> Result<DensityMatrix> {
    let s = eigh2(h)?;
    let v = s.eigenvectors[0];
    let vec: Vec<C64> = v.to_vec();
    DensityMatrix::from_pure(&vec, label)
}

/// Von Neumann entropy `-Tr[rho ln rho]` in nats, with `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let s = eigh2(rho.matrix())?;
    let mut acc = 0.0;
    for lambda in s.eigenvalues {
        // Small negative eigenvalues within the positivity allowance are
        // treated as zero.
        if lambda > SUPPORT_TOL {
            acc -= lambda * lambda.ln();
        }
    }
    Ok(acc)
}

/// Quantum relative entropy `S(rho || sigma) = Tr[rho ln rho] - Tr[rho ln sigma]`
/// in nats.  Returns `+inf` when the support of `rho` is not contained in the
/// support of `sigma`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.matrix().dim() != sigma.matrix().dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.matrix().dim(),
            got: sigma.matrix().dim(),
        });
    }
    let sr = eigh2(rho.matrix())?;
    let ss = eigh2(sigma.matrix())?;

    let mut tr_rho_ln_rho = 0.0;
    for lambda in sr.eigenvalues {
        if lambda > SUPPORT_TOL {
            tr_rho_ln_rho += lambda * lambda.ln();
        }
    }

    let mut tr_rho_ln_sigma = 0.0;
    for k in 0..2 {
        let weight = ss.population(rho.matrix(), k).max(0.0);
        let mu = ss.eigenvalues[k];
        if mu <= SUPPORT_TOL {
            if weight > SUPPORT_TOL {
                return Ok(f64::INFINITY);
            }
            // Zero weight on a zero eigenvalue contributes nothing.
        } else {
            tr_rho_ln_sigma += weight * mu.ln();
        }
    }

    // Klein inequality guarantees non-negativity; tiny negative round-off is
    // reported as-is so callers can see the numerical floor.
    Ok(tr_rho_ln_rho - tr_rho_ln_sigma)
}
