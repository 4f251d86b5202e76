//! Hermitian eigensolvers for the two fixed dimensions.
//!
//! The 2x2 solve is the closed form used throughout the engine (instantaneous
//! eigenbases, Gibbs states, entropies).  The 4x4 solve is a cyclic complex
//! Jacobi iteration used for positivity monitoring and as an independent
//! route in tests; the time evolution itself never goes through it.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qcore::matrix::ComplexMatrix;

const HERM_TOL: f64 = 1e-10;

/// Eigendecomposition of a Hermitian 2x2 matrix.
///
/// Eigenvalues are ascending.  Each eigenvector is normalized with a
/// deterministic phase: its first component of magnitude above 1e-12 is real
/// and positive.
#[derive(Clone, Debug)]
pub struct Spectrum2 {
    pub eigenvalues: [f64; 2],
    /// `eigenvectors[k]` is the column vector for `eigenvalues[k]`.
    pub eigenvectors: [[C64; 2]; 2],
}

impl Spectrum2 {
    /// Rebuilds `sum_k lambda_k |v_k><v_k|`; used by reconstruction tests.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(2);
        for k in 0..2 {
            let v = self.eigenvectors[k];
            for i in 0..2 {
                for j in 0..2 {
                    let add = v[i] * v[j].conj() * self.eigenvalues[k];
                    m.set(i, j, m.get(i, j) + add);
                }
            }
        }
        m
    }

    /// Projection `<v_k| rho |v_k>` of a 2x2 matrix onto eigenvector `k`.
    pub fn population(&self, rho: &ComplexMatrix, k: usize) -> f64 {
        let v = self.eigenvectors[k];
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                acc += v[i].conj() * rho.get(i, j) * v[j];
            }
        }
        acc.re
    }
}

fn fix_phase(v: &mut [C64]) {
    for comp in v.iter() {
        let mag = comp.norm();
        if mag > 1e-12 {
            let phase = comp / mag;
            let rot = phase.conj();
            for c in v.iter_mut() {
                *c *= rot;
            }
            break;
        }
    }
    // Scrub the negative zeros the rotation may leave behind so equal inputs
    // produce bitwise-equal vectors.
    for c in v.iter_mut() {
        if c.re == 0.0 {
            c.re = 0.0;
        }
        if c.im == 0.0 {
            c.im = 0.0;
        }
    }
}

/// Closed-form eigendecomposition of a Hermitian 2x2 matrix.
pub fn eigh2(h: &ComplexMatrix) -> Result<Spectrum2> {
    if h.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: h.dim(),
        });
    }
    let dev = h.hermiticity_deviation();
    let scale = h.max_abs().max(1.0);
    if dev > HERM_TOL * scale {
        return Err(Error::NotHermitian { max_dev: dev });
    }

    let a = h.get(0, 0).re;
    let d = h.get(1, 1).re;
    let b = (h.get(0, 1) + h.get(1, 0).conj()) * 0.5;
    let babs = b.norm();

    let mid = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = (half * half + babs * babs).sqrt();
    let lo = mid - r;
    let hi = mid + r;

    if babs <= 1e-14 * scale {
        // Effectively diagonal; order the basis vectors by eigenvalue.
        let (v0, v1) = if a <= d {
            ([C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(1.0, 0.0)])
        } else {
            ([C64::new(0.0, 0.0), C64::new(1.0, 0.0)], [C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
        };
        return Ok(Spectrum2 {
            eigenvalues: [lo, hi],
            eigenvectors: [v0, v1],
        });
    }

    let mut vecs = [[C64::new(0.0, 0.0); 2]; 2];
    for (k, lambda) in [lo, hi].into_iter().enumerate() {
        // (b, lambda - a) solves (H - lambda) v = 0 for non-zero b.
        let mut v = [b, C64::new(lambda - a, 0.0)];
        let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        v[0] /= norm;
        v[1] /= norm;
        fix_phase(&mut v);
        vecs[k] = v;
    }

    Ok(Spectrum2 {
        eigenvalues: [lo, hi],
        eigenvectors: vecs,
    })
}

/// Eigendecomposition of a Hermitian 4x4 matrix by cyclic complex Jacobi
/// rotations.  Returns ascending eigenvalues and the matching orthonormal
/// eigenvectors as columns of the returned matrix.
pub fn eigh4(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if h.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: h.dim(),
        });
    }
    let dev = h.hermiticity_deviation();
    let scale = h.max_abs().max(1.0);
    if dev > HERM_TOL * scale {
        return Err(Error::NotHermitian { max_dev: dev });
    }

    let n = 4;
    let mut a = h.hermitized();
    let mut v = ComplexMatrix::identity(n);
    let tol = 1e-15 * scale;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a.get(p, q).norm());
            }
        }
        if off <= tol {
            break;
        }

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let m = apq.norm();
                if m <= tol {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let phase = apq / m;

                let tau = (aqq - app) / (2.0 * m);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Columns p and q of A and V are mixed by the rotation
                //   [c, s*phase; -s*conj(phase), c].
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip * c - aiq * phase.conj() * s);
                    a.set(i, q, aip * phase * s + aiq * c);
                }
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, apj * c - aqj * phase * s);
                    a.set(q, j, apj * phase.conj() * s + aqj * c);
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * c - viq * phase.conj() * s);
                    v.set(i, q, vip * phase * s + viq * c);
                }
            }
        }
    }

    let mut eigs: Vec<(f64, usize)> = (0..n).map(|i| (a.get(i, i).re, i)).collect();
    eigs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());

    let mut values = Vec::with_capacity(n);
    let mut vectors = ComplexMatrix::zeros(n);
    for (k, (lambda, col)) in eigs.into_iter().enumerate() {
        values.push(lambda);
        let mut column: Vec<C64> = (0..n).map(|i| v.get(i, col)).collect();
        fix_phase(&mut column);
        for i in 0..n {
            vectors.set(i, k, column[i]);
        }
    }
    Ok((values, vectors))
}

/// Eigenvalues only; the common case for positivity checks.
pub fn eigvalsh4(h: &ComplexMatrix) -> Result<Vec<f64>> {
    eigh4(h).map(|(values, _)| values)
}
