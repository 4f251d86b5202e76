//! Dense complex matrices for the 2-dimensional electronic / vibrational
//! subsystems and their 4-dimensional tensor product.
//!
//! Entries are stored row-major.  The dimensions are fixed to {2, 4}; this is
//! all the generality the engine needs and it keeps every operation exact and
//! allocation-cheap.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense `dim x dim` complex matrix, `dim` in {2, 4}, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.  `dim` must be 2 or 4 and
    /// `data` must hold exactly `dim * dim` entries.
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimension must be 2 or 4, got {dim}"
            )));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 4, "matrix dimension must be 2 or 4");
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a 2x2 matrix from rows of real/imaginary pairs given as complex
    /// literals.
    pub fn from_rows2(rows: [[C64; 2]; 2]) -> Self {
        Self {
            dim: 2,
            data: vec![rows[0][0], rows[0][1], rows[1][0], rows[1][1]],
        }
    }

    /// Builds a diagonal matrix from real entries.
    pub fn diagonal(entries: &[f64]) -> Self {
        let dim = entries.len();
        let mut m = Self::zeros(dim);
        for (i, &x) in entries.iter().enumerate() {
            m.set(i, i, C64::new(x, 0.0));
        }
        m
    }

    /// Rank-one projector `|v><v|` from an unnormalized column vector.
    pub fn outer(v: &[C64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, v[i] * v[j].conj());
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.dim + j] = value;
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest absolute deviation from Hermiticity, `max |A - A^dag|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                dev = dev.max(d);
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Hermitian part `(A + A^dag) / 2`.
    pub fn hermitized(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, (self.get(i, j) + self.get(j, i).conj()) * 0.5);
            }
        }
        out
    }

    /// Largest entry magnitude; cheap norm used for tolerances.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference `max |A_ij - B_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// In-place `self += c * other`, the hot path of the RK4 update.
    pub fn axpy(&mut self, c: f64, other: &Self) {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += b * c;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        &self.matmul(other) + &other.matmul(self)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: Self) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: Self) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product of two 2x2 factors, electronic factor first:
/// `(A (x) B)[2i + k, 2j + l] = A[i, j] * B[k, l]`.
///
/// The joint basis ordering is therefore `|-,0>, |-,1>, |+,0>, |+,1>`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: a.dim(),
        });
    }
    if b.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: b.dim(),
        });
    }
    let mut out = ComplexMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            let aij = a.get(i, j);
            for k in 0..2 {
                for l in 0..2 {
                    out.set(2 * i + k, 2 * j + l, aij * b.get(k, l));
                }
            }
        }
    }
    Ok(out)
}

/// Fixed operators on the two bases.
///
/// Electronic basis ordering is `(|->, |+>)` with `sigma_z = diag(-1, +1)`,
/// so `|->` is the ground state for a positive field.  Vibrational basis
/// ordering is `(|0>, |1>)` with `a = |0><1|`.
pub mod ops {
    use super::{C64, ComplexMatrix};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    pub fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_rows2([[c(0.0), c(1.0)], [c(1.0), c(0.0)]])
    }

    pub fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::diagonal(&[-1.0, 1.0])
    }

    /// Lowering operator `|-><+|`.
    pub fn sigma_minus() -> ComplexMatrix {
        ComplexMatrix::from_rows2([[c(0.0), c(1.0)], [c(0.0), c(0.0)]])
    }

    /// Raising operator `|+><-|`.
    pub fn sigma_plus() -> ComplexMatrix {
        ComplexMatrix::from_rows2([[c(0.0), c(0.0)], [c(1.0), c(0.0)]])
    }

    /// Vibrational annihilation `a = |0><1|` on the truncated two-level mode.
    pub fn annihilation() -> ComplexMatrix {
        ComplexMatrix::from_rows2([[c(0.0), c(1.0)], [c(0.0), c(0.0)]])
    }

    /// Vibrational creation `a^dag = |1><0|`.
    pub fn creation() -> ComplexMatrix {
        ComplexMatrix::from_rows2([[c(0.0), c(0.0)], [c(1.0), c(0.0)]])
    }

    /// Number operator `a^dag a = diag(0, 1)`.
    pub fn number() -> ComplexMatrix {
        ComplexMatrix::diagonal(&[0.0, 1.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let id2 = ComplexMatrix::identity(2);
        let id4 = tensor_product(&id2, &id2).unwrap();
        assert_eq!(id4, ComplexMatrix::identity(4));
    }

    #[test]
    fn tensor_ordering_sigma_z_with_identity() {
        let t = tensor_product(&ops::sigma_z(), &ComplexMatrix::identity(2)).unwrap();
        let expected = ComplexMatrix::diagonal(&[-1.0, -1.0, 1.0, 1.0]);
        assert!(t.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn tensor_rejects_wrong_dimension() {
        let id4 = ComplexMatrix::identity(4);
        let id2 = ComplexMatrix::identity(2);
        assert!(tensor_product(&id4, &id2).is_err());
        assert!(tensor_product(&id2, &id4).is_err());
    }

    #[test]
    fn trace_of_tensor_is_product_of_traces() {
        let a = ComplexMatrix::from_rows2([[c(1.0, 0.5), c(0.3, -0.2)], [c(2.0, 0.0), c(-1.0, 1.0)]]);
        let b = ComplexMatrix::from_rows2([[c(0.7, 0.0), c(0.0, 1.0)], [c(0.4, 0.4), c(2.5, -0.5)]]);
        let t = tensor_product(&a, &b).unwrap();
        let lhs = t.trace();
        let rhs = a.trace() * b.trace();
        assert_relative_eq!(lhs.re, rhs.re, max_relative = 1e-14);
        assert_relative_eq!(lhs.im, rhs.im, max_relative = 1e-14);
    }

    #[test]
    fn adjoint_and_hermitized() {
        let a = ComplexMatrix::from_rows2([[c(1.0, 0.0), c(0.3, 0.7)], [c(0.1, -0.2), c(2.0, 0.0)]]);
        let h = a.hermitized();
        assert!(h.is_hermitian(1e-15));
        let back = &(&h + &h.adjoint()) - &h.scale_re(2.0);
        assert!(back.max_abs() < 1e-15);
    }

    #[test]
    fn commutator_of_paulis() {
        // With sigma_z = diag(-1, +1), direct multiplication gives
        // [sigma_z, sigma_x] = [[0, -2], [2, 0]].
        let comm = ops::sigma_z().commutator(&ops::sigma_x());
        assert_relative_eq!(comm.get(0, 1).re, -2.0, max_relative = 1e-15);
        assert_relative_eq!(comm.get(1, 0).re, 2.0, max_relative = 1e-15);
        assert!(comm.get(0, 1).im.abs() < 1e-15);
        assert!(comm.get(0, 0).norm() < 1e-15);
    }

    #[test]
    fn ladder_operators_match_adjoints() {
        assert!(ops::sigma_plus().max_abs_diff(&ops::sigma_minus().adjoint()) < 1e-15);
        assert!(ops::creation().max_abs_diff(&ops::annihilation().adjoint()) < 1e-15);
    }
}
