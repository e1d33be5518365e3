//! Dense complex operators on registers of up to ten qubits.
//!
//! Basis states are indexed so that qubit 0 is the most significant bit,
//! i.e. the leftmost factor of every tensor product. State `0` is spin up.

mod eigen;
mod pauli;
mod spin;

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub use eigen::{expm_hermitian, HermitianEigen, TraceProjector};
pub use pauli::{pauli_coefficients, pauli_decompose, pauli_matrix, pauli_sum, Pauli, PauliString, PauliWord, MAX_QUBITS};
pub use spin::{spin_operator, swap_gate, SpinKind};
pub(crate) use spin::{add_site_term, add_two_site_term, sz_sum_diagonal};

/// Tolerance used when two operators are compared up to a global phase.
pub const PHASE_EQUIVALENCE_TOL: f64 = 1e-8;

/// Tolerance on `max |U^dagger U - I|` for anything emitted as a propagator.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Dense square complex matrix whose dimension is a power of two.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    m: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if !m.nrows().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(m.nrows()));
        }
        Ok(Self { m })
    }

    /// Row-major constructor.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: entries.len(),
                right: dim * dim,
            });
        }
        Self::from_matrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim.is_power_of_two(), "dimension {dim} is not a power of two");
        Self {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim.is_power_of_two(), "dimension {dim} is not a power of two");
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(dim.is_power_of_two(), "dimension {dim} is not a power of two");
        Self {
            m: DMatrix::from_fn(dim, dim, f),
        }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut op = Self::zeros(diag.len());
        for (i, v) in diag.iter().enumerate() {
            op.m[(i, i)] = *v;
        }
        op
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<C64>) -> Self {
        debug_assert!(m.is_square() && m.nrows().is_power_of_two());
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            m: &self.m * &other.m,
        })
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self {
            m: self.m.adjoint(),
        }
    }

    /// Tensor product with `self` as the left (more significant) factor.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            m: self.m.kronecker(&other.m),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            m: &self.m * factor,
        }
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        self.m.diagonal().iter().copied().collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |self - other|` over all entries.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `max |H - H^dagger|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.m[(r, c)] - self.m[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.m.adjoint() * &self.m;
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((p[(r, c)] - target).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|r| (0..n).all(|c| r == c || self.m[(r, c)].norm() <= tol))
    }

    /// `max |self - e^{i theta} other|` with `theta = arg Tr[other^dagger self]`.
    pub fn phase_distance(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        let overlap = other.m.adjoint().mul(&self.m).trace();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        Ok(self
            .m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a - phase * b).norm())
            .fold(0.0, f64::max))
    }

    pub fn is_phase_equivalent(&self, other: &Self, tol: f64) -> bool {
        self.phase_distance(other).is_ok_and(|d| d <= tol)
    }
}

impl Mul for &Operator {
    type Output = Operator;

    /// Panics on a dimension mismatch; use [`Operator::compose`] for a checked product.
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator {
            m: &self.m * &rhs.m,
        }
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator {
            m: &self.m + &rhs.m,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator {
            m: &self.m - &rhs.m,
        }
    }
}

/// `c` as a complex number.
#[inline]
pub fn re(c: f64) -> C64 {
    C64::new(c, 0.0)
}

/// `c * i`.
#[inline]
pub fn im(c: f64) -> C64 {
    C64::new(0.0, c)
}
