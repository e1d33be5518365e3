use nalgebra::{DMatrix, SymmetricEigen};

use super::{Operator, C64};
use crate::error::{Error, Result};

/// Relative Hermiticity tolerance: `max |H - H^dagger| <= tol * max(1, max |H|)`.
const HERMITIAN_REL_TOL: f64 = 1e-12;

/// Eigendecomposition `H = V diag(lambda) V^dagger` of a Hermitian operator.
///
/// Computing it once makes `exp(-i H t)` cheap for many `t`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    values: Vec<f64>,
    vectors: DMatrix<C64>,
}

impl HermitianEigen {
    pub fn new(h: &Operator) -> Result<Self> {
        let asym = h.hermiticity_error();
        if asym > HERMITIAN_REL_TOL * h.max_abs().max(1.0) {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        // Symmetrise so that round-off asymmetry cannot leak into the solver.
        let m = h.matrix();
        let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
        // A finite iteration cap turns a pathological input into an error instead of a hang.
        let cap = 1000 * h.dim().max(10);
        let eig = SymmetricEigen::try_new(sym, f64::EPSILON, cap).ok_or(Error::NoConvergence)?;
        Ok(Self {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &DMatrix<C64> {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `exp(-i H t)`.
    pub fn propagator(&self, t: f64) -> Operator {
        let mut scaled = self.vectors.clone();
        for (k, lam) in self.values.iter().enumerate() {
            let phase = C64::from_polar(1.0, -lam * t);
            for v in scaled.column_mut(k).iter_mut() {
                *v *= phase;
            }
        }
        Operator::from_matrix_unchecked(scaled * self.vectors.adjoint())
    }

    /// Precomputes `t -> Tr[T^dagger exp(-i H t)]` for a fixed target `T`.
    pub fn projector(&self, target: &Operator) -> Result<TraceProjector> {
        if target.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: target.dim(),
                right: self.dim(),
            });
        }
        let w = target.matrix().adjoint() * &self.vectors;
        let weights = (0..self.dim())
            .map(|k| {
                self.vectors
                    .column(k)
                    .iter()
                    .zip(w.column(k).iter())
                    .map(|(v, x)| v.conj() * x)
                    .sum()
            })
            .collect();
        Ok(TraceProjector {
            values: self.values.clone(),
            weights,
        })
    }
}

/// `t -> Tr[T^dagger exp(-i H t)] = sum_k w_k exp(-i lambda_k t)`.
#[derive(Clone, Debug)]
pub struct TraceProjector {
    values: Vec<f64>,
    weights: Vec<C64>,
}

impl TraceProjector {
    pub fn trace_at(&self, t: f64) -> C64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(lam, w)| w * C64::from_polar(1.0, -lam * t))
            .sum()
    }

    /// Gate fidelity `(d + |Tr[T^dagger U(t)]|^2) / (d (d + 1))`.
    pub fn fidelity_at(&self, t: f64) -> f64 {
        let d = self.values.len() as f64;
        (d + self.trace_at(t).norm_sqr()) / (d * (d + 1.0))
    }
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn expm_hermitian(h: &Operator, t: f64) -> Result<Operator> {
    Ok(HermitianEigen::new(h)?.propagator(t))
}
