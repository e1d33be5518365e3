//! Resonant-exchange spin-qubit gates: Hamiltonians, closed-form propagators,
//! a lab-frame oracle integrator, fidelity metrics, gate schedules and
//! Monte-Carlo noise analysis.

// `!(x > 0.0)` rejects NaN on purpose; `is_multiple_of` is newer than the MSRV.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::manual_is_multiple_of)]

pub mod error;
pub mod evolution;
pub mod metrics;
pub mod models;
pub mod noise;
pub mod operator;
pub mod scheduling;

pub use error::{Error, Result};
pub use operator::{Operator, Pauli, PauliString, PauliWord, C64};
