use serde::Serialize;

use super::{error_generator, error_matrix_coeffs, fidelity_upper_bound, gate_fidelity, ptm, RealMatrix};
use crate::error::Result;
use crate::operator::{Operator, PauliString};

/// Quality dossier of one gate.
#[derive(Clone, Debug, Serialize)]
pub struct GateReport {
    pub target_name: String,
    pub fidelity: f64,
    pub bound: f64,
    #[serde(skip)]
    pub ptm: RealMatrix,
    #[serde(skip)]
    pub ptm_ideal: RealMatrix,
    #[serde(skip)]
    pub errgen: RealMatrix,
    pub err_coeffs: Vec<PauliString>,
}

impl GateReport {
    pub fn new(target_name: impl Into<String>, actual: &Operator, ideal: &Operator) -> Result<Self> {
        let ptm_actual = ptm(actual)?;
        let ptm_ideal = ptm(ideal)?;
        let errgen = error_generator(&ptm_ideal, &ptm_actual)?;
        Ok(Self {
            target_name: target_name.into(),
            fidelity: gate_fidelity(actual, ideal)?,
            bound: fidelity_upper_bound(actual, ideal)?,
            ptm: ptm_actual,
            ptm_ideal,
            errgen,
            err_coeffs: error_matrix_coeffs(actual, ideal)?,
        })
    }

    pub fn num_qubits(&self) -> usize {
        (self.ptm.nrows().trailing_zeros() / 2) as usize
    }
}
