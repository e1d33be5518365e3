//! Device parameters and Hamiltonian builders for a double quantum dot and
//! for linear chains, in the lab frame and in rotating frames.
//!
//! All frequencies are angular (rad/s) and times are in seconds.

mod chain;
mod dqd;
mod lab;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chain::{
    chain_rwa_hamiltonian, swap_rwa_hamiltonian, BondCoupling, ChainParams, ResonanceMap,
};
pub use dqd::{dqd_lab_hamiltonian, dqd_rwa_hamiltonian, DqdParams};
pub use lab::{LabDrive, LabModel};

/// Thresholds for the rotating-wave approximation checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RwaLimits {
    /// Warn when `|J| / |2 dBz|` exceeds this.
    pub exchange_ratio: f64,
    /// A bond with `|w_i - w_j| / |J|` at or above this is treated as off-resonant.
    pub detuning_ratio: f64,
    /// Relative tolerance for "drive frequency equals Zeeman splitting".
    pub resonance_rel_tol: f64,
}

impl Default for RwaLimits {
    fn default() -> Self {
        Self {
            exchange_ratio: 0.1,
            detuning_ratio: 10.0,
            resonance_rel_tol: 1e-12,
        }
    }
}

/// Which rotating frame a lab-frame propagator is transformed into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameMode {
    Lab,
    /// Each site rotates at its own Zeeman splitting.
    Eigenfrequency,
    /// Like `Eigenfrequency`, except sites `k` and `k + 1` share their mean splitting.
    SwapPair(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSpec {
    pub mode: FrameMode,
}

impl FrameSpec {
    pub const LAB: Self = Self {
        mode: FrameMode::Lab,
    };
    pub const EIGEN: Self = Self {
        mode: FrameMode::Eigenfrequency,
    };

    pub fn swap_pair(k: usize) -> Self {
        Self {
            mode: FrameMode::SwapPair(k),
        }
    }

    /// Per-site reference frequencies for Zeeman splittings `bz`.
    pub fn references(&self, bz: &[f64]) -> Result<Vec<f64>> {
        match self.mode {
            FrameMode::Lab => Ok(vec![0.0; bz.len()]),
            FrameMode::Eigenfrequency => Ok(bz.to_vec()),
            FrameMode::SwapPair(k) => {
                if k + 1 >= bz.len() {
                    return Err(Error::InvalidParameter(format!(
                        "swap pair ({k}, {}) outside a {}-site register",
                        k + 1,
                        bz.len()
                    )));
                }
                let mut r = bz.to_vec();
                let avg = 0.5 * (bz[k] + bz[k + 1]);
                r[k] = avg;
                r[k + 1] = avg;
                Ok(r)
            }
        }
    }
}

pub(crate) fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} is not finite ({v})")))
    }
}

pub(crate) fn is_resonant(omega: f64, bz: f64, rel_tol: f64) -> bool {
    (omega - bz).abs() <= rel_tol * omega.abs().max(bz.abs()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_frame_averages_the_pair() {
        let r = FrameSpec::swap_pair(1).references(&[1.0, 2.0, 4.0, 8.0]).unwrap();
        assert_eq!(r, vec![1.0, 3.0, 3.0, 8.0]);
        assert!(FrameSpec::swap_pair(3).references(&[1.0; 4]).is_err());
    }

    #[test]
    fn lab_frame_is_static() {
        assert_eq!(FrameSpec::LAB.references(&[5.0, 6.0]).unwrap(), vec![0.0, 0.0]);
    }
}
