use serde::{Deserialize, Serialize};

use super::{check_finite, is_resonant, LabModel, RwaLimits};
use crate::error::{Error, Result};
use crate::operator::{Operator, C64};

/// Double-quantum-dot parameters. Drive 1 nominally addresses the left dot
/// and drive 2 the right dot; the `by1R`/`by2L` crosstalk amplitudes only
/// enter the lab-frame model.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DqdParams {
    #[serde(rename = "bzL")]
    pub bz_l: f64,
    #[serde(rename = "bzR")]
    pub bz_r: f64,
    #[serde(rename = "by0L")]
    pub by0_l: f64,
    #[serde(rename = "by0R")]
    pub by0_r: f64,
    #[serde(rename = "by1L")]
    pub by1_l: f64,
    #[serde(rename = "by1R")]
    pub by1_r: f64,
    #[serde(rename = "by2L")]
    pub by2_l: f64,
    #[serde(rename = "by2R")]
    pub by2_r: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub j: f64,
}

impl DqdParams {
    /// Resonant drives (`omega1 = bzL`, `omega2 = bzR`), all amplitudes zero.
    pub fn resonant(bz_l: f64, bz_r: f64, j: f64) -> Self {
        Self {
            bz_l,
            bz_r,
            omega1: bz_l,
            omega2: bz_r,
            j,
            ..Self::default()
        }
    }

    /// 20 / 20.2 GHz splittings, a 2 MHz drive on the right dot and J = 200 kHz.
    pub fn reference_device() -> Self {
        Self {
            by2_r: 2e6,
            ..Self::resonant(20e9, 20.2e9, 0.2e6)
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("bzL", self.bz_l),
            ("bzR", self.bz_r),
            ("by0L", self.by0_l),
            ("by0R", self.by0_r),
            ("by1L", self.by1_l),
            ("by1R", self.by1_r),
            ("by2L", self.by2_l),
            ("by2R", self.by2_r),
            ("phi1", self.phi1),
            ("phi2", self.phi2),
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("j", self.j),
        ] {
            check_finite(name, v)?;
        }
        Ok(())
    }

    pub fn delta_bz(&self) -> f64 {
        self.bz_r - self.bz_l
    }

    pub fn delta_by(&self) -> f64 {
        self.by2_r - self.by1_l
    }

    pub fn ey(&self) -> f64 {
        self.by2_r + self.by1_l
    }

    /// `sqrt(dBz^2 + J^2)`.
    pub fn omega(&self) -> f64 {
        self.delta_bz().hypot(self.j)
    }

    pub fn omega_y_plus(&self) -> f64 {
        self.ey().hypot(self.j)
    }

    pub fn omega_y_minus(&self) -> f64 {
        self.delta_by().hypot(self.j)
    }

    /// `sqrt(by2R^2 + J^2)`, the Rabi frequency of a single drive on the right dot.
    pub fn omega_single(&self) -> f64 {
        self.by2_r.hypot(self.j)
    }

    /// `|J| / |2 dBz|`, the small parameter of the exchange RWA.
    pub fn exchange_ratio(&self) -> f64 {
        self.j.abs() / (2.0 * self.delta_bz()).abs()
    }

    pub fn is_resonant(&self, rel_tol: f64) -> bool {
        is_resonant(self.omega1, self.bz_l, rel_tol) && is_resonant(self.omega2, self.bz_r, rel_tol)
    }

    pub(crate) fn check_resonant(&self, limits: &RwaLimits) -> Result<()> {
        if !self.is_resonant(limits.resonance_rel_tol) {
            return Err(Error::OffResonance(format!(
                "omega1 = {:e} vs bzL = {:e}, omega2 = {:e} vs bzR = {:e}",
                self.omega1, self.bz_l, self.omega2, self.bz_r
            )));
        }
        Ok(())
    }

    pub fn lab_model(&self) -> Result<LabModel> {
        self.validate()?;
        LabModel::dqd(self)
    }
}

/// Instantaneous lab-frame Hamiltonian
/// `J (S_L.S_R - 1/4) + S_L.B_L + S_R.B_R` at time `t`.
pub fn dqd_lab_hamiltonian(p: &DqdParams, t: f64) -> Result<Operator> {
    Ok(p.lab_model()?.at(t))
}

/// Time-independent RWA Hamiltonian in the frame rotating at `(bzL, bzR)`,
/// basis order `(uu, ud, du, dd)`.
pub fn dqd_rwa_hamiltonian(p: &DqdParams) -> Result<Operator> {
    dqd_rwa_hamiltonian_with(p, &RwaLimits::default())
}

pub fn dqd_rwa_hamiltonian_with(p: &DqdParams, limits: &RwaLimits) -> Result<Operator> {
    p.validate()?;
    p.check_resonant(limits)?;
    if p.j != 0.0 && p.exchange_ratio() > limits.exchange_ratio {
        log::warn!(
            "exchange RWA questionable: |J|/|2 dBz| = {:.3} > {}",
            p.exchange_ratio(),
            limits.exchange_ratio
        );
    }
    let z = C64::new(0.0, 0.0);
    // -i e^{-i phi} B / 4 above the diagonal, its conjugate below.
    let lo = |b: f64, phi: f64| C64::new(0.0, -0.25 * b) * C64::from_polar(1.0, -phi);
    let a1 = lo(p.by1_l, p.phi1);
    let a2 = lo(p.by2_r, p.phi2);
    let mid = C64::new(-0.5 * p.j, 0.0);
    #[rustfmt::skip]
    let rows = [
        z,         a2,        a1,        z,
        a2.conj(), mid,       z,         a1,
        a1.conj(), z,         mid,       a2,
        z,         a1.conj(), a2.conj(), z,
    ];
    Operator::from_rows(4, &rows)
}
