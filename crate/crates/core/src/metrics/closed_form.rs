use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::sin_over;
use crate::models::{ChainParams, DqdParams};
use crate::operator::C64;

/// `(1 + (d/4) |B/W+ sin(W+ t/4) + B/W- sin(W- t/4)|^2) / (d + 1)` with
/// `W+ = sqrt(E_J^2 + B^2)`, `W- = sqrt(dJ^2 + B^2)`.
pub fn fidelity_y_closed(b: f64, e_j: f64, delta_j: f64, d: f64, t: f64) -> f64 {
    let s = b * (sin_over(e_j.hypot(b), t, 4.0) + sin_over(delta_j.hypot(b), t, 4.0));
    (1.0 + 0.25 * d * s * s) / (d + 1.0)
}

/// Y-gate fidelity on site `k` of a chain, assuming the bonds away from `k`
/// have returned to the identity.
pub fn fidelity_y_chain(p: &ChainParams, k: usize, t: f64) -> Result<f64> {
    p.validate()?;
    if k >= p.n {
        return Err(Error::InvalidParameter(format!("site {k} outside a {}-site chain", p.n)));
    }
    Ok(fidelity_y_closed(p.by1[k], p.e_j(k), p.delta_j(k), p.dim() as f64, t))
}

/// Maps a fidelity computed in dimension `d_from` to dimension `d_to` at equal
/// normalised overlap `|Tr|^2 / d^2`.
pub fn rescale_fidelity(f: f64, d_from: f64, d_to: f64) -> f64 {
    let overlap = (f * (d_from + 1.0) - 1.0) / d_from;
    (1.0 + d_to * overlap) / (d_to + 1.0)
}

/// Y-gate fidelity for a qubit with four exchange-coupled neighbours of equal `j0`.
pub fn fidelity_y_2d(by: f64, j0: f64, d: f64, t: f64) -> f64 {
    let w4 = by.hypot(2.0 * j0);
    let w4t = by.hypot(4.0 * j0);
    let s = 3.0 * (0.25 * by * t).sin() + 4.0 * by * sin_over(w4, t, 4.0) + by * sin_over(w4t, t, 4.0);
    (1.0 + d * s * s / 64.0) / (d + 1.0)
}

/// Forms of the SWAP fidelity expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwapVariant {
    /// `W_mu = sqrt(4J^2 + (dBz +- J_a +- J_b)^2)` with `sin(W t)` in the cross term.
    Printed,
    /// As `Printed` but with `sin(W t / 4)` in both sums.
    QuarterArguments,
    /// `W_mu = sqrt(4J^2 + (2 dBz +- J_a +- J_b)^2)`, `sin(W t / 4)` in both sums;
    /// agrees with the exact evolution.
    Derived,
}

impl SwapVariant {
    pub const ALL: [SwapVariant; 3] = [Self::Printed, Self::QuarterArguments, Self::Derived];
}

impl fmt::Display for SwapVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Printed => "printed",
            Self::QuarterArguments => "quarter-arguments",
            Self::Derived => "derived",
        })
    }
}

fn swap_terms(p: &ChainParams, k: usize) -> Result<(f64, f64, f64, f64)> {
    p.validate()?;
    if k + 1 >= p.n {
        return Err(Error::InvalidParameter(format!(
            "swap pair ({k}, {}) outside a {}-site chain",
            k + 1,
            p.n
        )));
    }
    if p.by1.iter().any(|b| *b != 0.0) {
        return Err(Error::InvalidParameter("swap fidelity requires all drives off".into()));
    }
    Ok((p.jlist[k], p.bz[k + 1] - p.bz[k], p.j_left(k), p.j_right(k + 1)))
}

/// SWAP fidelity on `(k, k + 1)` with flanking exchange, in the frame where
/// the pair rotates at its mean splitting. Bonds away from the block are
/// assumed to have returned to the identity.
pub fn fidelity_swap(p: &ChainParams, k: usize, t: f64) -> Result<f64> {
    fidelity_swap_variant(p, k, t, SwapVariant::Derived)
}

pub fn fidelity_swap_variant(p: &ChainParams, k: usize, t: f64, variant: SwapVariant) -> Result<f64> {
    let (j, dbz, ja, jb) = swap_terms(p, k)?;
    let d = p.dim() as f64;
    let gradient = match variant {
        SwapVariant::Derived => 2.0 * dbz,
        _ => dbz,
    };
    let omegas: Vec<f64> = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
        .iter()
        .map(|(sa, sb)| (2.0 * j).hypot(gradient + sa * ja + sb * jb))
        .collect();
    let quarter: f64 = omegas.iter().map(|w| sin_over(*w, t, 4.0)).sum();
    let cross = match variant {
        SwapVariant::Printed => omegas.iter().map(|w| sin_over(*w, t, 1.0)).sum(),
        _ => quarter,
    };
    let (ca, cb) = ((0.25 * ja * t).cos(), (0.25 * jb * t).cos());
    let inner = 4.0 * ca * ca * cb * cb
        + j * j * quarter * quarter
        + 4.0 * j * ca * cb * (0.5 * j * t).sin() * cross;
    Ok(1.0 / (d + 1.0) + d / (16.0 * (d + 1.0)) * inner)
}

/// Idle fidelity of an undriven chain, `(1 + d |prod (e^{iJt/2} + 1)/2|^2) / (d + 1)`.
pub fn fidelity_identity_chain(jlist: &[f64], t: f64) -> f64 {
    let d = (1u64 << (jlist.len() + 1)) as f64;
    let prod: C64 = jlist
        .iter()
        .map(|j| (C64::from_polar(1.0, 0.5 * j * t) + 1.0) * 0.5)
        .product();
    (1.0 + d * prod.norm_sqr()) / (d + 1.0)
}

/// Gates with first-order exchange-noise fidelity references.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseGate {
    IY,
    ZX,
    YY,
}

impl FromStr for NoiseGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "IY" => Ok(Self::IY),
            "ZX" => Ok(Self::ZX),
            "YY" => Ok(Self::YY),
            _ => Err(Error::UnknownGate(s.to_string())),
        }
    }
}

/// First-order DQD fidelities `1/5 + 4/5 |a|^2` with `a = B/sqrt(B^2+J^2)` (IY),
/// `2BJ/(B^2+J^2)` (ZX) or `J/Omega_y+ - J/Omega_y-` (YY); `B = by2R`.
pub fn first_order_noise_fidelity(gate: NoiseGate, p: &DqdParams) -> Result<f64> {
    p.validate()?;
    let (b, j) = (p.by2_r, p.j);
    let a = match gate {
        NoiseGate::IY => b / b.hypot(j),
        NoiseGate::ZX => 2.0 * b * j / (b * b + j * j),
        NoiseGate::YY => j / p.omega_y_plus() - j / p.omega_y_minus(),
    };
    if !a.is_finite() {
        return Err(Error::InvalidParameter(format!("{gate:?} reference undefined for B = J = 0")));
    }
    Ok(0.2 + 0.8 * a * a)
}
