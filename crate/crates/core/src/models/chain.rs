use serde::{Deserialize, Serialize};

use super::lab::{add_heisenberg, add_ising};
use super::{check_finite, is_resonant, LabModel, RwaLimits};
use crate::error::{Error, Result};
use crate::operator::{add_site_term, Operator, SpinKind, C64, MAX_QUBITS};

/// Linear chain with one transverse drive per site and nearest-neighbour exchange.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainParams {
    pub n: usize,
    pub bz: Vec<f64>,
    pub by1: Vec<f64>,
    pub phi: Vec<f64>,
    pub omega: Vec<f64>,
    /// `jlist[i]` couples sites `i` and `i + 1`.
    pub jlist: Vec<f64>,
}

impl ChainParams {
    /// Chain with resonant, switched-off drives.
    pub fn resonant(bz: Vec<f64>, jlist: Vec<f64>) -> Result<Self> {
        let n = bz.len();
        let p = Self {
            n,
            by1: vec![0.0; n],
            phi: vec![0.0; n],
            omega: bz.clone(),
            bz,
            jlist,
        };
        p.validate()?;
        Ok(p)
    }

    /// Splittings `base + i * step` and uniform exchange `j0`.
    pub fn graded(n: usize, base: f64, step: f64, j0: f64) -> Result<Self> {
        let bz = (0..n).map(|i| base + step * i as f64).collect();
        Self::resonant(bz, vec![j0; n.saturating_sub(1)])
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_QUBITS).contains(&self.n) {
            return Err(Error::InvalidParameter(format!(
                "chain length {} outside 2..={MAX_QUBITS}",
                self.n
            )));
        }
        for (name, v, len) in [
            ("bz", &self.bz, self.n),
            ("by1", &self.by1, self.n),
            ("phi", &self.phi, self.n),
            ("omega", &self.omega, self.n),
            ("jlist", &self.jlist, self.n - 1),
        ] {
            if v.len() != len {
                return Err(Error::InvalidParameter(format!(
                    "{name} has length {}, expected {len}",
                    v.len()
                )));
            }
            for (i, x) in v.iter().enumerate() {
                check_finite(&format!("{name}[{i}]"), *x)?;
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Exchange to the left of `k` (zero at the boundary).
    pub fn j_left(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.jlist[k - 1]
        }
    }

    /// Exchange to the right of `k` (zero at the boundary).
    pub fn j_right(&self, k: usize) -> f64 {
        self.jlist.get(k).copied().unwrap_or(0.0)
    }

    pub fn e_j(&self, k: usize) -> f64 {
        self.j_left(k) + self.j_right(k)
    }

    pub fn delta_j(&self, k: usize) -> f64 {
        self.j_right(k) - self.j_left(k)
    }

    pub fn omega_plus(&self, k: usize) -> f64 {
        self.e_j(k).hypot(self.by1[k])
    }

    pub fn omega_minus(&self, k: usize) -> f64 {
        self.delta_j(k).hypot(self.by1[k])
    }

    pub fn all_resonant(&self, rel_tol: f64) -> bool {
        self.omega
            .iter()
            .zip(&self.bz)
            .all(|(w, b)| is_resonant(*w, *b, rel_tol))
    }

    pub fn lab_model(&self) -> Result<LabModel> {
        self.validate()?;
        LabModel::chain(self)
    }
}

/// How a bond survives the rotating-wave approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BondCoupling {
    /// Far off resonance: only `Sz Sz` survives.
    Ising,
    /// Equal frame frequencies: the flip-flop terms survive too.
    Heisenberg,
}

/// RWA classification of every bond of a chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResonanceMap(pub Vec<BondCoupling>);

impl ResonanceMap {
    /// Classifies bonds by comparing frame frequencies with the exchange.
    ///
    /// Equal frequencies give a Heisenberg bond and a detuning of at least
    /// `limits.detuning_ratio * |J|` an Ising bond. Anything in between is
    /// rejected unless `force` is set, in which case the nearer regime is used.
    pub fn classify(p: &ChainParams, limits: &RwaLimits, force: bool) -> Result<Self> {
        p.validate()?;
        let mut out = Vec::with_capacity(p.n - 1);
        for (i, j) in p.jlist.iter().enumerate() {
            let (wa, wb) = (p.omega[i], p.omega[i + 1]);
            if is_resonant(wa, wb, limits.resonance_rel_tol) {
                out.push(BondCoupling::Heisenberg);
                continue;
            }
            if *j == 0.0 {
                out.push(BondCoupling::Ising);
                continue;
            }
            let ratio = (wa - wb).abs() / j.abs();
            if ratio >= limits.detuning_ratio {
                out.push(BondCoupling::Ising);
            } else if force {
                log::warn!("bond ({i}, {}) forced at |dw|/J = {ratio:.3}", i + 1);
                out.push(if ratio >= 1.0 {
                    BondCoupling::Ising
                } else {
                    BondCoupling::Heisenberg
                });
            } else {
                return Err(Error::AmbiguousBond { bond: i, ratio });
            }
        }
        Ok(Self(out))
    }

    pub fn all_ising(n: usize) -> Self {
        Self(vec![BondCoupling::Ising; n.saturating_sub(1)])
    }
}

/// RWA Hamiltonian `H_J + H_B + H_z` in the frame rotating at each drive frequency.
///
/// `H_B = -sum_i (by1_i / 2)(sin phi_i Sx_i - cos phi_i Sy_i)` and
/// `H_z = sum_i (bz_i - omega_i) Sz_i`.
pub fn chain_rwa_hamiltonian(p: &ChainParams, map: &ResonanceMap) -> Result<Operator> {
    p.validate()?;
    if map.0.len() != p.n - 1 {
        return Err(Error::DimensionMismatch {
            left: map.0.len(),
            right: p.n - 1,
        });
    }
    let n = p.n;
    let mut h = Operator::zeros(p.dim());
    let m = h.matrix_mut();
    for (i, (j, kind)) in p.jlist.iter().zip(&map.0).enumerate() {
        match kind {
            BondCoupling::Ising => add_ising(m, n, i, i + 1, *j),
            BondCoupling::Heisenberg => add_heisenberg(m, n, i, i + 1, *j),
        }
    }
    for i in 0..n {
        let b = p.by1[i];
        if b != 0.0 {
            let (s, c) = p.phi[i].sin_cos();
            add_site_term(m, n, i, &SpinKind::X.matrix(), C64::new(-0.5 * b * s, 0.0));
            add_site_term(m, n, i, &SpinKind::Y.matrix(), C64::new(0.5 * b * c, 0.0));
        }
        let det = p.bz[i] - p.omega[i];
        if det != 0.0 {
            add_site_term(m, n, i, &SpinKind::Z.matrix(), C64::new(det, 0.0));
        }
    }
    Ok(h)
}

/// Undriven RWA Hamiltonian in the frame where sites `k` and `k + 1` rotate at
/// their mean splitting: Heisenberg exchange on `(k, k + 1)`, Ising elsewhere,
/// and `-+dBz/2` detunings on the pair.
///
/// `k` needs a neighbour on both sides unless `allow_edge` is set, in which
/// case the missing flank is simply absent.
pub fn swap_rwa_hamiltonian(p: &ChainParams, k: usize, allow_edge: bool) -> Result<Operator> {
    p.validate()?;
    if k + 1 >= p.n {
        return Err(Error::InvalidParameter(format!(
            "swap pair ({k}, {}) outside a {}-site chain",
            k + 1,
            p.n
        )));
    }
    if !allow_edge && (k == 0 || k + 2 >= p.n) {
        return Err(Error::InvalidParameter(format!(
            "swap pair ({k}, {}) lacks a flanking neighbour",
            k + 1
        )));
    }
    if p.by1.iter().any(|b| *b != 0.0) {
        return Err(Error::InvalidParameter(
            "swap Hamiltonian requires all drives off".into(),
        ));
    }
    let mut q = p.clone();
    let avg = 0.5 * (p.bz[k] + p.bz[k + 1]);
    q.omega = p.bz.clone();
    q.omega[k] = avg;
    q.omega[k + 1] = avg;
    let mut map = ResonanceMap::all_ising(p.n);
    map.0[k] = BondCoupling::Heisenberg;
    chain_rwa_hamiltonian(&q, &map)
}
