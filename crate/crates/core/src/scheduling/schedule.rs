use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::evolution::{
    frame_transform, propagate_lab_interval, u_chain_driven, u_chain_exchange, u_two_drive,
    PropagationConfig,
};
use crate::models::{
    chain_rwa_hamiltonian, ChainParams, DqdParams, LabModel, ResonanceMap, RwaLimits,
};
use crate::operator::{expm_hermitian, pauli_matrix, re, Operator, PauliWord, C64};

/// Largest phase distance at which a schedule counts as hitting its target exactly.
const EXACT_TOL: f64 = 1e-9;

/// A named, overridable device parameter. DQD keys use the DQD field names
/// (`bzL`, `by2R`, `phi2`, `j`, ...); chain keys are indexed (`bz[i]`,
/// `by1[i]`, `phi[i]`, `omega[i]`, `j[i]`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ParamKey {
    BzL,
    BzR,
    By0L,
    By0R,
    By1L,
    By1R,
    By2L,
    By2R,
    Phi1,
    Phi2,
    Omega1,
    Omega2,
    J,
    Bz(usize),
    By1(usize),
    Phi(usize),
    Omega(usize),
    /// Exchange on chain bond `i`, between sites `i` and `i + 1`.
    JBond(usize),
}

const SCALAR_KEYS: [(&str, ParamKey); 13] = [
    ("bzL", ParamKey::BzL),
    ("bzR", ParamKey::BzR),
    ("by0L", ParamKey::By0L),
    ("by0R", ParamKey::By0R),
    ("by1L", ParamKey::By1L),
    ("by1R", ParamKey::By1R),
    ("by2L", ParamKey::By2L),
    ("by2R", ParamKey::By2R),
    ("phi1", ParamKey::Phi1),
    ("phi2", ParamKey::Phi2),
    ("omega1", ParamKey::Omega1),
    ("omega2", ParamKey::Omega2),
    ("j", ParamKey::J),
];

impl fmt::Display for ParamKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bz(i) => write!(f, "bz[{i}]"),
            Self::By1(i) => write!(f, "by1[{i}]"),
            Self::Phi(i) => write!(f, "phi[{i}]"),
            Self::Omega(i) => write!(f, "omega[{i}]"),
            Self::JBond(i) => write!(f, "j[{i}]"),
            scalar => {
                let name = SCALAR_KEYS
                    .iter()
                    .find(|(_, k)| k == scalar)
                    .map(|(n, _)| *n)
                    .unwrap_or("?");
                f.write_str(name)
            }
        }
    }
}

impl FromStr for ParamKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((_, k)) = SCALAR_KEYS.iter().find(|(n, _)| *n == s) {
            return Ok(*k);
        }
        let unknown = || Error::UnknownParameter(s.to_string());
        let (name, rest) = s.split_once('[').ok_or_else(unknown)?;
        let idx: usize = rest
            .strip_suffix(']')
            .and_then(|i| i.trim().parse().ok())
            .ok_or_else(unknown)?;
        match name.trim() {
            "bz" => Ok(Self::Bz(idx)),
            "by1" => Ok(Self::By1(idx)),
            "phi" => Ok(Self::Phi(idx)),
            "omega" => Ok(Self::Omega(idx)),
            "j" => Ok(Self::JBond(idx)),
            _ => Err(unknown()),
        }
    }
}

impl TryFrom<String> for ParamKey {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ParamKey> for String {
    fn from(k: ParamKey) -> Self {
        k.to_string()
    }
}

/// The device a schedule runs on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Device {
    Dqd(DqdParams),
    Chain(ChainParams),
}

impl Device {
    pub fn num_qubits(&self) -> usize {
        match self {
            Self::Dqd(_) => 2,
            Self::Chain(p) => p.n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Dqd(p) => p.validate(),
            Self::Chain(p) => p.validate(),
        }
    }

    pub fn zeeman(&self) -> Vec<f64> {
        match self {
            Self::Dqd(p) => vec![p.bz_l, p.bz_r],
            Self::Chain(p) => p.bz.clone(),
        }
    }

    /// Exchange value of every bond, left to right.
    pub fn bonds(&self) -> Vec<f64> {
        match self {
            Self::Dqd(p) => vec![p.j],
            Self::Chain(p) => p.jlist.clone(),
        }
    }

    /// Adds `shifts[b]` to the exchange of bond `b`.
    pub fn shift_bonds(&mut self, shifts: &[f64]) -> Result<()> {
        let bonds = match self {
            Self::Dqd(p) => std::slice::from_mut(&mut p.j),
            Self::Chain(p) => p.jlist.as_mut_slice(),
        };
        if shifts.len() != bonds.len() {
            return Err(Error::InvalidParameter(format!(
                "{} exchange shifts for {} bonds",
                shifts.len(),
                bonds.len()
            )));
        }
        for (j, s) in bonds.iter_mut().zip(shifts) {
            *j += s;
        }
        Ok(())
    }

    /// Bond index of an exchange key, `None` for any other key.
    pub fn bond_of(&self, key: ParamKey) -> Option<usize> {
        match (self, key) {
            (Self::Dqd(_), ParamKey::J) => Some(0),
            (Self::Chain(_), ParamKey::JBond(i)) => Some(i),
            _ => None,
        }
    }

    /// Overwrites one parameter. Keys that do not belong to this device kind,
    /// or whose index is out of range, are rejected.
    pub fn set(&mut self, key: ParamKey, value: f64) -> Result<()> {
        let kind = self.kind();
        let bad = || Error::UnknownParameter(format!("{key} on a {kind}"));
        let slot: &mut f64 = match self {
            Self::Dqd(p) => match key {
                ParamKey::BzL => &mut p.bz_l,
                ParamKey::BzR => &mut p.bz_r,
                ParamKey::By0L => &mut p.by0_l,
                ParamKey::By0R => &mut p.by0_r,
                ParamKey::By1L => &mut p.by1_l,
                ParamKey::By1R => &mut p.by1_r,
                ParamKey::By2L => &mut p.by2_l,
                ParamKey::By2R => &mut p.by2_r,
                ParamKey::Phi1 => &mut p.phi1,
                ParamKey::Phi2 => &mut p.phi2,
                ParamKey::Omega1 => &mut p.omega1,
                ParamKey::Omega2 => &mut p.omega2,
                ParamKey::J => &mut p.j,
                _ => return Err(bad()),
            },
            Self::Chain(p) => {
                let (v, i) = match key {
                    ParamKey::Bz(i) => (&mut p.bz, i),
                    ParamKey::By1(i) => (&mut p.by1, i),
                    ParamKey::Phi(i) => (&mut p.phi, i),
                    ParamKey::Omega(i) => (&mut p.omega, i),
                    ParamKey::JBond(i) => (&mut p.jlist, i),
                    _ => return Err(bad()),
                };
                match v.get_mut(i) {
                    Some(x) => x,
                    None => return Err(bad()),
                }
            }
        };
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!("{key} = {value}")));
        }
        *slot = value;
        Ok(())
    }

    fn kind(&self) -> &'static str {
        match self {
            Self::Dqd(_) => "dqd",
            Self::Chain(_) => "chain",
        }
    }

    pub fn lab_model(&self) -> Result<LabModel> {
        match self {
            Self::Dqd(p) => p.lab_model(),
            Self::Chain(p) => p.lab_model(),
        }
    }

    /// Rotating-wave propagator over `[t0, t0 + tau]` in the frame of each
    /// site's Zeeman splitting.
    fn analytic_propagator(&self, t0: f64, tau: f64) -> Result<Operator> {
        match self {
            Self::Dqd(p) => {
                p.check_resonant(&RwaLimits::default())?;
                u_two_drive(p, tau)
            }
            Self::Chain(p) => {
                p.validate()?;
                let tol = RwaLimits::default().resonance_rel_tol;
                let driven: Vec<usize> = (0..p.n).filter(|&i| p.by1[i] != 0.0).collect();
                if p.all_resonant(tol) {
                    match driven.as_slice() {
                        [] => return u_chain_exchange(&p.jlist, tau),
                        [k] => return u_chain_driven(p, *k, tau),
                        _ => {}
                    }
                }
                // Drive frame first, then move to the Zeeman frame: the sites
                // rotate relative to each other at `bz - omega`.
                let map = ResonanceMap::classify(p, &RwaLimits::default(), false)?;
                let u = expm_hermitian(&chain_rwa_hamiltonian(p, &map)?, tau)?;
                let detuning: Vec<f64> = p.bz.iter().zip(&p.omega).map(|(b, w)| b - w).collect();
                frame_transform(&u, &detuning, t0, t0 + tau)
            }
        }
    }
}

/// One piecewise-constant stretch of a schedule.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSegment {
    /// Seconds.
    pub duration: f64,
    #[serde(default)]
    pub overrides: BTreeMap<ParamKey, f64>,
}

impl PulseSegment {
    pub fn wait(duration: f64) -> Self {
        Self {
            duration,
            overrides: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: ParamKey, value: f64) -> Self {
        self.overrides.insert(key, value);
        self
    }
}

/// The gate a schedule is meant to implement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GateTarget {
    Pauli { word: PauliWord },
    /// `exp(-i angle/2 P)`.
    Rotation { word: PauliWord, angle: f64 },
}

impl GateTarget {
    pub fn word(&self) -> &PauliWord {
        match self {
            Self::Pauli { word } | Self::Rotation { word, .. } => word,
        }
    }

    pub fn operator(&self) -> Result<Operator> {
        match self {
            Self::Pauli { word } => pauli_matrix(word),
            Self::Rotation { word, angle } => {
                let p = pauli_matrix(word)?;
                let (s, c) = (0.5 * angle).sin_cos();
                Ok(&Operator::identity(p.dim()).scale(re(c)) + &p.scale(C64::new(0.0, -s)))
            }
        }
    }
}

impl fmt::Display for GateTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Pauli { word } => write!(f, "{word}"),
            Self::Rotation { word, angle } => write!(f, "{word}({angle:.6})"),
        }
    }
}

/// How a schedule is turned into a unitary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Evaluator {
    /// Closed-form or rotating-wave propagators per segment.
    Analytic,
    /// The lab-frame integrator, transformed into the configured frame.
    LabOracle(PropagationConfig),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleSpec {
    base: Device,
    segments: Vec<PulseSegment>,
    target: GateTarget,
    /// Recomputed on load; accepted so that serialized schedules read back.
    #[serde(default)]
    #[allow(dead_code)]
    exact: Option<bool>,
    #[serde(default)]
    predicted_fidelity: Option<f64>,
}

/// A piecewise-constant pulse sequence on a base device.
///
/// Segments store parameter overrides rather than matrices, so the schedule
/// can be re-evaluated under perturbed exchange or with another evaluator.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "ScheduleSpec")]
pub struct Schedule {
    pub base: Device,
    pub segments: Vec<PulseSegment>,
    pub target: GateTarget,
    /// Whether the analytic unitary matches the target up to a global phase.
    pub exact: bool,
    /// Fidelity estimate from a closed-form expression, where one exists.
    pub predicted_fidelity: Option<f64>,
    #[serde(skip)]
    predicted_unitary: Operator,
}

impl TryFrom<ScheduleSpec> for Schedule {
    type Error = Error;
    fn try_from(s: ScheduleSpec) -> Result<Self> {
        Self::new(s.base, s.segments, s.target, s.predicted_fidelity)
    }
}

impl PartialEq for Schedule {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
            && self.segments == other.segments
            && self.target == other.target
            && self.predicted_fidelity == other.predicted_fidelity
    }
}

impl Schedule {
    pub fn new(
        base: Device,
        segments: Vec<PulseSegment>,
        target: GateTarget,
        predicted_fidelity: Option<f64>,
    ) -> Result<Self> {
        base.validate()?;
        if segments.is_empty() {
            return Err(Error::InvalidParameter("schedule has no segments".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.duration >= 0.0 && s.duration.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "segment {i} has duration {}",
                    s.duration
                )));
            }
        }
        if target.word().num_qubits() != base.num_qubits() {
            return Err(Error::DimensionMismatch {
                left: target.word().num_qubits(),
                right: base.num_qubits(),
            });
        }
        let mut out = Self {
            base,
            segments,
            target,
            exact: false,
            predicted_fidelity,
            predicted_unitary: Operator::identity(1),
        };
        out.predicted_unitary = out.unitary(&Evaluator::Analytic)?;
        out.exact = out
            .predicted_unitary
            .phase_distance(&out.target.operator()?)?
            <= EXACT_TOL;
        Ok(out)
    }

    pub fn predicted_unitary(&self) -> &Operator {
        &self.predicted_unitary
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn num_bonds(&self) -> usize {
        self.base.bonds().len()
    }

    /// Exchange scale of every bond: the base value, or the largest override
    /// when the base value is zero.
    pub fn nominal_bonds(&self) -> Vec<f64> {
        let mut nominal: Vec<f64> = self.base.bonds().iter().map(|j| j.abs()).collect();
        for (b, j) in nominal.iter_mut().enumerate() {
            if *j == 0.0 {
                *j = self
                    .segments
                    .iter()
                    .flat_map(|s| s.overrides.iter())
                    .filter(|(k, _)| self.base.bond_of(**k) == Some(b))
                    .map(|(_, v)| v.abs())
                    .fold(0.0, f64::max);
            }
        }
        nominal
    }

    /// Device state during each segment, with `shifts[b]` added to bond `b`.
    pub fn segment_devices(&self, shifts: &[f64]) -> Result<Vec<Device>> {
        self.segments
            .iter()
            .map(|s| {
                let mut d = self.base.clone();
                for (k, v) in &s.overrides {
                    d.set(*k, *v)?;
                }
                d.shift_bonds(shifts)?;
                d.validate()?;
                Ok(d)
            })
            .collect()
    }

    pub fn unitary(&self, evaluator: &Evaluator) -> Result<Operator> {
        self.unitary_with_shifts(evaluator, &vec![0.0; self.num_bonds()])
    }

    /// Whole-schedule propagator with every exchange value on bond `b`
    /// shifted by `shifts[b]`.
    pub fn unitary_with_shifts(&self, evaluator: &Evaluator, shifts: &[f64]) -> Result<Operator> {
        let devices = self.segment_devices(shifts)?;
        if let Evaluator::LabOracle(cfg) = evaluator {
            self.check_step_budget(&devices, cfg)?;
        }
        let mut u = Operator::identity(1 << self.base.num_qubits());
        let mut t = 0.0;
        for (d, s) in devices.iter().zip(&self.segments) {
            let step = match evaluator {
                Evaluator::Analytic => d.analytic_propagator(t, s.duration)?,
                Evaluator::LabOracle(cfg) => {
                    propagate_lab_interval(&d.lab_model()?, t, t + s.duration, cfg)?
                }
            };
            u = step.compose(&u)?;
            t += s.duration;
        }
        Ok(u)
    }

    /// Total integrator steps for the lab-frame evaluation of this schedule.
    pub fn oracle_steps(&self, cfg: &PropagationConfig) -> Result<u64> {
        let devices = self.segment_devices(&vec![0.0; self.num_bonds()])?;
        self.check_step_budget(&devices, cfg)
    }

    fn check_step_budget(&self, devices: &[Device], cfg: &PropagationConfig) -> Result<u64> {
        let mut total = 0u64;
        for (d, s) in devices.iter().zip(&self.segments) {
            total += cfg.steps_for(&d.lab_model()?, s.duration)?;
        }
        if total > cfg.max_steps {
            return Err(Error::StepBudget {
                required: total as f64,
                cap: cfg.max_steps,
                dt: cfg.dt,
                duration: self.duration(),
            });
        }
        Ok(total)
    }
}
