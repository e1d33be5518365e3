use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::schedule::{Device, GateTarget, ParamKey, PulseSegment, Schedule};
use super::{tau_iy, tau_zz};
use crate::error::{Error, Result};
use crate::models::{ChainParams, DqdParams};
use crate::operator::{Pauli, PauliWord};

/// Zeeman splittings used when a builder is not given a device.
const DEFAULT_BZ: (f64, f64) = (20e9, 20.2e9);

fn check_amplitude(b: f64) -> Result<()> {
    if b > 0.0 && b.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("drive amplitude {b} must be positive")))
    }
}

fn word(s: &str) -> PauliWord {
    s.parse().expect("literal Pauli word")
}

fn right_drive(duration: f64, b: f64, phi: f64) -> PulseSegment {
    PulseSegment::wait(duration)
        .with(ParamKey::By2R, b)
        .with(ParamKey::Phi2, phi)
}

/// Both drives switched off; segments switch the right-dot drive on.
fn idle_base(base: &DqdParams) -> DqdParams {
    DqdParams {
        by1_l: 0.0,
        by1_r: 0.0,
        by2_l: 0.0,
        by2_r: 0.0,
        ..base.clone()
    }
}

/// `IY` from two single-drive pulses of opposite phase followed by a `ZZ`
/// wait, on the default device with `J = B`.
pub fn schedule_zx(b: f64, n1: u32, n2: u32) -> Result<Schedule> {
    check_amplitude(b)?;
    schedule_zx_on(&DqdParams::resonant(DEFAULT_BZ.0, DEFAULT_BZ.1, b), b, n1, n2, 0)
}

/// As [`schedule_zx`] on a given device, whose exchange must equal `b`.
/// The wait lasts `tau_zz(J, zz_n)`.
pub fn schedule_zx_on(base: &DqdParams, b: f64, n1: u32, n2: u32, zz_n: u32) -> Result<Schedule> {
    check_amplitude(b)?;
    if (base.j - b).abs() > 1e-12 * b {
        return Err(Error::InvalidParameter(format!(
            "the ZX construction needs J = B, got J = {:e}, B = {b:e}",
            base.j
        )));
    }
    let j = base.j;
    Schedule::new(
        Device::Dqd(idle_base(base)),
        vec![
            right_drive(tau_iy(b, j, n1)?, b, 0.0),
            right_drive(tau_iy(b, j, n2)?, b, PI),
            PulseSegment::wait(tau_zz(j, zz_n)?),
        ],
        GateTarget::Pauli { word: word("IY") },
        None,
    )
}

/// A quarter turn `exp(-i pi/4 IY)` on the default device, with `J = sqrt(2) B`.
pub fn schedule_iy_half(b: f64, n: u32) -> Result<Schedule> {
    check_amplitude(b)?;
    schedule_iy_half_on(&DqdParams::resonant(DEFAULT_BZ.0, DEFAULT_BZ.1, 0.0), b, n)
}

/// As [`schedule_iy_half`]; the exchange of `base` is replaced by `sqrt(2) B`.
///
/// Each drive lasts `4 (arccot(B / Omega_2) + n pi) / Omega_2` with
/// `Omega_2 = sqrt(3) B`; the two drives differ by a phase of pi.
pub fn schedule_iy_half_on(base: &DqdParams, b: f64, n: u32) -> Result<Schedule> {
    check_amplitude(b)?;
    let j = 2f64.sqrt() * b;
    let om = b.hypot(j);
    let arccot = (om / b).atan();
    let tau = 4.0 * (arccot + f64::from(n) * PI) / om;
    let base = DqdParams { j, ..idle_base(base) };
    Schedule::new(
        Device::Dqd(base),
        vec![
            right_drive(tau, b, 0.0),
            right_drive(tau, b, PI),
            PulseSegment::wait(tau_zz(j, 0)?),
        ],
        GateTarget::Rotation {
            word: word("IY"),
            angle: PI / 2.0,
        },
        None,
    )
}

/// Identity from one single-drive pulse of length `4 pi n / sqrt(B^2 + J^2)`.
pub fn schedule_idle_by_drive(b: f64, j: f64, n: u32) -> Result<Schedule> {
    check_amplitude(b)?;
    if n == 0 {
        return Err(Error::InvalidParameter("idle multiple must be at least 1".into()));
    }
    let base = DqdParams::resonant(DEFAULT_BZ.0, DEFAULT_BZ.1, j);
    Schedule::new(
        Device::Dqd(base),
        vec![right_drive(4.0 * PI * f64::from(n) / b.hypot(j), b, 0.0)],
        GateTarget::Pauli { word: word("II") },
        None,
    )
}

/// Parameters of the three-step Y gate on a site with two Ising neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeStepDesign {
    pub amplitude: f64,
    /// Drive periods `(n1, m1)` of the first, centre-frequency step.
    pub first: (u32, u32),
    /// `(n, m, l)` of the two side-frequency steps.
    pub outer: (u32, u32, u32),
    /// Real-valued `l` that would synchronize the far transition exactly.
    pub l_exact: f64,
    pub durations: [f64; 3],
}

impl ThreeStepDesign {
    /// Chooses the amplitude from the side-step condition
    /// `B = 2 (2n + 1) J0 / sqrt(4 m^2 - (2n + 1)^2)`, then the shortest
    /// centre step that synchronizes its off-resonant transitions as well.
    pub fn new(j0: f64, n: u32, m: u32, l: u32) -> Result<Self> {
        if !(j0 > 0.0 && j0.is_finite()) {
            return Err(Error::InvalidParameter(format!("exchange {j0} must be positive")));
        }
        let odd = f64::from(2 * n + 1);
        let mf = f64::from(m);
        if 4.0 * mf * mf <= odd * odd {
            return Err(Error::Infeasible(format!(
                "4 m^2 must exceed (2n + 1)^2; the smallest feasible m for n = {n} is {}",
                n + 1
            )));
        }
        let b = 2.0 * odd * j0 / (4.0 * mf * mf - odd * odd).sqrt();
        // Detuned by 2 J0: l full turns need sqrt(4 J0^2 + B^2 / 4) tau = 2 pi l.
        let l_exact = odd * (4.0 * j0 * j0 + 0.25 * b * b).sqrt() / b;
        let nearest = l_exact.round() as u32;
        if l != nearest {
            return Err(Error::Infeasible(format!(
                "l = {l} is not the nearest integer to {l_exact:.4}; use l = {nearest}"
            )));
        }
        // The centre step has only J0-detuned transitions, which synchronize
        // when (2 n1 + 1) m is a multiple of 2n + 1.
        let n1 = (0..=n)
            .find(|k| ((2 * k + 1) * m) % (2 * n + 1) == 0)
            .expect("n1 = n always qualifies");
        let m1 = (2 * n1 + 1) * m / (2 * n + 1);
        let t1 = 2.0 * PI * f64::from(2 * n1 + 1) / b;
        let t2 = 2.0 * PI * odd / b;
        Ok(Self {
            amplitude: b,
            first: (n1, m1),
            outer: (n, m, l),
            l_exact,
            durations: [t1, t2, t2],
        })
    }

    pub fn total_duration(&self) -> f64 {
        self.durations.iter().sum()
    }

    /// `(1 + d sin^4(Omega_far tau / 4)) / (d + 1)`, with `Omega_far` the
    /// Rabi frequency of the transition detuned by `2 J0` in a side step.
    pub fn fidelity_estimate(&self, j0: f64, d: f64) -> f64 {
        let b = self.amplitude;
        let om = (4.0 * j0 * j0 + 0.25 * b * b).sqrt();
        let s = (0.25 * om * self.durations[1]).sin();
        (1.0 + d * s.powi(4)) / (d + 1.0)
    }
}

/// Three-step Y gate on the middle site of a three-qubit chain with uniform
/// exchange `j0`, using the side-step integers `(n, m, l)`; `(2, 5, 9)` is
/// the shortest practical choice.
pub fn schedule_three_step_y(j0: f64, n: u32, m: u32, l: u32) -> Result<Schedule> {
    let base = ChainParams::graded(3, DEFAULT_BZ.0, DEFAULT_BZ.1 - DEFAULT_BZ.0, j0)?;
    schedule_three_step_y_on(&base, 1, n, m, l)
}

/// Three-step Y gate on site `k` of `base`. The steps drive the transitions
/// at `bz_k`, `bz_k + J0` and `bz_k - J0`, where `J0` is the exchange on
/// both sides of `k`. The side steps only approximately synchronize the far
/// transition, so the schedule is not exact.
pub fn schedule_three_step_y_on(
    base: &ChainParams,
    k: usize,
    n: u32,
    m: u32,
    l: u32,
) -> Result<Schedule> {
    base.validate()?;
    if k == 0 || k + 1 >= base.n {
        return Err(Error::InvalidParameter(format!(
            "site {k} needs two neighbours in a {}-site chain",
            base.n
        )));
    }
    let j0 = base.jlist[k - 1];
    if (base.jlist[k] - j0).abs() > 1e-12 * j0.abs() {
        return Err(Error::InvalidParameter(
            "the three-step gate needs equal exchange on both sides".into(),
        ));
    }
    let design = ThreeStepDesign::new(j0, n, m, l)?;
    let mut idle = base.clone();
    idle.by1.iter_mut().for_each(|b| *b = 0.0);
    idle.omega.clone_from(&idle.bz);
    let bz = idle.bz[k];
    let step = |duration: f64, omega: f64| {
        PulseSegment::wait(duration)
            .with(ParamKey::By1(k), design.amplitude)
            .with(ParamKey::Phi(k), 0.0)
            .with(ParamKey::Omega(k), omega)
    };
    let d = idle.dim() as f64;
    Schedule::new(
        Device::Chain(idle),
        vec![
            step(design.durations[0], bz),
            step(design.durations[1], bz + j0),
            step(design.durations[2], bz - j0),
        ],
        GateTarget::Pauli {
            word: PauliWord::single(base.n, k, Pauli::Y)?,
        },
        Some(design.fidelity_estimate(j0, d)),
    )
}
