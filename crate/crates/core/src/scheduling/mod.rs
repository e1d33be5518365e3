//! Gate timings, composite pulse schedules and a deterministic scalar optimizer.
//!
//! Schedules are lists of piecewise-constant parameter overrides on a base
//! device, so the same schedule can be re-evaluated with perturbed exchange
//! values or by the lab-frame integrator.

mod builders;
mod schedule;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::models::{chain_rwa_hamiltonian, ChainParams, ResonanceMap, RwaLimits};
use crate::operator::{HermitianEigen, Pauli, PauliWord};

pub use builders::{
    schedule_idle_by_drive, schedule_iy_half, schedule_iy_half_on, schedule_three_step_y,
    schedule_three_step_y_on, schedule_zx, schedule_zx_on, ThreeStepDesign,
};
pub use schedule::{Device, Evaluator, GateTarget, ParamKey, PulseSegment, Schedule};

fn check_exchange(j: f64) -> Result<f64> {
    if !j.is_finite() {
        return Err(Error::InvalidParameter(format!("exchange {j} is not finite")));
    }
    if j == 0.0 {
        return Err(Error::ZeroExchange);
    }
    Ok(j.abs())
}

/// Waiting time after which residual exchange alone returns the identity: `4 pi n / |J|`.
pub fn tau_idle(j: f64, n: u32) -> Result<f64> {
    let j = check_exchange(j)?;
    if n == 0 {
        return Err(Error::InvalidParameter("idle multiple must be at least 1".into()));
    }
    Ok(4.0 * PI * f64::from(n) / j)
}

/// Waiting time after which residual exchange produces `ZZ`: `2 pi (2n + 1) / |J|`.
pub fn tau_zz(j: f64, n: u32) -> Result<f64> {
    let j = check_exchange(j)?;
    Ok(2.0 * PI * f64::from(2 * n + 1) / j)
}

/// Single-drive time that yields `IY` exactly when `J = B`: `2 pi (2n + 1) / sqrt(B^2 + J^2)`.
pub fn tau_iy(b: f64, j: f64, n: u32) -> Result<f64> {
    let om = b.hypot(j);
    if !(om > 0.0 && om.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "Rabi frequency sqrt(B^2 + J^2) = {om} must be positive"
        )));
    }
    Ok(2.0 * PI * f64::from(2 * n + 1) / om)
}

/// Which gate the synchronized two-drive evolution lands on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum YyOutcome {
    Yy,
    Identity,
}

/// Exchange and duration at which both two-drive Rabi frequencies complete
/// whole periods together.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YyCondition {
    pub j: f64,
    pub tau: f64,
    pub outcome: YyOutcome,
}

/// Solves `4 pi n / Omega_y+ = 4 pi m / Omega_y-` for `J`, with
/// `Omega_y+ = sqrt(Ey^2 + J^2)` and `Omega_y- = sqrt(dBy^2 + J^2)`.
///
/// At that time the propagator is `[(-1)^n - (-1)^m] YY + [(-1)^n + (-1)^m] II`
/// up to a global phase, so the result is `YY` exactly when `n + m` is odd.
pub fn yy_exchange_condition(ey: f64, dby: f64, n: u32, m: u32) -> Result<YyCondition> {
    if n == 0 || m == 0 || n == m {
        return Err(Error::InvalidParameter(format!(
            "period multiples must be positive and distinct, got n = {n}, m = {m}"
        )));
    }
    let (nf, mf) = (f64::from(n), f64::from(m));
    let radicand = (mf * mf * ey * ey - nf * nf * dby * dby) / (nf * nf - mf * mf);
    if !(radicand > 0.0 && radicand.is_finite()) {
        let region = if n > m {
            format!("{m} |Ey| > {n} |dBy|")
        } else {
            format!("{m} |Ey| < {n} |dBy|")
        };
        return Err(Error::Infeasible(format!(
            "no exchange solves n = {n}, m = {m} for Ey = {ey:e}, dBy = {dby:e}; feasible when {region}"
        )));
    }
    let j = radicand.sqrt();
    let tau = 4.0 * PI * nf / ey.hypot(j);
    let outcome = if (n + m) % 2 == 1 {
        YyOutcome::Yy
    } else {
        YyOutcome::Identity
    };
    Ok(YyCondition { j, tau, outcome })
}

/// `pi / B + pi / sqrt(B^2 + J0^2)`, a cheap stand-in for the optimal Y-gate time.
pub fn mean_time_heuristic(b: f64, j0: f64) -> Result<f64> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("drive amplitude {b} must be positive")));
    }
    Ok(PI / b + PI / b.hypot(j0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    pub grid_points: usize,
    /// Golden-section search stops when the bracket is below `rel_tol * t`.
    pub rel_tol: f64,
    /// Evaluate the grid on the rayon pool; only for pure objectives.
    pub parallel: bool,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            grid_points: 1000,
            rel_tol: 1e-6,
            parallel: true,
        }
    }
}

const FLAT_SPREAD: f64 = 1e-14;

/// Maximizes `fid` on `bracket`: a uniform grid scan, then golden-section
/// refinement around the best grid point. Returns `(t*, fid(t*))`.
pub fn optimal_time<F>(fid: F, bracket: (f64, f64), opts: &OptimizeOptions) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64 + Sync,
{
    let (a, b) = bracket;
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::InvalidParameter(format!("bracket ({a}, {b}) is empty")));
    }
    if opts.grid_points < 3 {
        return Err(Error::InvalidParameter("need at least 3 grid points".into()));
    }
    let h = (b - a) / (opts.grid_points - 1) as f64;
    let at = |i: usize| if i + 1 == opts.grid_points { b } else { a + h * i as f64 };
    let values: Vec<f64> = if opts.parallel {
        (0..opts.grid_points).into_par_iter().map(|i| fid(at(i))).collect()
    } else {
        (0..opts.grid_points).map(|i| fid(at(i))).collect()
    };
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidParameter("objective returned NaN".into()));
    }
    let (mut best, mut fbest) = (0, values[0]);
    let mut fmin = values[0];
    for (i, &v) in values.iter().enumerate() {
        if v > fbest {
            best = i;
            fbest = v;
        }
        fmin = fmin.min(v);
    }
    if fbest - fmin < FLAT_SPREAD {
        return Err(Error::FlatObjective {
            spread: fbest - fmin,
        });
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (at(best.saturating_sub(1)), at((best + 1).min(opts.grid_points - 1)));
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (fid(x1), fid(x2));
    let scale = at(best).abs().max(h);
    for _ in 0..200 {
        if hi - lo <= opts.rel_tol * scale {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = fid(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = fid(x2);
        }
    }
    let t = 0.5 * (lo + hi);
    let ft = fid(t);
    Ok(if ft >= fbest { (t, ft) } else { (at(best), fbest) })
}

/// Best common duration for driving every site with nonzero `by1` at once,
/// aiming at `Y` on exactly those sites. The chain Hamiltonian is
/// diagonalized once, so each trial time costs `O(d)`.
///
/// Returns `(t*, F(t*))` with the fidelity in the chain's own dimension.
pub fn driven_y_optimum(
    p: &ChainParams,
    bracket: (f64, f64),
    opts: &OptimizeOptions,
) -> Result<(f64, f64)> {
    p.validate()?;
    let driven: Vec<(usize, Pauli)> = (0..p.n)
        .filter(|&i| p.by1[i] != 0.0)
        .map(|i| (i, Pauli::Y))
        .collect();
    if driven.is_empty() {
        return Err(Error::InvalidParameter("no site is driven".into()));
    }
    let target = crate::operator::pauli_matrix(&PauliWord::with_factors(p.n, &driven)?)?;
    let map = ResonanceMap::classify(p, &RwaLimits::default(), false)?;
    let eig = HermitianEigen::new(&chain_rwa_hamiltonian(p, &map)?)?;
    let proj = eig.projector(&target)?;
    optimal_time(|t| proj.fidelity_at(t), bracket, opts)
}
