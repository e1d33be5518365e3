use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{FrameSpec, LabModel};
use crate::operator::{sz_sum_diagonal, Operator, C64};

/// Largest rotation angle `dt * |H|` allowed in one step.
pub const MAX_PHASE_PER_STEP: f64 = 0.05;

/// Chunks integrated independently and multiplied in order. Fixed so results
/// do not depend on the thread count.
const CHUNKS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Piecewise-constant Hamiltonian evaluated at each step midpoint.
    MidpointExpm,
    /// Two-point Gauss-Legendre Magnus step with the commutator correction.
    Magnus2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig {
    /// Largest step in seconds; shortened further when `dt * |H|` would exceed
    /// [`MAX_PHASE_PER_STEP`].
    pub dt: f64,
    pub method: Method,
    pub frame: FrameSpec,
    pub max_steps: u64,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            dt: 1.0,
            method: Method::MidpointExpm,
            frame: FrameSpec::EIGEN,
            max_steps: 100_000_000,
        }
    }
}

impl PropagationConfig {
    pub fn with_dt(dt: f64) -> Self {
        Self {
            dt,
            ..Self::default()
        }
    }

    /// Number of equal steps needed to cover `duration`.
    pub fn steps_for(&self, model: &LabModel, duration: f64) -> Result<u64> {
        if !(duration >= 0.0 && duration.is_finite()) {
            return Err(Error::InvalidParameter(format!("duration {duration} s")));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("step size {} s", self.dt)));
        }
        let bound = model.spectral_bound()?;
        let dt = if bound > 0.0 {
            self.dt.min(MAX_PHASE_PER_STEP / bound)
        } else {
            self.dt
        };
        let required = (duration / dt).ceil();
        if required > self.max_steps as f64 {
            return Err(Error::StepBudget {
                required,
                cap: self.max_steps,
                dt,
                duration,
            });
        }
        Ok((required as u64).max(u64::from(duration > 0.0)))
    }
}

/// Dense row-major scratch space for one integration stream.
struct Stepper<'a> {
    model: &'a LabModel,
    method: Method,
    d: usize,
    h0: Vec<C64>,
    drives: Vec<Vec<C64>>,
    h: Vec<C64>,
    h2: Vec<C64>,
    term: Vec<C64>,
    tmp: Vec<C64>,
    step: Vec<C64>,
    u: Vec<C64>,
}

fn row_major(op: &Operator) -> Vec<C64> {
    let d = op.dim();
    (0..d * d).map(|i| op.get(i / d, i % d)).collect()
}

#[inline]
fn matmul(a: &[C64], b: &[C64], out: &mut [C64], d: usize) {
    for r in 0..d {
        let row = &a[r * d..(r + 1) * d];
        let o = &mut out[r * d..(r + 1) * d];
        o.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
        for (k, av) in row.iter().enumerate() {
            if av.re == 0.0 && av.im == 0.0 {
                continue;
            }
            let brow = &b[k * d..(k + 1) * d];
            for (x, bv) in o.iter_mut().zip(brow) {
                *x += av * bv;
            }
        }
    }
}

impl<'a> Stepper<'a> {
    fn new(model: &'a LabModel, method: Method) -> Self {
        let d = model.dim();
        let mut u = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            u[i * d + i] = C64::new(1.0, 0.0);
        }
        Self {
            model,
            method,
            d,
            h0: row_major(model.static_part()),
            drives: model.drive_operators().iter().map(row_major).collect(),
            h: vec![C64::new(0.0, 0.0); d * d],
            h2: vec![C64::new(0.0, 0.0); d * d],
            term: vec![C64::new(0.0, 0.0); d * d],
            tmp: vec![C64::new(0.0, 0.0); d * d],
            step: vec![C64::new(0.0, 0.0); d * d],
            u,
        }
    }

    fn hamiltonian_into(&self, t: f64, out: &mut [C64]) {
        out.copy_from_slice(&self.h0);
        for (dr, op) in self.model.drives().iter().zip(&self.drives) {
            let c = dr.coefficient(t);
            for (o, v) in out.iter_mut().zip(op) {
                *o += v * c;
            }
        }
    }

    /// `step = exp(-i K h)` for Hermitian `K` in `self.h` by a Taylor series;
    /// `|K h| <= 0.05` keeps the truncation far below round-off.
    fn exp_step(&mut self, h: f64) {
        let d = self.d;
        let a = C64::new(0.0, -h);
        for v in self.h.iter_mut() {
            *v *= a;
        }
        self.step.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
        self.term.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
        for i in 0..d {
            self.step[i * d + i] = C64::new(1.0, 0.0);
            self.term[i * d + i] = C64::new(1.0, 0.0);
        }
        for k in 1..=20 {
            matmul(&self.term, &self.h, &mut self.tmp, d);
            let inv = 1.0 / k as f64;
            let mut biggest: f64 = 0.0;
            for ((t, x), s) in self.term.iter_mut().zip(&self.tmp).zip(self.step.iter_mut()) {
                *t = x * inv;
                *s += *t;
                biggest = biggest.max(t.norm_sqr());
            }
            if biggest < 1e-38 {
                break;
            }
        }
    }

    fn advance(&mut self, t: f64, h: f64) {
        let d = self.d;
        match self.method {
            Method::MidpointExpm => {
                let mut buf = std::mem::take(&mut self.h);
                self.hamiltonian_into(t + 0.5 * h, &mut buf);
                self.h = buf;
            }
            Method::Magnus2 => {
                let off = 3f64.sqrt() / 6.0;
                let mut h1 = std::mem::take(&mut self.h);
                let mut h2 = std::mem::take(&mut self.h2);
                self.hamiltonian_into(t + (0.5 - off) * h, &mut h1);
                self.hamiltonian_into(t + (0.5 + off) * h, &mut h2);
                // K = (H1 + H2)/2 - i (sqrt3 h / 12) [H2, H1]
                matmul(&h2, &h1, &mut self.tmp, d);
                matmul(&h1, &h2, &mut self.term, d);
                let c = C64::new(0.0, -(3f64.sqrt()) * h / 12.0);
                for i in 0..d * d {
                    h1[i] = (h1[i] + h2[i]) * 0.5 + c * (self.tmp[i] - self.term[i]);
                }
                self.h = h1;
                self.h2 = h2;
            }
        }
        self.exp_step(h);
        matmul(&self.step, &self.u, &mut self.tmp, d);
        std::mem::swap(&mut self.u, &mut self.tmp);
    }

    fn run(mut self, t0: f64, h: f64, first: u64, count: u64) -> Vec<C64> {
        for s in first..first + count {
            self.advance(t0 + s as f64 * h, h);
        }
        self.u
    }
}

/// Lab-frame propagator from `t0` to `t1` (no frame change).
fn lab_propagator(model: &LabModel, t0: f64, t1: f64, steps: u64, method: Method) -> Operator {
    let d = model.dim();
    if steps == 0 {
        return Operator::identity(d);
    }
    let h = (t1 - t0) / steps as f64;
    let chunks = (CHUNKS as u64).min(steps);
    let per = steps / chunks;
    let extra = steps % chunks;
    let ranges: Vec<(u64, u64)> = (0..chunks)
        .map(|c| {
            let start = c * per + c.min(extra);
            let len = per + u64::from(c < extra);
            (start, len)
        })
        .collect();
    let parts: Vec<Vec<C64>> = ranges
        .par_iter()
        .map(|&(start, len)| Stepper::new(model, method).run(t0, h, start, len))
        .collect();
    let mut acc = parts[0].clone();
    let mut tmp = acc.clone();
    for part in &parts[1..] {
        matmul(part, &acc, &mut tmp, d);
        std::mem::swap(&mut acc, &mut tmp);
    }
    Operator::from_rows(d, &acc).expect("square power-of-two buffer")
}

/// `R^dagger(t1) U R(t0)` with `R(t) = exp(-i t sum_i w_i Sz_i)`.
pub fn frame_transform(u: &Operator, references: &[f64], t0: f64, t1: f64) -> Result<Operator> {
    if 1usize << references.len() != u.dim() {
        return Err(Error::DimensionMismatch {
            left: 1 << references.len(),
            right: u.dim(),
        });
    }
    let w = sz_sum_diagonal(references);
    let d = u.dim();
    Ok(Operator::from_fn(d, |r, c| {
        C64::from_polar(1.0, w[r] * t1 - w[c] * t0) * u.get(r, c)
    }))
}

/// Time-ordered propagator from `t0` to `t1`, expressed in the configured frame.
pub fn propagate_lab_interval(
    model: &LabModel,
    t0: f64,
    t1: f64,
    cfg: &PropagationConfig,
) -> Result<Operator> {
    if !(t1 >= t0) {
        return Err(Error::InvalidParameter(format!("interval [{t0}, {t1}] is reversed")));
    }
    let steps = cfg.steps_for(model, t1 - t0)?;
    log::debug!("lab propagation over {:.3e} s in {steps} steps", t1 - t0);
    let u = lab_propagator(model, t0, t1, steps, cfg.method);
    frame_transform(&u, &cfg.frame.references(model.zeeman())?, t0, t1)
}

/// Time-ordered propagator from 0 to `t_final` in the configured frame.
pub fn propagate_lab(model: &LabModel, t_final: f64, cfg: &PropagationConfig) -> Result<Operator> {
    propagate_lab_interval(model, 0.0, t_final, cfg)
}

/// Propagators from 0 to each of the ascending `times`, in the configured frame.
pub fn propagate_lab_trajectory(
    model: &LabModel,
    times: &[f64],
    cfg: &PropagationConfig,
) -> Result<Vec<Operator>> {
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|t| *t < 0.0) {
        return Err(Error::InvalidParameter("trajectory times must ascend from 0".into()));
    }
    // Fails early when the whole trajectory would exceed the step cap.
    cfg.steps_for(model, times.last().copied().unwrap_or(0.0))?;
    let refs = cfg.frame.references(model.zeeman())?;
    let mut out = Vec::with_capacity(times.len());
    let mut u = Operator::identity(model.dim());
    let mut prev = 0.0;
    for &t in times {
        let steps = cfg.steps_for(model, t - prev)?;
        let piece = lab_propagator(model, prev, t, steps, cfg.method);
        u = &piece * &u;
        out.push(frame_transform(&u, &refs, 0.0, t)?);
        prev = t;
    }
    Ok(out)
}
