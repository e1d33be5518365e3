//! Quasi-static Gaussian charge noise on the exchange couplings.
//!
//! Each shot draws one exchange offset per bond, holds it for the whole
//! schedule and records the infidelity. Sample `i` draws from a ChaCha8
//! stream selected by `(seed, i)`, so results do not depend on scheduling
//! across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::metrics::{gate_fidelity, INPUT_UNITARITY_TOL};
use crate::operator::Operator;
use crate::scheduling::{Evaluator, Schedule};

/// How draws on different bonds relate within one shot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Correlation {
    /// One independent draw per bond.
    #[default]
    Independent,
    /// A single standard-normal draw scaled by each bond's sigma.
    Shared,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSpec {
    /// `sigma_J / J`, applied to each bond's nominal exchange.
    pub sigma_rel: f64,
    pub samples: usize,
    pub seed: u64,
    pub correlation: Correlation,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            sigma_rel: 0.01,
            samples: 10_000,
            seed: 0,
            correlation: Correlation::Independent,
        }
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_rel >= 0.0 && self.sigma_rel.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma_rel = {} must be finite and non-negative",
                self.sigma_rel
            )));
        }
        if self.samples == 0 {
            return Err(Error::InvalidParameter("at least one sample is required".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub mean_infidelity: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    pub samples_used: usize,
}

/// The random stream of sample `index`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One normal draw by the Box-Muller transform. `sigma = 0` returns `mu` exactly.
pub fn gaussian_sample<R: Rng + ?Sized>(mu: f64, sigma: f64, rng: &mut R) -> f64 {
    if sigma == 0.0 {
        return mu;
    }
    // 1 - U lies in (0, 1], keeping the logarithm finite.
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    mu + sigma * (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Rough infidelity floor `1 - exp(-sigma^2 tau^2 / 2)` for a gate of length `tau`.
pub fn infidelity_floor_estimate(sigma: f64, tau: f64) -> f64 {
    -(-0.5 * sigma * sigma * tau * tau).exp_m1()
}

/// Mean infidelity of `schedule` against `target` under quasi-static
/// exchange noise.
pub fn mc_infidelity(
    schedule: &Schedule,
    target: &Operator,
    noise: &NoiseSpec,
    evaluator: &Evaluator,
) -> Result<McResult> {
    noise.validate()?;
    if !target.is_unitary(INPUT_UNITARITY_TOL) {
        return Err(Error::NotUnitary {
            deviation: target.unitarity_error(),
        });
    }
    let sigmas: Vec<f64> = schedule
        .nominal_bonds()
        .iter()
        .map(|j| noise.sigma_rel * j)
        .collect();
    let noiseless = sigmas.iter().all(|s| *s == 0.0);
    let shots = if noiseless { 1 } else { noise.samples };
    if let Evaluator::LabOracle(cfg) = evaluator {
        let per_shot = schedule.oracle_steps(cfg)?;
        let total = per_shot as f64 * shots as f64;
        if total > cfg.max_steps as f64 {
            return Err(Error::StepBudget {
                required: total,
                cap: cfg.max_steps,
                dt: cfg.dt,
                duration: schedule.duration() * shots as f64,
            });
        }
    }

    let shot = |i: usize| -> Result<f64> {
        let mut rng = sample_rng(noise.seed, i as u64);
        let shifts: Vec<f64> = match noise.correlation {
            Correlation::Independent => sigmas
                .iter()
                .map(|s| gaussian_sample(0.0, *s, &mut rng))
                .collect(),
            Correlation::Shared => {
                let z = gaussian_sample(0.0, 1.0, &mut rng);
                sigmas.iter().map(|s| z * s).collect()
            }
        };
        let u = schedule.unitary_with_shifts(evaluator, &shifts)?;
        Ok((1.0 - gate_fidelity(&u, target)?).clamp(0.0, 1.0))
    };
    let values = (0..shots)
        .into_par_iter()
        .map(shot)
        .collect::<Result<Vec<f64>>>()?;

    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let stderr = if values.len() > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(McResult {
        mean_infidelity: mean,
        stderr,
        samples_used: if noiseless { noise.samples } else { values.len() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheduling::schedule_zx;

    fn zx_floor(j: f64, sigma_rel: f64, samples: usize) -> McResult {
        let s = schedule_zx(j, 0, 0).unwrap();
        let target = s.target.operator().unwrap();
        let noise = NoiseSpec {
            sigma_rel,
            samples,
            seed: 7,
            ..NoiseSpec::default()
        };
        mc_infidelity(&s, &target, &noise, &Evaluator::Analytic).unwrap()
    }

    #[test]
    fn gaussian_statistics() {
        let mut rng = sample_rng(1, 0);
        assert_eq!(gaussian_sample(3.5, 0.0, &mut rng), 3.5);
        let n = 1_000_000;
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..n {
            let x = gaussian_sample(2.0, 0.5, &mut rng);
            sum += x;
            sq += (x - 2.0) * (x - 2.0);
        }
        let mean = sum / n as f64;
        assert!((mean - 2.0).abs() < 4.0 * 0.5 / (n as f64).sqrt());
        assert!((sq / n as f64 - 0.25).abs() < 0.01 * 0.25);

        let a: Vec<f64> = (0..5).map(|_| gaussian_sample(0.0, 1.0, &mut sample_rng(9, 3))).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut r1 = sample_rng(9, 3);
        let mut r2 = sample_rng(9, 4);
        assert_ne!(gaussian_sample(0.0, 1.0, &mut r1), gaussian_sample(0.0, 1.0, &mut r2));
    }

    #[test]
    fn floor_estimate() {
        assert_eq!(infidelity_floor_estimate(0.0, 1.0), 0.0);
        let j = 1e6;
        let tau = schedule_zx(j, 0, 0).unwrap().duration();
        let f = infidelity_floor_estimate(0.01 * j, tau);
        assert!((f - 0.01144).abs() < 5e-5, "{f}");
        assert!(infidelity_floor_estimate(0.02 * j, tau) > f);
        assert!(infidelity_floor_estimate(0.01 * j, 2.0 * tau) > f);
    }

    #[test]
    fn noiseless_limit() {
        let r = zx_floor(1e6, 0.0, 100);
        assert!(r.mean_infidelity < 1e-12);
        assert_eq!(r.stderr, 0.0);
        assert_eq!(r.samples_used, 100);
        // Tiny noise converges to the noiseless value.
        let ladder: Vec<f64> = [1e-3, 1e-4, 1e-5]
            .iter()
            .map(|s| zx_floor(1e6, *s, 200).mean_infidelity)
            .collect();
        assert!(ladder[0] > ladder[1] && ladder[1] > ladder[2] && ladder[2] < 1e-8);
    }

    #[test]
    fn reproducible_and_quadratic() {
        let a = zx_floor(1e6, 0.01, 2000);
        let b = zx_floor(1e6, 0.01, 2000);
        assert_eq!(a, b);
        let c = zx_floor(1e6, 0.02, 2000);
        let ratio = c.mean_infidelity / a.mean_infidelity;
        assert!((ratio - 4.0).abs() < 0.8, "ratio = {ratio}");
        // The floor depends on sigma / J only.
        let d = zx_floor(1e8, 0.01, 2000);
        assert!((d.mean_infidelity / a.mean_infidelity - 1.0).abs() < 1e-6);
    }

    #[test]
    fn spec_validation_and_budget() {
        let s = schedule_zx(1e6, 0, 0).unwrap();
        let t = s.target.operator().unwrap();
        let bad = NoiseSpec {
            samples: 0,
            ..NoiseSpec::default()
        };
        assert!(mc_infidelity(&s, &t, &bad, &Evaluator::Analytic).is_err());
        let cfg = crate::evolution::PropagationConfig::default();
        let r = mc_infidelity(&s, &t, &NoiseSpec::default(), &Evaluator::LabOracle(cfg));
        assert!(matches!(r, Err(Error::StepBudget { .. })));
    }
}
