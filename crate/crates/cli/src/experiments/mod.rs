//! The built-in experiments, their parameter tables and the shared run context.

use std::path::PathBuf;

use resex_core::evolution::PropagationConfig;
use resex_core::noise::NoiseSpec;
use resex_core::scheduling::Evaluator;

use crate::config::{EvaluatorChoice, Experiment, Params, Scale, ScenarioConfig, Sweep};
use crate::svg::{bar_plot, line_plot, LinePlot};
use crate::table::{write_file, Table};
use crate::CliError;

mod chain;
mod dqd;
mod report;
mod swap;

pub use chain::{run_chain_simul_y, run_chain_ygate};
pub use dqd::{run_dqd_coeffs, run_dqd_fidelity_scan};
pub use report::run_report;
pub use swap::run_swap;

/// Default of a parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Default_ {
    Num(f64),
    List(&'static [f64]),
    Text(&'static str),
    /// A number computed from other parameters when absent.
    Derived,
}

/// Admissible values of a numeric parameter, or of a label.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rule {
    Finite,
    Positive,
    NonNegative,
    /// An integer in `min..=max`.
    Count { min: u32, max: u32 },
    OneOf(&'static [&'static str]),
}

impl Rule {
    pub(crate) fn violation(&self, v: f64) -> Option<String> {
        if !v.is_finite() {
            return Some("is not finite".into());
        }
        match *self {
            Rule::Finite | Rule::OneOf(_) => None,
            Rule::Positive if v <= 0.0 => Some("must be positive".into()),
            Rule::NonNegative if v < 0.0 => Some("must be non-negative".into()),
            Rule::Count { min, max } if v.fract() != 0.0 || v < f64::from(min) || v > f64::from(max) => {
                Some(format!("must be an integer in {min}..={max}"))
            }
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamDef {
    pub name: &'static str,
    pub default: Default_,
    pub rule: Rule,
    pub doc: &'static str,
}

const fn num(name: &'static str, v: f64, rule: Rule, doc: &'static str) -> ParamDef {
    ParamDef {
        name,
        default: Default_::Num(v),
        rule,
        doc,
    }
}

const fn list(name: &'static str, v: &'static [f64], rule: Rule, doc: &'static str) -> ParamDef {
    ParamDef {
        name,
        default: Default_::List(v),
        rule,
        doc,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepDefault {
    pub field: &'static str,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

impl SweepDefault {
    pub fn to_sweep(self) -> Sweep {
        Sweep {
            field: self.field.into(),
            start: self.start,
            stop: self.stop,
            points: self.points,
            scale: self.scale,
        }
    }
}

pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub about: &'static str,
    pub params: &'static [ParamDef],
    pub sweep_fields: &'static [&'static str],
    pub default_sweep: Option<SweepDefault>,
    pub uses_noise: bool,
    pub supports_oracle: bool,
    pub accepts_schedule: bool,
    pub default_seed: u64,
    /// Cross-field checks beyond the per-parameter rules.
    pub extra_checks: fn(&Params) -> Vec<String>,
}

impl ExperimentSpec {
    pub fn of(e: Experiment) -> &'static Self {
        SPECS
            .iter()
            .find(|s| s.experiment == e)
            .expect("every experiment has a spec")
    }

    pub fn param(&self, name: &str) -> Option<&ParamDef> {
        self.params.iter().find(|p| p.name == name)
    }
}

fn no_checks(_: &Params) -> Vec<String> {
    Vec::new()
}

const FIN: Rule = Rule::Finite;
const POS: Rule = Rule::Positive;
const NONNEG: Rule = Rule::NonNegative;
const POINTS: Rule = Rule::Count { min: 2, max: 1_000_000 };
const CHAIN_BZ: [ParamDef; 2] = [
    num("bz_base", 20e9, POS, "Zeeman splitting of site 0 (rad/s)"),
    num("bz_step", 0.2e9, POS, "splitting increment per site (rad/s)"),
];

/// Report gate labels.
pub const GATES: &[&str] = &["y-half", "iy", "zx", "iy-half", "yy", "idle-drive", "three-step"];

static DQD_COEFF_PARAMS: [ParamDef; 13] = [
    num("bzL", 20e9, POS, "left Zeeman splitting (rad/s)"),
    num("bzR", 20.2e9, POS, "right Zeeman splitting (rad/s)"),
    num("by0L", 0.0, FIN, "static transverse field, left (rad/s)"),
    num("by0R", 0.0, FIN, "static transverse field, right (rad/s)"),
    num("by1L", 0.0, FIN, "drive 1 amplitude on the left dot (rad/s)"),
    num("by1R", 0.0, FIN, "drive 1 crosstalk on the right dot (rad/s)"),
    num("by2L", 0.0, FIN, "drive 2 crosstalk on the left dot (rad/s)"),
    num("by2R", 2e6, FIN, "drive 2 amplitude on the right dot (rad/s)"),
    num("phi1", 0.0, FIN, "drive 1 phase (rad)"),
    num("phi2", 0.0, FIN, "drive 2 phase (rad)"),
    ParamDef {
        name: "omega1",
        default: Default_::Derived,
        rule: POS,
        doc: "drive 1 frequency (rad/s), default bzL",
    },
    ParamDef {
        name: "omega2",
        default: Default_::Derived,
        rule: POS,
        doc: "drive 2 frequency (rad/s), default bzR",
    },
    num("j", 0.2e6, FIN, "exchange (rad/s)"),
];

static DQD_FID_PARAMS: [ParamDef; 6] = [
    num("bzL", 20e9, POS, "left Zeeman splitting (rad/s)"),
    num("bzR", 20.2e9, POS, "right Zeeman splitting (rad/s)"),
    num("by0L", 0.0, FIN, "static transverse field, left (rad/s); lab oracle only"),
    num("by0R", 0.0, FIN, "static transverse field, right (rad/s); lab oracle only"),
    list("b_list", &[1e7, 1e8], POS, "single-drive amplitudes (rad/s)"),
    num("zx_wait_n", 0.0, Rule::Count { min: 0, max: 1000 }, "odd multiple index of the ZZ wait"),
];

static CHAIN_Y_PARAMS: [ParamDef; 7] = [
    num("b", 1e7, POS, "drive amplitude for the time traces (rad/s)"),
    list("j0_list", &[5e5, 1e6, 2e6], NONNEG, "residual exchanges of the time traces (rad/s)"),
    list("b_list", &[1e6, 1e7, 1e8], POS, "drive amplitudes of the optimum scan (rad/s)"),
    num("t_max", 1.5e-6, POS, "end of the time traces (s)"),
    num("t_points", 601.0, POINTS, "samples per time trace"),
    CHAIN_BZ[0],
    CHAIN_BZ[1],
];

static CHAIN_SIMUL_PARAMS: [ParamDef; 5] = [
    num("b", 1e7, POS, "drive amplitude on every driven site (rad/s)"),
    list("n_list", &[3.0, 5.0, 7.0], Rule::Count { min: 3, max: 10 }, "chain lengths"),
    num("max_n", 7.0, Rule::Count { min: 3, max: 10 }, "longest chain allowed"),
    CHAIN_BZ[0],
    CHAIN_BZ[1],
];

static SWAP_PARAMS: [ParamDef; 7] = [
    num("j", 1e9, POS, "exchange on the swapped pair (rad/s)"),
    num("dbz", 200e6, FIN, "Zeeman gradient across the pair (rad/s)"),
    num("error_j0", 0.0, NONNEG, "residual exchange for the error table (rad/s)"),
    list("j0_list", &[0.0, 2e7, 5e7], NONNEG, "residual exchanges of the time traces (rad/s)"),
    num("bz_base", 20e9, POS, "Zeeman splitting of the pair's first site (rad/s)"),
    num("t_max_rel", 2.0, POS, "end of the time traces in units of pi / j"),
    num("t_points", 401.0, POINTS, "samples per time trace"),
];

static REPORT_PARAMS: [ParamDef; 4] = [
    ParamDef {
        name: "gate",
        default: Default_::Text("y-half"),
        rule: Rule::OneOf(GATES),
        doc: "built-in gate, ignored when a schedule is given",
    },
    num("b", 2e6, POS, "drive amplitude (rad/s)"),
    num("j", 0.2e6, FIN, "exchange where the gate leaves it free (rad/s)"),
    num("j0", 1e6, POS, "residual exchange of the three-step gate (rad/s)"),
];

fn sweep_values_where(p: &Params, field: &str, ok: impl Fn(f64) -> bool, msg: &str) -> Vec<String> {
    match p.config().sweep_or_default() {
        Some(s) if s.field == field && s.values().into_iter().any(|v| !ok(v)) => {
            vec![format!("sweep: {field} {msg}")]
        }
        _ => Vec::new(),
    }
}

fn coeff_checks(p: &Params) -> Vec<String> {
    let mut out = sweep_values_where(p, "t", |t| t >= 0.0, "values must be non-negative");
    if let Some(s) = p.config().sweep_or_default() {
        if s.stop <= s.start {
            out.push("sweep: t must ascend".into());
        }
    }
    out
}

fn fid_checks(p: &Params) -> Vec<String> {
    sweep_values_where(p, "j", |j| j > 0.0, "values must be positive")
}

fn j0_checks(p: &Params) -> Vec<String> {
    sweep_values_where(p, "j0", |j| j >= 0.0, "values must be non-negative")
}

fn simul_checks(p: &Params) -> Vec<String> {
    let mut out = j0_checks(p);
    let max_n = p.num("max_n");
    for n in p.list("n_list") {
        if n > max_n {
            out.push(format!(
                "params.n_list: N = {n} exceeds max_n = {max_n}; raise max_n to accept the runtime"
            ));
        }
    }
    out
}

static SPECS: [ExperimentSpec; 6] = [
    ExperimentSpec {
        experiment: Experiment::DqdCoeffs,
        about: "Pauli coefficients of the two-drive DQD propagator over time",
        params: &DQD_COEFF_PARAMS,
        sweep_fields: &["t"],
        default_sweep: Some(SweepDefault {
            field: "t",
            start: 0.0,
            stop: 4e-6,
            points: 401,
            scale: Scale::Linear,
        }),
        uses_noise: false,
        supports_oracle: true,
        accepts_schedule: false,
        default_seed: 1,
        extra_checks: coeff_checks,
    },
    ExperimentSpec {
        experiment: Experiment::DqdFid,
        about: "single-drive and ZX-composed IY gates against exchange, noiseless and noisy",
        params: &DQD_FID_PARAMS,
        sweep_fields: &["j"],
        default_sweep: Some(SweepDefault {
            field: "j",
            start: 1e5,
            stop: 1e8,
            points: 16,
            scale: Scale::Log,
        }),
        uses_noise: true,
        supports_oracle: true,
        accepts_schedule: false,
        default_seed: 3,
        extra_checks: fid_checks,
    },
    ExperimentSpec {
        experiment: Experiment::ChainY,
        about: "Y gate on the middle of a three-site chain: time traces and optima",
        params: &CHAIN_Y_PARAMS,
        sweep_fields: &["j0"],
        default_sweep: Some(SweepDefault {
            field: "j0",
            start: 1e4,
            stop: 1e7,
            points: 31,
            scale: Scale::Log,
        }),
        uses_noise: false,
        supports_oracle: false,
        accepts_schedule: false,
        default_seed: 4,
        extra_checks: j0_checks,
    },
    ExperimentSpec {
        experiment: Experiment::ChainSimul,
        about: "simultaneous and interleaved Y gates along chains of 3 to 7 sites",
        params: &CHAIN_SIMUL_PARAMS,
        sweep_fields: &["j0"],
        default_sweep: Some(SweepDefault {
            field: "j0",
            start: 0.0,
            stop: 2e6,
            points: 11,
            scale: Scale::Linear,
        }),
        uses_noise: false,
        supports_oracle: false,
        accepts_schedule: false,
        default_seed: 5,
        extra_checks: simul_checks,
    },
    ExperimentSpec {
        experiment: Experiment::Swap,
        about: "SWAP inside a four-site block with residual flanking exchange",
        params: &SWAP_PARAMS,
        sweep_fields: &["j0"],
        default_sweep: Some(SweepDefault {
            field: "j0",
            start: 0.0,
            stop: 1e8,
            points: 21,
            scale: Scale::Linear,
        }),
        uses_noise: false,
        supports_oracle: false,
        accepts_schedule: false,
        default_seed: 6,
        extra_checks: j0_checks,
    },
    ExperimentSpec {
        experiment: Experiment::Report,
        about: "transfer matrix, error generator and error coefficients of one gate",
        params: &REPORT_PARAMS,
        sweep_fields: &[],
        default_sweep: None,
        uses_noise: false,
        supports_oracle: true,
        accepts_schedule: true,
        default_seed: 7,
        extra_checks: no_checks,
    },
];

/// Everything an experiment needs besides its own parameters.
pub struct Context {
    pub cfg: ScenarioConfig,
    pub seed: u64,
    pub svg: bool,
    pub evaluator: EvaluatorChoice,
    /// Files written so far, in order.
    pub written: Vec<PathBuf>,
}

impl Context {
    pub fn new(cfg: ScenarioConfig, seed: u64, svg: bool) -> Self {
        let evaluator = cfg.evaluator.unwrap_or_default();
        Self {
            cfg,
            seed,
            svg,
            evaluator,
            written: Vec::new(),
        }
    }

    pub fn params(&self) -> Params<'_> {
        Params::new(&self.cfg)
    }

    pub fn propagation(&self) -> PropagationConfig {
        match self.cfg.oracle_dt {
            Some(dt) => PropagationConfig::with_dt(dt),
            None => PropagationConfig::default(),
        }
    }

    pub fn evaluator(&self) -> Evaluator {
        match self.evaluator {
            EvaluatorChoice::Analytic => Evaluator::Analytic,
            EvaluatorChoice::Oracle => Evaluator::LabOracle(self.propagation()),
        }
    }

    pub fn noise(&self) -> NoiseSpec {
        NoiseSpec {
            seed: self.seed,
            ..self.cfg.noise.unwrap_or_default()
        }
    }

    pub fn sweep(&self) -> Vec<f64> {
        self.cfg.sweep_or_default().map(|s| s.values()).unwrap_or_default()
    }

    /// Writes `<output><suffix>.csv` and returns the CSV text.
    pub fn write_csv(&mut self, suffix: &str, table: &Table) -> Result<String, CliError> {
        let path = self.cfg.output_path(suffix, "csv");
        let text = table.to_csv();
        write_file(&path, &text)?;
        log::info!("wrote {}", path.display());
        self.written.push(path);
        Ok(text)
    }

    /// Renders a line plot from CSV text when SVG output is on.
    pub fn line_svg(&mut self, suffix: &str, csv: &str, spec: &LinePlot) -> Result<(), CliError> {
        if !self.svg {
            return Ok(());
        }
        let table = Table::from_csv(csv).map_err(CliError::Render)?;
        let svg = line_plot(&table, spec).map_err(CliError::Render)?;
        self.write_svg(suffix, &svg)
    }

    /// Renders a bar chart from CSV text when SVG output is on.
    pub fn bar_svg(&mut self, suffix: &str, csv: &str, label: &str, value: &str, title: &str) -> Result<(), CliError> {
        if !self.svg {
            return Ok(());
        }
        let table = Table::from_csv(csv).map_err(CliError::Render)?;
        let svg = bar_plot(&table, label, value, title, true, 24).map_err(CliError::Render)?;
        self.write_svg(suffix, &svg)
    }

    fn write_svg(&mut self, suffix: &str, svg: &str) -> Result<(), CliError> {
        let path = self.cfg.output_path(suffix, "svg");
        write_file(&path, svg)?;
        log::info!("wrote {}", path.display());
        self.written.push(path);
        Ok(())
    }
}

/// Column-name fragment for a number, such as `1e7` or `2.5e-3`.
pub(crate) fn tag(v: f64) -> String {
    format!("{v:e}")
}

/// Runs the scenario's experiment.
pub fn run(ctx: &mut Context) -> Result<(), CliError> {
    match ctx.cfg.experiment {
        Experiment::DqdCoeffs => run_dqd_coeffs(ctx),
        Experiment::DqdFid => run_dqd_fidelity_scan(ctx),
        Experiment::ChainY => run_chain_ygate(ctx),
        Experiment::ChainSimul => run_chain_simul_y(ctx),
        Experiment::Swap => run_swap(ctx),
        Experiment::Report => run_report(ctx),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules() {
        assert!(Rule::Positive.violation(0.0).is_some());
        assert!(Rule::NonNegative.violation(0.0).is_none());
        assert!(Rule::Finite.violation(f64::NAN).is_some());
        let c = Rule::Count { min: 3, max: 10 };
        assert!(c.violation(3.0).is_none());
        assert!(c.violation(3.5).is_some() && c.violation(11.0).is_some());
    }

    #[test]
    fn specs_are_consistent() {
        for e in Experiment::ALL {
            let s = ExperimentSpec::of(e);
            assert_eq!(s.experiment, e);
            let mut names: Vec<_> = s.params.iter().map(|p| p.name).collect();
            names.sort_unstable();
            names.dedup();
            assert_eq!(names.len(), s.params.len(), "{e}: duplicate parameter");
            if let Some(d) = s.default_sweep {
                assert!(s.sweep_fields.contains(&d.field));
                assert!(s.param(d.field).is_none(), "{e}: swept field is also a parameter");
            }
            for p in s.params {
                if let Default_::Num(v) = p.default {
                    assert!(p.rule.violation(v).is_none(), "{e}.{}", p.name);
                }
            }
        }
    }

    #[test]
    fn tags() {
        assert_eq!(tag(1e7), "1e7");
        assert_eq!(tag(2.5e-3), "2.5e-3");
    }
}
