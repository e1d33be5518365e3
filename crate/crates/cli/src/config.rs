//! Scenario files.
//!
//! A scenario is TOML (or JSON with the same schema):
//!
//! ```toml
//! experiment = "chain-y"
//! output = "out/chain-y"
//! evaluator = "analytic"
//!
//! [params]
//! b = 1e7
//! j0_list = [5e5, 1e6, 2e6]
//!
//! [sweep]
//! field = "j0"
//! start = 1e4
//! stop = 1e7
//! points = 31
//! scale = "log"
//!
//! [noise]
//! sigma_rel = 0.01
//! samples = 10000
//! seed = 3
//! ```
//!
//! Which `params`, sweep fields and sections an experiment accepts is listed
//! in [`crate::experiments::ExperimentSpec`]. Validation reports every problem
//! at once rather than stopping at the first.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use resex_core::noise::NoiseSpec;
use resex_core::scheduling::Schedule;
use serde::{Deserialize, Serialize};

use crate::experiments::{Default_, ExperimentSpec, Rule};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    DqdCoeffs,
    DqdFid,
    ChainY,
    ChainSimul,
    Swap,
    Report,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Self::DqdCoeffs,
        Self::DqdFid,
        Self::ChainY,
        Self::ChainSimul,
        Self::Swap,
        Self::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::DqdCoeffs => "dqd-coeffs",
            Self::DqdFid => "dqd-fid",
            Self::ChainY => "chain-y",
            Self::ChainSimul => "chain-simul",
            Self::Swap => "swap",
            Self::Report => "report",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EvaluatorChoice {
    #[default]
    Analytic,
    Oracle,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub field: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl Sweep {
    /// The sweep values, endpoints included exactly.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i + 1 == n {
                    return self.stop;
                }
                let s = i as f64 / (n - 1) as f64;
                match self.scale {
                    Scale::Linear => self.start + (self.stop - self.start) * s,
                    Scale::Log => self.start * (self.stop / self.start).powf(s),
                }
            })
            .collect()
    }

    fn problems(&self, spec: &ExperimentSpec, out: &mut Vec<String>) {
        if spec.sweep_fields.is_empty() {
            out.push(format!("sweep: {} takes no sweep", spec.experiment));
        } else if !spec.sweep_fields.contains(&self.field.as_str()) {
            out.push(format!(
                "sweep.field: {:?} is not sweepable for {} (expected one of {})",
                self.field,
                spec.experiment,
                spec.sweep_fields.join(", ")
            ));
        }
        if self.points < 2 {
            out.push(format!("sweep.points: {} is below the minimum of 2", self.points));
        }
        for (name, v) in [("start", self.start), ("stop", self.stop)] {
            if !v.is_finite() {
                out.push(format!("sweep.{name}: {v} is not finite"));
            } else if self.scale == Scale::Log && v <= 0.0 {
                out.push(format!("sweep.{name}: {v} must be positive on a log scale"));
            }
        }
    }
}

/// A parameter value: a number, a list of numbers or a label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    List(Vec<f64>),
    Text(String),
}

impl ParamValue {
    fn kind(&self) -> &'static str {
        match self {
            Self::Number(_) => "a number",
            Self::List(_) => "a list of numbers",
            Self::Text(_) => "a string",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub experiment: Experiment,
    /// Prefix of every output file; the directory part is created if needed.
    pub output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluator: Option<EvaluatorChoice>,
    /// Step bound of the lab-frame integrator in seconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_dt: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, ParamValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    /// An explicit pulse sequence, for experiments that score one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Schedule>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Toml,
    Json,
}

impl Format {
    /// JSON for a `.json` extension, TOML otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Self::Json,
            _ => Self::Toml,
        }
    }
}

impl ScenarioConfig {
    /// The built-in scenario of `experiment`.
    pub fn default_for(experiment: Experiment) -> Self {
        Self {
            experiment,
            output: format!("out/{experiment}"),
            evaluator: None,
            oracle_dt: None,
            params: BTreeMap::new(),
            sweep: None,
            noise: None,
            schedule: None,
        }
    }

    pub fn parse(text: &str, format: Format) -> Result<Self, CliError> {
        let parsed = match format {
            Format::Toml => toml::from_str(text).map_err(|e| e.to_string()),
            Format::Json => serde_json::from_str(text).map_err(|e| e.to_string()),
        };
        parsed.map_err(|e| CliError::Config(vec![e.trim_end().to_string()]))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(vec![format!("{}: {e}", path.display())]))?;
        Self::parse(&text, Format::from_path(path))
    }

    pub fn to_text(&self, format: Format) -> Result<String, CliError> {
        let out = match format {
            Format::Toml => toml::to_string(self).map_err(|e| e.to_string()),
            Format::Json => serde_json::to_string_pretty(self).map_err(|e| e.to_string()),
        };
        out.map_err(|e| CliError::Config(vec![e]))
    }

    /// Every problem with the scenario, empty when it is usable. Does not
    /// touch the file system.
    pub fn problems(&self) -> Vec<String> {
        let spec = ExperimentSpec::of(self.experiment);
        let mut out = Vec::new();
        for (name, value) in &self.params {
            match spec.param(name) {
                None => out.push(format!(
                    "params.{name}: unknown parameter for {} (expected one of {})",
                    self.experiment,
                    spec.params.iter().map(|p| p.name).collect::<Vec<_>>().join(", ")
                )),
                Some(def) => def.check(value, &mut out),
            }
            if self.sweep.as_ref().is_some_and(|s| &s.field == name) {
                out.push(format!("params.{name}: also given as the sweep field"));
            }
        }
        if let Some(s) = &self.sweep {
            s.problems(spec, &mut out);
        }
        if let Some(n) = &self.noise {
            if !spec.uses_noise {
                out.push(format!("noise: {} does not run Monte Carlo", self.experiment));
            }
            if let Err(e) = n.validate() {
                out.push(format!("noise: {e}"));
            }
        }
        if self.evaluator == Some(EvaluatorChoice::Oracle) && !spec.supports_oracle {
            out.push(format!(
                "evaluator: the lab-frame oracle is not available for {}",
                self.experiment
            ));
        }
        if let Some(dt) = self.oracle_dt {
            if !(dt > 0.0 && dt.is_finite()) {
                out.push(format!("oracle_dt: {dt} must be positive and finite"));
            }
        }
        if self.schedule.is_some() && !spec.accepts_schedule {
            out.push(format!("schedule: {} does not take a schedule", self.experiment));
        }
        if self.output.trim().is_empty() {
            out.push("output: empty path prefix".into());
        }
        out.extend((spec.extra_checks)(&Params::new(self)));
        out
    }

    /// Validates the scenario and checks that the output directory is writable.
    pub fn validate(&self) -> Result<(), CliError> {
        let mut out = self.problems();
        if !self.output.trim().is_empty() {
            if let Err(e) = check_writable(&self.output_dir()) {
                out.push(format!("output: {e}"));
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(out))
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        match Path::new(&self.output).parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        }
    }

    /// `<output><suffix>.<ext>`.
    pub fn output_path(&self, suffix: &str, ext: &str) -> PathBuf {
        PathBuf::from(format!("{}{suffix}.{ext}", self.output))
    }

    /// The configured sweep, or the experiment's default.
    pub fn sweep_or_default(&self) -> Option<Sweep> {
        self.sweep
            .clone()
            .or_else(|| ExperimentSpec::of(self.experiment).default_sweep.map(|d| d.to_sweep()))
    }
}

fn check_writable(dir: &Path) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let probe = dir.join(format!(".resex-probe-{}", std::process::id()));
    fs::write(&probe, b"").map_err(|e| format!("{} is not writable: {e}", dir.display()))?;
    let _ = fs::remove_file(&probe);
    Ok(())
}

/// Parameter lookup with the experiment's defaults filled in.
pub struct Params<'a> {
    cfg: &'a ScenarioConfig,
    spec: &'static ExperimentSpec,
}

impl<'a> Params<'a> {
    pub fn new(cfg: &'a ScenarioConfig) -> Self {
        Self {
            cfg,
            spec: ExperimentSpec::of(cfg.experiment),
        }
    }

    fn given(&self, name: &str) -> Option<&ParamValue> {
        debug_assert!(self.spec.param(name).is_some(), "undeclared parameter {name}");
        self.cfg.params.get(name)
    }

    /// A number, or `None` when it is neither given nor defaulted.
    pub fn opt_num(&self, name: &str) -> Option<f64> {
        match self.given(name) {
            Some(ParamValue::Number(v)) => Some(*v),
            _ => match self.spec.param(name).map(|d| &d.default) {
                Some(Default_::Num(v)) => Some(*v),
                _ => None,
            },
        }
    }

    pub fn num(&self, name: &str) -> f64 {
        self.opt_num(name)
            .unwrap_or_else(|| panic!("parameter {name} has no default"))
    }

    pub fn list(&self, name: &str) -> Vec<f64> {
        match self.given(name) {
            Some(ParamValue::List(v)) => v.clone(),
            Some(ParamValue::Number(v)) => vec![*v],
            _ => match self.spec.param(name).map(|d| &d.default) {
                Some(Default_::List(v)) => v.to_vec(),
                _ => Vec::new(),
            },
        }
    }

    pub fn text(&self, name: &str) -> String {
        match self.given(name) {
            Some(ParamValue::Text(v)) => v.clone(),
            _ => match self.spec.param(name).map(|d| &d.default) {
                Some(Default_::Text(v)) => v.to_string(),
                _ => String::new(),
            },
        }
    }

    pub fn config(&self) -> &ScenarioConfig {
        self.cfg
    }

    pub fn is_given(&self, name: &str) -> bool {
        self.cfg.params.contains_key(name)
    }
}

impl crate::experiments::ParamDef {
    fn check(&self, value: &ParamValue, out: &mut Vec<String>) {
        let name = self.name;
        let expected = match self.default {
            Default_::List(_) => "a list of numbers",
            Default_::Text(_) => "a string",
            Default_::Num(_) | Default_::Derived => "a number",
        };
        let numbers: Vec<f64> = match (value, &self.default) {
            (ParamValue::List(v), Default_::List(_)) => {
                if v.is_empty() {
                    out.push(format!("params.{name}: empty list"));
                }
                v.clone()
            }
            // A single number is accepted where a list is expected.
            (ParamValue::Number(v), Default_::List(_)) => vec![*v],
            (ParamValue::Number(v), Default_::Num(_) | Default_::Derived) => vec![*v],
            (ParamValue::Text(s), Default_::Text(_)) => {
                if let Rule::OneOf(options) = self.rule {
                    if !options.contains(&s.as_str()) {
                        out.push(format!(
                            "params.{name}: {s:?} is not one of {}",
                            options.join(", ")
                        ));
                    }
                }
                return;
            }
            _ => {
                out.push(format!(
                    "params.{name}: expected {expected}, found {}",
                    value.kind()
                ));
                return;
            }
        };
        for v in numbers {
            if let Some(msg) = self.rule.violation(v) {
                out.push(format!("params.{name}: {v} {msg}"));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_values() {
        let s = Sweep {
            field: "j".into(),
            start: 1e3,
            stop: 1e6,
            points: 4,
            scale: Scale::Log,
        };
        let v = s.values();
        assert_eq!(v[0], 1e3);
        assert_eq!(v[3], 1e6);
        assert!((v[1] - 1e4).abs() < 1e-9 && (v[2] - 1e5).abs() < 1e-8);
        let l = Sweep {
            scale: Scale::Linear,
            start: 0.0,
            stop: 1.0,
            points: 5,
            ..s
        };
        assert_eq!(l.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn parses_toml_and_json_alike() {
        let toml_text = r#"
experiment = "chain-y"
output = "x/y"
[params]
b = 1e7
j0_list = [1e6, 2e6]
[sweep]
field = "j0"
start = 1e4
stop = 1e6
points = 3
scale = "log"
"#;
        let a = ScenarioConfig::parse(toml_text, Format::Toml).unwrap();
        let json = a.to_text(Format::Json).unwrap();
        let b = ScenarioConfig::parse(&json, Format::Json).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.params["j0_list"], ParamValue::List(vec![1e6, 2e6]));
        assert!(a.problems().is_empty(), "{:?}", a.problems());
    }

    #[test]
    fn integers_read_as_numbers() {
        let c = ScenarioConfig::parse(
            "experiment = \"chain-simul\"\noutput = \"o\"\n[params]\nn_list = [3, 5]\nb = 10000000\n",
            Format::Toml,
        )
        .unwrap();
        assert_eq!(c.params["b"], ParamValue::Number(1e7));
        assert_eq!(Params::new(&c).list("n_list"), vec![3.0, 5.0]);
    }

    #[test]
    fn unknown_top_level_keys_fail_to_parse() {
        let r = ScenarioConfig::parse("experiment = \"swap\"\noutput = \"o\"\ncolour = 3\n", Format::Toml);
        assert!(matches!(r, Err(CliError::Config(_))));
    }

    #[test]
    fn problems_are_listed_together() {
        let mut c = ScenarioConfig::default_for(Experiment::ChainY);
        c.params.insert("bogus".into(), ParamValue::Number(1.0));
        c.params.insert("b".into(), ParamValue::Number(-1.0));
        c.params.insert("j0_list".into(), ParamValue::Text("x".into()));
        c.sweep = Some(Sweep {
            field: "t".into(),
            start: 0.0,
            stop: 1.0,
            points: 1,
            scale: Scale::Log,
        });
        c.noise = Some(NoiseSpec::default());
        c.evaluator = Some(EvaluatorChoice::Oracle);
        let p = c.problems();
        for needle in [
            "params.bogus",
            "params.b",
            "params.j0_list",
            "sweep.field",
            "sweep.points",
            "sweep.start",
            "noise",
            "evaluator",
        ] {
            assert!(p.iter().any(|m| m.starts_with(needle)), "{needle} missing from {p:#?}");
        }
    }

    #[test]
    fn defaults_resolve() {
        let c = ScenarioConfig::default_for(Experiment::ChainY);
        let p = Params::new(&c);
        assert_eq!(p.num("b"), 1e7);
        assert!(!p.list("b_list").is_empty());
        assert!(c.problems().is_empty());
        assert!(c.sweep_or_default().is_some());
    }

    #[test]
    fn every_builtin_scenario_is_valid() {
        for e in Experiment::ALL {
            let c = ScenarioConfig::default_for(e);
            assert!(c.problems().is_empty(), "{e}: {:?}", c.problems());
            if let Some(s) = c.sweep_or_default() {
                let mut out = Vec::new();
                s.problems(ExperimentSpec::of(e), &mut out);
                assert!(out.is_empty(), "{e}: {out:?}");
            }
        }
    }

    #[test]
    fn experiment_names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!("fig9".parse::<Experiment>().is_err());
    }
}
