//! Experiment configuration: one JSON document, optionally overridden by flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixedpoint::{default_grid, Grid, SolverOptions, MAX_ORDER};
use crate::martingale::{alpha_of, classify, Region};
use crate::ratios::MAX_RATIO_DEPTH;
use crate::stats::SuiteTolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Solve,
    Verify,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Solve => "solve",
            Command::Verify => "verify",
            Command::Report => "report",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Yule,
    Bst,
    Bisection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    Smoothing,
    Pantograph,
}

/// Verification suites; each backs one acceptance criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    Critical,
    Onestep,
    Degenerate,
    YuleLimit,
    QuarterLaws,
    Fixedpoint,
    Pantograph,
    Mellin,
    Theorems,
    Determinism,
    All,
}

impl SuiteName {
    pub const EACH: [SuiteName; 10] = [
        SuiteName::Critical,
        SuiteName::Onestep,
        SuiteName::Degenerate,
        SuiteName::YuleLimit,
        SuiteName::QuarterLaws,
        SuiteName::Fixedpoint,
        SuiteName::Pantograph,
        SuiteName::Mellin,
        SuiteName::Theorems,
        SuiteName::Determinism,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteName::Critical => "critical",
            SuiteName::Onestep => "onestep",
            SuiteName::Degenerate => "degenerate",
            SuiteName::YuleLimit => "yule_limit",
            SuiteName::QuarterLaws => "quarter_laws",
            SuiteName::Fixedpoint => "fixedpoint",
            SuiteName::Pantograph => "pantograph",
            SuiteName::Mellin => "mellin",
            SuiteName::Theorems => "theorems",
            SuiteName::Determinism => "determinism",
            SuiteName::All => "all",
        }
    }

    /// Acceptance criterion number; `None` for `all`.
    pub fn criterion(self) -> Option<u8> {
        SuiteName::EACH.iter().position(|&s| s == self).map(|i| i as u8 + 1)
    }

    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| {
            let names: Vec<&str> = SuiteName::EACH.iter().map(|s| s.name()).chain(["all"]).collect();
            Error::config("suite", format!("unknown suite {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

/// Grid request; `spacing` is `log` or `linear`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub spacing: Spacing,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Log,
    Linear,
}

impl GridSpec {
    pub fn to_grid(self) -> Result<Grid> {
        match self.spacing {
            Spacing::Log => Grid::log(self.lo, self.hi, self.n),
            Spacing::Linear => Grid::linear(self.lo, self.hi, self.n),
        }
        .map_err(|e| Error::config("grid", e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_sweeps: Option<usize>,
}

impl SolverOverrides {
    pub fn apply(&self, mut o: SolverOptions) -> SolverOptions {
        if let Some(t) = self.tolerance {
            o.tolerance = t;
        }
        if let Some(m) = self.max_sweeps {
            o.max_sweeps = m;
        }
        o
    }
}

/// Parsed stop rule of `simulate`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StopRule {
    Time(f64),
    Leaves(u64),
    Generation(u8),
    Size(u64),
}

impl StopRule {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::config("stop", format!("{s:?}: {m}"));
        let (key, val) = s
            .split_once('=')
            .ok_or_else(|| bad("expected time=T, leaves=n, generation=g or size=n"))?;
        match key.trim() {
            "time" => {
                let t: f64 = val.trim().parse().map_err(|_| bad("time is not a number"))?;
                if !(t > 0.0 && t.is_finite()) {
                    return Err(bad("time must be positive and finite"));
                }
                Ok(StopRule::Time(t))
            }
            "leaves" | "size" => {
                let n: u64 = val.trim().parse().map_err(|_| bad("count is not a positive integer"))?;
                if n == 0 {
                    return Err(bad("count must be at least 1"));
                }
                Ok(if key.trim() == "size" { StopRule::Size(n) } else { StopRule::Leaves(n) })
            }
            "generation" => {
                let g: u8 = val.trim().parse().map_err(|_| bad("generation is not an integer in 0..=255"))?;
                Ok(StopRule::Generation(g))
            }
            other => Err(bad(&format!("unknown stop kind {other:?}"))),
        }
    }
}

/// Deepest Yule generation `simulate` will realize.
pub const MAX_SIM_GENERATION: u8 = 24;
/// Largest tree size or leaf count `simulate` accepts.
pub const MAX_SIM_SIZE: u64 = 10_000_000;
/// Longest Yule time `simulate` accepts (`E N_t = e^t`).
pub const MAX_SIM_TIME: f64 = 16.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Model>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equation: Option<Equation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xmax: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverOverrides>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<SuiteName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<SuiteTolerances>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        ExperimentConfig {
            command,
            seed: 0,
            z: None,
            alpha: None,
            model: None,
            stop: None,
            paths: None,
            steps: None,
            equation: None,
            grid: None,
            xmax: None,
            order: None,
            solver: None,
            suite: None,
            tolerances: None,
            input: None,
            out: None,
            threads: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The configuration that determines the outputs: `out` and `threads` removed.
    pub fn canonical(&self) -> ExperimentConfig {
        ExperimentConfig {
            out: None,
            threads: None,
            ..self.clone()
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("runs"))
    }

    pub fn stop_rule(&self) -> Result<StopRule> {
        let model = self.model.unwrap_or(Model::Yule);
        match &self.stop {
            Some(s) => StopRule::parse(s),
            None => Ok(match model {
                Model::Yule => StopRule::Time(1.0),
                Model::Bst => StopRule::Size(100),
                Model::Bisection => StopRule::Generation(8),
            }),
        }
    }

    pub fn grid_or(&self, default: Grid) -> Result<Grid> {
        self.grid.map(GridSpec::to_grid).unwrap_or(Ok(default))
    }

    /// `α` of a pantograph run, given directly or through `z`.
    pub fn pantograph_alpha(&self) -> Result<f64> {
        match (self.alpha, self.z) {
            (Some(a), None) => Ok(a),
            (None, Some(z)) => alpha_of(z)
                .filter(|&a| a > 1.0)
                .ok_or_else(|| Error::config("z", format!("z = {z} has no pantograph parameter alpha > 1"))),
            (Some(_), Some(_)) => Err(Error::config("alpha", "give either alpha or z, not both")),
            (None, None) => Err(Error::config("alpha", "the pantograph equation needs alpha or z")),
        }
    }

    /// Checks every field before any work starts.
    pub fn validate(&self) -> Result<()> {
        if let Some(z) = self.z {
            if !(z > 0.0 && z.is_finite()) {
                return Err(Error::config("z", format!("must be positive and finite, got {z}")));
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 1.0 && a.is_finite()) {
                return Err(Error::config("alpha", format!("must exceed 1, got {a}")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::config("threads", "must be at least 1"));
        }
        if self.paths == Some(0) {
            return Err(Error::config("paths", "must be at least 1"));
        }
        if self.steps == Some(0) {
            return Err(Error::config("steps", "must be at least 1"));
        }
        if let Some(x) = self.xmax {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::config("xmax", format!("must be positive and finite, got {x}")));
            }
        }
        if let Some(g) = self.grid {
            g.to_grid()?;
        }
        if let Some(s) = self.solver {
            if s.tolerance.is_some_and(|t| !(t > 0.0)) {
                return Err(Error::config("solver.tolerance", "must be positive"));
            }
            if s.max_sweeps == Some(0) {
                return Err(Error::config("solver.max_sweeps", "must be at least 1"));
            }
        }
        if let Some(t) = &self.tolerances {
            let checks = [
                ("final_diff", t.final_diff),
                ("contraction", t.contraction),
                ("zero_mean_se", t.zero_mean_se),
                ("lmc1", t.lmc1),
                ("t31_se", t.t31_se),
            ];
            for (k, v) in checks {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::config(format!("tolerances.{k}"), "must be positive and finite"));
                }
            }
            if !(t.p_value > 0.0 && t.p_value < 1.0) {
                return Err(Error::config("tolerances.p_value", "must be in (0, 1)"));
            }
        }
        match self.command {
            Command::Simulate => self.validate_simulate(),
            Command::Solve => self.validate_solve(),
            Command::Verify => self.validate_verify(),
            Command::Report => self.validate_report(),
        }
    }

    fn reject_unused(&self, allowed: &[&str]) -> Result<()> {
        let present = [
            ("z", self.z.is_some()),
            ("alpha", self.alpha.is_some()),
            ("model", self.model.is_some()),
            ("stop", self.stop.is_some()),
            ("paths", self.paths.is_some()),
            ("steps", self.steps.is_some()),
            ("equation", self.equation.is_some()),
            ("grid", self.grid.is_some()),
            ("xmax", self.xmax.is_some()),
            ("order", self.order.is_some()),
            ("solver", self.solver.is_some()),
            ("suite", self.suite.is_some()),
            ("tolerances", self.tolerances.is_some()),
            ("input", self.input.is_some()),
        ];
        for (field, set) in present {
            if set && !allowed.contains(&field) {
                return Err(Error::config(field, format!("not used by the {} command", self.command.name())));
            }
        }
        Ok(())
    }

    fn validate_simulate(&self) -> Result<()> {
        self.reject_unused(&["z", "model", "stop", "paths", "steps"])?;
        let model = self.model.unwrap_or(Model::Yule);
        let stop = self.stop_rule()?;
        match (model, stop) {
            (Model::Yule, StopRule::Time(t)) if t > MAX_SIM_TIME => {
                Err(Error::config("stop", format!("time must be at most {MAX_SIM_TIME}")))
            }
            (Model::Yule, StopRule::Generation(0)) => Err(Error::config("stop", "generation must be at least 1")),
            (Model::Yule, StopRule::Generation(g)) if g > MAX_SIM_GENERATION => {
                Err(Error::config("stop", format!("generation must be at most {MAX_SIM_GENERATION}")))
            }
            (Model::Bisection, StopRule::Generation(g)) if g > MAX_RATIO_DEPTH.min(MAX_SIM_GENERATION) => Err(
                Error::config("stop", format!("generation must be at most {}", MAX_RATIO_DEPTH.min(MAX_SIM_GENERATION))),
            ),
            (Model::Yule, StopRule::Leaves(n)) | (Model::Bst, StopRule::Size(n)) if n > MAX_SIM_SIZE => {
                Err(Error::config("stop", format!("count must be at most {MAX_SIM_SIZE}")))
            }
            (Model::Yule, StopRule::Time(_) | StopRule::Leaves(_) | StopRule::Generation(_))
            | (Model::Bst, StopRule::Size(_))
            | (Model::Bisection, StopRule::Generation(_)) => Ok(()),
            (m, _) => Err(Error::config(
                "stop",
                format!(
                    "model {} accepts {}",
                    serde_json::to_value(m).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                    match m {
                        Model::Yule => "time=T, leaves=n or generation=g",
                        Model::Bst => "size=n",
                        Model::Bisection => "generation=g",
                    }
                ),
            )),
        }
    }

    fn validate_solve(&self) -> Result<()> {
        self.reject_unused(&["z", "alpha", "equation", "grid", "xmax", "order", "solver"])?;
        match self.equation.unwrap_or(Equation::Smoothing) {
            Equation::Smoothing => {
                if self.alpha.is_some() {
                    return Err(Error::config("alpha", "the smoothing equation is parametrized by z"));
                }
                if self.order.is_some() {
                    return Err(Error::config("order", "only the pantograph equation uses a series order"));
                }
                let z = self.z.ok_or_else(|| Error::config("z", "the smoothing equation needs z"))?;
                let p = classify(z).map_err(|e| Error::config("z", e.to_string()))?;
                if p.region == Region::Subcritical {
                    return Err(Error::config("z", format!("z = {z} lies outside [z_c^-, z_c^+]")));
                }
                let grid = self.grid_or(default_grid())?;
                if !matches!(grid, Grid::Log { .. }) {
                    return Err(Error::config("grid", "the smoothing solver needs log spacing"));
                }
                if let Some(x) = self.xmax {
                    if x < grid.lo() {
                        return Err(Error::config("xmax", format!("must be at least the grid start {}", grid.lo())));
                    }
                }
                Ok(())
            }
            Equation::Pantograph => {
                if self.solver.is_some() {
                    return Err(Error::config("solver", "only the smoothing equation is iterated"));
                }
                self.pantograph_alpha()?;
                if let Some(o) = self.order {
                    if o == 0 || o > MAX_ORDER {
                        return Err(Error::config("order", format!("must be in 1..={MAX_ORDER}")));
                    }
                }
                if self.xmax.is_some_and(|x| x > 1e4) {
                    return Err(Error::config("xmax", "must be at most 1e4 for the pantograph equation"));
                }
                let xmax = self.xmax.unwrap_or(20.0);
                if let Some(g) = self.grid {
                    if g.hi > xmax {
                        return Err(Error::config("grid", "grid must end at or before xmax"));
                    }
                }
                Ok(())
            }
        }
    }

    fn validate_verify(&self) -> Result<()> {
        self.reject_unused(&["z", "suite", "paths", "tolerances"])?;
        let suite = self.suite.ok_or_else(|| Error::config("suite", "verify needs a suite"))?;
        if self.z.is_some() && suite != SuiteName::Onestep {
            return Err(Error::config("z", "only the onestep suite takes a z"));
        }
        if self.paths.is_some()
            && !matches!(
                suite,
                SuiteName::Onestep | SuiteName::Degenerate | SuiteName::YuleLimit | SuiteName::QuarterLaws
            )
        {
            return Err(Error::config("paths", "only onestep, degenerate, yule_limit and quarter_laws take a path count"));
        }
        if self.paths.is_some_and(|p| p < 10) && matches!(suite, SuiteName::YuleLimit | SuiteName::QuarterLaws) {
            return Err(Error::config("paths", "goodness-of-fit suites need at least 10 paths"));
        }
        if self.tolerances.is_some() && !matches!(suite, SuiteName::Theorems | SuiteName::All) {
            return Err(Error::config("tolerances", "only the theorems suite takes tolerance overrides"));
        }
        Ok(())
    }

    fn validate_report(&self) -> Result<()> {
        self.reject_unused(&["input"])?;
        let input = self.input.as_ref().ok_or_else(|| Error::config("input", "report needs an input run directory"))?;
        if !input.join("manifest.json").is_file() {
            return Err(Error::config("input", format!("{} has no manifest.json", input.display())));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let e = ExperimentConfig::from_json(r#"{"command":"verify","suite":"onestep","colour":1}"#).unwrap_err();
        assert!(e.to_string().contains("colour"), "{e}");
    }

    #[test]
    fn stop_rules() {
        assert_eq!(StopRule::parse("time=1").unwrap(), StopRule::Time(1.0));
        assert_eq!(StopRule::parse("leaves=5").unwrap(), StopRule::Leaves(5));
        assert_eq!(StopRule::parse("generation=3").unwrap(), StopRule::Generation(3));
        assert_eq!(StopRule::parse("size=9").unwrap(), StopRule::Size(9));
        for bad in ["time=-1", "time", "leaves=0", "depth=3", "size=x"] {
            assert!(matches!(StopRule::parse(bad), Err(Error::Config { .. })), "{bad}");
        }
    }

    #[test]
    fn field_level_messages() {
        let mut c = ExperimentConfig::new(Command::Solve);
        c.z = Some(5.0);
        match c.validate().unwrap_err() {
            Error::Config { field, .. } => assert_eq!(field, "z"),
            e => panic!("{e}"),
        }
        let mut c = ExperimentConfig::new(Command::Simulate);
        c.model = Some(Model::Bst);
        c.stop = Some("time=1".into());
        assert!(matches!(c.validate(), Err(Error::Config { field, .. }) if field == "stop"));
        let mut c = ExperimentConfig::new(Command::Verify);
        c.suite = Some(SuiteName::Mellin);
        c.z = Some(1.0);
        assert!(matches!(c.validate(), Err(Error::Config { field, .. }) if field == "z"));
        let mut c = ExperimentConfig::new(Command::Simulate);
        c.suite = Some(SuiteName::Mellin);
        assert!(matches!(c.validate(), Err(Error::Config { field, .. }) if field == "suite"));
    }

    #[test]
    fn canonical_drops_placement() {
        let mut c = ExperimentConfig::new(Command::Verify);
        c.suite = Some(SuiteName::Critical);
        let mut d = c.clone();
        d.out = Some("/tmp/x".into());
        d.threads = Some(3);
        assert_eq!(c.canonical(), d.canonical());
        assert!(c.validate().is_ok());
    }

    #[test]
    fn suite_numbers() {
        assert_eq!(SuiteName::Critical.criterion(), Some(1));
        assert_eq!(SuiteName::Determinism.criterion(), Some(10));
        assert_eq!(SuiteName::All.criterion(), None);
        assert_eq!(SuiteName::parse("yule_limit").unwrap(), SuiteName::YuleLimit);
        assert!(SuiteName::parse("nope").is_err());
    }
}
