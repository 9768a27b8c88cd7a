//! Experiment configuration: a JSON document, optionally layered on a preset,
//! with dotted `key=value` overrides applied before validation.

use std::path::PathBuf;

use nonexp_core::bounds::{CheckId, Settings};
use nonexp_core::continuous::Parametrization;
use nonexp_core::discrete::StepSequence;
use nonexp_core::{Matrix, Norm, Operator, StochasticGame, Vector};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{LabError, Result};
use crate::game_io::load_game;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    ValueIter,
    Discounted,
    Euler,
    Ode,
    PhiOde,
    Verify,
    Suite,
}

impl Task {
    pub const ALL: [Task; 7] = [
        Task::ValueIter,
        Task::Discounted,
        Task::Euler,
        Task::Ode,
        Task::PhiOde,
        Task::Verify,
        Task::Suite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::ValueIter => "value_iter",
            Task::Discounted => "discounted",
            Task::Euler => "euler",
            Task::Ode => "ode",
            Task::PhiOde => "phi_ode",
            Task::Verify => "verify",
            Task::Suite => "suite",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormSpec {
    #[default]
    Sup,
    Euclidean,
}

impl From<NormSpec> for Norm {
    fn from(n: NormSpec) -> Norm {
        match n {
            NormSpec::Sup => Norm::Sup,
            NormSpec::Euclidean => Norm::Euclidean,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "name", deny_unknown_fields)]
pub enum Builtin {
    Translation {
        offset: Vec<f64>,
        #[serde(default = "euclidean")]
        norm: NormSpec,
    },
    /// Planar rotation, Euclidean norm.
    Rotation {
        degrees: f64,
    },
    Identity {
        dim: usize,
        #[serde(default)]
        norm: NormSpec,
    },
    LinearIsometry {
        matrix: Vec<Vec<f64>>,
        #[serde(default = "euclidean")]
        norm: NormSpec,
    },
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
        #[serde(default = "euclidean")]
        norm: NormSpec,
    },
    MatchingPennies,
}

fn euclidean() -> NormSpec {
    NormSpec::Euclidean
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomGameSpec {
    pub states: usize,
    pub rows: usize,
    pub cols: usize,
    pub payoff_range: [f64; 2],
    pub seed: u64,
}

impl RandomGameSpec {
    pub fn build(&self) -> Result<StochasticGame> {
        let [lo, hi] = self.payoff_range;
        Ok(StochasticGame::random(
            self.states,
            self.rows,
            self.cols,
            (lo, hi),
            self.seed,
        )?)
    }
}

/// Exactly one operator source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    Builtin(Builtin),
    GameFile(PathBuf),
    RandomGame(RandomGameSpec),
}

pub fn matching_pennies() -> StochasticGame {
    StochasticGame::new(
        vec!["s0".into()],
        vec![vec![vec![1.0, -1.0], vec![-1.0, 1.0]]],
        vec![vec![vec![vec![1.0], vec![1.0]], vec![vec![1.0], vec![1.0]]]],
    )
    .expect("matching pennies is a valid game")
}

impl OperatorSpec {
    pub fn build(&self) -> Result<Operator> {
        let matrix = |rows: &Vec<Vec<f64>>| Matrix::from_rows(rows).map_err(LabError::from);
        Ok(match self {
            OperatorSpec::Builtin(b) => match b {
                Builtin::Translation { offset, norm } => {
                    Operator::translation(Vector::new(offset.clone())?, (*norm).into())
                }
                Builtin::Rotation { degrees } => Operator::rotation(degrees.to_radians()),
                Builtin::Identity { dim, norm } => Operator::identity(*dim, (*norm).into()),
                Builtin::LinearIsometry { matrix: m, norm } => Operator::linear_isometry(matrix(m)?, (*norm).into())?,
                Builtin::Affine {
                    matrix: m,
                    offset,
                    norm,
                } => Operator::affine(matrix(m)?, Vector::new(offset.clone())?, (*norm).into())?,
                Builtin::MatchingPennies => Operator::shapley(matching_pennies()),
            },
            OperatorSpec::GameFile(path) => Operator::shapley(load_game(path)?),
            OperatorSpec::RandomGame(spec) => Operator::shapley(spec.build()?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum ParamSpec {
    Constant {
        lambda: f64,
    },
    InverseTimeZeta,
    PowerAlpha {
        alpha: f64,
    },
    /// Knots `[t, λ]`.
    Table {
        knots: Vec<[f64; 2]>,
    },
}

impl ParamSpec {
    pub fn build(&self) -> Result<Parametrization> {
        Ok(match self {
            ParamSpec::Constant { lambda } => Parametrization::constant(*lambda)?,
            ParamSpec::InverseTimeZeta => Parametrization::InverseTimeZeta,
            ParamSpec::PowerAlpha { alpha } => Parametrization::power_alpha(*alpha)?,
            ParamSpec::Table { knots } => Parametrization::table(knots.iter().map(|[t, l]| (*t, *l)).collect())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum StepSpec {
    Constant {
        lambda: f64,
        n: usize,
    },
    /// `λ_i = 1/i`.
    Harmonic {
        n: usize,
    },
    /// `λ_i = min(1, i^{-1/2})`.
    InverseSqrt {
        n: usize,
    },
    Explicit {
        steps: Vec<f64>,
    },
}

impl StepSpec {
    pub fn build(&self) -> Result<StepSequence> {
        Ok(match self {
            StepSpec::Constant { lambda, n } => StepSequence::constant(*lambda, *n)?,
            StepSpec::Harmonic { n } => StepSequence::harmonic(*n),
            StepSpec::InverseSqrt { n } => StepSequence::inverse_sqrt(*n),
            StepSpec::Explicit { steps } => StepSequence::new(steps.clone())?,
        })
    }
}

/// Overrides of [`Settings`]; absent fields keep the defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsSpec {
    pub ode_tol: Option<f64>,
    pub vlambda_tol: Option<f64>,
    pub quad_tol: Option<f64>,
    pub decay_factor: Option<f64>,
    pub horizon_ratio: Option<f64>,
    pub checkpoints: Option<usize>,
    pub samples: Option<usize>,
    pub pairs: Option<usize>,
    pub radius: Option<f64>,
}

impl SettingsSpec {
    pub fn build(&self) -> Result<Settings> {
        let d = Settings::default();
        let s = Settings {
            ode_tol: self.ode_tol.unwrap_or(d.ode_tol),
            vlambda_tol: self.vlambda_tol.unwrap_or(d.vlambda_tol),
            quad_tol: self.quad_tol.unwrap_or(d.quad_tol),
            decay_factor: self.decay_factor.unwrap_or(d.decay_factor),
            horizon_ratio: self.horizon_ratio.unwrap_or(d.horizon_ratio),
            checkpoints: self.checkpoints.unwrap_or(d.checkpoints),
            samples: self.samples.unwrap_or(d.samples),
            pairs: self.pairs.unwrap_or(d.pairs),
            radius: self.radius.unwrap_or(d.radius),
        };
        s.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub operator: OperatorSpec,
    pub horizon: Option<f64>,
    pub param: Option<ParamSpec>,
    pub second_param: Option<ParamSpec>,
    pub steps: Option<Vec<StepSpec>>,
    pub starts: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub seed: u64,
    /// Restricts the checks run on this scenario; all by default.
    pub checks: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Set by presets so resolved configs record where they came from.
    pub preset: Option<PresetTag>,
    pub task: Option<Task>,
    pub operator: Option<OperatorSpec>,
    pub scenarios: Option<Vec<ScenarioSpec>>,
    /// Number of stages for `value_iter`.
    pub n: Option<usize>,
    /// Discount grid for `discounted`.
    pub lambdas: Option<Vec<f64>>,
    /// Time horizon for `ode` and `phi_ode`.
    pub horizon: Option<f64>,
    /// Uniform samples on `[0, horizon]` for `ode` and `phi_ode`.
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub param: Option<ParamSpec>,
    pub steps: Option<StepSpec>,
    pub start: Option<Vec<f64>>,
    pub checks: Option<Vec<String>>,
    #[serde(default)]
    pub settings: SettingsSpec,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetTag {
    pub name: String,
    pub version: u32,
}

fn default_samples() -> usize {
    100
}

impl ExperimentConfig {
    pub fn from_value(value: Value) -> Result<Self> {
        serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." {
                LabError::Config(inner.to_string())
            } else {
                LabError::Config(format!("{path}: {inner}"))
            }
        })
    }

    pub fn task(&self) -> Result<Task> {
        self.task.ok_or_else(|| LabError::Config("task: missing".into()))
    }

    pub fn require<'a, T>(field: &str, v: &'a Option<T>) -> Result<&'a T> {
        v.as_ref()
            .ok_or_else(|| LabError::Config(format!("{field}: required for this task")))
    }

    pub fn check_ids(&self) -> Result<Option<Vec<CheckId>>> {
        self.checks.as_deref().map(|c| parse_checks("checks", c)).transpose()
    }
}

pub fn parse_checks(field: &str, names: &[String]) -> Result<Vec<CheckId>> {
    names
        .iter()
        .enumerate()
        .map(|(i, n)| {
            n.parse::<CheckId>()
                .map_err(|_| LabError::Config(format!("{field}[{i}]: unknown check `{n}`")))
        })
        .collect()
}

pub fn parse_json(text: &str, origin: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| LabError::Config(format!("{origin}: line {} column {}: {e}", e.line(), e.column())))
}

/// Recursively overlays `top` onto `base`; objects merge, anything else
/// replaces.
pub fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Applies `a.b.c=value`. The value is parsed as JSON when possible and taken
/// as a string otherwise; numeric segments index arrays.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| LabError::Config(format!("override `{assignment}` is not of the form key=value")))?;
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(LabError::Config(format!(
            "override `{assignment}` has an empty key segment"
        )));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut slot = root;
    for seg in key.split('.') {
        if !slot.is_object() && !slot.is_array() {
            *slot = Value::Object(Default::default());
        }
        slot = match slot {
            Value::Array(items) => {
                let i: usize = seg
                    .parse()
                    .map_err(|_| LabError::Config(format!("{key}: `{seg}` is not an array index")))?;
                let len = items.len();
                items
                    .get_mut(i)
                    .ok_or_else(|| LabError::Config(format!("{key}: index {i} out of range (length {len})")))?
            }
            Value::Object(map) => map.entry(seg).or_insert(Value::Null),
            _ => unreachable!(),
        };
    }
    *slot = value;
    Ok(())
}
