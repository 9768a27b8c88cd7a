//! Checkers for the quantitative statements about the dynamics. Each check
//! computes both sides of an inequality on a [`Scenario`] and reports the
//! slack in a [`BoundReport`].
//!
//! Asymptotic statements are checked as finite-horizon decay: the gap at the
//! end of the horizon must be at most `decay_factor` times the gap at the
//! start, over a horizon ratio of at least `horizon_ratio`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::continuous::Parametrization;
use crate::discrete::StepSequence;
use crate::math;
use crate::rng::SplitMix64;
use crate::{Error, Norm, Operator, Result, Vector};

mod parametrized;
mod semigroup;
mod structural;

/// Absolute allowance added to every budget.
pub const BASE_BUDGET: f64 = 1e-9;

macro_rules! check_ids {
    ($($variant:ident => $name:literal,)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum CheckId {
            $($variant,)*
        }

        impl CheckId {
            pub const ALL: &'static [CheckId] = &[$(CheckId::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(CheckId::$variant => $name,)*
                }
            }
        }

        impl FromStr for CheckId {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(CheckId::$variant),)*
                    _ => Err(Error::input(format!("unknown check id '{s}'"))),
                }
            }
        }
    };
}

check_ids! {
    NormBounds => "norm_bounds",
    Accretivity => "accretivity",
    SolutionContraction => "solution_contraction",
    DerivativeDecay => "derivative_decay",
    Chernoff => "chernoff",
    Convvn => "convvn",
    Expo => "expo",
    Kobayashi => "kobayashi",
    EulerVsOde => "euler_vs_ode",
    NormalizedEuler => "normalized_euler",
    Interpolation => "interpolation",
    StationarityGap => "stationarity_gap",
    ConstantDecay => "constant_decay",
    InitialIndependence => "initial_independence",
    WnTracksVn => "wn_tracks_vn",
    Convboth => "convboth",
    HypothesisH => "hypothesis_H",
    SlowParam => "slow_param",
    ConvderDecay => "convder_decay",
    TwoParam => "two_param",
    VlambdaLipschitz => "vlambda_lipschitz",
    DiscreteSlow => "discrete_slow",
    AlphaFamily => "alpha_family",
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The premise of the statement could not be certified for the scenario.
    Skipped,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        }
    }

    /// Anything but an explicit failure.
    pub fn is_ok(self) -> bool {
        self != Verdict::Fail
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Context {
    pub scenario: String,
    pub operator: &'static str,
    pub norm: Norm,
    /// Which assertion of the check this report covers, e.g. `t=100`.
    pub label: String,
    pub params: Vec<(String, f64)>,
    pub note: Option<String>,
}

impl Context {
    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub check: CheckId,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tol_budget: f64,
    pub verdict: Verdict,
    pub context: Context,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Operator plus whatever a check needs beyond it. Missing pieces fall back
/// to per-check defaults.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub operator: Operator,
    /// Time horizon `T` or number of steps `N`, depending on the check.
    pub horizon: Option<f64>,
    pub param: Option<Parametrization>,
    /// Comparison parametrization for `two_param`.
    pub second_param: Option<Parametrization>,
    pub steps: Option<Vec<StepSequence>>,
    pub starts: Option<Vec<Vector>>,
    pub seed: u64,
}

impl Scenario {
    pub fn new(name: impl Into<String>, operator: Operator) -> Self {
        Scenario {
            name: name.into(),
            operator,
            horizon: None,
            param: None,
            second_param: None,
            steps: None,
            starts: None,
            seed: 0,
        }
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = Some(horizon);
        self
    }

    pub fn with_param(mut self, param: Parametrization) -> Self {
        self.param = Some(param);
        self
    }

    pub fn with_second_param(mut self, param: Parametrization) -> Self {
        self.second_param = Some(param);
        self
    }

    pub fn with_steps(mut self, steps: Vec<StepSequence>) -> Self {
        self.steps = Some(steps);
        self
    }

    pub fn with_starts(mut self, starts: Vec<Vector>) -> Self {
        self.starts = Some(starts);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Numerical settings shared by all checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    /// Tolerance handed to the RK4 integrator.
    pub ode_tol: f64,
    /// Certified accuracy of every `v_λ`.
    pub vlambda_tol: f64,
    pub quad_tol: f64,
    pub decay_factor: f64,
    /// Ratio between the last and first time of a decay check.
    pub horizon_ratio: f64,
    /// Checkpoints per logarithmic grid.
    pub checkpoints: usize,
    /// Sample count for sampled inequalities.
    pub samples: usize,
    /// Random step-sequence pairs for `kobayashi`.
    pub pairs: usize,
    /// Radius of the sampling ball.
    pub radius: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            ode_tol: 1e-8,
            vlambda_tol: 1e-10,
            quad_tol: 1e-9,
            decay_factor: 0.2,
            horizon_ratio: 100.0,
            checkpoints: 5,
            samples: 1000,
            pairs: 100,
            radius: crate::operator::DEFAULT_RADIUS,
        }
    }
}

impl Settings {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("ode_tol", self.ode_tol),
            ("vlambda_tol", self.vlambda_tol),
            ("quad_tol", self.quad_tol),
            ("decay_factor", self.decay_factor),
            ("radius", self.radius),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::input(format!("setting {name} must be positive, got {v}")));
            }
        }
        if !(self.horizon_ratio >= 1.0) {
            return Err(Error::input("setting horizon_ratio must be at least 1"));
        }
        if self.checkpoints < 2 || self.samples == 0 || self.pairs == 0 {
            return Err(Error::input("checkpoints must be >= 2 and samples, pairs >= 1"));
        }
        Ok(())
    }
}

/// Runs one check on one scenario.
pub fn verify(check: CheckId, scenario: &Scenario, settings: &Settings) -> Result<Vec<BoundReport>> {
    settings.validate()?;
    if let Some(h) = scenario.horizon {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::input(format!("scenario horizon must be positive, got {h}")));
        }
    }
    if let Some(starts) = &scenario.starts {
        for s in starts {
            s.check_dim(scenario.operator.dim())?;
        }
    }
    let cx = Ctx {
        check,
        scenario,
        settings,
    };
    match check {
        CheckId::NormBounds => structural::norm_bounds(&cx),
        CheckId::Accretivity => structural::accretivity(&cx),
        CheckId::HypothesisH => structural::hypothesis_h(&cx),
        CheckId::VlambdaLipschitz => structural::vlambda_lipschitz(&cx),
        CheckId::DiscreteSlow => structural::discrete_slow(&cx),
        CheckId::SolutionContraction => semigroup::solution_contraction(&cx),
        CheckId::DerivativeDecay => semigroup::derivative_decay(&cx),
        CheckId::Chernoff => semigroup::chernoff(&cx),
        CheckId::Convvn => semigroup::convvn(&cx),
        CheckId::Expo => semigroup::expo(&cx),
        CheckId::Kobayashi => semigroup::kobayashi(&cx),
        CheckId::EulerVsOde => semigroup::euler_vs_ode(&cx, false),
        CheckId::NormalizedEuler => semigroup::euler_vs_ode(&cx, true),
        CheckId::Interpolation => semigroup::interpolation(&cx),
        CheckId::StationarityGap => parametrized::stationarity_gap(&cx),
        CheckId::ConstantDecay => parametrized::constant_decay(&cx),
        CheckId::InitialIndependence => parametrized::initial_independence(&cx),
        CheckId::WnTracksVn => parametrized::wn_tracks_vn(&cx),
        CheckId::Convboth => parametrized::convboth(&cx),
        CheckId::SlowParam => parametrized::slow_param(&cx),
        CheckId::ConvderDecay => parametrized::convder_decay(&cx),
        CheckId::TwoParam => parametrized::two_param(&cx),
        CheckId::AlphaFamily => parametrized::alpha_family(&cx),
    }
}

pub(crate) struct Ctx<'a> {
    check: CheckId,
    scenario: &'a Scenario,
    settings: &'a Settings,
}

type Params = Vec<(String, f64)>;

pub(crate) fn params(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

impl<'a> Ctx<'a> {
    fn op(&self) -> &'a Operator {
        &self.scenario.operator
    }

    fn context(&self, label: impl Into<String>, params: Params, note: Option<String>) -> Context {
        Context {
            scenario: self.scenario.name.clone(),
            operator: self.op().variant_name(),
            norm: self.op().norm(),
            label: label.into(),
            params,
            note,
        }
    }

    /// `lhs ≤ rhs + budget`.
    fn report(&self, label: impl Into<String>, lhs: f64, rhs: f64, budget: f64, params: Params) -> BoundReport {
        let verdict = if lhs <= rhs + budget {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        BoundReport {
            check: self.check,
            lhs,
            rhs,
            slack: rhs - lhs,
            tol_budget: budget,
            verdict,
            context: self.context(label, params, None),
        }
    }

    /// `last ≤ decay_factor · first + budget`.
    fn decay(&self, label: impl Into<String>, first: f64, last: f64, budget: f64, mut params: Params) -> BoundReport {
        params.push(("initial_gap".into(), first));
        params.push(("decay_factor".into(), self.settings.decay_factor));
        self.report(label, last, self.settings.decay_factor * first, budget, params)
    }

    /// `values[i+1] ≤ values[i] + budgets[i+1]` for all `i`; reports the
    /// largest increase net of its budget.
    fn nonincreasing(&self, label: impl Into<String>, times: &[f64], values: &[f64], budgets: &[f64]) -> BoundReport {
        let mut worst = (f64::NEG_INFINITY, 0.0, 0usize);
        for i in 1..values.len() {
            let rise = values[i] - values[i - 1];
            if rise - budgets[i] > worst.0 - worst.1 {
                worst = (rise, budgets[i], i);
            }
        }
        let (rise, budget, i) = worst;
        self.report(
            label,
            rise,
            0.0,
            budget,
            params(&[
                ("t_prev", times[i - 1]),
                ("t", times[i]),
                ("samples", values.len() as f64),
            ]),
        )
    }

    fn skipped(&self, label: impl Into<String>, note: impl Into<String>) -> BoundReport {
        BoundReport {
            check: self.check,
            lhs: 0.0,
            rhs: 0.0,
            slack: 0.0,
            tol_budget: BASE_BUDGET,
            verdict: Verdict::Skipped,
            context: self.context(label, Vec::new(), Some(note.into())),
        }
    }

    fn horizon(&self, default: f64) -> f64 {
        self.scenario.horizon.unwrap_or(default)
    }

    /// Integer horizon `N`.
    fn steps_horizon(&self, default: usize) -> usize {
        self.scenario
            .horizon
            .map_or(default, |h| math::round(h).max(1.0) as usize)
    }

    fn param_or(&self, default: Parametrization) -> Parametrization {
        self.scenario.param.clone().unwrap_or(default)
    }

    /// `k`-th start: from the scenario when given, otherwise a seeded point
    /// of the unit ball.
    fn start(&self, k: usize) -> Vector {
        if let Some(s) = self.scenario.starts.as_ref().and_then(|s| s.get(k)) {
            return s.clone();
        }
        let mut rng = SplitMix64::new(self.scenario.seed ^ (0xA076_1D64_78BD_642F_u64.wrapping_mul(k as u64 + 1)));
        Vector::random_in_ball(&mut rng, self.op().dim(), 1.0, self.op().norm())
    }

    fn rng(&self, salt: u64) -> SplitMix64 {
        SplitMix64::new(
            self.scenario
                .seed
                .wrapping_add(salt.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        )
    }

    /// Log-spaced times from `t_end / horizon_ratio` to `t_end`.
    fn log_times(&self, t_end: f64) -> Vec<f64> {
        let grid = crate::continuous::log_grid(t_end / self.settings.horizon_ratio, t_end, self.settings.checkpoints);
        grid[1..].to_vec()
    }

    /// Log-spaced integers from `n_end / horizon_ratio` to `n_end`.
    fn log_indices(&self, n_end: usize) -> Vec<usize> {
        let lo = (n_end as f64 / self.settings.horizon_ratio).max(1.0);
        let mut out: Vec<usize> = crate::continuous::log_grid(lo, n_end as f64, self.settings.checkpoints)[1..]
            .iter()
            .map(|t| math::round(*t).max(1.0) as usize)
            .collect();
        out.dedup();
        out
    }
}

/// Tracks the most critical of many evaluated inequalities.
pub(crate) struct Worst {
    best: Option<(f64, f64, f64, Params)>,
    count: usize,
}

impl Worst {
    pub(crate) fn new() -> Self {
        Worst { best: None, count: 0 }
    }

    pub(crate) fn consider(&mut self, lhs: f64, rhs: f64, budget: f64, params: impl FnOnce() -> Params) {
        self.count += 1;
        let margin = rhs + budget - lhs;
        let replace = match &self.best {
            None => true,
            Some((l, r, b, _)) => margin < r + b - l || margin.is_nan(),
        };
        if replace {
            self.best = Some((lhs, rhs, budget, params()));
        }
    }

    fn finish(self, cx: &Ctx<'_>, label: impl Into<String>) -> BoundReport {
        let (lhs, rhs, budget, mut p) = self.best.unwrap_or((0.0, 0.0, BASE_BUDGET, Vec::new()));
        p.push(("evaluations".into(), self.count as f64));
        cx.report(label, lhs, rhs, budget, p)
    }
}

/// Sequence of `(time, value)` pairs rendered into report parameters.
pub(crate) fn series(prefix: &str, times: &[f64], values: &[f64]) -> Params {
    times
        .iter()
        .zip(values)
        .map(|(t, v)| (format!("{prefix}@{t}"), *v))
        .collect()
}

pub(crate) fn label_t(t: f64) -> String {
    format!("t={t}")
}

pub(crate) fn label_n(n: usize) -> String {
    format!("n={n}")
}
