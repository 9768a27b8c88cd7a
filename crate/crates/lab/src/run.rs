//! Task execution.

use std::fs;
use std::path::{Path, PathBuf};

use nonexp_core::bounds::{verify, BoundReport, CheckId, Scenario, Settings, Verdict};
use nonexp_core::continuous::{integrate_U_at, integrate_u_at, uniform_grid};
use nonexp_core::discrete::{euler_scheme, iterate_vn, solve_vlambda};
use nonexp_core::{Operator, Vector};
use rayon::prelude::*;

use crate::config::{parse_checks, ExperimentConfig, Format, ScenarioSpec, Task};
use crate::error::{LabError, Result};
use crate::output::{reports_jsonl, reports_table, write_atomic, Table};

#[derive(Debug)]
pub struct Outcome {
    pub task: Task,
    pub files: Vec<PathBuf>,
    pub reports: Vec<BoundReport>,
}

impl Outcome {
    pub fn count(&self, verdict: Verdict) -> usize {
        self.reports.iter().filter(|r| r.verdict == verdict).count()
    }

    pub fn summary(&self) -> String {
        if self.reports.is_empty() {
            return format!("{}: wrote {} file(s)", self.task.name(), self.files.len());
        }
        format!(
            "{}: {} reports, {} pass, {} fail, {} skipped",
            self.task.name(),
            self.reports.len(),
            self.count(Verdict::Pass),
            self.count(Verdict::Fail),
            self.count(Verdict::Skipped),
        )
    }
}

struct Sink<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Sink<'_> {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        self.files.push(path);
        Ok(())
    }

    fn table(&mut self, cfg: &ExperimentConfig, stem: &str, t: &Table) -> Result<()> {
        for f in &cfg.formats {
            match f {
                Format::Csv => self.write(&format!("{stem}.csv"), &t.to_csv())?,
                Format::Json => self.write(&format!("{stem}.jsonl"), &t.to_jsonl())?,
            }
        }
        Ok(())
    }
}

/// Runs the configured task and writes its artifacts into `out`. Check
/// failures are reported through [`Outcome`], not as an error.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let task = cfg.task()?;
    let settings = cfg.settings.build()?;
    fs::create_dir_all(out).map_err(|e| LabError::io(out, e))?;
    let mut sink = Sink {
        dir: out,
        files: Vec::new(),
    };
    let mut resolved = serde_json::to_string_pretty(cfg).expect("configs serialize");
    resolved.push('\n');
    sink.write("config.json", resolved.as_bytes())?;

    let mut reports = Vec::new();
    match task {
        Task::ValueIter => {
            let op = single_operator(cfg)?;
            let n = *ExperimentConfig::require("n", &cfg.n)?;
            let vi = iterate_vn(&op, n)?;
            let mut t = Table::new(header("n", op.dim(), "v", &["norm"]));
            for (k, v) in vi.normalized.iter().enumerate().skip(1) {
                t.push_numbers(row(k as f64, v, &[op.size(v)]));
            }
            sink.table(cfg, "value_iter", &t)?;
        }
        Task::Discounted => {
            let op = single_operator(cfg)?;
            let lambdas = ExperimentConfig::require("lambdas", &cfg.lambdas)?;
            let mut t = Table::new(header(
                "lambda",
                op.dim(),
                "v",
                &["norm", "iterations", "certified_error"],
            ));
            for &l in lambdas {
                let v = solve_vlambda(&op, l, settings.vlambda_tol)?;
                t.push_numbers(row(
                    l,
                    &v.value,
                    &[op.size(&v.value), v.iterations as f64, v.certified_error],
                ));
            }
            sink.table(cfg, "discounted", &t)?;
        }
        Task::Euler => {
            let op = single_operator(cfg)?;
            let steps = ExperimentConfig::require("steps", &cfg.steps)?.build()?;
            let orbit = euler_scheme(&op, &start(cfg, &op)?, &steps)?;
            let mut t = Table::new(header("n", op.dim(), "x", &[]));
            t = prepend(t, ["sigma", "tau"]);
            for (k, x) in orbit.points.iter().enumerate() {
                let mut r = vec![k as f64, steps.sigma(k), steps.tau(k)];
                r.extend(x.iter().copied());
                t.push_numbers(r);
            }
            sink.table(cfg, "euler", &t)?;
        }
        Task::Ode | Task::PhiOde => {
            let op = single_operator(cfg)?;
            let horizon = *ExperimentConfig::require("horizon", &cfg.horizon)?;
            if !(horizon > 0.0 && horizon.is_finite()) {
                return Err(LabError::Config(format!("horizon: must be positive, got {horizon}")));
            }
            if cfg.samples == 0 {
                return Err(LabError::Config("samples: must be at least 1".into()));
            }
            let grid = uniform_grid(horizon, cfg.samples);
            let x0 = start(cfg, &op)?;
            if task == Task::Ode {
                let traj = integrate_U_at(&op, &x0, &grid, settings.ode_tol)?;
                let mut t = Table::new(header("t", op.dim(), "x", &["err_bound"]));
                for (i, x) in traj.points.iter().enumerate() {
                    t.push_numbers(row(traj.times[i], x, &[traj.err_bound[i]]));
                }
                sink.table(cfg, "ode", &t)?;
            } else {
                let param = ExperimentConfig::require("param", &cfg.param)?.build()?;
                let traj = integrate_u_at(&op, &param, &x0, &grid, settings.ode_tol)?;
                let mut t = Table::new(header("t", op.dim(), "x", &["err_bound"]));
                t = prepend(t, ["lambda"]);
                for (i, x) in traj.points.iter().enumerate() {
                    let ti = traj.times[i];
                    let mut r = vec![ti, param.lambda(ti)];
                    r.extend(x.iter().copied());
                    r.push(traj.err_bound[i]);
                    t.push_numbers(r);
                }
                sink.table(cfg, "phi_ode", &t)?;
            }
        }
        Task::Verify | Task::Suite => {
            let checks = match (task, cfg.check_ids()?) {
                (_, Some(c)) => c,
                (Task::Suite, None) => CheckId::ALL.to_vec(),
                _ => return Err(LabError::Config("checks: required for this task".into())),
            };
            reports = run_checks(cfg, &checks, &settings)?;
            for f in &cfg.formats {
                match f {
                    Format::Csv => sink.write("reports.csv", &reports_table(&reports).to_csv())?,
                    Format::Json => sink.write("reports.jsonl", &reports_jsonl(&reports))?,
                }
            }
        }
    }
    Ok(Outcome {
        task,
        files: sink.files,
        reports,
    })
}

fn header(first: &str, dim: usize, prefix: &str, tail: &[&str]) -> Vec<String> {
    let mut h = vec![first.to_string()];
    h.extend((0..dim).map(|i| format!("{prefix}{i}")));
    h.extend(tail.iter().map(|s| s.to_string()));
    h
}

/// Inserts columns right after the first one.
fn prepend<const K: usize>(t: Table, cols: [&str; K]) -> Table {
    let mut h = t.header().to_vec();
    for (i, c) in cols.iter().enumerate() {
        h.insert(1 + i, c.to_string());
    }
    Table::new(h)
}

fn row(first: f64, v: &Vector, tail: &[f64]) -> Vec<f64> {
    let mut r = vec![first];
    r.extend(v.iter().copied());
    r.extend_from_slice(tail);
    r
}

fn single_operator(cfg: &ExperimentConfig) -> Result<Operator> {
    if cfg.scenarios.is_some() {
        return Err(LabError::Config(
            "scenarios: only used by verify and suite; give `operator` instead".into(),
        ));
    }
    ExperimentConfig::require("operator", &cfg.operator)?.build()
}

fn start(cfg: &ExperimentConfig, op: &Operator) -> Result<Vector> {
    match &cfg.start {
        None => Ok(Vector::zeros(op.dim())),
        Some(s) => {
            let v = Vector::new(s.clone())?;
            if v.dim() != op.dim() {
                return Err(LabError::Config(format!(
                    "start: expected {} entries, found {}",
                    op.dim(),
                    v.dim()
                )));
            }
            Ok(v)
        }
    }
}

fn build_scenario(spec: &ScenarioSpec) -> Result<Scenario> {
    let mut sc = Scenario::new(spec.name.clone(), spec.operator.build()?).with_seed(spec.seed);
    sc.horizon = spec.horizon;
    sc.param = spec.param.as_ref().map(|p| p.build()).transpose()?;
    sc.second_param = spec.second_param.as_ref().map(|p| p.build()).transpose()?;
    if let Some(steps) = &spec.steps {
        sc.steps = Some(steps.iter().map(|s| s.build()).collect::<Result<_>>()?);
    }
    if let Some(starts) = &spec.starts {
        sc.starts = Some(
            starts
                .iter()
                .map(|s| Vector::new(s.clone()))
                .collect::<Result<_, _>>()?,
        );
    }
    Ok(sc)
}

fn scenarios(cfg: &ExperimentConfig) -> Result<Vec<(Scenario, Option<Vec<CheckId>>)>> {
    match (&cfg.operator, &cfg.scenarios) {
        (Some(_), Some(_)) => Err(LabError::Config(
            "operator: give either `operator` or `scenarios`, not both".into(),
        )),
        (None, None) => Err(LabError::Config("operator: missing (or give `scenarios`)".into())),
        (Some(op), None) => {
            let spec = ScenarioSpec {
                name: "main".into(),
                operator: op.clone(),
                horizon: cfg.horizon,
                param: cfg.param.clone(),
                second_param: None,
                steps: cfg.steps.clone().map(|s| vec![s]),
                starts: cfg.start.clone().map(|s| vec![s]),
                seed: 0,
                checks: None,
            };
            Ok(vec![(build_scenario(&spec)?, None)])
        }
        (None, Some(list)) => {
            if list.is_empty() {
                return Err(LabError::Config("scenarios: empty".into()));
            }
            list.iter()
                .enumerate()
                .map(|(i, s)| {
                    let only = s
                        .checks
                        .as_deref()
                        .map(|c| parse_checks(&format!("scenarios.{i}.checks"), c))
                        .transpose()?;
                    Ok((build_scenario(s)?, only))
                })
                .collect()
        }
    }
}

/// Runs every (scenario, check) pair in parallel; reports keep scenario then
/// check order.
fn run_checks(cfg: &ExperimentConfig, checks: &[CheckId], settings: &Settings) -> Result<Vec<BoundReport>> {
    let scenarios = scenarios(cfg)?;
    let jobs: Vec<(&Scenario, CheckId)> = scenarios
        .iter()
        .flat_map(|(sc, only)| {
            checks
                .iter()
                .filter(move |c| only.as_ref().is_none_or(|o| o.contains(c)))
                .map(move |c| (sc, *c))
        })
        .collect();
    let results: Vec<Result<Vec<BoundReport>>> = jobs
        .par_iter()
        .map(|(sc, c)| {
            verify(*c, sc, settings).map_err(|e| {
                let e = LabError::from(e);
                match e {
                    LabError::Config(m) => LabError::Config(format!("{} on {}: {m}", c.name(), sc.name)),
                    LabError::Resource(m) => LabError::Resource(format!("{} on {}: {m}", c.name(), sc.name)),
                    other => other,
                }
            })
        })
        .collect();
    let mut reports = Vec::new();
    for r in results {
        reports.extend(r?);
    }
    Ok(reports)
}
