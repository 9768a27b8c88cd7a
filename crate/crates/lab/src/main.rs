use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nonexp_lab::config::{apply_override, merge, parse_json, RandomGameSpec};
use nonexp_lab::game_io::save_game;
use nonexp_lab::{presets, run, ExperimentConfig, LabError, Result, Task};
use serde_json::Value;

#[derive(Parser)]
#[command(
    name = "nonexp",
    version,
    about = "Orbits, trajectories and bound checks for nonexpansive operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// n-stage values v_n = J^n(0)/n.
    ValueIter(RunArgs),
    /// Discounted values v_λ over a grid of λ.
    Discounted(RunArgs),
    /// Explicit Euler scheme.
    Euler(RunArgs),
    /// Solution of U' = J(U) - U.
    Ode(RunArgs),
    /// Solution of u' = Φ(λ(t), u) - u.
    PhiOde(RunArgs),
    /// Selected bound checks.
    Verify(RunArgs),
    /// Bound checks over all scenarios (all checks unless `checks` is set).
    Suite(RunArgs),
    /// Writes a seeded random game document.
    GenerateGame(GameArgs),
    /// Lists presets and check names.
    List,
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file; layered over --preset when both are given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Dotted override, e.g. `settings.ode_tol=1e-6`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory; overrides `out` from the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GameArgs {
    #[arg(long, default_value_t = 3)]
    states: usize,
    #[arg(long, default_value_t = 2)]
    rows: usize,
    #[arg(long, default_value_t = 2)]
    cols: usize,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    payoff_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    payoff_max: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn load_config(task: Task, args: &RunArgs) -> Result<(ExperimentConfig, PathBuf)> {
    let mut value = match &args.preset {
        Some(p) => presets::preset(p)?,
        None => Value::Object(Default::default()),
    };
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| LabError::Io {
            path: path.clone(),
            source: e,
        })?;
        merge(&mut value, parse_json(&text, &path.display().to_string())?);
    } else if args.preset.is_none() {
        return Err(LabError::Config("give --config and/or --preset".into()));
    }
    value["task"] = Value::String(task.name().into());
    for s in &args.set {
        apply_override(&mut value, s)?;
    }
    let cfg = ExperimentConfig::from_value(value)?;
    let out = args
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .ok_or_else(|| LabError::Config("out: give --out or set `out` in the configuration".into()))?;
    Ok((cfg, out))
}

fn execute(cli: Cli) -> Result<()> {
    let (task, args) = match cli.command {
        Command::ValueIter(a) => (Task::ValueIter, a),
        Command::Discounted(a) => (Task::Discounted, a),
        Command::Euler(a) => (Task::Euler, a),
        Command::Ode(a) => (Task::Ode, a),
        Command::PhiOde(a) => (Task::PhiOde, a),
        Command::Verify(a) => (Task::Verify, a),
        Command::Suite(a) => (Task::Suite, a),
        Command::GenerateGame(g) => {
            let spec = RandomGameSpec {
                states: g.states,
                rows: g.rows,
                cols: g.cols,
                payoff_range: [g.payoff_min, g.payoff_max],
                seed: g.seed,
            };
            save_game(&spec.build()?, &g.out)?;
            println!("wrote {}", g.out.display());
            return Ok(());
        }
        Command::List => {
            println!("presets: {}", presets::NAMES.join(", "));
            let checks: Vec<&str> = nonexp_core::bounds::CheckId::ALL.iter().map(|c| c.name()).collect();
            println!("checks: {}", checks.join(", "));
            return Ok(());
        }
    };
    let (cfg, out) = load_config(task, &args)?;
    let outcome = run(&cfg, &out)?;
    println!("{}", outcome.summary());
    for r in outcome.reports.iter().filter(|r| !r.verdict.is_ok()) {
        eprintln!(
            "FAIL {} [{}] {}: lhs={} rhs={} budget={}",
            r.check.name(),
            r.context.scenario,
            r.context.label,
            r.lhs,
            r.rhs,
            r.tol_budget
        );
    }
    let failed = outcome.reports.iter().filter(|r| !r.verdict.is_ok()).count();
    if failed > 0 {
        return Err(LabError::CheckFailed(format!("{failed} check report(s) failed")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
