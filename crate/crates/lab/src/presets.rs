//! Named configurations shipped with the binary.

use serde_json::{json, Value};

use crate::error::{LabError, Result};

/// Bumped whenever a preset changes in a way that alters its outputs.
pub const PRESET_VERSION: u32 = 1;

pub const NAMES: [&str; 5] = [
    "translation",
    "rotation30",
    "matching-pennies",
    "random3",
    "paper-suite",
];

fn translation_op() -> Value {
    json!({"builtin": {"name": "translation", "offset": [1.0]}})
}

fn rotation30_op() -> Value {
    json!({"builtin": {"name": "rotation", "degrees": 30.0}})
}

fn pennies_op() -> Value {
    json!({"builtin": {"name": "matching_pennies"}})
}

fn random3_op() -> Value {
    json!({"random_game": {"states": 3, "rows": 2, "cols": 2, "payoff_range": [-1.0, 1.0], "seed": 7}})
}

fn single(op: Value) -> Value {
    json!({
        "task": "value_iter",
        "operator": op,
        "n": 1000,
        "lambdas": [1.0, 0.5, 0.1, 0.001],
        "horizon": 100.0,
        "samples": 100,
        "param": {"kind": "power_alpha", "alpha": 0.5},
        "steps": {"kind": "harmonic", "n": 1000},
    })
}

pub fn preset(name: &str) -> Result<Value> {
    let mut v = match name {
        "translation" => single(translation_op()),
        "rotation30" => {
            let mut v = single(rotation30_op());
            v["start"] = json!([1.0, 0.0]);
            v
        }
        "matching-pennies" => {
            let mut v = single(pennies_op());
            v["lambdas"] = json!([0.5, 0.1, 0.01]);
            v
        }
        "random3" => single(random3_op()),
        "paper-suite" => json!({
            "task": "suite",
            "scenarios": [
                {"name": "translation", "operator": translation_op()},
                {"name": "rotation30", "operator": rotation30_op()},
                {"name": "matching-pennies", "operator": pennies_op()},
                {"name": "random3", "operator": random3_op()},
                {
                    "name": "random3-constant-0.1",
                    "operator": random3_op(),
                    "param": {"kind": "constant", "lambda": 0.1},
                    "checks": ["constant_decay", "stationarity_gap", "slow_param"],
                },
            ],
        }),
        _ => {
            return Err(LabError::Config(format!(
                "preset: unknown `{name}`, expected one of {}",
                NAMES.join(", ")
            )))
        }
    };
    v["preset"] = json!({"name": name, "version": PRESET_VERSION});
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    #[test]
    fn presets_parse() {
        for n in NAMES {
            let cfg = ExperimentConfig::from_value(preset(n).unwrap()).unwrap();
            assert!(cfg.task.is_some());
        }
        assert!(preset("nope").is_err());
    }
}
