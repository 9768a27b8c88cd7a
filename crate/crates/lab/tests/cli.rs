use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nonexp_core::{Operator, Vector};
use nonexp_lab::game_io::load_game;

fn nonexp(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonexp"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn column(path: &Path, col: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let i = r.headers().unwrap().iter().position(|h| h == col).unwrap();
    r.records().map(|rec| rec.unwrap()[i].parse().unwrap()).collect()
}

#[test]
fn translation_value_iteration_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let o = nonexp(&["value-iter", "--preset", "translation", "--set", "n=50"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = column(&dir.path().join("value_iter.csv"), "v0");
    assert_eq!(v, vec![1.0; 50]);
    assert!(dir.path().join("value_iter.jsonl").exists());
    assert!(dir.path().join("config.json").exists());
}

#[test]
fn matching_pennies_discounted_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = nonexp(
        &[
            "discounted",
            "--preset",
            "matching-pennies",
            "--set",
            "formats=[\"csv\"]",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    assert_eq!(
        column(&dir.path().join("discounted.csv"), "lambda"),
        vec![0.5, 0.1, 0.01]
    );
    assert!(column(&dir.path().join("discounted.csv"), "v0")
        .iter()
        .all(|v| v.abs() <= 1e-10));
    assert!(!dir.path().join("discounted.jsonl").exists());
}

#[test]
fn euler_and_phi_ode_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = nonexp(
        &[
            "euler",
            "--preset",
            "rotation30",
            "--set",
            "steps={\"kind\":\"constant\",\"lambda\":0.5,\"n\":4}",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sigma = column(&dir.path().join("euler.csv"), "sigma");
    assert_eq!(sigma, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    let o = nonexp(
        &[
            "phi-ode",
            "--preset",
            "random3",
            "--set",
            "horizon=2",
            "--set",
            "samples=4",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let lambda = column(&dir.path().join("phi_ode.csv"), "lambda");
    assert_eq!(lambda.len(), 5);
    assert_eq!(lambda[0], 1.0);
}

#[test]
fn verify_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // An absurd decay factor makes every decay check fail.
    let o = nonexp(
        &[
            "verify",
            "--preset",
            "random3",
            "--set",
            "checks=[\"discrete_slow\"]",
            "--set",
            "settings.decay_factor=1e-30",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    let text = fs::read_to_string(dir.path().join("reports.jsonl")).unwrap();
    assert!(text.contains("\"verdict\":\"fail\""));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");

    fs::write(
        &cfg,
        r#"{"operator": {"builtin": {"name": "matching_pennies"}}, "n": "ten"}"#,
    )
    .unwrap();
    let o = nonexp(&["value-iter", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n:"));

    let game = dir.path().join("bad.json");
    fs::write(
        &game,
        r#"{"states": ["s0"], "actions": [[1, 1]], "payoff": [[[0]]], "transition": [[[[0.9]]]]}"#,
    )
    .unwrap();
    fs::write(
        &cfg,
        format!(
            r#"{{"operator": {{"game_file": {:?}}}, "n": 3}}"#,
            game.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = nonexp(&["value-iter", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("transition[0][0][0]"));

    let o = nonexp(
        &["ode", "--preset", "random3", "--set", "settings.ode_tol=1e-300"],
        &dir.path().join("o"),
    );
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));

    let o = nonexp(&["value-iter", "--config", "/nonexistent/cfg.json"], dir.path());
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn generated_games_are_deterministic_and_reload() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = Command::new(env!("CARGO_BIN_EXE_nonexp"))
            .args([
                "generate-game",
                "--states",
                "3",
                "--rows",
                "2",
                "--cols",
                "2",
                "--payoff-min",
                "-1",
                "--payoff-max",
                "1",
                "--seed",
                "7",
                "--out",
            ])
            .arg(p)
            .output()
            .unwrap();
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let game = load_game(&a).unwrap();
    let preset = nonexp_core::StochasticGame::random(3, 2, 2, (-1.0, 1.0), 7).unwrap();
    assert_eq!(game, preset);
}

#[test]
fn degenerate_game_is_a_translation() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.json");
    let o = Command::new(env!("CARGO_BIN_EXE_nonexp"))
        .args([
            "generate-game",
            "--states",
            "1",
            "--rows",
            "1",
            "--cols",
            "1",
            "--payoff-min",
            "5",
            "--payoff-max",
            "5",
            "--seed",
            "3",
            "--out",
        ])
        .arg(&p)
        .output()
        .unwrap();
    assert!(o.status.success());
    let op = Operator::shapley(load_game(&p).unwrap());
    for f in [-2.0, 0.0, 7.5] {
        assert_eq!(op.apply_j(&Vector::from_slice(&[f]).unwrap()).unwrap()[0], 5.0 + f);
    }
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    fs::write(&file, "x").unwrap();
    let o = nonexp(&["value-iter", "--preset", "translation"], &file.join("sub"));
    assert_eq!(o.status.code(), Some(5));
}
