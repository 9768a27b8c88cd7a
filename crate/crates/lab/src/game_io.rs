//! JSON game documents:
//!
//! ```json
//! { "states": ["s0"], "actions": [[2, 2]],
//!   "payoff": [[[1, -1], [-1, 1]]],
//!   "transition": [[[[1], [1]], [[1], [1]]]] }
//! ```

use std::fs;
use std::path::Path;

use nonexp_core::StochasticGame;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::output::write_atomic;

/// Transition rows within this distance of summing to one are accepted and
/// renormalized.
pub const INGEST_ROW_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDocument {
    pub states: Vec<String>,
    pub actions: Vec<[usize; 2]>,
    pub payoff: Vec<Vec<Vec<f64>>>,
    pub transition: Vec<Vec<Vec<Vec<f64>>>>,
}

impl GameDocument {
    pub fn from_game(game: &StochasticGame) -> Self {
        GameDocument {
            states: game.state_ids().to_vec(),
            actions: (0..game.num_states())
                .map(|w| {
                    let (m, n) = game.actions(w);
                    [m, n]
                })
                .collect(),
            payoff: game.payoff_rows(),
            transition: game.transition_rows(),
        }
    }

    pub fn into_game(self) -> Result<StochasticGame> {
        if self.actions.len() != self.states.len() {
            return Err(schema(
                "actions",
                format!("expected {} entries, found {}", self.states.len(), self.actions.len()),
            ));
        }
        for (w, [m, n]) in self.actions.iter().enumerate() {
            let Some(g) = self.payoff.get(w) else { break };
            let cols = g.first().map_or(0, Vec::len);
            if g.len() != *m || cols != *n {
                return Err(schema(
                    &format!("actions[{w}]"),
                    format!("declares {m}x{n} but payoff[{w}] is {}x{cols}", g.len()),
                ));
            }
        }
        Ok(StochasticGame::with_row_tolerance(
            self.states,
            self.payoff,
            self.transition,
            INGEST_ROW_TOL,
        )?)
    }
}

fn schema(location: &str, message: String) -> LabError {
    LabError::Schema {
        location: location.into(),
        message,
    }
}

pub fn parse_game(text: &str) -> Result<StochasticGame> {
    let doc: GameDocument = serde_json::from_str(text)
        .map_err(|e| schema(&format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    doc.into_game()
}

pub fn load_game(path: &Path) -> Result<StochasticGame> {
    let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    parse_game(&text)
}

pub fn game_to_json(game: &StochasticGame) -> String {
    let mut text = serde_json::to_string_pretty(&GameDocument::from_game(game)).expect("game documents serialize");
    text.push('\n');
    text
}

pub fn save_game(game: &StochasticGame, path: &Path) -> Result<()> {
    write_atomic(path, game_to_json(game).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    const PENNIES: &str = r#"{ "states": ["s0"], "actions": [[2, 2]],
        "payoff": [[[1, -1], [-1, 1]]],
        "transition": [[[[1], [1]], [[1], [1]]]] }"#;

    #[test]
    fn pennies_parse() {
        let g = parse_game(PENNIES).unwrap();
        assert_eq!(g.num_states(), 1);
        assert_eq!(g.actions(0), (2, 2));
    }

    #[test]
    fn short_row_rejected() {
        let text = PENNIES.replacen("[[[[1], [1]]", "[[[[0.9], [1]]", 1);
        match parse_game(&text) {
            Err(LabError::Schema { location, .. }) => assert_eq!(location, "transition[0][0][0]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn near_stochastic_row_renormalized() {
        let text = r#"{ "states": ["a", "b"], "actions": [[1, 1], [1, 1]],
            "payoff": [[[0]], [[1]]],
            "transition": [[[[0.5, 0.5000000001]]], [[[0, 1]]]] }"#;
        let g = parse_game(text).unwrap();
        let row = g.transition_row(0, 0, 0);
        assert_eq!(row.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn missing_field_named() {
        let err = parse_game(r#"{ "states": ["s0"], "actions": [[1, 1]], "payoff": [[[0]]] }"#).unwrap_err();
        assert!(err.to_string().contains("transition"), "{err}");
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn action_mismatch() {
        let text = PENNIES.replace("[[2, 2]]", "[[2, 3]]");
        match parse_game(&text) {
            Err(LabError::Schema { location, .. }) => assert_eq!(location, "actions[0]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn roundtrip() {
        for seed in 0..50 {
            let g = StochasticGame::random(3, 2, 3, (-1.0, 1.0), seed).unwrap();
            let text = game_to_json(&g);
            let back = parse_game(&text).unwrap();
            assert_eq!(back, g, "seed {seed}");
            assert_eq!(game_to_json(&back), text);
        }
    }
}
