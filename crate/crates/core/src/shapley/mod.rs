//! Finite zero-sum stochastic games and their Shapley operators.
//!
//! For a game with state space `Ω`, the Shapley operator maps `f: Ω → R` to
//!
//! ```text
//! J(f)(ω) = val[ g(·,·,ω) + Σ_ω' f(ω') ρ(ω' | ·,·,ω) ]
//! ```
//!
//! where `val` is the value of the one-shot matrix game. It is monotone,
//! commutes with adding constants and is nonexpansive in the sup norm.

mod game;
mod matrix_game;

pub use game::StochasticGame;
pub use matrix_game::{matrix_game_value, MatrixGameSolution};
