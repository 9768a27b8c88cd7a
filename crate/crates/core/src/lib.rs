//! Discrete and continuous dynamics generated by a nonexpansive operator `J`.
//!
//! The crate covers value iteration `V_n = J(V_{n-1})`, discounted fixed
//! points `v_λ = Φ(λ, v_λ)`, explicit Euler schemes for `A = I - J`, the
//! evolution equations `U' = J(U) - U` and `u' = Φ(λ(t), u) - u`, and a
//! registry of checkers that evaluate both sides of the known inequalities
//! relating them. Shapley operators of finite zero-sum stochastic games are
//! supported through an exact matrix-game solver.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, the command
//! line runner and concurrency live in `nonexp-lab`.

#![no_std]
#![warn(missing_debug_implementations)]
// `!(x > 0.0)` is used on purpose so that NaN fails precondition checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod continuous;
pub mod discrete;
mod error;
pub mod matrix;
pub mod operator;
pub mod quadrature;
pub mod rng;
pub mod shapley;
pub mod vector;

pub(crate) mod math;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use operator::{Operator, OperatorKind, PropertyReport};
pub use shapley::{MatrixGameSolution, StochasticGame};
pub use vector::{Norm, Vector};
