use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::matrix_game::{matrix_game_value, MatrixGameSolution};
use crate::rng::SplitMix64;
use crate::{Error, Matrix, Result, Vector};

/// Tolerance on transition row sums for a constructed game.
pub(crate) const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
struct Stage {
    payoff: Matrix,
    /// Row-major over action pairs, each row of length `|Ω|`.
    transition: Vec<f64>,
}

/// A finite zero-sum stochastic game with finite action sets.
///
/// Immutable once built; every transition row is a probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticGame {
    states: Vec<String>,
    stages: Vec<Stage>,
}

impl StochasticGame {
    /// Builds a game from per-state payoff matrices `payoff[ω][i][j]` and
    /// transition rows `transition[ω][i][j][ω']`.
    ///
    /// Rows must sum to one within `1e-12`.
    pub fn new(states: Vec<String>, payoff: Vec<Vec<Vec<f64>>>, transition: Vec<Vec<Vec<Vec<f64>>>>) -> Result<Self> {
        Self::with_row_tolerance(states, payoff, transition, ROW_SUM_TOL)
    }

    /// Like [`StochasticGame::new`], but accepts rows whose sum is within
    /// `row_tol` of one and rescales them to sum to one.
    pub fn with_row_tolerance(
        states: Vec<String>,
        payoff: Vec<Vec<Vec<f64>>>,
        transition: Vec<Vec<Vec<Vec<f64>>>>,
        row_tol: f64,
    ) -> Result<Self> {
        let n_states = states.len();
        if n_states == 0 {
            return Err(Error::schema("states", "at least one state is required"));
        }
        if payoff.len() != n_states {
            return Err(Error::schema(
                "payoff",
                format!("expected {n_states} matrices, found {}", payoff.len()),
            ));
        }
        if transition.len() != n_states {
            return Err(Error::schema(
                "transition",
                format!("expected {n_states} entries, found {}", transition.len()),
            ));
        }

        let mut stages = Vec::with_capacity(n_states);
        for (w, (g, rho)) in payoff.iter().zip(&transition).enumerate() {
            let rows = g.len();
            let cols = g.first().map_or(0, Vec::len);
            if rows == 0 || cols == 0 {
                return Err(Error::schema(format!("payoff[{w}]"), "empty payoff matrix"));
            }
            for (i, row) in g.iter().enumerate() {
                if row.len() != cols {
                    return Err(Error::schema(format!("payoff[{w}][{i}]"), "ragged payoff matrix"));
                }
                if let Some(j) = row.iter().position(|x| !x.is_finite()) {
                    return Err(Error::schema(format!("payoff[{w}][{i}][{j}]"), "payoff must be finite"));
                }
            }
            if rho.len() != rows {
                return Err(Error::schema(
                    format!("transition[{w}]"),
                    format!("expected {rows} action rows, found {}", rho.len()),
                ));
            }
            let mut flat = Vec::with_capacity(rows * cols * n_states);
            for (i, rho_i) in rho.iter().enumerate() {
                if rho_i.len() != cols {
                    return Err(Error::schema(
                        format!("transition[{w}][{i}]"),
                        format!("expected {cols} columns, found {}", rho_i.len()),
                    ));
                }
                for (j, row) in rho_i.iter().enumerate() {
                    let loc = || format!("transition[{w}][{i}][{j}]");
                    if row.len() != n_states {
                        return Err(Error::schema(
                            loc(),
                            format!("probability row has {} entries, expected {n_states}", row.len()),
                        ));
                    }
                    if let Some(k) = row.iter().position(|p| !p.is_finite() || *p < 0.0 || *p > 1.0) {
                        return Err(Error::schema(
                            format!("{}[{k}]", loc()),
                            format!("probability {} outside [0, 1]", row[k]),
                        ));
                    }
                    let sum: f64 = row.iter().sum();
                    if (sum - 1.0).abs() > row_tol {
                        return Err(Error::schema(loc(), format!("probability row sums to {sum}")));
                    }
                    flat.extend(normalized(row, sum));
                }
            }
            let payoff = Matrix::from_rows(g).map_err(|e| Error::schema(format!("payoff[{w}]"), format!("{e}")))?;
            stages.push(Stage {
                payoff,
                transition: flat,
            });
        }
        Ok(StochasticGame { states, stages })
    }

    /// Seeded random game: payoffs uniform in `payoff_range`, transition rows
    /// obtained by normalizing uniform positive draws.
    pub fn random(num_states: usize, rows: usize, cols: usize, payoff_range: (f64, f64), seed: u64) -> Result<Self> {
        if num_states == 0 || rows == 0 || cols == 0 {
            return Err(Error::input("random game sizes must be positive"));
        }
        let (lo, hi) = payoff_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::input("payoff range must be finite with lo <= hi"));
        }
        let mut rng = SplitMix64::new(seed);
        let states = (0..num_states).map(|k| format!("s{k}")).collect();
        let mut payoff = Vec::with_capacity(num_states);
        let mut transition = Vec::with_capacity(num_states);
        for _ in 0..num_states {
            let g: Vec<Vec<f64>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.uniform(lo, hi)).collect())
                .collect();
            let rho: Vec<Vec<Vec<f64>>> = (0..rows)
                .map(|_| {
                    (0..cols)
                        .map(|_| {
                            let draws: Vec<f64> = (0..num_states).map(|_| rng.next_open_unit()).collect();
                            let total: f64 = draws.iter().sum();
                            draws.into_iter().map(|d| d / total).collect()
                        })
                        .collect()
                })
                .collect();
            payoff.push(g);
            transition.push(rho);
        }
        Self::new(states, payoff, transition)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_ids(&self) -> &[String] {
        &self.states
    }

    /// Action counts `(m_ω, n_ω)` of state `w`.
    pub fn actions(&self, w: usize) -> (usize, usize) {
        let p = &self.stages[w].payoff;
        (p.rows(), p.cols())
    }

    pub fn payoff(&self, w: usize) -> &Matrix {
        &self.stages[w].payoff
    }

    /// `ρ(· | i, j, ω)`.
    pub fn transition_row(&self, w: usize, i: usize, j: usize) -> &[f64] {
        let s = self.num_states();
        let cols = self.stages[w].payoff.cols();
        let start = (i * cols + j) * s;
        &self.stages[w].transition[start..start + s]
    }

    /// `B_ω[i][j] = g(i, j, ω) + Σ_ω' f(ω') ρ(ω' | i, j, ω)`.
    pub fn auxiliary_matrix(&self, w: usize, f: &[f64]) -> Matrix {
        let stage = &self.stages[w];
        let (rows, cols) = (stage.payoff.rows(), stage.payoff.cols());
        let s = self.num_states();
        let data = stage
            .payoff
            .as_slice()
            .iter()
            .zip(stage.transition.chunks_exact(s))
            .map(|(g, rho)| g + rho.iter().zip(f).map(|(p, x)| p * x).sum::<f64>())
            .collect();
        Matrix::new(rows, cols, data).expect("finite auxiliary matrix")
    }

    /// Solves the one-shot game at state `w` given continuation values `f`.
    pub fn solve_state(&self, w: usize, f: &Vector) -> MatrixGameSolution {
        matrix_game_value(&self.auxiliary_matrix(w, f.as_slice()))
    }

    /// The Shapley operator `J(f)`.
    pub fn apply(&self, f: &Vector) -> Result<Vector> {
        f.check_dim(self.num_states())?;
        Ok(self.apply_unchecked(f))
    }

    pub(crate) fn apply_unchecked(&self, f: &Vector) -> Vector {
        let values = (0..self.num_states())
            .map(|w| matrix_game_value(&self.auxiliary_matrix(w, f.as_slice())).value)
            .collect();
        Vector::from_raw(values)
    }

    /// `max |g(i, j, ω)|`, the constant for which
    /// `‖Φ(λ,x) − Φ(μ,x)‖ ≤ |λ − μ| (C + ‖x‖)` holds.
    pub fn payoff_bound(&self) -> f64 {
        self.stages
            .iter()
            .flat_map(|s| s.payoff.as_slice())
            .fold(0.0, |m, g| f64::max(m, g.abs()))
    }

    /// Payoffs as nested rows, in the same layout the constructor takes.
    pub fn payoff_rows(&self) -> Vec<Vec<Vec<f64>>> {
        self.stages.iter().map(|s| s.payoff.to_rows()).collect()
    }

    /// Transition rows as nested arrays, in the same layout the constructor takes.
    pub fn transition_rows(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        (0..self.num_states())
            .map(|w| {
                let (rows, cols) = self.actions(w);
                (0..rows)
                    .map(|i| (0..cols).map(|j| self.transition_row(w, i, j).to_vec()).collect())
                    .collect()
            })
            .collect()
    }
}

/// Rows this close to summing to one are kept as given.
const EXACT_SUM_TOL: f64 = 8.0 * f64::EPSILON;

/// Rescales a probability row to sum to one, up to rounding. The output is
/// within [`EXACT_SUM_TOL`] of one, so normalizing twice changes nothing and
/// reloading a saved game reproduces it bit for bit.
fn normalized(row: &[f64], sum: f64) -> Vec<f64> {
    if (sum - 1.0).abs() <= EXACT_SUM_TOL {
        return row.to_vec();
    }
    let mut r: Vec<f64> = row.iter().map(|p| p / sum).collect();
    let k = (0..r.len()).fold(0, |best, i| if r[i] > r[best] { i } else { best });
    r[k] = 0.0;
    let rest: f64 = r.iter().sum();
    r[k] = (1.0 - rest).max(0.0);
    r
}
