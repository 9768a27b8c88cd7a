use alloc::vec::Vec;

use crate::Matrix;

/// Optimal mixed strategies and value of a matrix game; the row player
/// maximizes.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGameSolution {
    pub value: f64,
    pub row_strategy: Vec<f64>,
    pub col_strategy: Vec<f64>,
}

impl MatrixGameSolution {
    /// Guaranteed payoff of the row strategy: `min_j Σ_i p_i M_ij`.
    pub fn maximin(&self, m: &Matrix) -> f64 {
        (0..m.cols())
            .map(|j| (0..m.rows()).map(|i| self.row_strategy[i] * m.get(i, j)).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }

    /// Guaranteed loss bound of the column strategy: `max_i Σ_j M_ij q_j`.
    pub fn minimax(&self, m: &Matrix) -> f64 {
        (0..m.rows())
            .map(|i| m.row(i).iter().zip(&self.col_strategy).map(|(a, q)| a * q).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `minimax - maximin`; zero for exactly optimal strategies.
    pub fn duality_gap(&self, m: &Matrix) -> f64 {
        self.minimax(m) - self.maximin(m)
    }
}

const PIVOT_EPS: f64 = 1e-12;
const CLAMP_TOL: f64 = 1e-12;

/// Solves the zero-sum game with payoff matrix `m` (row player maximizes).
///
/// Pure saddle points are detected directly. Otherwise the matrix is mapped
/// affinely into `[1, 2]` and the column player's program
/// `max Σ y_j  s.t.  A y ≤ 1, y ≥ 0` is solved by the tableau simplex method
/// with Bland's rule; the row strategy is read from the dual prices.
pub fn matrix_game_value(m: &Matrix) -> MatrixGameSolution {
    let (rows, cols) = (m.rows(), m.cols());

    let (best_row, maximin) = (0..rows)
        .map(|i| (i, m.row(i).iter().copied().fold(f64::INFINITY, f64::min)))
        .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    let (best_col, minimax) = (0..cols)
        .map(|j| (j, (0..rows).map(|i| m.get(i, j)).fold(f64::NEG_INFINITY, f64::max)))
        .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
    if maximin == minimax {
        return MatrixGameSolution {
            value: maximin,
            row_strategy: unit(rows, best_row),
            col_strategy: unit(cols, best_col),
        };
    }

    let lo = m.min_entry();
    let range = m.max_entry() - lo;
    let width = cols + rows + 1;
    let rhs = width - 1;
    let mut tableau = alloc::vec![0.0; rows * width];
    for i in 0..rows {
        let row = &mut tableau[i * width..(i + 1) * width];
        for (j, cell) in row[..cols].iter_mut().enumerate() {
            *cell = (m.get(i, j) - lo) / range + 1.0;
        }
        row[cols + i] = 1.0;
        row[rhs] = 1.0;
    }
    let mut objective = alloc::vec![0.0; width];
    objective[..cols].iter_mut().for_each(|c| *c = -1.0);
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    // Bland's rule terminates; the cap only guards against a logic error.
    for _ in 0..10_000 {
        let Some(enter) = (0..rhs).find(|&j| objective[j] < -PIVOT_EPS) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            let a = tableau[i * width + enter];
            if a > PIVOT_EPS {
                let ratio = tableau[i * width + rhs] / a;
                leave = match leave {
                    Some((r, best)) if ratio > best || (ratio == best && basis[i] > basis[r]) => Some((r, best)),
                    _ => Some((i, ratio)),
                };
            }
        }
        // The feasible region is bounded (A > 0), so a leaving row always exists.
        let Some((pivot_row, _)) = leave else { break };
        pivot(&mut tableau, &mut objective, width, pivot_row, enter);
        basis[pivot_row] = enter;
    }

    let total = objective[rhs];
    let mut col_strategy = alloc::vec![0.0; cols];
    for (i, &b) in basis.iter().enumerate() {
        if b < cols {
            col_strategy[b] = tableau[i * width + rhs] / total;
        }
    }
    let mut row_strategy: Vec<f64> = (0..rows).map(|i| objective[cols + i] / total).collect();
    clamp_and_normalize(&mut row_strategy);
    clamp_and_normalize(&mut col_strategy);

    MatrixGameSolution {
        value: (1.0 / total - 1.0) * range + lo,
        row_strategy,
        col_strategy,
    }
}

fn pivot(tableau: &mut [f64], objective: &mut [f64], width: usize, r: usize, e: usize) {
    let p = tableau[r * width + e];
    for x in &mut tableau[r * width..(r + 1) * width] {
        *x /= p;
    }
    let pivot_row: Vec<f64> = tableau[r * width..(r + 1) * width].to_vec();
    for (i, row) in tableau.chunks_mut(width).enumerate() {
        if i == r {
            continue;
        }
        let factor = row[e];
        if factor != 0.0 {
            row.iter_mut().zip(&pivot_row).for_each(|(x, p)| *x -= factor * p);
            row[e] = 0.0;
        }
    }
    let factor = objective[e];
    objective.iter_mut().zip(&pivot_row).for_each(|(x, p)| *x -= factor * p);
    objective[e] = 0.0;
}

fn unit(len: usize, at: usize) -> Vec<f64> {
    let mut v = alloc::vec![0.0; len];
    v[at] = 1.0;
    v
}

fn clamp_and_normalize(p: &mut [f64]) {
    for x in p.iter_mut() {
        if *x < 0.0 {
            debug_assert!(*x >= -CLAMP_TOL * 1e3, "strategy entry {x} far below zero");
            *x = 0.0;
        }
    }
    let sum: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= sum);
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn solve(rows: &[Vec<f64>]) -> (Matrix, MatrixGameSolution) {
        let m = Matrix::from_rows(rows).unwrap();
        let s = matrix_game_value(&m);
        (m, s)
    }

    #[test]
    fn matching_pennies() {
        let (m, s) = solve(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
        assert!(s.value.abs() < 1e-12);
        for p in s.row_strategy.iter().chain(&s.col_strategy) {
            assert!((p - 0.5).abs() < 1e-12);
        }
        assert!(s.duality_gap(&m).abs() < 1e-9);
    }

    #[test]
    fn saddle_point() {
        let (_, s) = solve(&[vec![2.0, 1.0], vec![3.0, 4.0]]);
        assert_eq!(s.value, 3.0);
        assert_eq!(s.row_strategy, vec![0.0, 1.0]);
    }

    #[test]
    fn single_entry() {
        let (_, s) = solve(&[vec![-2.5]]);
        assert_eq!(s.value, -2.5);
    }

    #[test]
    fn rock_paper_scissors() {
        let (m, s) = solve(&[vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]]);
        assert!(s.value.abs() < 1e-12);
        assert!(s.duality_gap(&m).abs() < 1e-12);
        for p in &s.row_strategy {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rectangular_games() {
        // 2x3: column 3 is dominated; value from the 2x2 core [[3,-1],[-2,1]] is 1/7.
        let (m, s) = solve(&[vec![3.0, -1.0, 4.0], vec![-2.0, 1.0, 5.0]]);
        assert!((s.value - 1.0 / 7.0).abs() < 1e-12);
        assert!(s.duality_gap(&m).abs() < 1e-12);
        let (m, s) = solve(&[vec![1.0, -1.0], vec![-1.0, 1.0], vec![0.5, 0.5]]);
        assert!(s.duality_gap(&m).abs() < 1e-12);
        assert!((s.value - 0.5).abs() < 1e-12);
    }
}
