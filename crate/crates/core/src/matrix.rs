//! Small dense row-major matrices.

use alloc::vec::Vec;

use crate::math;
use crate::vector::{Norm, Vector};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

const POWER_ITERATIONS: usize = 200;
const POWER_TOL: f64 = 1e-12;

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::input("matrix must be nonempty"));
        }
        if data.len() != rows * cols {
            return Err(Error::input(alloc::format!(
                "matrix data has {} entries, expected {rows}x{cols}",
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::input("matrix entries must be finite"));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::input("ragged matrix rows"));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = alloc::vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Matrix {
            rows: dim,
            cols: dim,
            data,
        }
    }

    pub fn scaled_identity(dim: usize, factor: f64) -> Self {
        let mut m = Self::identity(dim);
        m.data.iter_mut().for_each(|x| *x *= factor);
        m
    }

    /// Counter-clockwise rotation of the plane by `theta` radians.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = (math::sin(theta), math::cos(theta));
        Matrix {
            rows: 2,
            cols: 2,
            data: alloc::vec![c, -s, s, c],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn mul_slice(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn transpose_mul_slice(&self, y: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.cols];
        for (i, yi) in y.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &Vector) -> Vector {
        Vector::from_raw(self.mul_slice(x.as_slice()))
    }

    /// Induced operator norm: maximum absolute row sum for `Sup`, largest
    /// singular value (power iteration on `MᵀM`) for `Euclidean`.
    pub fn operator_norm(&self, norm: Norm) -> f64 {
        match norm {
            Norm::Sup => (0..self.rows)
                .map(|i| self.row(i).iter().map(|a| a.abs()).sum::<f64>())
                .fold(0.0, f64::max),
            Norm::Euclidean => self.spectral_norm(),
        }
    }

    fn spectral_norm(&self) -> f64 {
        // Deterministic start that is not orthogonal to any coordinate axis.
        let mut x: Vec<f64> = (0..self.cols).map(|j| 1.0 + 0.1 * j as f64).collect();
        let len = math::sqrt(x.iter().map(|v| v * v).sum());
        x.iter_mut().for_each(|v| *v /= len);
        let mut estimate = 0.0;
        for _ in 0..POWER_ITERATIONS {
            let y = self.transpose_mul_slice(&self.mul_slice(&x));
            let len = math::sqrt(y.iter().map(|v| v * v).sum());
            if len == 0.0 {
                return 0.0;
            }
            let next = math::sqrt(len);
            x = y.into_iter().map(|v| v / len).collect();
            let converged = (next - estimate).abs() <= POWER_TOL * next.max(1.0);
            estimate = next;
            if converged {
                break;
            }
        }
        estimate
    }

    /// Whether `MᵀM = I` entrywise within `tol`.
    pub fn is_orthogonal(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.cols;
        (0..n).all(|a| {
            (0..n).all(|b| {
                let dot: f64 = (0..n).map(|i| self.get(i, a) * self.get(i, b)).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                (dot - target).abs() <= tol
            })
        })
    }
}
