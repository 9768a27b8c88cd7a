//! Finite-dimensional real vectors and the two norms used by the operators.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, Mul, Neg, Sub};

use crate::math;
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Norm attached to an operator instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Norm {
    /// `max |x_i|`; the norm under which Shapley operators are nonexpansive.
    #[default]
    Sup,
    /// `sqrt(sum x_i^2)`.
    Euclidean,
}

impl Norm {
    pub fn name(self) -> &'static str {
        match self {
            Norm::Sup => "sup",
            Norm::Euclidean => "euclidean",
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A point of `R^d` with finite entries and `d >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Builds a vector, rejecting empty input and non-finite entries.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::input("vector must have at least one entry"));
        }
        if let Some(i) = entries.iter().position(|x| !x.is_finite()) {
            return Err(Error::input(alloc::format!("vector entry {i} is not finite")));
        }
        Ok(Vector(entries))
    }

    pub fn from_slice(entries: &[f64]) -> Result<Self> {
        Self::new(entries.to_vec())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "vector dimension must be positive");
        Vector(alloc::vec![0.0; dim])
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        assert!(dim > 0 && value.is_finite());
        Vector(alloc::vec![value; dim])
    }

    /// Unchecked constructor for results of arithmetic on finite vectors.
    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        debug_assert!(!entries.is_empty());
        Vector(entries)
    }

    /// Uniform sample in the closed ball of the given norm and radius.
    pub fn random_in_ball(rng: &mut SplitMix64, dim: usize, radius: f64, norm: Norm) -> Self {
        match norm {
            Norm::Sup => Vector((0..dim).map(|_| rng.uniform(-radius, radius)).collect()),
            Norm::Euclidean => {
                let mut dir: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
                let len = math::sqrt(dir.iter().map(|x| x * x).sum());
                let r = radius * math::powf(rng.next_f64(), 1.0 / dim as f64);
                let scale = if len > 0.0 { r / len } else { 0.0 };
                dir.iter_mut().for_each(|x| *x *= scale);
                Vector(dir)
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> core::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn norm(&self, kind: Norm) -> f64 {
        norm_of(&self.0, kind)
    }

    /// `‖self - other‖` without allocating.
    pub fn dist(&self, other: &Vector, kind: Norm) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        let diffs = self.0.iter().zip(&other.0).map(|(a, b)| a - b);
        match kind {
            Norm::Sup => diffs.fold(0.0, |m, d| f64::max(m, d.abs())),
            Norm::Euclidean => math::sqrt(diffs.map(|d| d * d).sum()),
        }
    }

    pub fn scale(&self, factor: f64) -> Vector {
        Vector(self.0.iter().map(|x| factor * x).collect())
    }

    /// Entrywise division; exact where `scale(1/d)` may round.
    pub fn divide(&self, d: f64) -> Vector {
        Vector(self.0.iter().map(|x| x / d).collect())
    }

    /// `(1 - weight) * self + weight * other`.
    pub fn lerp(&self, other: &Vector, weight: f64) -> Vector {
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (1.0 - weight) * a + weight * b)
                .collect(),
        )
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, factor: f64, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + factor * b).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::input(alloc::format!(
                "dimension mismatch: expected {expected}, got {}",
                self.dim()
            )))
        }
    }
}

pub(crate) fn norm_of(xs: &[f64], kind: Norm) -> f64 {
    match kind {
        Norm::Sup => xs.iter().fold(0.0, |m, x| f64::max(m, x.abs())),
        Norm::Euclidean => math::sqrt(xs.iter().map(|x| x * x).sum()),
    }
}

/// Checked norm: rejects NaN entries, which `Vector` itself cannot hold but raw
/// slices can.
pub fn norm(xs: &[f64], kind: Norm) -> Result<f64> {
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::input("NaN entry in norm argument"));
    }
    Ok(norm_of(xs, kind))
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;

    fn mul(self, rhs: f64) -> Vector {
        self.scale(rhs)
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

impl<'a> IntoIterator for &'a Vector {
    type Item = &'a f64;
    type IntoIter = core::slice::Iter<'a, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn norm_examples() {
        let x = Vector::new(vec![3.0, -4.0]).unwrap();
        assert_eq!(x.norm(Norm::Sup), 4.0);
        assert_eq!(x.norm(Norm::Euclidean), 5.0);
        assert_eq!(Vector::zeros(3).norm(Norm::Sup), 0.0);
    }

    #[test]
    fn nan_is_rejected() {
        assert!(matches!(norm(&[1.0, f64::NAN], Norm::Sup), Err(Error::Input(_))));
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
        assert!(Vector::new(vec![]).is_err());
    }

    #[test]
    fn ball_samples_stay_inside() {
        let mut rng = SplitMix64::new(3);
        for norm in [Norm::Sup, Norm::Euclidean] {
            for _ in 0..1000 {
                let x = Vector::random_in_ball(&mut rng, 4, 10.0, norm);
                assert!(x.norm(norm) <= 10.0 + 1e-12);
            }
        }
    }

    #[test]
    fn dist_matches_norm_of_difference() {
        let x = Vector::new(vec![1.0, 2.0, -3.0]).unwrap();
        let y = Vector::new(vec![-1.0, 0.5, 4.0]).unwrap();
        for norm in [Norm::Sup, Norm::Euclidean] {
            assert_eq!(x.dist(&y, norm), (&x - &y).norm(norm));
        }
    }
}
