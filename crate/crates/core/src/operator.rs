//! Nonexpansive operators `J`, the accretive operator `A = I − J` and the
//! perturbed recession map `Φ(λ, x) = λ J((1 − λ)/λ · x)`.

use alloc::format;

use crate::rng::SplitMix64;
use crate::shapley::StochasticGame;
use crate::{Error, Matrix, Norm, Result, Vector};

/// Slack allowed on operator norms and ratio checks.
pub const NONEXPANSIVE_TOL: f64 = 1e-12;
/// Pairs closer than this are skipped when forming ratios.
pub const MIN_SEPARATION: f64 = 1e-9;
/// Default sampling radius for property checks.
pub const DEFAULT_RADIUS: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind {
    /// `J(x) = x + c`.
    Translation(Vector),
    /// `J(x) = Mx` with `M` an isometry of the declared norm.
    LinearIsometry(Matrix),
    /// `J(x) = Mx + b` with `‖M‖ ≤ 1` in the declared norm.
    AffineNonexpansive { matrix: Matrix, offset: Vector },
    /// Shapley operator of a finite stochastic game (sup norm).
    Shapley(StochasticGame),
}

/// A nonexpansive map on `(R^d, ‖·‖)`. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    kind: OperatorKind,
    norm: Norm,
    dim: usize,
}

impl Operator {
    pub fn translation(offset: Vector, norm: Norm) -> Self {
        let dim = offset.dim();
        Operator {
            kind: OperatorKind::Translation(offset),
            norm,
            dim,
        }
    }

    /// Planar rotation by `theta` radians, Euclidean norm.
    pub fn rotation(theta: f64) -> Self {
        Operator {
            kind: OperatorKind::LinearIsometry(Matrix::rotation(theta)),
            norm: Norm::Euclidean,
            dim: 2,
        }
    }

    /// Linear isometry; the matrix must be orthogonal and have operator norm
    /// at most one in `norm` (signed permutations for the sup norm).
    pub fn linear_isometry(matrix: Matrix, norm: Norm) -> Result<Self> {
        if !matrix.is_orthogonal(1e-12) {
            return Err(Error::input("linear isometry matrix must be orthogonal"));
        }
        check_matrix_norm(&matrix, norm)?;
        Ok(Operator {
            dim: matrix.rows(),
            kind: OperatorKind::LinearIsometry(matrix),
            norm,
        })
    }

    pub fn affine(matrix: Matrix, offset: Vector, norm: Norm) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::input("affine operator matrix must be square"));
        }
        offset.check_dim(matrix.rows())?;
        check_matrix_norm(&matrix, norm)?;
        Ok(Operator {
            dim: matrix.rows(),
            kind: OperatorKind::AffineNonexpansive { matrix, offset },
            norm,
        })
    }

    pub fn identity(dim: usize, norm: Norm) -> Self {
        Operator {
            kind: OperatorKind::AffineNonexpansive {
                matrix: Matrix::identity(dim),
                offset: Vector::zeros(dim),
            },
            norm,
            dim,
        }
    }

    pub fn shapley(game: StochasticGame) -> Self {
        Operator {
            dim: game.num_states(),
            kind: OperatorKind::Shapley(game),
            norm: Norm::Sup,
        }
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn game(&self) -> Option<&StochasticGame> {
        match &self.kind {
            OperatorKind::Shapley(g) => Some(g),
            _ => None,
        }
    }

    /// Short variant name used in report contexts.
    pub fn variant_name(&self) -> &'static str {
        match self.kind {
            OperatorKind::Translation(_) => "translation",
            OperatorKind::LinearIsometry(_) => "linear_isometry",
            OperatorKind::AffineNonexpansive { .. } => "affine",
            OperatorKind::Shapley(_) => "shapley",
        }
    }

    /// Distance in the operator's norm.
    #[inline]
    pub fn dist(&self, x: &Vector, y: &Vector) -> f64 {
        x.dist(y, self.norm)
    }

    #[inline]
    pub fn size(&self, x: &Vector) -> f64 {
        x.norm(self.norm)
    }

    pub fn apply_j(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim)?;
        Ok(self.j(x))
    }

    pub fn apply_a(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim)?;
        Ok(self.a(x))
    }

    pub fn apply_phi(&self, lambda: f64, x: &Vector) -> Result<Vector> {
        check_lambda(lambda)?;
        x.check_dim(self.dim)?;
        Ok(self.phi(lambda, x))
    }

    /// `J(x)`; callers guarantee the dimension.
    pub(crate) fn j(&self, x: &Vector) -> Vector {
        match &self.kind {
            OperatorKind::Translation(c) => x + c,
            OperatorKind::LinearIsometry(m) => m.mul_vec(x),
            OperatorKind::AffineNonexpansive { matrix, offset } => &matrix.mul_vec(x) + offset,
            OperatorKind::Shapley(game) => game.apply_unchecked(x),
        }
    }

    /// `A(x) = x − J(x)`.
    pub(crate) fn a(&self, x: &Vector) -> Vector {
        x - &self.j(x)
    }

    /// `Φ(λ, x)`; for `λ = 1` this is `J(0)`.
    pub(crate) fn phi(&self, lambda: f64, x: &Vector) -> Vector {
        self.j(&x.scale((1.0 - lambda) / lambda)).scale(lambda)
    }

    /// The constant `C` in `‖Φ(λ,x) − Φ(μ,x)‖ ≤ |λ − μ| (C + ‖x‖)`.
    ///
    /// For Shapley operators this is the payoff bound. For the affine
    /// variants `Φ(λ,x) − Φ(μ,x) = (λ − μ)(J(0) − Mx)`, so `‖J(0)‖` works.
    pub fn lipschitz_in_lambda(&self) -> f64 {
        match &self.kind {
            OperatorKind::Shapley(game) => game.payoff_bound(),
            OperatorKind::Translation(c) => c.norm(self.norm),
            OperatorKind::LinearIsometry(_) => 0.0,
            OperatorKind::AffineNonexpansive { offset, .. } => offset.norm(self.norm),
        }
    }

    /// `‖J(0)‖`, which bounds every `‖v_n‖` and `‖v_λ‖`.
    pub fn j_at_zero_norm(&self) -> f64 {
        self.size(&self.j(&Vector::zeros(self.dim)))
    }

    /// Samples pairs in the ball of radius `radius` and records the largest
    /// ratio `‖J(x) − J(y)‖ / ‖x − y‖`.
    pub fn check_nonexpansive(&self, samples: usize, radius: f64, seed: u64) -> PropertyReport {
        self.sample_ratios(samples, radius, seed, RatioKind::Max, |x, y| {
            self.dist(&self.j(x), &self.j(y))
        })
    }

    /// Samples pairs and records the smallest ratio
    /// `‖x − y + λ(A(x) − A(y))‖ / ‖x − y‖`, which must stay at least one.
    pub fn check_accretive(&self, lambda: f64, samples: usize, radius: f64, seed: u64) -> Result<PropertyReport> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::input(format!("accretivity requires lambda > 0, got {lambda}")));
        }
        Ok(self.sample_ratios(samples, radius, seed, RatioKind::Min, |x, y| {
            let lhs = (x - y).add_scaled(lambda, &(&self.a(x) - &self.a(y)));
            self.size(&lhs)
        }))
    }

    /// Samples pairs and records the largest ratio
    /// `‖Φ(λ,x) − Φ(λ,y)‖ / ‖x − y‖`, which must not exceed `1 − λ`.
    pub fn check_phi_contraction(&self, lambda: f64, samples: usize, radius: f64, seed: u64) -> Result<PropertyReport> {
        check_lambda(lambda)?;
        let mut report = self.sample_ratios(samples, radius, seed, RatioKind::Max, |x, y| {
            self.dist(&self.phi(lambda, x), &self.phi(lambda, y))
        });
        // Recount against the contraction factor rather than one.
        report.violations = report.excess_over(1.0 - lambda);
        Ok(report)
    }

    fn sample_ratios(
        &self,
        samples: usize,
        radius: f64,
        seed: u64,
        kind: RatioKind,
        numerator: impl Fn(&Vector, &Vector) -> f64,
    ) -> PropertyReport {
        let mut rng = SplitMix64::new(seed);
        let mut ratios = alloc::vec::Vec::with_capacity(samples);
        for _ in 0..samples {
            let x = Vector::random_in_ball(&mut rng, self.dim, radius, self.norm);
            let y = Vector::random_in_ball(&mut rng, self.dim, radius, self.norm);
            let d = self.dist(&x, &y);
            if d > MIN_SEPARATION {
                ratios.push(numerator(&x, &y) / d);
            }
        }
        PropertyReport::from_ratios(samples, seed, kind, ratios)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RatioKind {
    Max,
    Min,
}

/// Outcome of a sampled structural check.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub samples: usize,
    pub violations: usize,
    pub worst_ratio: f64,
    pub seed: u64,
    ratios: alloc::vec::Vec<f64>,
}

impl PropertyReport {
    fn from_ratios(samples: usize, seed: u64, kind: RatioKind, ratios: alloc::vec::Vec<f64>) -> Self {
        let (worst_ratio, violations) = match kind {
            RatioKind::Max => (
                ratios.iter().copied().fold(0.0, f64::max),
                ratios.iter().filter(|r| **r > 1.0 + NONEXPANSIVE_TOL).count(),
            ),
            RatioKind::Min => (
                ratios.iter().copied().fold(f64::INFINITY, f64::min),
                ratios.iter().filter(|r| **r < 1.0 - NONEXPANSIVE_TOL).count(),
            ),
        };
        // With no usable pair the check is vacuous; report the neutral ratio.
        let worst_ratio = if ratios.is_empty() { 1.0 } else { worst_ratio };
        PropertyReport {
            samples,
            violations,
            worst_ratio,
            seed,
            ratios,
        }
    }

    fn excess_over(&self, bound: f64) -> usize {
        self.ratios.iter().filter(|r| **r > bound + NONEXPANSIVE_TOL).count()
    }
}

fn check_matrix_norm(matrix: &Matrix, norm: Norm) -> Result<()> {
    let op_norm = matrix.operator_norm(norm);
    if op_norm > 1.0 + NONEXPANSIVE_TOL {
        return Err(Error::input(format!(
            "matrix has {norm} operator norm {op_norm} > 1; operator would not be nonexpansive"
        )));
    }
    Ok(())
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda <= 1.0 {
        Ok(())
    } else {
        Err(Error::input(format!("lambda must lie in (0, 1], got {lambda}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::FRAC_PI_2;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_slice(xs).unwrap()
    }

    #[test]
    fn translation_examples() {
        let op = Operator::translation(v(&[1.0]), Norm::Sup);
        assert_eq!(op.apply_j(&v(&[0.0])).unwrap(), v(&[1.0]));
        assert_eq!(op.apply_a(&v(&[5.0])).unwrap(), v(&[-1.0]));
        let lambda = 0.3;
        let x = v(&[2.0]);
        let phi = op.apply_phi(lambda, &x).unwrap();
        let expected = (1.0 - lambda) * 2.0 + lambda * 1.0;
        assert!((phi[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn rotation_examples() {
        let op = Operator::rotation(FRAC_PI_2);
        let jx = op.apply_j(&v(&[1.0, 0.0])).unwrap();
        assert!(jx.dist(&v(&[0.0, 1.0]), Norm::Sup) < 1e-15);
        let ax = op.apply_a(&v(&[1.0, 0.0])).unwrap();
        assert!(ax.dist(&v(&[1.0, -1.0]), Norm::Sup) < 1e-15);
        // Φ(λ, x) = (1 − λ) R x.
        let phi = op.apply_phi(0.25, &v(&[2.0, 0.0])).unwrap();
        assert!(phi.dist(&v(&[0.0, 1.5]), Norm::Sup) < 1e-15);
    }

    #[test]
    fn identity_has_zero_a() {
        let op = Operator::identity(3, Norm::Sup);
        assert_eq!(op.apply_a(&v(&[1.0, -2.0, 3.0])).unwrap(), Vector::zeros(3));
    }

    #[test]
    fn phi_at_one_is_j_of_zero() {
        let op = Operator::affine(Matrix::scaled_identity(2, 0.5), v(&[0.3, -0.7]), Norm::Sup).unwrap();
        assert_eq!(op.apply_phi(1.0, &v(&[9.0, 4.0])).unwrap(), v(&[0.3, -0.7]));
    }

    #[test]
    fn lambda_outside_unit_interval_rejected() {
        let op = Operator::identity(1, Norm::Sup);
        assert!(op.apply_phi(0.0, &v(&[1.0])).is_err());
        assert!(op.apply_phi(1.5, &v(&[1.0])).is_err());
    }

    #[test]
    fn expansive_matrix_rejected() {
        let m = Matrix::scaled_identity(2, 1.5);
        assert!(Operator::affine(m.clone(), Vector::zeros(2), Norm::Sup).is_err());
        assert!(Operator::affine(m, Vector::zeros(2), Norm::Euclidean).is_err());
        // A rotation is not nonexpansive in the sup norm.
        assert!(Operator::linear_isometry(Matrix::rotation(0.5), Norm::Sup).is_err());
        let swap = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        assert!(Operator::linear_isometry(swap, Norm::Sup).is_ok());
    }

    #[test]
    fn dimension_mismatch() {
        let op = Operator::rotation(0.1);
        assert!(op.apply_j(&v(&[1.0])).is_err());
    }

    #[test]
    fn sampled_checks_on_isometries() {
        let t = Operator::translation(v(&[1.0, 2.0]), Norm::Sup);
        let r = t.check_nonexpansive(500, DEFAULT_RADIUS, 1);
        assert_eq!(r.violations, 0);
        assert!((r.worst_ratio - 1.0).abs() < 1e-12);
        let a = t.check_accretive(1.0, 500, DEFAULT_RADIUS, 1).unwrap();
        assert_eq!(a.violations, 0);
        assert!((a.worst_ratio - 1.0).abs() < 1e-12);

        let rot = Operator::rotation(0.4);
        assert_eq!(rot.check_nonexpansive(500, DEFAULT_RADIUS, 2).violations, 0);
        let rot30 = Operator::rotation(core::f64::consts::PI / 6.0);
        assert_eq!(
            rot30.check_accretive(0.5, 1000, DEFAULT_RADIUS, 3).unwrap().violations,
            0
        );
        let id = Operator::identity(2, Norm::Euclidean);
        assert_eq!(id.check_accretive(2.0, 200, DEFAULT_RADIUS, 4).unwrap().violations, 0);
        assert!(t.check_accretive(0.0, 10, 1.0, 0).is_err());
    }

    #[test]
    fn phi_is_a_contraction() {
        let rot = Operator::rotation(0.9);
        for lambda in [0.1, 0.5, 1.0] {
            assert_eq!(rot.check_phi_contraction(lambda, 300, 10.0, 5).unwrap().violations, 0);
        }
    }
}
