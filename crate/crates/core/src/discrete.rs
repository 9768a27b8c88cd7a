//! Discrete dynamics: value iteration, discounted fixed points, explicit Euler
//! schemes for `A = I − J`, the recursion `w_n = Φ(λ_n, w_{n−1})` and the
//! implicit resolvent step.

use alloc::format;
use alloc::vec::Vec;

use crate::math;
use crate::operator::check_lambda;
use crate::{Error, Operator, Result, Vector};

/// Iteration cap for the contraction solvers.
pub const MAX_FIXED_POINT_ITERATIONS: usize = 10_000_000;

/// Steps `λ_1..λ_N` in `(0, 1]` with prefix sums `σ_n = Σ λ_i` and
/// `τ_n = Σ λ_i²`; `σ_0 = τ_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSequence {
    steps: Vec<f64>,
    sigma: Vec<f64>,
    tau: Vec<f64>,
}

impl StepSequence {
    /// Zero steps are rejected: they would make `σ` stall.
    pub fn new(steps: Vec<f64>) -> Result<Self> {
        if let Some(i) = steps.iter().position(|s| !(*s > 0.0 && *s <= 1.0)) {
            return Err(Error::input(format!(
                "step {} is {}; steps must lie in (0, 1]",
                i + 1,
                steps[i]
            )));
        }
        let mut sigma = Vec::with_capacity(steps.len() + 1);
        let mut tau = Vec::with_capacity(steps.len() + 1);
        let (mut s, mut t) = (0.0, 0.0);
        sigma.push(s);
        tau.push(t);
        for &l in &steps {
            s += l;
            t += l * l;
            sigma.push(s);
            tau.push(t);
        }
        Ok(StepSequence { steps, sigma, tau })
    }

    pub fn constant(lambda: f64, n: usize) -> Result<Self> {
        Self::new(alloc::vec![lambda; n])
    }

    /// `λ_i = 1/i`.
    pub fn harmonic(n: usize) -> Self {
        Self::new((1..=n).map(|i| 1.0 / i as f64).collect()).expect("harmonic steps are valid")
    }

    /// `λ_i = min(1, i^{-1/2})`.
    pub fn inverse_sqrt(n: usize) -> Self {
        Self::new((1..=n).map(|i| f64::min(1.0, 1.0 / math::sqrt(i as f64))).collect())
            .expect("inverse square root steps are valid")
    }

    /// Number of steps `N`.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    /// `λ_i` for `1 ≤ i ≤ N`.
    pub fn step(&self, i: usize) -> f64 {
        self.steps[i - 1]
    }

    pub fn sigma(&self, n: usize) -> f64 {
        self.sigma[n]
    }

    pub fn tau(&self, n: usize) -> f64 {
        self.tau[n]
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigma
    }

    pub fn taus(&self) -> &[f64] {
        &self.tau
    }

    pub fn max_step(&self) -> f64 {
        self.steps.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scheme {
    ValueIteration,
    Euler(StepSequence),
    PhiRecursion(Vec<f64>),
    Proximal(StepSequence),
}

/// Points `x_0..x_N` of a discrete scheme; `points[0]` is the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOrbit {
    pub points: Vec<Vector>,
    pub scheme: Scheme,
}

impl DiscreteOrbit {
    pub fn origin(&self) -> &Vector {
        &self.points[0]
    }

    pub fn last(&self) -> &Vector {
        self.points.last().expect("orbits are never empty")
    }

    /// Number of steps taken.
    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.points.len() == 1
    }
}

/// `V_n = J^n(0)` together with the normalized values `v_n = V_n / n`.
#[derive(Debug, Clone)]
pub struct ValueIteration {
    pub orbit: DiscreteOrbit,
    /// `normalized[n] = v_n`, with `v_0 = 0`.
    pub normalized: Vec<Vector>,
    /// `max_n ‖V_n/n − Φ(1/n, v_{n−1})‖`, comparing the two characterizations.
    pub recursion_gap: f64,
}

pub fn iterate_vn(op: &Operator, n: usize) -> Result<ValueIteration> {
    if n == 0 {
        return Err(Error::input("value iteration needs N >= 1"));
    }
    let mut points = Vec::with_capacity(n + 1);
    let mut normalized = Vec::with_capacity(n + 1);
    let zero = Vector::zeros(op.dim());
    points.push(zero.clone());
    normalized.push(zero.clone());
    let mut recursive = zero;
    let mut recursion_gap: f64 = 0.0;
    for k in 1..=n {
        let next = op.j(&points[k - 1]);
        let v = next.divide(k as f64);
        recursive = op.phi(1.0 / k as f64, &recursive);
        recursion_gap = recursion_gap.max(op.dist(&v, &recursive));
        points.push(next);
        normalized.push(v);
    }
    Ok(ValueIteration {
        orbit: DiscreteOrbit {
            points,
            scheme: Scheme::ValueIteration,
        },
        normalized,
        recursion_gap,
    })
}

/// Certified fixed point `v_λ = Φ(λ, v_λ)`.
#[derive(Debug, Clone)]
pub struct DiscountedValue {
    pub lambda: f64,
    pub value: Vector,
    pub iterations: usize,
    /// A-posteriori bound on `‖value − v_λ‖`.
    pub certified_error: f64,
}

impl DiscountedValue {
    /// The unnormalized fixed point `V_λ = v_λ / λ`.
    pub fn unnormalized(&self) -> Vector {
        self.value.divide(self.lambda)
    }
}

/// Iterates `w ← Φ(λ, w)` from `w = 0` until `(1−λ)/λ · ‖w_k − w_{k−1}‖ ≤ tol`.
pub fn solve_vlambda(op: &Operator, lambda: f64, tol: f64) -> Result<DiscountedValue> {
    solve_vlambda_from(op, lambda, tol, Vector::zeros(op.dim()))
}

/// [`solve_vlambda`] from an arbitrary start; the certificate does not depend
/// on where the iteration begins.
pub fn solve_vlambda_from(op: &Operator, lambda: f64, tol: f64, start: Vector) -> Result<DiscountedValue> {
    check_lambda(lambda)?;
    if !(tol > 0.0) {
        return Err(Error::input("tolerance must be positive"));
    }
    start.check_dim(op.dim())?;
    let factor = (1.0 - lambda) / lambda;
    let mut w = start;
    for k in 1..=MAX_FIXED_POINT_ITERATIONS {
        let next = op.phi(lambda, &w);
        if !next.is_finite() {
            return Err(Error::Internal(format!("non-finite iterate at step {k}")));
        }
        let certified_error = factor * op.dist(&next, &w);
        w = next;
        if certified_error <= tol {
            return Ok(DiscountedValue {
                lambda,
                value: w,
                iterations: k,
                certified_error,
            });
        }
    }
    Err(Error::Diagnostics(format!(
        "v_lambda iteration for lambda = {lambda} did not reach tol = {tol} within {MAX_FIXED_POINT_ITERATIONS} steps"
    )))
}

/// `x_n = x_{n−1} − λ_n A(x_{n−1}) = (1 − λ_n) x_{n−1} + λ_n J(x_{n−1})`.
pub fn euler_scheme(op: &Operator, x0: &Vector, steps: &StepSequence) -> Result<DiscreteOrbit> {
    x0.check_dim(op.dim())?;
    let mut points = Vec::with_capacity(steps.len() + 1);
    points.push(x0.clone());
    for &lambda in steps.steps() {
        let prev = points.last().expect("nonempty");
        let next = prev.lerp(&op.j(prev), lambda);
        points.push(next);
    }
    Ok(DiscreteOrbit {
        points,
        scheme: Scheme::Euler(steps.clone()),
    })
}

/// `U_t^m(x) = (I − (t/m) A)^m (x)`; requires `m ≥ t` so every step is at most one.
pub fn euler_power(op: &Operator, x0: &Vector, t: f64, m: usize) -> Result<Vector> {
    if m == 0 || (m as f64) < t || t < 0.0 {
        return Err(Error::input(format!(
            "exponential formula needs m >= t >= 0, got m = {m}, t = {t}"
        )));
    }
    x0.check_dim(op.dim())?;
    let h = t / m as f64;
    let mut x = x0.clone();
    for _ in 0..m {
        x = x.lerp(&op.j(&x), h);
    }
    Ok(x)
}

/// `w_n = Φ(λ_n, w_{n−1})`.
pub fn phi_recursion(op: &Operator, lambdas: &[f64], w0: &Vector) -> Result<DiscreteOrbit> {
    w0.check_dim(op.dim())?;
    for &l in lambdas {
        check_lambda(l)?;
    }
    let mut points = Vec::with_capacity(lambdas.len() + 1);
    points.push(w0.clone());
    for &l in lambdas {
        let next = op.phi(l, points.last().expect("nonempty"));
        points.push(next);
    }
    Ok(DiscreteOrbit {
        points,
        scheme: Scheme::PhiRecursion(lambdas.to_vec()),
    })
}

/// Solves `x + λ A(x) = y` by iterating `x ← (y + λ J(x)) / (1 + λ)`, a
/// contraction of factor `λ/(1+λ)`, until the a-posteriori bound
/// `λ ‖x_k − x_{k−1}‖` drops below `tol`.
pub fn resolvent(op: &Operator, lambda: f64, y: &Vector, tol: f64) -> Result<Vector> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::input(format!("resolvent needs lambda > 0, got {lambda}")));
    }
    if !(tol > 0.0) {
        return Err(Error::input("tolerance must be positive"));
    }
    y.check_dim(op.dim())?;
    let inv = 1.0 / (1.0 + lambda);
    let mut x = y.clone();
    for _ in 0..MAX_FIXED_POINT_ITERATIONS {
        let next = y.add_scaled(lambda, &op.j(&x)).scale(inv);
        let bound = lambda * op.dist(&next, &x);
        x = next;
        if bound <= tol {
            return Ok(x);
        }
    }
    Err(Error::Diagnostics(format!(
        "resolvent with lambda = {lambda} did not converge"
    )))
}

/// `x_n = (I + λ_n A)^{-1} x_{n−1}`, each step solved by [`resolvent`].
pub fn proximal_scheme(op: &Operator, x0: &Vector, steps: &StepSequence, tol: f64) -> Result<DiscreteOrbit> {
    x0.check_dim(op.dim())?;
    let mut points = Vec::with_capacity(steps.len() + 1);
    points.push(x0.clone());
    for &lambda in steps.steps() {
        let next = resolvent(op, lambda, points.last().expect("nonempty"), tol)?;
        points.push(next);
    }
    Ok(DiscreteOrbit {
        points,
        scheme: Scheme::Proximal(steps.clone()),
    })
}

/// Right-hand side of the distance bound between two Euler schemes:
/// `‖x_0 − z‖ + ‖x̂_0 − z‖ + ‖A(z)‖ · sqrt((σ_k − σ̂_l)² + τ_k + τ̂_l)`.
#[allow(clippy::too_many_arguments)]
pub fn kobayashi_rhs(
    op: &Operator,
    steps: &StepSequence,
    other_steps: &StepSequence,
    k: usize,
    l: usize,
    x0: &Vector,
    other_x0: &Vector,
    z: &Vector,
) -> Result<f64> {
    if k > steps.len() || l > other_steps.len() {
        return Err(Error::input(format!(
            "indices ({k}, {l}) exceed step sequence lengths ({}, {})",
            steps.len(),
            other_steps.len()
        )));
    }
    for v in [x0, other_x0, z] {
        v.check_dim(op.dim())?;
    }
    let ds = steps.sigma(k) - other_steps.sigma(l);
    let radius = math::sqrt(ds * ds + steps.tau(k) + other_steps.tau(l));
    Ok(op.dist(x0, z) + op.dist(other_x0, z) + op.size(&op.a(z)) * radius)
}

/// Piecewise-linear interpolant `x̃` of an Euler orbit with `x̃(σ_k) = x_k`.
/// Times beyond `σ_N` are clamped to the last point.
pub fn interpolate(orbit: &DiscreteOrbit, steps: &StepSequence, t: f64) -> Vector {
    let sigmas = steps.sigmas();
    if t <= 0.0 {
        return orbit.points[0].clone();
    }
    let n = steps.len();
    if t >= sigmas[n] {
        return orbit.points[n].clone();
    }
    // First index with σ_k > t; the segment is [σ_{k−1}, σ_k].
    let k = sigmas.partition_point(|s| *s <= t);
    let weight = (t - sigmas[k - 1]) / (sigmas[k] - sigmas[k - 1]);
    orbit.points[k - 1].lerp(&orbit.points[k], weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Matrix, Norm};
    use alloc::vec;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_slice(xs).unwrap()
    }

    #[test]
    fn step_sequence_bookkeeping() {
        let s = StepSequence::new(vec![0.5, 1.0, 0.25]).unwrap();
        assert_eq!(s.sigmas(), &[0.0, 0.5, 1.5, 1.75]);
        assert_eq!(s.taus(), &[0.0, 0.25, 1.25, 1.3125]);
        assert!(StepSequence::new(vec![0.5, 0.0]).is_err());
        assert!(StepSequence::new(vec![1.5]).is_err());
        assert_eq!(
            StepSequence::inverse_sqrt(4).steps(),
            &[1.0, 1.0 / math::sqrt(2.0), 1.0 / math::sqrt(3.0), 0.5]
        );
    }

    #[test]
    fn translation_value_iteration() {
        let c = v(&[2.0, -1.0]);
        let op = Operator::translation(c.clone(), Norm::Sup);
        let vi = iterate_vn(&op, 20).unwrap();
        for (n, (big, small)) in vi.orbit.points.iter().zip(&vi.normalized).enumerate().skip(1) {
            assert!(big.dist(&c.scale(n as f64), Norm::Sup) < 1e-12);
            assert!(small.dist(&c, Norm::Sup) < 1e-12);
        }
        assert!(vi.recursion_gap < 1e-12);
    }

    #[test]
    fn rotation_value_iteration_stays_at_origin() {
        let vi = iterate_vn(&Operator::rotation(0.5), 10).unwrap();
        assert!(vi.normalized.iter().all(|x| x.norm(Norm::Euclidean) == 0.0));
    }

    #[test]
    fn discounted_value_examples() {
        let c = v(&[3.0]);
        let op = Operator::translation(c.clone(), Norm::Sup);
        for lambda in [1.0, 0.5, 0.1] {
            let dv = solve_vlambda(&op, lambda, 1e-10).unwrap();
            assert!(dv.value.dist(&c, Norm::Sup) <= 1e-10);
            assert!((dv.unnormalized()[0] - 3.0 / lambda).abs() <= 1e-9 / lambda);
        }
        let rot = Operator::rotation(1.0);
        assert_eq!(solve_vlambda(&rot, 0.3, 1e-12).unwrap().value, Vector::zeros(2));
        assert!(solve_vlambda(&rot, 0.0, 1e-12).is_err());
    }

    #[test]
    fn euler_examples() {
        let c = v(&[1.5]);
        let op = Operator::translation(c.clone(), Norm::Sup);
        let steps = StepSequence::new(vec![0.2, 0.7, 1.0, 0.05]).unwrap();
        let x0 = v(&[-4.0]);
        let orbit = euler_scheme(&op, &x0, &steps).unwrap();
        for (k, x) in orbit.points.iter().enumerate() {
            assert!((x[0] - (-4.0 + steps.sigma(k) * 1.5)).abs() < 1e-12);
        }
        // Unit steps from the origin reproduce value iteration.
        let unit = StepSequence::constant(1.0, 10).unwrap();
        let game_like = Operator::affine(
            Matrix::from_rows(&[vec![0.5, 0.5], vec![0.0, 1.0]]).unwrap(),
            v(&[1.0, -2.0]),
            Norm::Sup,
        )
        .unwrap();
        let euler = euler_scheme(&game_like, &Vector::zeros(2), &unit).unwrap();
        let vi = iterate_vn(&game_like, 10).unwrap();
        for (a, b) in euler.points.iter().zip(&vi.orbit.points) {
            assert!(a.dist(b, Norm::Sup) <= 1e-12);
        }
    }

    #[test]
    fn phi_recursion_closed_form() {
        let c = v(&[2.0]);
        let op = Operator::translation(c, Norm::Sup);
        let lambda = 0.3;
        let orbit = phi_recursion(&op, &[lambda; 15], &Vector::zeros(1)).unwrap();
        for (n, w) in orbit.points.iter().enumerate() {
            let expected = (1.0 - math::powf(1.0 - lambda, n as f64)) * 2.0;
            assert!((w[0] - expected).abs() < 1e-12);
        }
        assert!(phi_recursion(&op, &[0.5, 0.0], &Vector::zeros(1)).is_err());
    }

    #[test]
    fn phi_recursion_with_harmonic_steps_is_vn() {
        let op = Operator::affine(Matrix::rotation(0.3), v(&[1.0, 0.5]), Norm::Euclidean).unwrap();
        let lambdas: Vec<f64> = (1..=30).map(|n| 1.0 / n as f64).collect();
        let orbit = phi_recursion(&op, &lambdas, &Vector::zeros(2)).unwrap();
        let vi = iterate_vn(&op, 30).unwrap();
        for (w, vn) in orbit.points.iter().zip(&vi.normalized) {
            assert!(w.dist(vn, Norm::Euclidean) < 1e-12);
        }
    }

    #[test]
    fn resolvent_examples() {
        let c = v(&[1.0, -2.0]);
        let op = Operator::translation(c.clone(), Norm::Sup);
        let y = v(&[0.5, 0.5]);
        let x = resolvent(&op, 2.0, &y, 1e-13).unwrap();
        assert!(x.dist(&y.add_scaled(2.0, &c), Norm::Sup) < 1e-12);
        let id = Operator::identity(2, Norm::Sup);
        assert_eq!(resolvent(&id, 3.0, &y, 1e-12).unwrap(), y);
        assert!(resolvent(&id, 0.0, &y, 1e-12).is_err());
    }

    #[test]
    fn kobayashi_rhs_examples() {
        let op = Operator::translation(v(&[2.0]), Norm::Sup);
        let s1 = StepSequence::new(vec![0.5, 0.5, 1.0]).unwrap();
        let s2 = StepSequence::new(vec![0.25, 1.0]).unwrap();
        let zero = Vector::zeros(1);
        assert_eq!(kobayashi_rhs(&op, &s1, &s2, 0, 0, &zero, &zero, &zero).unwrap(), 0.0);
        let rhs = kobayashi_rhs(&op, &s1, &s2, 3, 2, &zero, &zero, &zero).unwrap();
        let expected = 2.0 * math::sqrt((2.0f64 - 1.25).powi(2) + 1.5 + 1.0625);
        assert!((rhs - expected).abs() < 1e-12);
        let x0 = v(&[1.0]);
        let same = kobayashi_rhs(&op, &s1, &s1, 2, 2, &x0, &x0, &zero).unwrap();
        assert!((same - (2.0 + 2.0 * math::sqrt(2.0 * s1.tau(2)))).abs() < 1e-12);
        assert!(kobayashi_rhs(&op, &s1, &s2, 4, 0, &zero, &zero, &zero).is_err());
    }

    #[test]
    fn interpolation_hits_nodes() {
        let op = Operator::rotation(0.7);
        let steps = StepSequence::new(vec![0.5, 0.25, 1.0]).unwrap();
        let orbit = euler_scheme(&op, &v(&[1.0, 0.0]), &steps).unwrap();
        for k in 0..=3 {
            assert_eq!(interpolate(&orbit, &steps, steps.sigma(k)), orbit.points[k]);
        }
        let mid = interpolate(&orbit, &steps, 0.625);
        assert!(mid.dist(&orbit.points[1].lerp(&orbit.points[2], 0.5), Norm::Sup) < 1e-15);
    }
}
