//! Evolution equations `U′ = J(U) − U` and `u′ = Φ(λ(t), u) − u`, the
//! parametrizations `λ(t)` and the factor `L(t)`.

use alloc::format;
use alloc::vec::Vec;

use crate::math;
use crate::quadrature::adaptive_simpson;
use crate::{Error, Norm, Operator, Result, Vector};

/// Cap on the total number of RK4 steps spent across refinement levels.
pub const MAX_TOTAL_STEPS: u64 = 1 << 24;
/// Step size of the coarsest refinement level.
pub const INITIAL_STEP: f64 = 0.25;
/// Number of uniform sample intervals used when no checkpoints are given.
pub const DEFAULT_SAMPLES: usize = 100;

/// `ζ(t) = t + ln(1 + t)`.
pub fn zeta(t: f64) -> f64 {
    t + math::ln_1p(t)
}

/// Inverse of [`zeta`] by Newton's method. `ζ` is concave and the start lies
/// below the root, so the iterates increase monotonically.
pub fn zeta_inverse(s: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::input(format!("zeta inverse needs s >= 0, got {s}")));
    }
    let mut t = f64::max(0.0, s - math::ln_1p(s));
    let tol = 1e-12 * f64::max(1.0, s);
    for _ in 0..100 {
        let r = zeta(t) - s;
        if r.abs() <= tol {
            break;
        }
        let next = t - r / (1.0 + 1.0 / (1.0 + t));
        if next == t {
            break;
        }
        t = next;
    }
    Ok(t)
}

/// A path `t ↦ λ(t)` with values in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Parametrization {
    Constant(f64),
    /// `λ(t) = 1 / (2 + ζ⁻¹(t))`.
    InverseTimeZeta,
    /// `λ(t) = (1 + t)^{α−1}` with `α ∈ [0, 1)`.
    PowerAlpha(f64),
    /// Continuous piecewise-linear interpolation of `(t_i, λ_i)`, constant
    /// outside the knot range.
    Table(Vec<(f64, f64)>),
}

impl Parametrization {
    pub fn constant(lambda: f64) -> Result<Self> {
        let p = Parametrization::Constant(lambda);
        p.validate()?;
        Ok(p)
    }

    pub fn power_alpha(alpha: f64) -> Result<Self> {
        let p = Parametrization::PowerAlpha(alpha);
        p.validate()?;
        Ok(p)
    }

    pub fn table(knots: Vec<(f64, f64)>) -> Result<Self> {
        let p = Parametrization::Table(knots);
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Parametrization::Constant(l) if !(*l > 0.0 && *l <= 1.0) => {
                Err(Error::input(format!("constant lambda must lie in (0, 1], got {l}")))
            }
            Parametrization::PowerAlpha(a) if !(*a >= 0.0 && *a < 1.0) => {
                Err(Error::input(format!("alpha must lie in [0, 1), got {a}")))
            }
            Parametrization::Table(knots) => {
                if knots.is_empty() {
                    return Err(Error::input("table parametrization needs at least one knot"));
                }
                for (i, &(t, l)) in knots.iter().enumerate() {
                    if !(t >= 0.0 && t.is_finite()) || !(l > 0.0 && l <= 1.0) {
                        return Err(Error::input(format!("table knot {i} = ({t}, {l}) is invalid")));
                    }
                    if i > 0 && t <= knots[i - 1].0 {
                        return Err(Error::input(format!(
                            "table knot times must increase strictly (knot {i})"
                        )));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Parametrization::Constant(_) => "constant",
            Parametrization::InverseTimeZeta => "inverse_time_zeta",
            Parametrization::PowerAlpha(_) => "power_alpha",
            Parametrization::Table(_) => "table",
        }
    }

    /// Whether `λ` is continuously differentiable on `[0, ∞)`.
    pub fn is_c1(&self) -> bool {
        match self {
            Parametrization::Table(knots) => knots.len() == 1,
            _ => true,
        }
    }

    pub(crate) fn require_c1(&self) -> Result<()> {
        if self.is_c1() {
            Ok(())
        } else {
            Err(Error::input(format!(
                "a continuously differentiable parametrization is required, got {}",
                self.name()
            )))
        }
    }

    pub fn lambda(&self, t: f64) -> f64 {
        self.eval(t).0
    }

    /// `(λ(t), λ′(t))`. Table slopes are taken from the right at knots.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match self {
            Parametrization::Constant(l) => (*l, 0.0),
            Parametrization::PowerAlpha(a) => {
                let l = math::powf(1.0 + t, a - 1.0);
                (l, (a - 1.0) * l / (1.0 + t))
            }
            Parametrization::InverseTimeZeta => {
                let z = zeta_inverse(t.max(0.0)).expect("argument is nonnegative");
                let d = 2.0 + z;
                let dz = 1.0 / (1.0 + 1.0 / (1.0 + z));
                (1.0 / d, -dz / (d * d))
            }
            Parametrization::Table(knots) => {
                let k = knots.partition_point(|(ti, _)| *ti <= t);
                if k == 0 {
                    (knots[0].1, 0.0)
                } else if k == knots.len() {
                    (knots[k - 1].1, 0.0)
                } else {
                    let (t0, l0) = knots[k - 1];
                    let (t1, l1) = knots[k];
                    let slope = (l1 - l0) / (t1 - t0);
                    (l0 + slope * (t - t0), slope)
                }
            }
        }
    }

    /// `∫_0^t λ(s) ds` in closed form.
    pub fn integral(&self, t: f64) -> f64 {
        match self {
            Parametrization::Constant(l) => l * t,
            Parametrization::PowerAlpha(a) if *a == 0.0 => math::ln_1p(t),
            Parametrization::PowerAlpha(a) => (math::powf(1.0 + t, *a) - 1.0) / a,
            Parametrization::InverseTimeZeta => math::ln_1p(zeta_inverse(t.max(0.0)).expect("nonnegative")),
            Parametrization::Table(_) => self.table_integral(t),
        }
    }

    fn table_integral(&self, t: f64) -> f64 {
        let Parametrization::Table(knots) = self else {
            unreachable!()
        };
        let mut acc = 0.0;
        for w in knots.windows(2) {
            let (a, b) = (w[0].0, w[1].0.min(t));
            if b > a {
                acc += 0.5 * (b - a) * (w[0].1 + self.lambda(b));
            }
        }
        // Constant extrapolation on the parts of [0, t] outside the knot span.
        let first = knots[0].0.min(t);
        acc += first * knots[0].1;
        let last = knots[knots.len() - 1].0;
        if t > last {
            acc += (t - last) * knots[knots.len() - 1].1;
        }
        acc
    }
}

/// Sampled solution of an evolution equation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<Vector>,
    /// Richardson difference between the last two refinement levels, as a
    /// running maximum over the samples up to each time.
    pub err_bound: Vec<f64>,
    /// Right-hand side evaluated at each sample.
    pub derivative: Vec<Vector>,
    /// Step size of the accepted refinement level.
    pub step: f64,
    pub norm: Norm,
}

impl Trajectory {
    /// Index of the sample at time `t`, matched to relative precision 1e-12.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.times
            .iter()
            .position(|s| (s - t).abs() <= 1e-12 * f64::max(1.0, t.abs()))
    }

    pub fn point_at(&self, t: f64) -> Option<&Vector> {
        self.index_of(t).map(|i| &self.points[i])
    }

    pub fn final_point(&self) -> &Vector {
        self.points.last().expect("trajectories are never empty")
    }

    pub fn max_err(&self) -> f64 {
        self.err_bound.last().copied().unwrap_or(0.0)
    }
}

/// Uniform grid `0, T/n, …, T`.
pub fn uniform_grid(t_end: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t_end * i as f64 / n as f64).collect()
}

/// `1, 10, 100, …` style grid: `points` values from `t_min` to `t_max`
/// spaced evenly in `ln t`, preceded by 0.
pub fn log_grid(t_min: f64, t_max: f64, points: usize) -> Vec<f64> {
    let mut grid = Vec::with_capacity(points + 1);
    grid.push(0.0);
    if points == 1 {
        grid.push(t_max);
        return grid;
    }
    let (a, b) = (math::ln(t_min), math::ln(t_max));
    for i in 0..points {
        let t = if i + 1 == points {
            t_max
        } else if i == 0 {
            t_min
        } else {
            math::exp(a + (b - a) * i as f64 / (points - 1) as f64)
        };
        grid.push(t);
    }
    grid
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.len() < 2 || times[0] != 0.0 {
        return Err(Error::input("sample grid must start at 0 and contain a positive time"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || !times[times.len() - 1].is_finite() {
        return Err(Error::input("sample grid must be strictly increasing and finite"));
    }
    Ok(())
}

/// Integrates `x′ = f(t, x)` through the sample grid `times` with classical
/// RK4, halving the step until consecutive levels agree to `tol / 2` at every
/// sample. Segment `[t_i, t_{i+1}]` uses `ceil(len / h0) · 2^k` equal steps at
/// level `k`, so every level hits the samples exactly.
pub fn integrate_rk4<F>(rhs: F, x0: &Vector, times: &[f64], tol: f64, norm: Norm) -> Result<Trajectory>
where
    F: Fn(f64, &Vector) -> Vector,
{
    integrate_rk4_capped(rhs, x0, times, tol, norm, MAX_TOTAL_STEPS)
}

/// [`integrate_rk4`] with an explicit budget of total steps.
pub fn integrate_rk4_capped<F>(
    rhs: F,
    x0: &Vector,
    times: &[f64],
    tol: f64,
    norm: Norm,
    max_steps: u64,
) -> Result<Trajectory>
where
    F: Fn(f64, &Vector) -> Vector,
{
    check_grid(times)?;
    if !(tol > 0.0) {
        return Err(Error::input("integration tolerance must be positive"));
    }
    let base: Vec<u64> = times
        .windows(2)
        .map(|w| math::ceil((w[1] - w[0]) / INITIAL_STEP).max(1.0) as u64)
        .collect();
    let base_total: u64 = base.iter().sum();

    let mut spent = 0u64;
    let mut previous: Option<Vec<Vector>> = None;
    let mut level = 0u32;
    loop {
        let factor = 1u64 << level;
        let cost = base_total.saturating_mul(factor);
        if spent.saturating_add(cost) > max_steps {
            return Err(Error::Resource(format!(
                "RK4 refinement exceeded {max_steps} total steps before reaching tol = {tol}"
            )));
        }
        spent += cost;
        let points = rk4_pass(&rhs, x0, times, &base, factor)?;
        if let Some(prev) = previous {
            let diffs: Vec<f64> = points.iter().zip(&prev).map(|(a, b)| a.dist(b, norm)).collect();
            if diffs.iter().all(|d| *d <= 0.5 * tol) {
                let mut err_bound = Vec::with_capacity(diffs.len());
                let mut running: f64 = 0.0;
                for d in diffs {
                    running = running.max(d);
                    err_bound.push(running);
                }
                let derivative = times.iter().zip(&points).map(|(t, x)| rhs(*t, x)).collect();
                return Ok(Trajectory {
                    times: times.to_vec(),
                    points,
                    err_bound,
                    derivative,
                    step: (times[1] - times[0]) / (base[0] * factor) as f64,
                    norm,
                });
            }
        }
        previous = Some(points);
        level += 1;
    }
}

fn rk4_pass<F>(rhs: &F, x0: &Vector, times: &[f64], base: &[u64], factor: u64) -> Result<Vec<Vector>>
where
    F: Fn(f64, &Vector) -> Vector,
{
    let mut points = Vec::with_capacity(times.len());
    points.push(x0.clone());
    let mut x = x0.clone();
    for (seg, w) in times.windows(2).enumerate() {
        let n = base[seg] * factor;
        let h = (w[1] - w[0]) / n as f64;
        for k in 0..n {
            let t = w[0] + h * k as f64;
            let k1 = rhs(t, &x);
            let k2 = rhs(t + 0.5 * h, &x.add_scaled(0.5 * h, &k1));
            let k3 = rhs(t + 0.5 * h, &x.add_scaled(0.5 * h, &k2));
            let k4 = rhs(t + h, &x.add_scaled(h, &k3));
            let incr = &(&k1 + &k4) + &(&k2 + &k3).scale(2.0);
            x = x.add_scaled(h / 6.0, &incr);
        }
        if !x.is_finite() {
            return Err(Error::Internal(format!("non-finite state at t = {}", w[1])));
        }
        points.push(x.clone());
    }
    Ok(points)
}

/// `U′ = J(U) − U`, `U(0) = U0`, sampled on a uniform grid over `[0, T]`.
#[allow(non_snake_case)]
pub fn integrate_U(op: &Operator, u0: &Vector, t_end: f64, tol: f64) -> Result<Trajectory> {
    if !(t_end > 0.0) {
        return Err(Error::input("horizon T must be positive"));
    }
    integrate_U_at(op, u0, &uniform_grid(t_end, DEFAULT_SAMPLES), tol)
}

/// [`integrate_U`] sampled at the given times.
#[allow(non_snake_case)]
pub fn integrate_U_at(op: &Operator, u0: &Vector, times: &[f64], tol: f64) -> Result<Trajectory> {
    u0.check_dim(op.dim())?;
    integrate_rk4(|_, x| &op.j(x) - x, u0, times, tol, op.norm())
}

/// `u′ = Φ(λ(t), u) − u`, sampled on a uniform grid over `[0, T]`.
pub fn integrate_u(op: &Operator, param: &Parametrization, u0: &Vector, t_end: f64, tol: f64) -> Result<Trajectory> {
    if !(t_end > 0.0) {
        return Err(Error::input("horizon T must be positive"));
    }
    integrate_u_at(op, param, u0, &uniform_grid(t_end, DEFAULT_SAMPLES), tol)
}

/// [`integrate_u`] sampled at the given times.
pub fn integrate_u_at(
    op: &Operator,
    param: &Parametrization,
    u0: &Vector,
    times: &[f64],
    tol: f64,
) -> Result<Trajectory> {
    param.validate()?;
    u0.check_dim(op.dim())?;
    integrate_rk4(|t, x| &op.phi(param.lambda(t), x) - x, u0, times, tol, op.norm())
}

/// `∫_a^b (|λ′(s)|/λ(s) − λ(s)) ds`, the exponent of `L(b)/L(a)`.
pub fn log_l_increment(param: &Parametrization, a: f64, b: f64, quad_tol: f64) -> Result<f64> {
    param.require_c1()?;
    if let Parametrization::Constant(l) = param {
        return Ok(-l * (b - a));
    }
    adaptive_simpson(
        |s| {
            let (l, dl) = param.eval(s);
            dl.abs() / l - l
        },
        a,
        b,
        quad_tol,
    )
}

/// `L(t) = exp ∫_0^t (|λ′|/λ − λ)`.
pub fn l_factor(param: &Parametrization, t: f64, quad_tol: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::input("time must be nonnegative"));
    }
    Ok(math::exp(log_l_increment(param, 0.0, t, quad_tol)?))
}

/// Right-hand side of the slow-parametrization estimate
/// `L(t)/λ(t) · [‖u′(0)‖ + (C + C′) ∫_0^t |λ′(s)|/L(s) ds]`
/// with `C` the Lipschitz constant of `Φ` in `λ` and `C′ = ‖J(0)‖`.
///
/// `L(t)/L(s)` is evaluated as one exponential so that the integrand stays of
/// order `|λ′|` even when `L` itself underflows.
pub fn slow_param_bound(op: &Operator, param: &Parametrization, u0: &Vector, t: f64, tol: f64) -> Result<f64> {
    param.validate()?;
    param.require_c1()?;
    u0.check_dim(op.dim())?;
    if !(t >= 0.0) {
        return Err(Error::input("time must be nonnegative"));
    }
    let (lt, _) = param.eval(t);
    let du0 = op.dist(&op.phi(param.lambda(0.0), u0), u0);
    let constant = op.lipschitz_in_lambda() + op.j_at_zero_norm();
    let log_lt = log_l_increment(param, 0.0, t, tol)?;
    let head = math::exp(log_lt) * du0;
    if constant == 0.0 || matches!(param, Parametrization::Constant(_)) {
        return Ok(head / lt);
    }
    let inner_tol = tol * 1e-2;
    let integral = adaptive_simpson(
        |s| {
            let (_, dl) = param.eval(s);
            match log_l_increment(param, s, t, inner_tol) {
                Ok(v) => dl.abs() * math::exp(v),
                Err(_) => f64::NAN,
            }
        },
        0.0,
        t,
        tol,
    )?;
    Ok((head + constant * integral) / lt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Matrix;
    use alloc::vec;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_slice(xs).unwrap()
    }

    #[test]
    fn zeta_values() {
        assert_eq!(zeta(0.0), 0.0);
        assert_eq!(zeta_inverse(0.0).unwrap(), 0.0);
        assert!((zeta(1.0) - (1.0 + core::f64::consts::LN_2)).abs() < 1e-15);
        assert!((zeta_inverse(zeta(5.0)).unwrap() - 5.0).abs() < 1e-10);
        for s in [1e-6, 0.3, 7.0, 1e3, 1e6] {
            assert!((zeta(zeta_inverse(s).unwrap()) - s).abs() <= 1e-12 * s.max(1.0));
        }
        assert!(zeta_inverse(-1.0).is_err());
    }

    #[test]
    fn parametrization_values() {
        assert_eq!(Parametrization::constant(0.3).unwrap().eval(7.0), (0.3, 0.0));
        assert!(Parametrization::constant(0.0).is_err());
        assert!(Parametrization::power_alpha(1.0).is_err());
        let p = Parametrization::power_alpha(0.5).unwrap();
        let (l, dl) = p.eval(3.0);
        assert!((l - 0.5).abs() < 1e-15);
        assert!((dl - (-0.5 * math::powf(4.0, -1.5))).abs() < 1e-15);
        let z = Parametrization::InverseTimeZeta;
        assert_eq!(z.lambda(0.0), 0.5);
        let t = 1e4;
        assert!((z.lambda(t) * t - 1.0).abs() < 0.05);
    }

    #[test]
    fn inverse_time_zeta_derivative_matches_difference_quotient() {
        let z = Parametrization::InverseTimeZeta;
        for t in [0.5, 3.0, 40.0] {
            let h = 1e-5;
            let fd = (z.lambda(t + h) - z.lambda(t - h)) / (2.0 * h);
            assert!((z.eval(t).1 - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn integrals_match_quadrature() {
        let params = [
            Parametrization::Constant(0.4),
            Parametrization::PowerAlpha(0.0),
            Parametrization::PowerAlpha(0.5),
            Parametrization::InverseTimeZeta,
            Parametrization::table(vec![(1.0, 1.0), (3.0, 0.5), (4.0, 0.25)]).unwrap(),
        ];
        for p in &params {
            for t in [0.5, 2.0, 3.5, 10.0] {
                let q = adaptive_simpson(|s| p.lambda(s), 0.0, t, 1e-11).unwrap();
                assert!((p.integral(t) - q).abs() < 1e-8, "{} at {t}", p.name());
            }
        }
    }

    #[test]
    fn table_rules() {
        assert!(Parametrization::table(vec![(0.0, 1.0), (0.0, 0.5)]).is_err());
        assert!(Parametrization::table(vec![(0.0, 1.5)]).is_err());
        let p = Parametrization::table(vec![(0.0, 1.0), (2.0, 0.5)]).unwrap();
        assert!(!p.is_c1());
        assert_eq!(p.eval(1.0), (0.75, -0.25));
        assert_eq!(p.eval(2.0), (0.5, 0.0));
        assert!(l_factor(&p, 1.0, 1e-8).is_err());
    }

    #[test]
    fn l_factor_closed_forms() {
        let c = Parametrization::Constant(0.3);
        assert!((l_factor(&c, 4.0, 1e-10).unwrap() - math::exp(-1.2)).abs() < 1e-15);
        assert_eq!(l_factor(&c, 0.0, 1e-10).unwrap(), 1.0);
        let p = Parametrization::PowerAlpha(0.5);
        for t in [1.0, 10.0, 100.0] {
            let closed = (p.lambda(0.0) / p.lambda(t)) * math::exp(-p.integral(t));
            let l = l_factor(&p, t, 1e-11).unwrap();
            assert!((l / closed - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn translation_trajectory_is_linear() {
        let op = Operator::translation(v(&[1.0, -0.5]), Norm::Sup);
        let u0 = v(&[0.25, 2.0]);
        let traj = integrate_U(&op, &u0, 100.0, 1e-10).unwrap();
        for (t, x) in traj.times.iter().zip(&traj.points) {
            assert!(x.dist(&v(&[0.25 + t, 2.0 - 0.5 * t]), Norm::Sup) <= 1e-9);
        }
        assert_eq!(traj.times[0], 0.0);
        assert!(traj
            .derivative
            .iter()
            .all(|d| d.dist(&v(&[1.0, -0.5]), Norm::Sup) < 1e-12));
    }

    #[test]
    fn identity_trajectory_is_constant() {
        let op = Operator::identity(3, Norm::Sup);
        let u0 = v(&[1.0, 2.0, 3.0]);
        let traj = integrate_U(&op, &u0, 5.0, 1e-9).unwrap();
        assert!(traj.points.iter().all(|x| *x == u0));
    }

    #[test]
    fn constant_parametrization_closed_form() {
        let c = 2.0;
        let op = Operator::translation(v(&[c]), Norm::Sup);
        let lambda = 0.25;
        let p = Parametrization::Constant(lambda);
        let traj = integrate_u(&op, &p, &v(&[0.0]), 20.0, 1e-10).unwrap();
        for (t, x) in traj.times.iter().zip(&traj.points) {
            let exact = c - c * math::exp(-lambda * t);
            assert!((x[0] - exact).abs() <= 1e-9);
        }
    }

    #[test]
    fn rotation_error_bound_dominates_true_error() {
        let theta = 0.8;
        let op = Operator::rotation(theta);
        let u0 = v(&[1.0, 0.0]);
        let traj = integrate_U_at(&op, &u0, &uniform_grid(10.0, 10), 1e-6).unwrap();
        for (i, (t, x)) in traj.times.iter().zip(&traj.points).enumerate() {
            let decay = math::exp(-t * (1.0 - math::cos(theta)));
            let exact = Matrix::rotation(t * math::sin(theta)).mul_vec(&u0).scale(decay);
            assert!(x.dist(&exact, Norm::Euclidean) <= traj.err_bound[i] + 1e-12);
        }
    }

    #[test]
    fn step_cap_is_a_resource_error() {
        let op = Operator::rotation(1.0);
        let rhs = |_: f64, x: &Vector| &op.j(x) - x;
        let err = integrate_rk4_capped(
            rhs,
            &v(&[1.0, 0.0]),
            &uniform_grid(10.0, 10),
            1e-14,
            Norm::Euclidean,
            2000,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn grids() {
        assert_eq!(log_grid(1.0, 100.0, 3), vec![0.0, 1.0, 10.000000000000002, 100.0]);
        assert!(integrate_U_at(&Operator::rotation(1.0), &v(&[1.0, 0.0]), &[0.0, 2.0, 1.0], 1e-6).is_err());
    }

    #[test]
    fn slow_param_bound_simple_cases() {
        let op = Operator::translation(v(&[1.0]), Norm::Sup);
        let u0 = v(&[3.0]);
        let c = Parametrization::Constant(0.5);
        let du0 = (0.5f64 * 1.0 + 0.5 * 3.0 - 3.0).abs();
        let b = slow_param_bound(&op, &c, &u0, 4.0, 1e-10).unwrap();
        assert!((b - math::exp(-2.0) / 0.5 * du0).abs() < 1e-14);
        let p = Parametrization::PowerAlpha(0.5);
        let b0 = slow_param_bound(&op, &p, &u0, 0.0, 1e-10).unwrap();
        assert!((b0 - op.dist(&op.phi(1.0, &u0), &u0)).abs() < 1e-14);
        let b100 = slow_param_bound(&op, &p, &u0, 100.0, 1e-9).unwrap();
        assert!(b100.is_finite() && b100 > 0.0);
    }
}
