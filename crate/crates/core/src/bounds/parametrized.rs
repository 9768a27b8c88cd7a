//! Checks on `u′ = Φ(λ(t), u) − u`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{label_n, label_t, params, series, BoundReport, Ctx, BASE_BUDGET};
use crate::continuous::{
    integrate_U_at, integrate_u_at, slow_param_bound, uniform_grid, zeta_inverse, Parametrization, Trajectory,
};
use crate::discrete::{iterate_vn, solve_vlambda};
use crate::quadrature::adaptive_simpson;
use crate::{math, Error, Operator, OperatorKind, Result, Vector};

const TWO_PARAM_SAMPLES: usize = 1000;

fn with_zero(mut ts: Vec<f64>) -> Vec<f64> {
    ts.insert(0, 0.0);
    ts
}

/// `‖u(t) − v_{λ(t)}‖` at sample `i`, with `v_{λ(t)}` certified to `tol`.
fn gap_at(op: &Operator, param: &Parametrization, traj: &Trajectory, i: usize, tol: f64) -> Result<f64> {
    let v = solve_vlambda(op, param.lambda(traj.times[i]), tol)?;
    Ok(op.dist(&traj.points[i], &v.value))
}

/// `‖u(t) − v_{λ(t)}‖ ≤ ‖u′(t)‖ / λ(t)` pointwise.
pub(super) fn stationarity_gap(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let param = cx.param_or(Parametrization::PowerAlpha(0.5));
    let s = cx.settings;
    let grid = with_zero(cx.log_times(cx.horizon(100.0)));
    let u = integrate_u_at(op, &param, &cx.start(0), &grid, s.ode_tol)?;
    (0..grid.len())
        .map(|i| {
            let t = grid[i];
            let lambda = param.lambda(t);
            let lhs = gap_at(op, &param, &u, i, s.vlambda_tol)?;
            let rhs = op.size(&u.derivative[i]) / lambda;
            let err = u.err_bound[i];
            let budget = BASE_BUDGET + s.vlambda_tol + err + 2.0 * err / lambda;
            Ok(cx.report(label_t(t), lhs, rhs, budget, params(&[("t", t), ("lambda", lambda)])))
        })
        .collect()
}

/// Constant `λ`: `‖u′(t)‖ ≤ ‖u′(0)‖ e^{−λt}` and
/// `‖u(t) − v_λ‖ ≤ ‖u′(0)‖ e^{−λt}/λ` at `t ∈ {1, 5, 10, 20}` and the horizon,
/// plus decay of the gap over the whole horizon.
pub(super) fn constant_decay(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let s = cx.settings;
    let param = cx.param_or(Parametrization::Constant(0.5));
    let Parametrization::Constant(lambda) = param else {
        return Err(Error::input(format!(
            "constant_decay needs a constant parametrization, got {}",
            param.name()
        )));
    };
    param.validate()?;
    let t_end = cx.horizon(f64::max(20.0, 5.0 / lambda));
    let mut times: Vec<f64> = [1.0, 5.0, 10.0, 20.0].into_iter().filter(|t| *t < t_end).collect();
    times.push(t_end);
    let grid = with_zero(times);
    let u = integrate_u_at(op, &param, &cx.start(0), &grid, s.ode_tol)?;
    let v = solve_vlambda(op, lambda, s.vlambda_tol)?;
    let speed0 = op.size(&u.derivative[0]);
    let mut reports = Vec::new();
    let mut gaps = Vec::with_capacity(grid.len());
    for (i, &t) in grid.iter().enumerate() {
        let err = u.err_bound[i];
        let decay = math::exp(-lambda * t);
        let gap = op.dist(&u.points[i], &v.value);
        gaps.push(gap);
        if i == 0 {
            continue;
        }
        let p = params(&[("t", t), ("lambda", lambda)]);
        reports.push(cx.report(
            format!("derivative {}", label_t(t)),
            op.size(&u.derivative[i]),
            speed0 * decay,
            BASE_BUDGET + 2.0 * (err + u.err_bound[0]),
            p.clone(),
        ));
        reports.push(cx.report(
            format!("gap {}", label_t(t)),
            gap,
            speed0 * decay / lambda,
            BASE_BUDGET + err + s.vlambda_tol,
            p,
        ));
    }
    let mut p = series("gap", &grid, &gaps);
    p.push(("lambda".into(), lambda));
    reports.push(cx.decay(
        format!("decay 0..{}", label_t(t_end)),
        gaps[0],
        gaps[gaps.len() - 1],
        BASE_BUDGET + u.max_err() + 2.0 * s.vlambda_tol,
        p,
    ));
    Ok(reports)
}

/// `‖u(t) − v(t)‖ ≤ ‖u(0) − v(0)‖ e^{−∫λ}` and decay of the difference.
pub(super) fn initial_independence(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let s = cx.settings;
    let param = cx.param_or(Parametrization::PowerAlpha(0.5));
    let t_end = cx.horizon(100.0);
    let grid = with_zero(cx.log_times(t_end));
    let (u0, v0) = (cx.start(0), cx.start(1));
    let u = integrate_u_at(op, &param, &u0, &grid, s.ode_tol)?;
    let v = integrate_u_at(op, &param, &v0, &grid, s.ode_tol)?;
    let d0 = op.dist(&u0, &v0);
    let mut reports = Vec::new();
    let mut dists = Vec::new();
    for (i, &t) in grid.iter().enumerate() {
        let lhs = op.dist(&u.points[i], &v.points[i]);
        dists.push(lhs);
        let rhs = d0 * math::exp(-param.integral(t));
        let budget = BASE_BUDGET + u.err_bound[i] + v.err_bound[i];
        reports.push(cx.report(label_t(t), lhs, rhs, budget, params(&[("t", t)])));
    }
    // Every supported parametrization has a divergent integral, so decay is
    // asserted unconditionally.
    let budget = BASE_BUDGET + u.max_err() + v.max_err();
    let p = params(&[("integral_lambda", param.integral(t_end))]);
    reports.push(cx.decay(
        format!("decay {}..{}", label_t(grid[1]), label_t(t_end)),
        dists[1],
        dists[dists.len() - 1],
        budget,
        p,
    ));
    Ok(reports)
}

/// With `λ(t) = 1/(2 + ζ⁻¹(t))` and `w(0) = U0`, `‖w(n) − v_n‖ → 0`; also
/// checks the time change `w(s) = U(ζ⁻¹(s)) / (1 + ζ⁻¹(s))`.
pub(super) fn wn_tracks_vn(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let s = cx.settings;
    let param = Parametrization::InverseTimeZeta;
    let n_end = cx.steps_horizon(1000);
    let ns = cx.log_indices(n_end);
    let times: Vec<f64> = ns.iter().map(|n| *n as f64).collect();
    let u0 = cx
        .scenario
        .starts
        .as_ref()
        .and_then(|s| s.first())
        .cloned()
        .unwrap_or_else(|| Vector::zeros(op.dim()));
    let w = integrate_u_at(op, &param, &u0, &with_zero(times.clone()), s.ode_tol)?;
    let vi = iterate_vn(op, n_end)?;
    let gaps: Vec<f64> = ns
        .iter()
        .enumerate()
        .map(|(i, &n)| op.dist(&w.points[i + 1], &vi.normalized[n]))
        .collect();

    let zs = times.iter().map(|t| zeta_inverse(*t)).collect::<Result<Vec<_>>>()?;
    let big_u = integrate_U_at(op, &u0, &with_zero(zs.clone()), s.ode_tol)?;
    let mut worst = super::Worst::new();
    for (i, z) in zs.iter().enumerate() {
        let rescaled = big_u.points[i + 1].divide(1.0 + z);
        let lhs = op.dist(&w.points[i + 1], &rescaled);
        let budget = BASE_BUDGET + w.err_bound[i + 1] + big_u.err_bound[i + 1] / (1.0 + z);
        worst.consider(lhs, 0.0, budget, || params(&[("s", times[i]), ("zeta_inv", *z)]));
    }

    let mut p = series("gap", &times, &gaps);
    p.push(("n_first".into(), times[0]));
    let decay = cx.decay(
        format!("{}..{}", label_n(ns[0]), label_n(n_end)),
        gaps[0],
        gaps[gaps.len() - 1],
        BASE_BUDGET + w.max_err(),
        p,
    );
    Ok(alloc::vec![decay, worst.finish(cx, "time_change")])
}

/// Limit `l` of `U′(t)` when it is known in closed form.
fn certified_derivative_limit(op: &Operator) -> Option<Vector> {
    match op.kind() {
        OperatorKind::Translation(c) => Some(c.clone()),
        OperatorKind::LinearIsometry(_) => Some(Vector::zeros(op.dim())),
        OperatorKind::AffineNonexpansive { matrix, .. } if matrix.operator_norm(op.norm()) < 1.0 - 1e-9 => {
            Some(Vector::zeros(op.dim()))
        }
        _ => None,
    }
}

/// If `U′(t) → l` then `v_n → l` and `v_λ → l`. The premise is certified only
/// for translations (`l = c`), linear isometries and strict contractions
/// (`l = 0`); other operators are skipped.
pub(super) fn convboth(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let Some(l) = certified_derivative_limit(op) else {
        return Ok(alloc::vec![cx.skipped(
            "premise",
            "premise not certified: convergence of U'(t) is not known in closed form for this operator",
        )]);
    };
    let tol = cx.settings.vlambda_tol;
    let n_end = cx.steps_horizon(1000);
    let ns = cx.log_indices(n_end);
    let (first, last) = (ns[0], n_end);
    let vi = iterate_vn(op, n_end)?;
    let vn_gap = |n: usize| op.dist(&vi.normalized[n], &l);
    let vl_gap = |n: usize| solve_vlambda(op, 1.0 / n as f64, tol).map(|v| op.dist(&v.value, &l));
    let limit = params(&[("l_norm", op.size(&l))]);
    Ok(alloc::vec![
        cx.decay(
            format!("v_n {}..{}", label_n(first), label_n(last)),
            vn_gap(first),
            vn_gap(last),
            BASE_BUDGET,
            limit.clone(),
        ),
        cx.decay(
            format!("v_lambda lambda=1/{first}..1/{last}"),
            vl_gap(first)?,
            vl_gap(last)?,
            BASE_BUDGET + 2.0 * tol,
            limit,
        ),
    ])
}

/// `‖u(t) − v_{λ(t)}‖ ≤ slow_param_bound(t)` on a log grid.
pub(super) fn slow_param(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let s = cx.settings;
    let param = cx.param_or(Parametrization::PowerAlpha(0.5));
    param.require_c1()?;
    let u0 = cx.start(0);
    let grid = with_zero(cx.log_times(cx.horizon(1000.0)));
    let u = integrate_u_at(op, &param, &u0, &grid, s.ode_tol)?;
    let constant = op.lipschitz_in_lambda() + op.j_at_zero_norm();
    let speed0 = op.size(&u.derivative[0]);
    (1..grid.len())
        .map(|i| {
            let t = grid[i];
            let lambda = param.lambda(t);
            let lhs = gap_at(op, &param, &u, i, s.vlambda_tol)?;
            let rhs = slow_param_bound(op, &param, &u0, t, s.quad_tol)?;
            let quad = s.quad_tol * (1.0 + speed0 + constant) / lambda;
            let budget = BASE_BUDGET + u.err_bound[i] + s.vlambda_tol + quad;
            Ok(cx.report(label_t(t), lhs, rhs, budget, params(&[("t", t), ("lambda", lambda)])))
        })
        .collect()
}

/// Whether `λ′(t)/λ(t)² → 0` holds for the parametrization.
fn slow_premise(param: &Parametrization) -> bool {
    match param {
        Parametrization::Constant(_) => true,
        Parametrization::PowerAlpha(a) => *a > 0.0,
        Parametrization::InverseTimeZeta | Parametrization::Table(_) => false,
    }
}

/// Decay of `‖u(t) − v_{λ(t)}‖` between `T / horizon_ratio` and `T`.
fn tracking_decay(cx: &Ctx<'_>, param: &Parametrization, label: String) -> Result<BoundReport> {
    let op = cx.op();
    let s = cx.settings;
    let grid = with_zero(cx.log_times(cx.horizon(1000.0)));
    let u = integrate_u_at(op, param, &cx.start(0), &grid, s.ode_tol)?;
    let gaps = (1..grid.len())
        .map(|i| gap_at(op, param, &u, i, s.vlambda_tol))
        .collect::<Result<Vec<_>>>()?;
    let mut p = series("gap", &grid[1..], &gaps);
    p.push(("t_first".into(), grid[1]));
    Ok(cx.decay(
        label,
        gaps[0],
        gaps[gaps.len() - 1],
        BASE_BUDGET + u.max_err() + 2.0 * s.vlambda_tol,
        p,
    ))
}

pub(super) fn convder_decay(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let param = cx.param_or(Parametrization::PowerAlpha(0.5));
    param.require_c1()?;
    if !slow_premise(&param) {
        return Ok(alloc::vec![cx.skipped(
            param.name(),
            "premise not certified: lambda'/lambda^2 does not tend to 0 for this parametrization",
        )]);
    }
    let t_end = cx.horizon(1000.0);
    let label = format!(
        "{} {}..{}",
        param.name(),
        label_t(t_end / cx.settings.horizon_ratio),
        label_t(t_end)
    );
    Ok(alloc::vec![tracking_decay(cx, &param, label)?])
}

/// For `α ∈ (0,1)` the solution with `λ(t) = (1+t)^{α−1}` tracks `v_{λ(t)}`;
/// for `α = 0` it tracks `v_n` at integer times.
pub(super) fn alpha_family(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let s = cx.settings;
    let alpha = match cx.scenario.param {
        Some(Parametrization::PowerAlpha(a)) if a > 0.0 => a,
        _ => 0.5,
    };
    let param = Parametrization::power_alpha(alpha)?;
    let slow = tracking_decay(cx, &param, format!("alpha={alpha} tracks v_lambda"))?;

    let n_end = cx.steps_horizon(1000);
    let ns = cx.log_indices(n_end);
    let times: Vec<f64> = ns.iter().map(|n| *n as f64).collect();
    let u = integrate_u_at(
        op,
        &Parametrization::PowerAlpha(0.0),
        &cx.start(0),
        &with_zero(times.clone()),
        s.ode_tol,
    )?;
    let vi = iterate_vn(op, n_end)?;
    let gaps: Vec<f64> = ns
        .iter()
        .enumerate()
        .map(|(i, &n)| op.dist(&u.points[i + 1], &vi.normalized[n]))
        .collect();
    let harmonic = cx.decay(
        format!("alpha=0 tracks v_n {}..{}", label_n(ns[0]), label_n(n_end)),
        gaps[0],
        gaps[gaps.len() - 1],
        BASE_BUDGET + u.max_err(),
        series("gap", &times, &gaps),
    );
    Ok(alloc::vec![slow, harmonic])
}

/// Solutions for two parametrizations `λ` (for `u`) and `μ` (for `v`):
/// `‖u(t) − v(t)‖ ≤ e^{−∫μ}(‖u0 − v0‖ + ∫(C + ‖u(s)‖)|λ − μ| e^{∫_0^s μ} ds)`,
/// plus decay of the difference. Without scenario parametrizations both
/// standard cases run: equivalent parametrizations and an integrable
/// difference.
pub(super) fn two_param(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let cases: Vec<(String, Parametrization, Parametrization)> = match (&cx.scenario.param, &cx.scenario.second_param) {
        (Some(l), Some(m)) => alloc::vec![("custom".into(), l.clone(), m.clone())],
        _ => alloc::vec![
            (
                "equivalent".into(),
                Parametrization::InverseTimeZeta,
                Parametrization::PowerAlpha(0.0)
            ),
            (
                "integrable".into(),
                Parametrization::Constant(0.5),
                Parametrization::table(alloc::vec![(0.0, 1.0), (10.0, 0.5)])?,
            ),
        ],
    };
    let mut reports = Vec::new();
    for (name, lambda, mu) in cases {
        reports.extend(two_param_case(cx, &name, &lambda, &mu)?);
    }
    Ok(reports)
}

fn two_param_case(
    cx: &Ctx<'_>,
    name: &str,
    lambda: &Parametrization,
    mu: &Parametrization,
) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let s = cx.settings;
    let t_end = cx.horizon(1000.0);
    let checkpoints = cx.log_times(t_end);
    let mut grid = uniform_grid(t_end, TWO_PARAM_SAMPLES);
    grid.extend_from_slice(&checkpoints);
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * f64::max(1.0, b.abs()));

    let (u0, v0) = (cx.start(0), cx.start(1));
    let u = integrate_u_at(op, lambda, &u0, &grid, s.ode_tol)?;
    let v = integrate_u_at(op, mu, &v0, &grid, s.ode_tol)?;
    let c = op.lipschitz_in_lambda();

    // R(t) = e^{−∫_0^t μ} (‖u0 − v0‖ + ∫_0^t (C + M(s)) |λ − μ| e^{∫_0^s μ} ds),
    // accumulated interval by interval; M bounds ‖u‖ on each interval.
    let mut rhs = Vec::with_capacity(grid.len());
    rhs.push(op.dist(&u0, &v0));
    let mut quad_err = 0.0;
    let mut sup_u: f64 = op.size(&u0);
    for i in 1..grid.len() {
        let (a, b) = (grid[i - 1], grid[i]);
        let width = b - a;
        let m_bound = f64::max(op.size(&u.points[i - 1]), op.size(&u.points[i]))
            + width * f64::max(op.size(&u.derivative[i - 1]), op.size(&u.derivative[i]))
            + u.err_bound[i];
        sup_u = sup_u.max(m_bound);
        let ib = mu.integral(b);
        let tol = s.quad_tol * width / t_end;
        let piece = adaptive_simpson(
            |r| (lambda.lambda(r) - mu.lambda(r)).abs() * math::exp(mu.integral(r) - ib),
            a,
            b,
            tol,
        )?;
        quad_err += tol * (c + m_bound);
        let carried = rhs[i - 1] * math::exp(mu.integral(a) - ib);
        rhs.push(carried + (c + m_bound) * piece);
    }

    let mut reports = Vec::new();
    let mut gaps = Vec::new();
    for &t in &checkpoints {
        let i = u.index_of(t).expect("checkpoint is on the grid");
        let lhs = op.dist(&u.points[i], &v.points[i]);
        gaps.push(lhs);
        let budget = BASE_BUDGET + u.err_bound[i] + v.err_bound[i] + quad_err;
        reports.push(cx.report(
            format!("{name} {}", label_t(t)),
            lhs,
            rhs[i],
            budget,
            params(&[("t", t)]),
        ));
    }
    let mut p = params(&[("sup_norm_u", sup_u)]);
    p.extend(series("gap", &checkpoints, &gaps));
    let mut decay = cx.decay(
        format!("{name} decay {}..{}", label_t(checkpoints[0]), label_t(t_end)),
        gaps[0],
        gaps[gaps.len() - 1],
        BASE_BUDGET + u.max_err() + v.max_err(),
        p,
    );
    decay.context.note = Some(format!(
        "lambda={}, mu={}; boundedness of u observed on the finite horizon only",
        lambda.name(),
        mu.name()
    ));
    reports.push(decay);
    Ok(reports)
}
