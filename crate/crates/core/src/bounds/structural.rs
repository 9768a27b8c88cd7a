//! Checks on the operator and the value families: norm bounds, accretivity,
//! hypothesis (H), the Lipschitz-type estimate on `v_λ` and the discrete
//! slowly varying recursion.

use alloc::format;
use alloc::vec::Vec;

use super::{label_n, params, series, BoundReport, Ctx, Worst, BASE_BUDGET};
use crate::discrete::{iterate_vn, phi_recursion, solve_vlambda, StepSequence};
use crate::{math, Result, Vector};

const ACCRETIVITY_LAMBDAS: [f64; 4] = [0.1, 0.5, 1.0, 2.0];
const NORM_BOUND_LAMBDAS: [f64; 5] = [1.0, 0.5, 0.1, 0.01, 0.001];

pub(super) fn norm_bounds(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let n = cx.steps_horizon(1000);
    let bound = op.j_at_zero_norm();
    let vi = iterate_vn(op, n)?;
    let mut worst = Worst::new();
    for (k, v) in vi.normalized.iter().enumerate().skip(1) {
        worst.consider(op.size(v), bound, BASE_BUDGET, || params(&[("n", k as f64)]));
    }
    let mut vn = worst.finish(cx, "v_n");
    vn.context.params.push(("recursion_gap".into(), vi.recursion_gap));

    let tol = cx.settings.vlambda_tol;
    let mut worst = Worst::new();
    for lambda in NORM_BOUND_LAMBDAS {
        let v = solve_vlambda(op, lambda, tol)?;
        worst.consider(op.size(&v.value), bound, BASE_BUDGET + tol, || {
            params(&[("lambda", lambda)])
        });
    }
    Ok(alloc::vec![vn, worst.finish(cx, "v_lambda")])
}

/// Ratio form: `1 ≤ min ‖x − y + λ(A(x) − A(y))‖ / ‖x − y‖`.
pub(super) fn accretivity(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let s = cx.settings;
    ACCRETIVITY_LAMBDAS
        .iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let seed = cx.scenario.seed.wrapping_add(i as u64);
            let pr = cx.op().check_accretive(lambda, s.samples, s.radius, seed)?;
            Ok(cx.report(
                format!("lambda={lambda}"),
                1.0,
                pr.worst_ratio,
                BASE_BUDGET,
                params(&[
                    ("lambda", lambda),
                    ("samples", pr.samples as f64),
                    ("violations", pr.violations as f64),
                ]),
            ))
        })
        .collect()
}

/// `‖Φ(λ,x) − Φ(μ,x)‖ ≤ |λ − μ| (C + ‖x‖)` on sampled `(λ, μ, x)`.
pub(super) fn hypothesis_h(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let c = op.lipschitz_in_lambda();
    let mut rng = cx.rng(17);
    let mut worst = Worst::new();
    for _ in 0..cx.settings.samples {
        let x = Vector::random_in_ball(&mut rng, op.dim(), cx.settings.radius, op.norm());
        let lambda = rng.next_open_unit();
        let mu = rng.next_open_unit();
        let lhs = op.dist(&op.phi(lambda, &x), &op.phi(mu, &x));
        let rhs = (lambda - mu).abs() * (c + op.size(&x));
        worst.consider(lhs, rhs, BASE_BUDGET, || {
            params(&[("lambda", lambda), ("mu", mu), ("C", c)])
        });
    }
    Ok(alloc::vec![worst.finish(cx, "sampled")])
}

/// `λ_i = 10^{−3i/9}`, `i = 0..9`.
pub(crate) fn lipschitz_grid() -> Vec<f64> {
    (0..10).map(|i| math::powf(10.0, -3.0 * i as f64 / 9.0)).collect()
}

/// `‖v_λ − v_μ‖ ≤ |1 − λ/μ| (C + C′)` over all ordered pairs of a grid.
pub(super) fn vlambda_lipschitz(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let tol = cx.settings.vlambda_tol;
    let constant = op.lipschitz_in_lambda() + op.j_at_zero_norm();
    let grid = lipschitz_grid();
    let values = grid
        .iter()
        .map(|&l| solve_vlambda(op, l, tol).map(|v| v.value))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = Worst::new();
    for (i, &lambda) in grid.iter().enumerate() {
        for (j, &mu) in grid.iter().enumerate() {
            if i == j {
                continue;
            }
            let lhs = op.dist(&values[i], &values[j]);
            let rhs = (1.0 - lambda / mu).abs() * constant;
            worst.consider(lhs, rhs, BASE_BUDGET + 2.0 * tol, || {
                params(&[("lambda", lambda), ("mu", mu), ("C_plus_Cprime", constant)])
            });
        }
    }
    Ok(alloc::vec![worst.finish(cx, "grid")])
}

/// `w_n = Φ(λ_n, w_{n−1})` with slowly varying `λ_n → 0` tracks `v_{λ_n}`.
/// Default steps are `λ_n = min(1, n^{−1/2})` and `w_0 = 0`.
pub(super) fn discrete_slow(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let tol = cx.settings.vlambda_tol;
    let steps = match cx.scenario.steps.as_ref().and_then(|s| s.first()) {
        Some(s) => s.clone(),
        None => StepSequence::inverse_sqrt(cx.steps_horizon(10_000)),
    };
    let n_end = steps.len();
    let w0 = cx
        .scenario
        .starts
        .as_ref()
        .and_then(|s| s.first())
        .cloned()
        .unwrap_or_else(|| Vector::zeros(op.dim()));
    let orbit = phi_recursion(op, steps.steps(), &w0)?;
    let ns = cx.log_indices(n_end);
    let mut gaps = Vec::with_capacity(ns.len());
    for &n in &ns {
        let v = solve_vlambda(op, steps.step(n), tol)?;
        gaps.push(op.dist(&orbit.points[n], &v.value));
    }
    let times: Vec<f64> = ns.iter().map(|n| *n as f64).collect();
    let mut p = series("gap", &times, &gaps);
    p.push(("n_first".into(), ns[0] as f64));
    p.push(("n_last".into(), n_end as f64));
    Ok(alloc::vec![cx.decay(
        format!("{}..{}", label_n(ns[0]), label_n(n_end)),
        gaps[0],
        gaps[gaps.len() - 1],
        BASE_BUDGET + 2.0 * tol,
        p,
    )])
}
