//! Checks on `U′ = J(U) − U` and its explicit Euler discretizations.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{label_n, label_t, params, BoundReport, Ctx, Worst, BASE_BUDGET};
use crate::continuous::{integrate_U_at, uniform_grid, Trajectory};
use crate::discrete::{euler_power, euler_scheme, interpolate, iterate_vn, kobayashi_rhs, StepSequence};
use crate::rng::SplitMix64;
use crate::{math, Result, Vector};

const CONTRACTION_SAMPLES: usize = 200;
const CHERNOFF_GRID: usize = 20;
const KOBAYASHI_GRID: usize = 10;
const INTERPOLATION_SAMPLES: usize = 40;
/// Fixed time for the interpolation refinement study.
pub(crate) const REFINEMENT_TIME: f64 = 10.0;
/// Periodic step profile scaled by `h` in the refinement study.
const STEP_PROFILE: [f64; 8] = [1.0, 0.35, 0.8, 0.5, 0.95, 0.2, 0.65, 0.45];
const REFINEMENT_SCALES: [f64; 4] = [1.0, 0.25, 0.0625, 0.015625];

/// Sorted, deduplicated grid starting at 0.
fn time_grid(mut ts: Vec<f64>) -> Vec<f64> {
    ts.push(0.0);
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * f64::max(1.0, b.abs()));
    ts
}

fn at(traj: &Trajectory, t: f64) -> (&Vector, f64) {
    let i = traj.index_of(t).expect("time is on the sample grid");
    (&traj.points[i], traj.err_bound[i])
}

pub(super) fn solution_contraction(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let t_end = cx.horizon(20.0);
    let grid = uniform_grid(t_end, CONTRACTION_SAMPLES);
    let u = integrate_U_at(op, &cx.start(0), &grid, cx.settings.ode_tol)?;
    let v = integrate_U_at(op, &cx.start(1), &grid, cx.settings.ode_tol)?;
    let dists: Vec<f64> = u.points.iter().zip(&v.points).map(|(a, b)| op.dist(a, b)).collect();
    let budgets: Vec<f64> = (0..grid.len())
        .map(|i| {
            let prev = i.saturating_sub(1);
            BASE_BUDGET + u.err_bound[i] + v.err_bound[i] + u.err_bound[prev] + v.err_bound[prev]
        })
        .collect();
    Ok(alloc::vec![cx.nonincreasing("grid", &grid, &dists, &budgets)])
}

pub(super) fn derivative_decay(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let t_end = cx.horizon(20.0);
    let grid = uniform_grid(t_end, CONTRACTION_SAMPLES);
    let u = integrate_U_at(op, &cx.start(0), &grid, cx.settings.ode_tol)?;
    let speeds: Vec<f64> = u.derivative.iter().map(|d| op.size(d)).collect();
    // The right-hand side is 2-Lipschitz.
    let budgets: Vec<f64> = (0..grid.len())
        .map(|i| BASE_BUDGET + 2.0 * (u.err_bound[i] + u.err_bound[i.saturating_sub(1)]))
        .collect();
    Ok(alloc::vec![cx.nonincreasing("grid", &grid, &speeds, &budgets)])
}

/// `‖U(t) − Jⁿ(U0)‖ ≤ ‖U′(0)‖ sqrt(t + (n − t)²)` on a 20×20 grid of `(t, n)`.
pub(super) fn chernoff(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let t_end = cx.horizon(50.0);
    let u0 = cx.start(0);
    let times: Vec<f64> = (1..=CHERNOFF_GRID)
        .map(|i| t_end * i as f64 / CHERNOFF_GRID as f64)
        .collect();
    let ns: Vec<usize> = (1..=CHERNOFF_GRID)
        .map(|j| math::round(t_end * j as f64 / CHERNOFF_GRID as f64) as usize)
        .collect();
    let u = integrate_U_at(op, &u0, &time_grid(times.clone()), cx.settings.ode_tol)?;
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let mut powers = Vec::with_capacity(n_max + 1);
    powers.push(u0.clone());
    for k in 1..=n_max {
        powers.push(op.apply_j(&powers[k - 1])?);
    }
    let speed0 = op.size(&u.derivative[0]);
    let mut worst = Worst::new();
    for &t in &times {
        let (ut, err) = at(&u, t);
        for &n in &ns {
            let lhs = op.dist(ut, &powers[n]);
            let dn = n as f64 - t;
            let rhs = speed0 * math::sqrt(t + dn * dn);
            worst.consider(lhs, rhs, BASE_BUDGET + err, || params(&[("t", t), ("n", n as f64)]));
        }
    }
    Ok(alloc::vec![worst.finish(cx, "grid")])
}

/// `‖U(n)/n − v_n‖ ≤ ‖J(0)‖/√n` with `U(0) = 0`.
pub(super) fn convvn(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let n_end = cx.steps_horizon(1000);
    let ns = cx.log_indices(n_end);
    let times: Vec<f64> = ns.iter().map(|n| *n as f64).collect();
    let u = integrate_U_at(op, &Vector::zeros(op.dim()), &time_grid(times), cx.settings.ode_tol)?;
    let vi = iterate_vn(op, n_end)?;
    let j0 = op.j_at_zero_norm();
    Ok(ns
        .iter()
        .map(|&n| {
            let nf = n as f64;
            let (un, err) = at(&u, nf);
            let lhs = op.dist(&un.divide(nf), &vi.normalized[n]);
            cx.report(
                label_n(n),
                lhs,
                j0 / math::sqrt(nf),
                BASE_BUDGET + err / nf,
                params(&[("n", nf)]),
            )
        })
        .collect())
}

/// `‖U_T^m(U0) − U(T)‖ ≤ ‖A(U0)‖ T/√m` for four values of `m ≥ T`, plus
/// monotonicity of the measured error in `m`.
pub(super) fn expo(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let t_end = cx.horizon(5.0);
    let u0 = cx.start(0);
    let u = integrate_U_at(op, &u0, &[0.0, t_end], cx.settings.ode_tol)?;
    let (ut, err) = at(&u, t_end);
    let a0 = op.size(&op.apply_a(&u0)?);
    let m0 = (5 * math::ceil(t_end) as usize).max(25);
    let ms: Vec<usize> = (0..4).map(|k| m0 << (2 * k)).collect();
    let mut reports = Vec::with_capacity(ms.len() + 1);
    let mut errors = Vec::with_capacity(ms.len());
    for &m in &ms {
        let lhs = op.dist(&euler_power(op, &u0, t_end, m)?, ut);
        errors.push(lhs);
        let rhs = a0 * t_end / math::sqrt(m as f64);
        reports.push(cx.report(
            format!("m={m}"),
            lhs,
            rhs,
            BASE_BUDGET + err,
            params(&[("m", m as f64), ("T", t_end)]),
        ));
    }
    let ms_f: Vec<f64> = ms.iter().map(|m| *m as f64).collect();
    let budgets = alloc::vec![BASE_BUDGET + 2.0 * err; ms.len()];
    let mut mono = cx.nonincreasing("error_vs_m", &ms_f, &errors, &budgets);
    mono.context.params.extend(super::series("error", &ms_f, &errors));
    reports.push(mono);
    Ok(reports)
}

fn random_steps(rng: &mut SplitMix64, max_len: usize) -> StepSequence {
    let len = rng.range_inclusive(1, max_len);
    StepSequence::new((0..len).map(|_| rng.next_open_unit()).collect()).expect("steps lie in (0, 1]")
}

/// `k_i = round(i · len / (points − 1))`.
fn index_grid(len: usize, points: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..points)
        .map(|i| math::round(i as f64 * len as f64 / (points - 1) as f64) as usize)
        .collect();
    out.dedup();
    out
}

/// The distance bound between two Euler schemes, on random pairs of step
/// sequences (or consecutive pairs of the scenario's sequences) with `z = x0`.
pub(super) fn kobayashi(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let max_len = cx.steps_horizon(200);
    let mut rng = cx.rng(29);
    let mut cases: Vec<(StepSequence, StepSequence, Vector, Vector)> = Vec::new();
    if let Some(steps) = &cx.scenario.steps {
        for pair in steps.windows(2) {
            cases.push((pair[0].clone(), pair[1].clone(), cx.start(0), cx.start(1)));
        }
        if steps.len() == 1 {
            cases.push((steps[0].clone(), steps[0].clone(), cx.start(0), cx.start(1)));
        }
    } else {
        for _ in 0..cx.settings.pairs {
            let s1 = random_steps(&mut rng, max_len);
            let s2 = random_steps(&mut rng, max_len);
            let x0 = Vector::random_in_ball(&mut rng, op.dim(), 1.0, op.norm());
            let y0 = Vector::random_in_ball(&mut rng, op.dim(), 1.0, op.norm());
            cases.push((s1, s2, x0, y0));
        }
    }
    let mut worst = Worst::new();
    for (case, (s1, s2, x0, y0)) in cases.iter().enumerate() {
        let o1 = euler_scheme(op, x0, s1)?;
        let o2 = euler_scheme(op, y0, s2)?;
        for &k in &index_grid(s1.len(), KOBAYASHI_GRID) {
            for &l in &index_grid(s2.len(), KOBAYASHI_GRID) {
                let lhs = op.dist(&o1.points[k], &o2.points[l]);
                let rhs = kobayashi_rhs(op, s1, s2, k, l, x0, y0, x0)?;
                worst.consider(lhs, rhs, BASE_BUDGET, || {
                    params(&[("pair", case as f64), ("k", k as f64), ("l", l as f64)])
                });
            }
        }
    }
    let mut report = worst.finish(cx, "pairs");
    report.context.params.push(("pairs".into(), cases.len() as f64));
    Ok(alloc::vec![report])
}

fn named_sequences(cx: &Ctx<'_>) -> Vec<(String, StepSequence)> {
    match &cx.scenario.steps {
        Some(steps) => steps
            .iter()
            .enumerate()
            .map(|(i, s)| (format!("steps[{i}]"), s.clone()))
            .collect(),
        None => {
            let n = cx.steps_horizon(1000);
            alloc::vec![
                ("harmonic".into(), StepSequence::harmonic(n)),
                ("inverse_sqrt".into(), StepSequence::inverse_sqrt(n)),
            ]
        }
    }
}

/// `‖x_k − U(t)‖ ≤ ‖x0 − U0‖ + ‖A(U0)‖ sqrt((σ_k − t)² + τ_k)` at `t = σ_k`
/// and `t = σ_k/2`; with `normalized`, the divided form at `t = σ_k`.
pub(super) fn euler_vs_ode(cx: &Ctx<'_>, normalized: bool) -> Result<Vec<BoundReport>> {
    let op = cx.op();
    let u0 = cx.start(0);
    let x0 = cx
        .scenario
        .starts
        .as_ref()
        .and_then(|s| s.get(1))
        .cloned()
        .unwrap_or_else(|| u0.clone());
    let a0 = op.size(&op.apply_a(&u0)?);
    let offset = op.dist(&x0, &u0);
    let mut reports = Vec::new();
    for (name, steps) in named_sequences(cx) {
        let ks = cx.log_indices(steps.len());
        let orbit = euler_scheme(op, &x0, &steps)?;
        let mut pairs: Vec<(usize, f64)> = Vec::new();
        for &k in &ks {
            pairs.push((k, steps.sigma(k)));
            if !normalized {
                pairs.push((k, 0.5 * steps.sigma(k)));
            }
        }
        let u = integrate_U_at(
            op,
            &u0,
            &time_grid(pairs.iter().map(|p| p.1).collect()),
            cx.settings.ode_tol,
        )?;
        for (k, t) in pairs {
            let (ut, err) = at(&u, t);
            let dist = op.dist(&orbit.points[k], ut);
            let p = params(&[
                ("k", k as f64),
                ("t", t),
                ("sigma_k", steps.sigma(k)),
                ("tau_k", steps.tau(k)),
            ]);
            let label = format!("{name} k={k} {}", label_t(t));
            reports.push(if normalized {
                let rhs = (offset + a0 * math::sqrt(t)) / t;
                cx.report(label, dist / t, rhs, BASE_BUDGET + err / t, p)
            } else {
                let ds = steps.sigma(k) - t;
                let rhs = offset + a0 * math::sqrt(ds * ds + steps.tau(k));
                cx.report(label, dist, rhs, BASE_BUDGET + err, p)
            });
        }
    }
    Ok(reports)
}

/// Worst `‖x̃(t′) − U(t′)‖` over a uniform grid of `[0, σ_N]` and its bound.
fn interpolation_case(cx: &Ctx<'_>, u0: &Vector, steps: &StepSequence) -> Result<(f64, f64, f64, f64)> {
    let op = cx.op();
    let t = steps.sigma(steps.len());
    let grid = uniform_grid(t, INTERPOLATION_SAMPLES);
    let u = integrate_U_at(op, u0, &grid, cx.settings.ode_tol)?;
    let orbit = euler_scheme(op, u0, steps)?;
    let mut gap: f64 = 0.0;
    for (tp, up) in grid.iter().zip(&u.points) {
        gap = gap.max(op.dist(&interpolate(&orbit, steps, *tp), up));
    }
    let a0 = op.size(&op.apply_a(u0)?);
    let rhs = a0 * (1.0 + (1.0 + core::f64::consts::SQRT_2) * t) * math::sqrt(steps.max_step());
    Ok((gap, rhs, u.max_err(), t))
}

/// Steps `h · profile(i)` with the last one trimmed so that `σ_n = t`.
pub(crate) fn profile_steps(h: f64, t: f64) -> StepSequence {
    let mut steps = Vec::new();
    let mut sigma = 0.0;
    let mut i = 0;
    while sigma < t {
        let mut s = h * STEP_PROFILE[i % STEP_PROFILE.len()];
        if sigma + s >= t {
            s = t - sigma;
        }
        if s <= 1e-12 * t {
            break;
        }
        steps.push(s);
        sigma += s;
        i += 1;
    }
    StepSequence::new(steps).expect("profile steps lie in (0, 1]")
}

/// The interpolant bound for each step sequence (with `x0 = U0`), then a
/// refinement study at a fixed time where the largest step is quartered
/// three times; the measured gap must not grow.
pub(super) fn interpolation(cx: &Ctx<'_>) -> Result<Vec<BoundReport>> {
    let u0 = cx.start(0);
    let mut reports = Vec::new();
    for (name, steps) in named_sequences(cx) {
        let (gap, rhs, err, t) = interpolation_case(cx, &u0, &steps)?;
        reports.push(cx.report(
            name,
            gap,
            rhs,
            BASE_BUDGET + err,
            params(&[("t", t), ("max_step", steps.max_step())]),
        ));
    }
    let mut gaps = Vec::new();
    let mut errs: f64 = 0.0;
    for h in REFINEMENT_SCALES {
        let steps = profile_steps(h, REFINEMENT_TIME);
        let (gap, rhs, err, t) = interpolation_case(cx, &u0, &steps)?;
        errs = errs.max(err);
        gaps.push(gap);
        reports.push(cx.report(
            format!("refine h={h}"),
            gap,
            rhs,
            BASE_BUDGET + err,
            params(&[("t", t), ("max_step", steps.max_step()), ("steps", steps.len() as f64)]),
        ));
    }
    let budgets = alloc::vec![BASE_BUDGET + 2.0 * errs; gaps.len()];
    let mut mono = cx.nonincreasing("refinement", &REFINEMENT_SCALES, &gaps, &budgets);
    mono.context
        .params
        .extend(super::series("gap", &REFINEMENT_SCALES, &gaps));
    reports.push(mono);
    Ok(reports)
}
