use nonexp_core::discrete::{euler_scheme, iterate_vn, kobayashi_rhs, resolvent, solve_vlambda, StepSequence};
use nonexp_core::rng::SplitMix64;
use nonexp_core::{Matrix, Norm, Operator, StochasticGame, Vector};
use proptest::prelude::*;

const DIM: usize = 3;

fn vector() -> impl Strategy<Value = Vector> {
    prop::collection::vec(-10.0..10.0f64, DIM).prop_map(|v| Vector::new(v).unwrap())
}

fn affine(seed: u64, norm: Norm) -> Operator {
    let mut rng = SplitMix64::new(seed);
    let data: Vec<f64> = (0..DIM * DIM).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let m = Matrix::new(DIM, DIM, data).unwrap();
    let scale = 1.0 / m.operator_norm(norm).max(1.0) * (1.0 - 1e-9);
    let m = Matrix::new(DIM, DIM, m.as_slice().iter().map(|a| a * scale).collect()).unwrap();
    let b = Vector::new((0..DIM).map(|_| rng.uniform(-2.0, 2.0)).collect()).unwrap();
    Operator::affine(m, b, norm).unwrap()
}

fn game(seed: u64) -> Operator {
    Operator::shapley(StochasticGame::random(DIM, 2, 3, (-1.0, 1.0), seed).unwrap())
}

/// Translations, affine contractions in both norms and random Shapley
/// operators, all on `R^3`.
fn operator() -> impl Strategy<Value = Operator> {
    (0u8..4, any::<u64>()).prop_map(|(kind, seed)| match kind {
        0 => {
            let mut rng = SplitMix64::new(seed);
            let c = Vector::new((0..DIM).map(|_| rng.uniform(-3.0, 3.0)).collect()).unwrap();
            Operator::translation(c, Norm::Euclidean)
        }
        1 => affine(seed, Norm::Euclidean),
        2 => affine(seed, Norm::Sup),
        _ => game(seed),
    })
}

fn steps() -> impl Strategy<Value = StepSequence> {
    prop::collection::vec(0.01..=1.0f64, 1..40).prop_map(|s| StepSequence::new(s).unwrap())
}

fn slack(x: f64) -> f64 {
    1e-9 * (1.0 + x.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn j_is_nonexpansive(op in operator(), x in vector(), y in vector()) {
        let d = op.dist(&x, &y);
        prop_assert!(op.dist(&op.apply_j(&x).unwrap(), &op.apply_j(&y).unwrap()) <= d + slack(d));
    }

    #[test]
    fn phi_contracts(op in operator(), lambda in 0.001..=1.0f64, x in vector(), y in vector()) {
        let d = op.dist(&x, &y);
        let lhs = op.dist(&op.apply_phi(lambda, &x).unwrap(), &op.apply_phi(lambda, &y).unwrap());
        prop_assert!(lhs <= (1.0 - lambda) * d + slack(d));
    }

    #[test]
    fn a_plus_j_is_identity(op in operator(), x in vector()) {
        let sum = op.apply_a(&x).unwrap().add_scaled(1.0, &op.apply_j(&x).unwrap());
        prop_assert!(op.dist(&sum, &x) <= 1e-12 * (1.0 + op.size(&x)));
    }

    #[test]
    fn shapley_monotone_and_commutes_with_constants(
        seed in any::<u64>(), x in vector(), bump in prop::collection::vec(0.0..5.0f64, DIM), c in -5.0..5.0f64,
    ) {
        let op = game(seed);
        let y = x.add_scaled(1.0, &Vector::new(bump).unwrap());
        let (jx, jy) = (op.apply_j(&x).unwrap(), op.apply_j(&y).unwrap());
        for i in 0..DIM {
            prop_assert!(jx[i] <= jy[i] + 1e-9);
        }
        let shifted = op.apply_j(&x.add_scaled(c, &Vector::constant(DIM, 1.0))).unwrap();
        for i in 0..DIM {
            prop_assert!((shifted[i] - jx[i] - c).abs() <= 1e-9);
        }
    }

    #[test]
    fn euler_orbits_satisfy_kobayashi(op in operator(), s in steps(), t in steps(), x0 in vector(), y0 in vector()) {
        let a = euler_scheme(&op, &x0, &s).unwrap();
        let b = euler_scheme(&op, &y0, &t).unwrap();
        for k in 0..=s.len() {
            for l in 0..=t.len() {
                let lhs = op.dist(&a.points[k], &b.points[l]);
                let rhs = kobayashi_rhs(&op, &s, &t, k, l, &x0, &y0, &x0).unwrap();
                prop_assert!(lhs <= rhs + slack(rhs), "k={k} l={l} lhs={lhs} rhs={rhs}");
            }
        }
    }

    #[test]
    fn euler_orbits_are_nonexpansive_in_start(op in operator(), s in steps(), x0 in vector(), y0 in vector()) {
        let d = op.dist(&x0, &y0);
        let a = euler_scheme(&op, &x0, &s).unwrap();
        let b = euler_scheme(&op, &y0, &s).unwrap();
        prop_assert!(op.dist(a.last(), b.last()) <= d + slack(d));
    }

    #[test]
    fn resolvent_solves_its_equation(op in operator(), lambda in 0.01..10.0f64, y in vector()) {
        let x = resolvent(&op, lambda, &y, 1e-12).unwrap();
        let residual = x.scale(1.0 + lambda).add_scaled(-lambda, &op.apply_j(&x).unwrap());
        prop_assert!(op.dist(&residual, &y) <= 1e-9 * (1.0 + op.size(&y)));
    }

    #[test]
    fn value_iteration_norm_bound(op in operator(), n in 1usize..200) {
        let vi = iterate_vn(&op, n).unwrap();
        let bound = op.j_at_zero_norm();
        prop_assert!(op.size(&vi.normalized[n]) <= bound + slack(bound));
    }

    #[test]
    fn discounted_value_is_a_fixed_point(op in operator(), lambda in 0.05..=1.0f64) {
        let v = solve_vlambda(&op, lambda, 1e-11).unwrap();
        let image = op.apply_phi(lambda, &v.value).unwrap();
        prop_assert!(op.dist(&image, &v.value) <= 1e-10);
        prop_assert!(op.size(&v.value) <= op.j_at_zero_norm() + 1e-10);
    }
}
