use nonexp_core::rng::SplitMix64;
use nonexp_core::shapley::matrix_game_value;
use nonexp_core::Matrix;

const GRID: usize = 200;

fn simplex_grid(dim: usize) -> Vec<Vec<f64>> {
    fn rec(dim: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == dim - 1 {
            cur.push(left);
            out.push(cur.iter().map(|k| *k as f64 / GRID as f64).collect());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(dim, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, GRID, &mut Vec::new(), &mut out);
    out
}

/// Best guaranteed payoffs over grid strategies: a lower and an upper bound
/// on the value.
fn grid_bounds(m: &Matrix) -> (f64, f64) {
    let lo = simplex_grid(m.rows())
        .iter()
        .map(|p| {
            (0..m.cols())
                .map(|j| (0..m.rows()).map(|i| p[i] * m.get(i, j)).sum::<f64>())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = simplex_grid(m.cols())
        .iter()
        .map(|q| {
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| q[j] * m.get(i, j)).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .fold(f64::INFINITY, f64::min);
    (lo, hi)
}

fn random_matrix(rng: &mut SplitMix64, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
    Matrix::new(rows, cols, data).unwrap()
}

/// Value of a 2×2 game: a saddle if one exists, else `(ad − bc)/(a + d − b − c)`.
fn value_2x2(m: &Matrix) -> f64 {
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let lower = f64::max(a.min(b), c.min(d));
    let upper = f64::min(a.max(c), b.max(d));
    if lower == upper {
        lower
    } else {
        (a * d - b * c) / (a + d - b - c)
    }
}

#[test]
fn agrees_with_grid_search() {
    let mut rng = SplitMix64::new(2024);
    for case in 0..20 {
        let n = if case % 2 == 0 { 2 } else { 3 };
        let m = random_matrix(&mut rng, n, n);
        let sol = matrix_game_value(&m);
        let (lo, hi) = grid_bounds(&m);
        assert!(
            lo <= sol.value + 1e-9 && sol.value <= hi + 1e-9,
            "case {case}: {lo} {} {hi}",
            sol.value
        );
        assert!(hi - lo < 2e-2, "case {case}: grid too coarse");
        assert!(sol.duality_gap(&m).abs() < 1e-9, "case {case}");
        if n == 2 {
            assert!((sol.value - value_2x2(&m)).abs() < 1e-9, "case {case}");
        }
    }
}

#[test]
fn rectangular_games() {
    let mut rng = SplitMix64::new(7);
    for (r, c) in [(2, 3), (3, 2), (1, 4), (4, 1), (2, 5)] {
        let m = random_matrix(&mut rng, r, c);
        let sol = matrix_game_value(&m);
        let (lo, hi) = grid_bounds(&m);
        assert!(lo - 1e-9 <= sol.value && sol.value <= hi + 1e-9);
        assert!(sol.duality_gap(&m).abs() < 1e-9);
        assert!((sol.row_strategy.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((sol.col_strategy.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn known_values() {
    let pennies = Matrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
    assert!(matrix_game_value(&pennies).value.abs() < 1e-12);
    let rps = Matrix::from_rows(&[vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]]).unwrap();
    let sol = matrix_game_value(&rps);
    assert!(sol.value.abs() < 1e-12);
    for p in &sol.row_strategy {
        assert!((p - 1.0 / 3.0).abs() < 1e-9);
    }
    let saddle = Matrix::from_rows(&[vec![3.0, 1.0], vec![4.0, 2.0]]).unwrap();
    assert_eq!(matrix_game_value(&saddle).value, 2.0);
}
