//! Adaptive Simpson quadrature.

use crate::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` with adaptive
/// Simpson's rule and Richardson correction.
///
/// Fails with an input error when the integrand is not finite somewhere it is
/// evaluated.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::input("quadrature tolerance must be positive"));
    }
    if a == b {
        return Ok(0.0);
    }
    let fa = eval(&f, a)?;
    let fb = eval(&f, b)?;
    let m = 0.5 * (a + b);
    let fm = eval(&f, m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(
        &f,
        Panel {
            a,
            b,
            fa,
            fm,
            fb,
            whole,
        },
        tol,
        MAX_DEPTH,
    )
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn recurse(f: &impl Fn(f64) -> f64, p: Panel, tol: f64, depth: u32) -> Result<f64> {
    let m = 0.5 * (p.a + p.b);
    let lm = 0.5 * (p.a + m);
    let rm = 0.5 * (m + p.b);
    let flm = eval(f, lm)?;
    let frm = eval(f, rm)?;
    let left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
    let right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
    let delta = left + right - p.whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    let l = Panel {
        a: p.a,
        b: m,
        fa: p.fa,
        fm: flm,
        fb: p.fm,
        whole: left,
    };
    let r = Panel {
        a: m,
        b: p.b,
        fa: p.fm,
        fm: frm,
        fb: p.fb,
        whole: right,
    };
    Ok(recurse(f, l, 0.5 * tol, depth - 1)? + recurse(f, r, 0.5 * tol, depth - 1)?)
}

fn eval(f: &impl Fn(f64) -> f64, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::input(alloc::format!("integrand is not finite at {x}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math;

    #[test]
    fn polynomial_and_exponential() {
        let cubic = adaptive_simpson(|x| x * x * x - x, 0.0, 2.0, 1e-12).unwrap();
        assert!((cubic - 2.0).abs() < 1e-12);
        let e = adaptive_simpson(math::exp, 0.0, 1.0, 1e-12).unwrap();
        assert!((e - (core::f64::consts::E - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn long_interval_decay() {
        // ∫_0^1000 (1+s)^{-1/2} ds = 2(√1001 − 1)
        let val = adaptive_simpson(|s| 1.0 / math::sqrt(1.0 + s), 0.0, 1000.0, 1e-10).unwrap();
        assert!((val - 2.0 * (math::sqrt(1001.0) - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn non_finite_integrand() {
        assert!(adaptive_simpson(|x| 1.0 / x, 0.0, 1.0, 1e-8).is_err());
    }

    #[test]
    fn empty_interval() {
        assert_eq!(adaptive_simpson(|x| x, 3.0, 3.0, 1e-8).unwrap(), 0.0);
    }
}
