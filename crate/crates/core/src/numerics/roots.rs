//! Bracketed scalar root finding (Brent's method).

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("no sign change on [{a}, {b}]: g(a) = {ga:e}, g(b) = {gb:e}")]
    NoSignChange { a: f64, b: f64, ga: f64, gb: f64 },
    #[error("maximum iterations exceeded; last bracket [{a}, {b}]")]
    MaxIterations { a: f64, b: f64 },
    #[error("non-finite function value at x = {x}")]
    NonFinite { x: f64 },
}

const MAX_ITER: usize = 200;

/// Brent's hybrid of bisection, secant and inverse quadratic interpolation.
/// Terminates once the bracket is narrower than `tol` (plus a few ulps).
pub fn try_solve_bracketed<G>(mut g: G, a: f64, b: f64, tol: f64) -> Result<f64, RootError>
where
    G: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (a, b);
    let mut fa = g(a);
    let mut fb = g(b);
    if !fa.is_finite() {
        return Err(RootError::NonFinite { x: a });
    }
    if !fb.is_finite() {
        return Err(RootError::NonFinite { x: b });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(RootError::NoSignChange { a, b, ga: fa, gb: fb });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = g(b);
        if !fb.is_finite() {
            return Err(RootError::NonFinite { x: b });
        }
    }
    Err(RootError::MaxIterations { a: b, b: c })
}

/// Panicking convenience wrapper for brackets known to be valid.
pub fn solve_bracketed<G>(g: G, a: f64, b: f64, tol: f64) -> f64
where
    G: FnMut(f64) -> f64,
{
    try_solve_bracketed(g, a, b, tol).unwrap_or_else(|e| panic!("solve_bracketed: {e}"))
}

/// Scans `[a, b]` on `n` equal cells and returns every bracket with a sign change.
pub fn scan_brackets<G>(mut g: G, a: f64, b: f64, n: usize) -> Vec<(f64, f64)>
where
    G: FnMut(f64) -> f64,
{
    let mut out = Vec::new();
    let mut x0 = a;
    let mut g0 = g(a);
    for i in 1..=n {
        let x1 = a + (b - a) * i as f64 / n as f64;
        let g1 = g(x1);
        if g0.is_finite() && g1.is_finite() && g0 * g1 <= 0.0 && !(g0 == 0.0 && g1 == 0.0) {
            out.push((x0, x1));
        }
        x0 = x1;
        g0 = g1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        assert!((solve_bracketed(|x| x - 1.0, 0.0, 2.0, 1e-14) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cosine_root() {
        let x = solve_bracketed(f64::cos, 1.0, 2.0, 1e-14);
        assert!((x - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
    }

    #[test]
    fn missing_sign_change() {
        assert!(matches!(try_solve_bracketed(|x| x * x + 1.0, -1.0, 1.0, 1e-12), Err(RootError::NoSignChange { .. })));
    }

    #[test]
    fn step_function_terminates() {
        let x = solve_bracketed(|x| if x < 0.3 { -1.0 } else { 1.0 }, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-11);
    }
}
