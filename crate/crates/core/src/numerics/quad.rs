//! Composite Gauss–Legendre quadrature graded toward a singular endpoint.

use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("integrand not integrable at the endpoint (panel sums fail to decay; last panel {last:e}, total {total:e})")]
    NonIntegrable { last: f64, total: f64 },
    #[error("non-finite integrand value at x = {x}")]
    NonFinite { x: f64 },
    #[error("invalid interval [{a}, {b}]")]
    BadInterval { a: f64, b: f64 },
}

pub const GL_ORDER: usize = 16;
const MAX_PANELS: usize = 400;

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// Gauss–Legendre sum of `f` over `[lo, hi]` in the distance variable.
fn panel<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> Result<f64, QuadError> {
    let (x, w) = gl16();
    let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let mut s = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        let u = c + r * xi;
        let v = f(u);
        if !v.is_finite() {
            return Err(QuadError::NonFinite { x: u });
        }
        s += wi * v;
    }
    Ok(s * r)
}

/// ∫ₐᵇ h(x)·(b − x)^α dx on panels whose width halves toward `b`.
///
/// Panels are added until their contribution stops mattering at double
/// precision; sums that fail to decay signal a non-integrable endpoint.
pub fn quad_weighted<H>(mut h: H, a: f64, b: f64, alpha: f64) -> Result<f64, QuadError>
where
    H: FnMut(f64) -> f64,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(QuadError::BadInterval { a, b });
    }
    let len = b - a;
    let mut g = |d: f64| if d == 0.0 { 0.0 } else { h(b - d) * d.powf(alpha) };
    let mut total = 0.0;
    let mut quiet = 0;
    let mut hi = len;
    let mut last = f64::INFINITY;
    for _ in 0..MAX_PANELS {
        let lo = 0.5 * hi;
        let part = panel(&mut g, lo, hi)?;
        total += part;
        last = part;
        if part.abs() <= 1e-17 * total.abs() || (part == 0.0 && total == 0.0) {
            quiet += 1;
            if quiet >= 3 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
        hi = lo;
        if hi < f64::MIN_POSITIVE {
            break;
        }
    }
    if last.abs() <= 1e-12 * total.abs().max(f64::MIN_POSITIVE) {
        Ok(total)
    } else {
        Err(QuadError::NonIntegrable { last, total })
    }
}

/// Plain composite Gauss–Legendre on `panels` equal panels (smooth integrands).
pub fn quad_composite<H: FnMut(f64) -> f64>(mut h: H, a: f64, b: f64, panels: usize) -> Result<f64, QuadError> {
    let w = (b - a) / panels as f64;
    (0..panels).try_fold(0.0, |acc, i| Ok(acc + panel(&mut h, a + i as f64 * w, a + (i + 1) as f64 * w)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_monomials() {
        let (x, w) = gauss_legendre(16);
        for k in 0..32 {
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((s - exact).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn constants_and_polynomials() {
        assert!((quad_weighted(|_| 1.0, 0.0, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((quad_weighted(|r| 1.0 - r * r, 0.0, 1.0, 0.0).unwrap() - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn algebraic_endpoint_singularity() {
        let v = quad_weighted(|_| 1.0, 0.0, 1.0, -0.5).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn divergent_weight_detected() {
        assert!(matches!(quad_weighted(|_| 1.0, 0.0, 1.0, -1.0), Err(QuadError::NonIntegrable { .. })));
    }
}
