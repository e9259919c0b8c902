//! Local expansions of FBP profiles at the interface, in s = 1 − y/a (a = 1).
//!
//! * n < 3/2: F = A s² Σ ĝ_{i,k} ε^k s^{i+kδ}, δ = 3 − 2n, ε = βA^{−n};
//! * n = 3/2: F = s² [κ(−ln s + c)]^{2/3}, κ = 3β/4;
//! * 3/2 < n < 3: F = K s^μ (1 + c₁s + η s^γ), Kⁿ = −β/P(μ), P(e) = e(e−1)(e−2).

use super::params::{ParamError, ProblemParams};
use serde::Serialize;

/// Deepest supported truncation (keys with i + k ≤ order).
pub const MAX_EXPANSION_ORDER: usize = 14;

fn p3(e: f64) -> f64 {
    (2.0 + e) * (1.0 + e) * e
}

fn p2(e: f64) -> f64 {
    (2.0 + e) * (1.0 + e)
}

/// Falling cubic P(e) = e(e−1)(e−2).
pub fn falling3(e: f64) -> f64 {
    e * (e - 1.0) * (e - 2.0)
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "form")]
pub enum InterfaceExpansion {
    /// Quadratic contact with fractional corrections.
    Regular { delta: f64, order: usize, coeffs: Vec<Vec<f64>> },
    /// Log-corrected quadratic contact at n = 3/2.
    LogCorrected { kappa: f64, factor: f64 },
    /// Singular contact s^{3/n}.
    Singular { mu: f64, amplitude: f64, c1: f64, gamma: f64 },
}

/// State (F, dF/dy, d²F/dy²) at distance `s` inside the interface y = 1.
pub type LaunchState = [f64; 3];

impl InterfaceExpansion {
    pub fn leading_exponent(&self) -> f64 {
        match self {
            Self::Regular { .. } | Self::LogCorrected { .. } => 2.0,
            Self::Singular { mu, .. } => *mu,
        }
    }

    /// Launch state at distance `s` for the free shooting parameter `q`
    /// (A, c or η for the three forms respectively).
    pub fn launch(&self, params: &ProblemParams, q: f64, s: f64) -> LaunchState {
        match self {
            Self::Regular { delta, coeffs, .. } => {
                let eps = params.beta() * q.powf(-params.n);
                let (mut f, mut fs, mut fss) = (0.0, 0.0, 0.0);
                for (k, row) in coeffs.iter().enumerate() {
                    let ek = eps.powi(k as i32);
                    for (i, g) in row.iter().enumerate() {
                        let e = 2.0 + i as f64 + k as f64 * delta;
                        let c = q * g * ek;
                        let se = s.powf(e - 2.0);
                        f += c * se * s * s;
                        fs += c * e * se * s;
                        fss += c * e * (e - 1.0) * se;
                    }
                }
                [f, -fs, fss]
            }
            Self::LogCorrected { kappa, .. } => {
                let qq = kappa * (-s.ln() + q);
                let q23 = qq.powf(2.0 / 3.0);
                let qm13 = qq.powf(-1.0 / 3.0);
                let f = s * s * q23;
                let fs = s * (2.0 * q23 - (2.0 / 3.0) * kappa * qm13);
                let fss = 2.0 * q23 - 2.0 * kappa * qm13 - (2.0 / 9.0) * kappa * kappa * qm13 / qq;
                [f, -fs, fss]
            }
            Self::Singular { mu, amplitude, c1, gamma } => {
                let terms = [(0.0, 1.0), (1.0, *c1), (*gamma, q)];
                let (mut f, mut fs, mut fss) = (0.0, 0.0, 0.0);
                for (de, c) in terms {
                    let e = mu + de;
                    let se = s.powf(e - 2.0);
                    f += amplitude * c * se * s * s;
                    fs += amplitude * c * e * se * s;
                    fss += amplitude * c * e * (e - 1.0) * se;
                }
                [f, -fs, fss]
            }
        }
    }
}

/// Two-index series Σ x_{i,k} s^{i+kδ}, stored as x[k][i], truncated at i + k ≤ order.
fn mul2(a: &[Vec<f64>], b: &[Vec<f64>], order: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; order + 1]; order + 1];
    for (ka, ra) in a.iter().enumerate() {
        for (ia, x) in ra.iter().enumerate() {
            if *x == 0.0 {
                continue;
            }
            for (kb, rb) in b.iter().enumerate() {
                for (ib, y) in rb.iter().enumerate() {
                    let (k, i) = (ka + kb, ia + ib);
                    if i + k <= order {
                        out[k][i] += x * y;
                    }
                }
            }
        }
    }
    out
}

/// (1 − s)³ G^{α} for G with unit constant term.
fn forcing(g: &[Vec<f64>], alpha: f64, order: usize) -> Vec<Vec<f64>> {
    let mut x = g.to_vec();
    x[0][0] = 0.0;
    let mut acc = vec![vec![0.0; order + 1]; order + 1];
    acc[0][0] = 1.0;
    let mut term = acc.clone();
    let mut binom = 1.0;
    for j in 1..=order {
        binom *= (alpha - (j - 1) as f64) / j as f64;
        term = mul2(&term, &x, order);
        for k in 0..=order {
            for i in 0..=order {
                acc[k][i] += binom * term[k][i];
            }
        }
    }
    let mut cube = vec![vec![0.0; order + 1]; order + 1];
    for (i, c) in [1.0, -3.0, 3.0, -1.0].iter().enumerate() {
        if i <= order {
            cube[0][i] = *c;
        }
    }
    mul2(&cube, &acc, order)
}

fn regular_coeffs(n: f64, dim: usize, order: usize) -> Vec<Vec<f64>> {
    let delta = 3.0 - 2.0 * n;
    let nm1 = dim as f64 - 1.0;
    let mut g = vec![vec![0.0; order + 1]; order + 1];
    g[0][0] = 1.0;
    for k in 0..=order {
        let h = (k > 0).then(|| forcing(&g, 1.0 - n, order));
        for i in 0..=order - k {
            if i == 0 && k == 0 {
                continue;
            }
            let e = i as f64 + k as f64 * delta;
            let gm1 = if i >= 1 { g[k][i - 1] } else { 0.0 };
            let gm2 = if i >= 2 { g[k][i - 2] } else { 0.0 };
            let mut rhs = (2.0 * p3(e - 1.0) + nm1 * p2(e - 1.0)) * gm1 - (p3(e - 2.0) + nm1 * e * (e - 2.0)) * gm2;
            if let Some(h) = &h {
                rhs -= h[k - 1][i];
            }
            g[k][i] = rhs / p3(e);
        }
    }
    g
}

/// Positive root γ > 2 − μ of P(μ+γ) = (1−n)P(μ).
fn singular_gamma(n: f64, mu: f64) -> f64 {
    let target = (1.0 - n) * falling3(mu);
    let g = |x: f64| falling3(mu + x) - target;
    let mut hi = 1.0_f64;
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    crate::numerics::solve_bracketed(g, (2.0 - mu).max(0.0), hi, 1e-15)
}

/// Interface expansion for n ∈ (0, 3), fourth order, radial dimension N.
pub fn interface_expansion(params: &ProblemParams, order: usize) -> Result<InterfaceExpansion, ParamError> {
    let n = params.n;
    if !(n > 0.0 && n < 3.0) || params.m != 2 {
        return Err(ParamError::Unsupported(format!("interface expansion needs m = 2 and n in (0, 3), got n = {n}")));
    }
    if order > MAX_EXPANSION_ORDER {
        return Err(ParamError::Unsupported(format!(
            "expansion order {order} beyond implemented depth {MAX_EXPANSION_ORDER}"
        )));
    }
    let beta = params.beta();
    if (n - 1.5).abs() < 1e-12 {
        let kappa = 0.75 * beta;
        return Ok(InterfaceExpansion::LogCorrected { kappa, factor: kappa.powf(2.0 / 3.0) });
    }
    if n < 1.5 {
        return Ok(InterfaceExpansion::Regular { delta: 3.0 - 2.0 * n, order, coeffs: regular_coeffs(n, params.dim, order) });
    }
    let mu = 3.0 / n;
    let pm = falling3(mu);
    let amplitude = (-beta / pm).powf(1.0 / n);
    let c1 = (pm - (params.dim as f64 - 1.0) * mu * (mu - 1.0)) / (-falling3(mu + 1.0) + (1.0 - n) * pm);
    Ok(InterfaceExpansion::Singular { mu, amplitude, c1, gamma: singular_gamma(n, mu) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_series_matches_closed_form() {
        let p = ProblemParams::critical(1.0, 1).unwrap();
        let e = interface_expansion(&p, 8).unwrap();
        let a = 1.0 / 30.0;
        for s in [1e-3, 1e-2, 0.1] {
            let [f, fp, fpp] = e.launch(&p, a, s);
            let r: f64 = 1.0 - s;
            let ex = (1.0 - r * r).powi(2) / 120.0;
            let exp = -4.0 * r * (1.0 - r * r) / 120.0;
            let expp = -4.0 * (1.0 - 3.0 * r * r) / 120.0;
            assert!((f - ex).abs() < 1e-15 && (fp - exp).abs() < 1e-14 && (fpp - expp).abs() < 1e-13);
        }
    }

    #[test]
    fn leading_exponents() {
        let e = |n: f64| interface_expansion(&ProblemParams::critical(n, 1).unwrap(), 4).unwrap().leading_exponent();
        assert_eq!(e(1.0), 2.0);
        assert!((e(2.0) - 1.5).abs() < 1e-15);
        assert_eq!(e(1.5), 2.0);
        assert!(interface_expansion(&ProblemParams::critical(1.0, 1).unwrap(), 99).is_err());
    }
}
