//! Exponents and derived constants shared by every computation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("mobility exponent n = {0} must be finite and >= 0")]
    Mobility(f64),
    #[error("dimension N = {0} must be >= 1")]
    Dimension(usize),
    #[error("half-order m = {0} must be >= 2")]
    HalfOrder(usize),
    #[error("absorption exponent p = {0} must be > 1")]
    Absorption(f64),
    #[error("{0}")]
    Unsupported(String),
}

/// `n`: mobility exponent, `dim`: spatial dimension N, `m`: half-order of the
/// operator (4 = 2m for the standard TFE), `p`: absorption exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub n: f64,
    #[serde(rename = "N")]
    pub dim: usize,
    pub m: usize,
    pub p: f64,
}

impl ProblemParams {
    pub fn new(n: f64, dim: usize, m: usize, p: f64) -> Result<Self, ParamError> {
        if !(n.is_finite() && n >= 0.0) {
            return Err(ParamError::Mobility(n));
        }
        if dim < 1 {
            return Err(ParamError::Dimension(dim));
        }
        if m < 2 {
            return Err(ParamError::HalfOrder(m));
        }
        if !(p.is_finite() && p > 1.0) {
            return Err(ParamError::Absorption(p));
        }
        Ok(Self { n, dim, m, p })
    }

    /// Fourth-order problem at the critical absorption exponent.
    pub fn critical(n: f64, dim: usize) -> Result<Self, ParamError> {
        Self::new(n, dim, 2, critical_exponent(n, dim, 2))
    }

    pub fn with_p(self, p: f64) -> Result<Self, ParamError> {
        Self::new(self.n, self.dim, self.m, p)
    }

    pub fn nf(&self) -> f64 {
        self.dim as f64
    }

    /// Similarity exponent β = 1/(2m + nN).
    pub fn beta(&self) -> f64 {
        1.0 / (2.0 * self.m as f64 + self.n * self.nf())
    }

    pub fn p0(&self) -> f64 {
        critical_exponent(self.n, self.dim, self.m)
    }

    /// Interface exponent μ = 3/n (fourth order only).
    pub fn mu(&self) -> Option<f64> {
        (self.n > 0.0).then(|| 3.0 / self.n)
    }

    /// Profile constant of the explicit n = 1 profile c₀(1 − r²)^m, obtained by
    /// forcing Δ^{m−1}F to carry the quadratic β|y|²/2 (up to sign and a
    /// constant). `None` unless n = 1.
    pub fn c0(&self) -> Option<f64> {
        (self.n == 1.0).then(|| explicit_c0(self.m, self.dim))
    }

    /// Decay rate γ = N(p − p₀)β of the absorption term in supercritical runs.
    pub fn supercritical_rate(&self) -> f64 {
        self.nf() * (self.p - self.p0()) * self.beta()
    }
}

pub fn critical_exponent(n: f64, dim: usize, m: usize) -> f64 {
    1.0 + n + 2.0 * m as f64 / dim as f64
}

/// β/(2·∏_{i=2}^{m} 2i(2i+N−2)) with β = 1/(2m+N).
pub fn explicit_c0(m: usize, dim: usize) -> f64 {
    let nf = dim as f64;
    let beta = 1.0 / (2.0 * m as f64 + nf);
    let prod: f64 = (2..=m).map(|i| (2 * i) as f64 * ((2 * i) as f64 + nf - 2.0)).product();
    beta / (2.0 * prod)
}

/// Volume of the unit ball in ℝᴺ.
pub fn omega(dim: usize) -> f64 {
    match dim {
        0 => 1.0,
        1 => 2.0,
        d => omega(d - 2) * 2.0 * std::f64::consts::PI / d as f64,
    }
}

/// Surface area of the unit sphere, N·ω_N.
pub fn sphere_area(dim: usize) -> f64 {
    dim as f64 * omega(dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_constants() {
        let p = ProblemParams::critical(1.0, 1).unwrap();
        assert_eq!(p.p, 6.0);
        assert!((p.beta() - 0.2).abs() < 1e-15);
        assert!((p.c0().unwrap() - 1.0 / 120.0).abs() < 1e-16);
        assert!((explicit_c0(2, 2) - 1.0 / 192.0).abs() < 1e-16);
        assert_eq!(critical_exponent(0.0, 4, 2), 2.0);
        assert_eq!(critical_exponent(1.0, 2, 3), 5.0);
        assert!((omega(3) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn validation() {
        assert!(ProblemParams::new(-1.0, 1, 2, 6.0).is_err());
        assert!(ProblemParams::new(1.0, 0, 2, 6.0).is_err());
        assert!(ProblemParams::new(1.0, 1, 1, 6.0).is_err());
        assert!(ProblemParams::new(1.0, 1, 2, 1.0).is_err());
    }
}
