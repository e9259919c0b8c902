//! Centre-subspace reduction at n = 1: projection coefficients γ₁, γ₂ of the
//! amplitude ODE, the decay constant γ*, amplitude a* and the resulting
//! logarithmically perturbed pattern.

use crate::numerics::{integrate_ivp, quad_composite, quad_weighted, IvpError, IvpOptions, QuadError};
use crate::profiles::params::{explicit_c0, omega, sphere_area};
use crate::profiles::ProblemParams;
use serde::Serialize;
use thiserror::Error;

pub use crate::profiles::critical_exponent;

#[derive(Debug, Error)]
pub enum CentreError {
    #[error("{0}")]
    Unsupported(String),
    #[error("projection coefficient {name} = {value:e} is not positive")]
    Sign { name: &'static str, value: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Ivp(#[from] IvpError),
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CentreCoefficients {
    pub n: f64,
    #[serde(rename = "N")]
    pub dim: usize,
    pub m: usize,
    pub p0: f64,
    pub beta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma_star: f64,
    pub a_star: f64,
}

/// C w = (n/4) r w′ − w, pointwise on a radial grid.
pub fn centre_operator_c(n: f64, grid: &[f64], w: &[f64], dw: &[f64]) -> Vec<f64> {
    grid.iter().zip(w).zip(dw).map(|((r, w), dw)| 0.25 * n * r * dw - w).collect()
}

/// Normalized zero mode b₀(r² − 1), b₀ = −√((N+2)/(2ω_N)).
pub fn psi0(dim: usize) -> impl Fn(f64) -> f64 {
    let b0 = -((dim as f64 + 2.0) / (2.0 * omega(dim))).sqrt();
    move |r: f64| b0 * (r * r - 1.0)
}

/// ⟨f, ψ₀⟩_ρ with the weight 1/(1 − r²) = (1 − r)^{−1}/(1 + r) handled by
/// the endpoint-graded rule.
fn project(dim: usize, f: impl Fn(f64) -> f64) -> Result<f64, QuadError> {
    let psi = psi0(dim);
    let k = dim as i32 - 1;
    let v = quad_weighted(|r| r.powi(k) * f(r) * psi(r) / (1.0 + r), 0.0, 1.0, -1.0)?;
    Ok(sphere_area(dim) * v)
}

/// Same projection by uniform composite Gauss–Legendre with `panels` panels.
pub fn project_composite(dim: usize, f: impl Fn(f64) -> f64, panels: usize) -> Result<f64, QuadError> {
    let psi = psi0(dim);
    let k = dim as i32 - 1;
    let v = quad_composite(|r| r.powi(k) * f(r) * psi(r) / (1.0 - r * r).max(f64::MIN_POSITIVE), 0.0, 1.0, panels)?;
    Ok(sphere_area(dim) * v)
}

/// Explicit n = 1 profile at unit interface and its C-image, −c₀(1 − r²).
fn explicit_pair(dim: usize) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let c0 = explicit_c0(2, dim);
    let f = move |r: f64| c0 * (1.0 - r * r).powi(2);
    let cf = move |r: f64| {
        let d = -4.0 * c0 * r * (1.0 - r * r);
        0.25 * r * d - c0 * (1.0 - r * r).powi(2)
    };
    (f, cf)
}

/// γ₁ = −⟨CF, ψ₀⟩_ρ, γ₂ = ⟨F^{p₀}, ψ₀⟩_ρ on the explicit profile, with γ*, a*.
pub fn gamma_coefficients(params: &ProblemParams) -> Result<CentreCoefficients, CentreError> {
    if params.n != 1.0 || params.m != 2 {
        return Err(CentreError::Unsupported(format!(
            "projection needs the self-adjoint case n = 1, m = 2 (got n = {}, m = {})",
            params.n, params.m
        )));
    }
    let p0 = params.p0();
    if (params.p - p0).abs() > 1e-12 * p0 {
        return Err(CentreError::Unsupported(format!("p = {} differs from the critical p0 = {p0}", params.p)));
    }
    let dim = params.dim;
    let (f, cf) = explicit_pair(dim);
    let gamma1 = -project(dim, cf)?;
    let gamma2 = project(dim, |r| f(r).powf(p0))?;
    for (name, value) in [("gamma1", gamma1), ("gamma2", gamma2)] {
        if !(value > 0.0) {
            return Err(CentreError::Sign { name, value });
        }
    }
    Ok(coefficients_from(params, gamma1, gamma2))
}

fn coefficients_from(params: &ProblemParams, gamma1: f64, gamma2: f64) -> CentreCoefficients {
    let p = params.p;
    let gamma_star = ((p - 1.0) * gamma2 / gamma1).powf(-1.0 / (p - 1.0));
    CentreCoefficients {
        n: params.n,
        dim: params.dim,
        m: params.m,
        p0: params.p0(),
        beta: params.beta(),
        gamma1,
        gamma2,
        gamma_star,
        a_star: gamma_star.powf(params.n / 4.0),
    }
}

/// Closed forms: γ₁ = −2c₀b₀ω_N/(N+2), γ₂ = −b₀c₀^p N ω_N B(N/2, 2p+1)/2.
pub fn gamma_closed_form(params: &ProblemParams) -> CentreCoefficients {
    use statrs::function::beta::beta;
    let dim = params.dim;
    let nf = dim as f64;
    let c0 = explicit_c0(2, dim);
    let b0 = -((nf + 2.0) / (2.0 * omega(dim))).sqrt();
    let p = params.p;
    let gamma1 = -2.0 * c0 * b0 * omega(dim) / (nf + 2.0);
    let gamma2 = -b0 * c0.powf(p) * nf * omega(dim) * 0.5 * beta(0.5 * nf, 2.0 * p + 1.0);
    coefficients_from(params, gamma1, gamma2)
}

impl CentreCoefficients {
    pub fn decay_exponent(&self) -> f64 {
        1.0 / (self.p0 - 1.0)
    }

    /// b(τ) = γ*·τ^{−1/(p−1)}.
    pub fn predicted_amplitude(&self, tau: f64) -> f64 {
        self.gamma_star * tau.powf(-self.decay_exponent())
    }

    /// Right side of the matched amplitude ODE b′ = −(γ₂/γ₁) b^p.
    pub fn matched_rhs(&self, b: f64) -> f64 {
        -(self.gamma2 / self.gamma1) * b.max(0.0).powf(self.p0)
    }

    /// Integrates the matched ODE from b(τ₀) = b0 to τ₁.
    pub fn integrate_matched(&self, b0: f64, tau0: f64, tau1: f64) -> Result<f64, CentreError> {
        let rhs = |_: f64, y: &[f64], d: &mut [f64]| d[0] = self.matched_rhs(y[0]);
        let tr = integrate_ivp(rhs, tau0, &[b0], tau1, &IvpOptions::tolerances(1e-12, 1e-300).sparse(), &[])?;
        Ok(tr.last_state()[0])
    }

    /// Support radius a*·t^β·(ln t)^{−βN·n/4} of the pattern.
    pub fn support_radius(&self, t: f64) -> f64 {
        let bn = self.beta * self.dim as f64;
        self.a_star * t.powf(self.beta) * t.ln().powf(-bn * self.n / 4.0)
    }

    /// F_*(ζ) = a*^{4/n} F(ζ/a*) with the explicit unit-interface profile.
    pub fn fixed_profile(&self, zeta: f64) -> f64 {
        let c0 = explicit_c0(2, self.dim);
        let s = 1.0 - (zeta / self.a_star).powi(2);
        if s <= 0.0 {
            0.0
        } else {
            self.a_star.powf(4.0 / self.n) * c0 * s * s
        }
    }

    /// (t ln t)^{−βN} F_*(|x| t^{−β} (ln t)^{βN·n/4}), for t > e.
    pub fn evaluate_pattern(&self, x: f64, t: f64) -> f64 {
        let bn = self.beta * self.dim as f64;
        let lt = t.ln();
        let zeta = x.abs() * t.powf(-self.beta) * lt.powf(bn * self.n / 4.0);
        (t * lt).powf(-bn) * self.fixed_profile(zeta)
    }

    /// Exponents (e_t, e_log) with ∫u dx ∝ t^{e_t}(ln t)^{e_log}.
    pub fn pattern_mass_exponents(&self) -> (f64, f64) {
        let nf = self.dim as f64;
        let bn = self.beta * nf;
        (-bn + self.beta * nf, -bn - bn * self.n * nf / 4.0)
    }

    /// Mass of F_* over ℝᴺ.
    pub fn fixed_profile_mass(&self) -> f64 {
        let k = self.dim as i32 - 1;
        let v = quad_composite(|r| r.powi(k) * self.fixed_profile(r), 0.0, self.a_star, 32).unwrap_or(f64::NAN);
        sphere_area(self.dim) * v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_on_monomial() {
        let g = [0.0, 0.5, 1.0];
        let w: Vec<f64> = g.iter().map(|r| r * r).collect();
        let dw: Vec<f64> = g.iter().map(|r| 2.0 * r).collect();
        let c = centre_operator_c(4.0, &g, &w, &dw);
        for (a, b) in c.iter().zip(&w) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for dim in 1..4 {
            let p = ProblemParams::critical(1.0, dim).unwrap();
            let q = gamma_coefficients(&p).unwrap();
            let c = gamma_closed_form(&p);
            assert!((q.gamma1 / c.gamma1 - 1.0).abs() < 1e-10, "{q:?} {c:?}");
            assert!((q.gamma2 / c.gamma2 - 1.0).abs() < 1e-10, "{q:?} {c:?}");
        }
    }
}
