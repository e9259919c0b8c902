//! Closed-form profiles for n = 1: c₀(a² − |y|²)² and c₀(1 − |y|²)^m.

use super::params::{explicit_c0, ParamError, ProblemParams};
use super::profile::{Profile, ProblemKind};
use serde::Serialize;

/// Polynomial in r, coefficient of r^k at index k.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPoly(pub Vec<f64>);

impl RadialPoly {
    pub fn eval(&self, r: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * r + c)
    }

    pub fn deriv(&self) -> Self {
        Self(self.0.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect())
    }

    /// Radial Laplacian p″ + (N−1)p′/r of an even polynomial.
    pub fn laplacian(&self, dim: usize) -> Self {
        let nm1 = dim as f64 - 1.0;
        let mut out = vec![0.0; self.0.len().saturating_sub(2).max(1)];
        for (k, c) in self.0.iter().enumerate().skip(2) {
            out[k - 2] += c * k as f64 * (k as f64 - 1.0 + nm1);
        }
        Self(out)
    }

    /// (1 − r²)^m scaled by `c` and radius `a`: c(a² − r²)^m.
    pub fn bump(c: f64, a: f64, m: usize) -> Self {
        let mut v = vec![0.0; 2 * m + 1];
        let mut binom = 1.0;
        for j in 0..=m {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            v[2 * j] = c * sign * binom * a.powi(2 * (m - j) as i32);
            binom = binom * (m - j) as f64 / (j + 1) as f64;
        }
        Self(v)
    }
}

/// Profile grid on [0, a] clustered quadratically toward the interface.
pub fn interface_graded_grid(a: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|j| {
            let t = j as f64 / (points - 1) as f64;
            a * (1.0 - (1.0 - t) * (1.0 - t))
        })
        .collect()
}

fn profile_from_poly(params: ProblemParams, poly: &RadialPoly, a: f64, points: usize) -> Profile {
    let d1 = poly.deriv();
    let d2 = d1.deriv();
    let d3 = d2.deriv();
    let grid = interface_graded_grid(a, points);
    let at = |p: &RadialPoly| grid.iter().map(|&r| p.eval(r)).collect::<Vec<_>>();
    Profile::assemble(params, grid.clone(), at(poly), at(&d1), at(&d2), at(&d3), ProblemKind::Fbp)
}

/// Pointwise residual of −∇·(Fⁿ∇ΔF) + β∇F·y + βNF for an even polynomial
/// profile (n = 1, fourth order), evaluated on `grid`.
pub fn od11_residual_poly(poly: &RadialPoly, params: &ProblemParams, grid: &[f64]) -> Vec<f64> {
    let beta = params.beta();
    let nm1 = params.dim as f64 - 1.0;
    let d1 = poly.deriv();
    let lap_d = poly.laplacian(params.dim).deriv();
    let lap_dd = lap_d.deriv();
    grid.iter()
        .map(|&r| {
            let (f, fp) = (poly.eval(r), d1.eval(r));
            let (l1, l2) = (lap_d.eval(r), lap_dd.eval(r));
            // flux J = F(ΔF)′ − βrF; residual = −(J′ + (N−1)J/r)
            let jp = fp * l1 + f * l2 - beta * (f + r * fp);
            let j_over_r = if r == 0.0 { jp } else { f * l1 / r - beta * f };
            -(jp + nm1 * j_over_r)
        })
        .collect()
}

/// F(y) = c₀(a² − |y|²)² with c₀ = 1/(8(N+2)(N+4)).
pub fn explicit_profile_n1(dim: usize, a: f64) -> Result<Profile, ParamError> {
    let params = ProblemParams::critical(1.0, dim)?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(ParamError::Unsupported(format!("interface radius a = {a} must be positive")));
    }
    let c0 = params.c0().expect("n = 1");
    Ok(profile_from_poly(params, &RadialPoly::bump(c0, a, 2), a, 1025))
}

/// Interface radius at which the explicit n = 1 profile has unit height.
pub fn unit_height_radius(dim: usize) -> f64 {
    explicit_c0(2, dim).powf(-0.25)
}

/// Printed normalization ½·N!!/((2m)!!(2m+N)!!) of the 2m-th order profile.
pub fn printed_c0_2m(m: usize, dim: usize) -> f64 {
    let dfact = |k: usize| -> f64 { (1..=k).rev().step_by(2).map(|x| x as f64).product() };
    0.5 * dfact(dim) / (dfact(2 * m) * dfact(2 * m + dim))
}

#[derive(Debug, Clone, Serialize)]
pub struct ExplicitProfile2m {
    pub m: usize,
    #[serde(rename = "N")]
    pub dim: usize,
    pub c0: f64,
    pub c0_printed: f64,
    /// Largest defect of Δ^{m−1}F − (−1)^m β|y|²/2 among non-constant terms.
    pub residual: f64,
    #[serde(skip)]
    pub profile: Profile,
}

/// F(y) = c₀(1 − |y|²)^m with c₀ fixed by Δ^{m−1}F = (−1)^m (β/2)|y|² + const.
pub fn explicit_profile_2m_n1(m: usize, dim: usize) -> Result<ExplicitProfile2m, ParamError> {
    let params = ProblemParams::new(1.0, dim, m, super::params::critical_exponent(1.0, dim, m))?;
    let c0 = explicit_c0(m, dim);
    let poly = RadialPoly::bump(c0, 1.0, m);
    let mut lap = poly.clone();
    for _ in 0..m - 1 {
        lap = lap.laplacian(dim);
    }
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let target = sign * params.beta() / 2.0;
    let mut residual = (lap.0.get(2).copied().unwrap_or(0.0) - target).abs() / target.abs();
    for c in lap.0.iter().skip(3) {
        residual = residual.max(c.abs() / target.abs());
    }
    residual = residual.max(lap.0.get(1).copied().unwrap_or(0.0).abs());
    let profile = profile_from_poly(params, &poly, 1.0, 1025);
    Ok(ExplicitProfile2m { m, dim, c0, c0_printed: printed_c0_2m(m, dim), residual, profile })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_unit_height() {
        let a = unit_height_radius(1);
        assert!((a.powi(4) - 120.0).abs() < 1e-10);
        let p = explicit_profile_n1(1, a).unwrap();
        assert!((p.values[0] - 1.0).abs() < 1e-14);
        assert!((p.second_deriv_origin + 4.0 / a.powi(2)).abs() < 1e-14);
    }

    #[test]
    fn printed_constant() {
        assert!((printed_c0_2m(2, 1) - 1.0 / 240.0).abs() < 1e-16);
        let e = explicit_profile_2m_n1(2, 1).unwrap();
        assert!((e.c0 - 1.0 / 120.0).abs() < 1e-16);
        assert!(e.residual < 1e-12);
    }

    #[test]
    fn od11_residual_vanishes() {
        for dim in 1..=3 {
            let p = ProblemParams::critical(1.0, dim).unwrap();
            let poly = RadialPoly::bump(p.c0().unwrap(), 1.3, 2);
            let grid = interface_graded_grid(1.3, 50);
            assert!(od11_residual_poly(&poly, &p, &grid).iter().all(|r| r.abs() < 1e-13));
        }
    }
}
