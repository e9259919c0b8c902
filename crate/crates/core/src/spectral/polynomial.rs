//! Exact radial polynomial eigenfunctions of the n = 1 operator in the
//! weighted space L²_ρ(B₁), ρ = 1/(1 − r²).

use super::closed_form::eigenvalues_closed_form;
use super::SpectralError;
use crate::numerics::series::{rat, rat_to_f64};
use crate::numerics::{Poly, Ring};
use crate::profiles::params::{omega, sphere_area};
use crate::profiles::ProblemParams;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub params: ProblemParams,
    /// Indices k = 0, 2, 4, …
    pub indices: Vec<usize>,
    /// λ_k in the positive convention.
    pub eigenvalues: Vec<f64>,
    /// Coefficients of ψ_k in powers of r (length k+3).
    pub eigenfunctions: Vec<Vec<f64>>,
    pub weight: &'static str,
    pub b0: f64,
    #[serde(rename = "omega_N")]
    pub omega_n: f64,
    #[serde(skip)]
    exact: Vec<Poly>,
    #[serde(skip)]
    norms: Vec<BigRational>,
}

fn one_minus_r2() -> Poly {
    Poly(vec![BigRational::one(), BigRational::zero(), -BigRational::one()])
}

/// Radial Laplacian r^{1−N}(r^{N−1}p′)′ on a polynomial in r.
fn laplacian(p: &Poly, dim: usize) -> Poly {
    let v = (2..p.0.len()).map(|j| &p.0[j] * rat((j * (j + dim - 2)) as i64, 1)).collect();
    let mut out = Poly(v);
    while out.0.last().is_some_and(|c| c.is_zero()) {
        out.0.pop();
    }
    out
}

/// c₀(1−r²)[Δ((1−r²)Δψ) + 2NΔψ]; minus the left side of the printed
/// eigenproblem divided by ρ, so its spectrum is the positive closed form.
pub fn apply_operator(p: &Poly, dim: usize) -> Poly {
    let a = one_minus_r2();
    let c0 = rat(1, (8 * (dim + 2) * (dim + 4)) as i64);
    let lp = laplacian(p, dim);
    let inner = laplacian(&a.mul(&lp), dim).add(&lp.scale(&rat(2 * dim as i64, 1)));
    a.mul(&inner).scale(&c0)
}

/// Exact quotient by (1 − r²); the polynomial must vanish at r = 1.
fn deflate(p: &Poly) -> Poly {
    // p = (1 − r²)q: q_j = q_{j−2} − p_j, read top-down as q_{d−2} = −p_d
    let d = p.0.len();
    if d < 3 {
        return Poly(Vec::new());
    }
    let mut q = vec![BigRational::zero(); d - 2];
    for j in (0..d - 2).rev() {
        let above = if j + 2 < d - 2 { q[j + 2].clone() } else { BigRational::zero() };
        q[j] = above - &p.0[j + 2];
    }
    Poly(q)
}

/// ∫₀¹ r^{N−1} p(r) dr, exactly.
fn moment(p: &Poly, dim: usize) -> BigRational {
    p.0.iter().enumerate().fold(BigRational::zero(), |acc, (j, c)| acc + c / rat((j + dim) as i64, 1))
}

/// ⟨f, g⟩_ρ / |S^{N−1}| for polynomials vanishing at r = 1.
fn weighted_inner_exact(f: &Poly, g: &Poly, dim: usize) -> BigRational {
    moment(&deflate(f).mul(g), dim)
}

/// Eigenpolynomials ψ_k for k = 0, 2, …, ≤ `k_max`, orthonormal in L²_ρ.
pub fn polynomial_eigenfunctions(dim: usize, k_max: usize) -> Result<Spectrum, SpectralError> {
    let params = ProblemParams::critical(1.0, dim)?;
    let area = sphere_area(dim);
    let mut indices = Vec::new();
    let mut exact = Vec::new();
    let mut norms = Vec::new();
    let mut eigenvalues = Vec::new();
    let mut eigenfunctions = Vec::new();
    let mut b0 = 0.0;
    for k in (0..=k_max).step_by(2) {
        let top = k / 2 + 1;
        // basis φ_j = r^{2j} − 1, j = 1..=top; the operator is upper triangular
        let basis = |j: usize| Poly::monomial(BigRational::one(), 2 * j).sub(&Poly::one_elem());
        let cols: Vec<Poly> = (1..=top).map(|j| apply_operator(&basis(j), dim)).collect();
        let entry = |i: usize, j: usize| cols[j - 1].coeff(2 * i);
        let lambda = entry(top, top);
        let mut c = vec![BigRational::zero(); top + 1];
        c[top] = BigRational::one();
        for i in (1..top).rev() {
            let denom = &lambda - entry(i, i);
            if denom.is_zero() {
                return Err(SpectralError::Singular(k));
            }
            let s = ((i + 1)..=top).fold(BigRational::zero(), |acc, j| acc + entry(i, j) * &c[j]);
            c[i] = s / denom;
        }
        let psi = (1..=top).fold(Poly::zero_elem(), |acc, j| acc.add(&basis(j).scale(&c[j])));
        let residual = apply_operator(&psi, dim).sub(&psi.scale(&lambda));
        if !residual.is_zero_elem() {
            return Err(SpectralError::Singular(k));
        }
        let norm2 = weighted_inner_exact(&psi, &psi, dim);
        let b = (1.0 / (area * rat_to_f64(&norm2))).sqrt();
        // ψ₀ > 0 inside the ball; higher modes have positive leading coefficient
        let b = if k == 0 { -b } else { b };
        if k == 0 {
            b0 = b;
        }
        let closed = eigenvalues_closed_form(2, dim, k)?;
        let exact_l = rat_to_f64(&lambda);
        debug_assert!((exact_l - closed).abs() <= 1e-12 * closed.abs().max(1.0));
        eigenvalues.push(exact_l);
        eigenfunctions.push(psi.0.iter().map(|x| b * rat_to_f64(x)).collect::<Vec<_>>());
        indices.push(k);
        exact.push(psi);
        norms.push(norm2);
    }
    Ok(Spectrum {
        params,
        indices,
        eigenvalues,
        eigenfunctions,
        weight: "1/(1-r^2)",
        b0,
        omega_n: omega(dim),
        exact,
        norms,
    })
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.params.dim
    }

    /// ψ_k(r) for the j-th stored mode.
    pub fn eval(&self, j: usize, r: f64) -> f64 {
        self.eigenfunctions[j].iter().rev().fold(0.0, |acc, c| acc * r + c)
    }

    /// Gram matrix ⟨ψ_i, ψ_j⟩_ρ, from exact inner products.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        let area = sphere_area(self.dim());
        let m = self.exact.len();
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let ip = rat_to_f64(&weighted_inner_exact(&self.exact[i], &self.exact[j], self.dim()));
                        area * ip / (area * rat_to_f64(&self.norms[i]) * area * rat_to_f64(&self.norms[j])).sqrt()
                    })
                    .collect()
            })
            .collect()
    }

    /// ⟨f, g⟩_ρ = |S^{N−1}| ∫₀¹ r^{N−1} f g /(1 − r²) dr by quadrature; the
    /// integrand must stay bounded at r = 1.
    pub fn weighted_inner(&self, f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64) -> f64 {
        let k = self.dim() as i32 - 1;
        let h = |r: f64| {
            let w = 1.0 - r * r;
            if w <= 0.0 {
                0.0
            } else {
                r.powi(k) * f(r) * g(r) / w
            }
        };
        sphere_area(self.dim()) * crate::numerics::quad_composite(h, 0.0, 1.0, 64).unwrap_or(f64::NAN)
    }

    /// L²_ρ norm² of g minus its projection onto the first `count` modes.
    pub fn projection_remainder(&self, g: &dyn Fn(f64) -> f64, count: usize) -> f64 {
        let total = self.weighted_inner(g, g);
        let captured: f64 = (0..count.min(self.eigenfunctions.len()))
            .map(|j| self.weighted_inner(g, |r| self.eval(j, r)).powi(2))
            .sum();
        total - captured
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deflation_is_exact() {
        let p = one_minus_r2().mul(&Poly(vec![rat(2, 1), rat(0, 1), rat(3, 1)]));
        assert_eq!(deflate(&p), Poly(vec![rat(2, 1), rat(0, 1), rat(3, 1)]));
    }

    #[test]
    fn psi0_is_in_kernel() {
        let p = Poly(vec![rat(-1, 1), rat(0, 1), rat(1, 1)]);
        assert!(apply_operator(&p, 3).is_zero_elem());
    }
}
