//! Vertex-centred finite-volume discretization of the radial linearized
//! operator on r ∈ [0, 1] with ψ(1) = 0. Control volumes carry the r^{N−1}
//! measure, so regularity at r = 0 is built in.

use super::closed_form::eigenvalues_closed_form;
use super::SpectralError;
use crate::numerics::eig_banded_symmetric;
use crate::profiles::{explicit_profile_n1, shoot_fbp_profile, Profile, ProblemParams};
use nalgebra::{DMatrix, DVector};

const MIN_GRID: usize = 8;
const COARSE_TOL: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub params: ProblemParams,
    /// Unknown nodes r_i = i/M, i < M.
    pub grid: Vec<f64>,
    /// Standard-form matrix: symmetric for n = 1.
    pub matrix: DMatrix<f64>,
    /// Operator acting on nodal values.
    pub nodal: DMatrix<f64>,
    pub symmetric: bool,
}

struct Mesh {
    r: Vec<f64>,
    vol: Vec<f64>,
    h: f64,
}

impl Mesh {
    fn new(dim: usize, m: usize) -> Self {
        let h = 1.0 / m as f64;
        let nf = dim as f64;
        let r: Vec<f64> = (0..=m).map(|i| i as f64 * h).collect();
        let vol = r
            .iter()
            .map(|&ri| {
                let lo = (ri - 0.5 * h).max(0.0);
                let hi = (ri + 0.5 * h).min(1.0);
                (hi.powf(nf) - lo.powf(nf)) / nf
            })
            .collect();
        Self { r, vol, h }
    }

    /// Stiffness −∫ ∇·(c∇·) with face coefficients c(r_f) r_f^{N−1}/h.
    fn stiffness(&self, dim: usize, c: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let n = self.r.len();
        let mut k = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            let rf = self.r[i] + 0.5 * self.h;
            let w = c(rf) * rf.powi(dim as i32 - 1) / self.h;
            k[(i, i)] += w;
            k[(i + 1, i + 1)] += w;
            k[(i, i + 1)] -= w;
            k[(i + 1, i)] -= w;
        }
        k
    }

    fn inv_vol(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_iterator(self.vol.len(), self.vol.iter().map(|v| 1.0 / v)))
    }
}

fn drop_last(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows() - 1;
    a.view((0, 0), (n, n)).into_owned()
}

/// n = 1: the self-adjoint form −c₀[Δ(aΔψ) + 2NΔψ] = ρλψ, reduced to a
/// symmetric standard problem through the diagonal weight ρ·vol.
/// n ≠ 1: the profile form −∇·(Fⁿ∇ΔY) + (1−n)β∇·(Yζ) on the FBP profile
/// rescaled to unit interface.
pub fn discretize_operator(params: &ProblemParams, grid_size: usize) -> Result<DiscreteOperator, SpectralError> {
    if params.m != 2 {
        return Err(SpectralError::Domain(format!("discretization needs m = 2, got m = {}", params.m)));
    }
    if grid_size < MIN_GRID {
        return Err(SpectralError::Domain(format!("grid size {grid_size} below {MIN_GRID}")));
    }
    if params.n == 1.0 {
        let op = self_adjoint_n1(params, grid_size);
        op.check_against_closed_form()?;
        return Ok(op);
    }
    let profile = shoot_fbp_profile(params)?;
    let unit = profile.rescaled(1.0 / profile.interface);
    discretize_with_profile(&unit, grid_size)
}

fn self_adjoint_n1(params: &ProblemParams, m: usize) -> DiscreteOperator {
    let dim = params.dim;
    let mesh = Mesh::new(dim, m);
    let k = mesh.stiffness(dim, |_| 1.0);
    let a = DMatrix::from_diagonal(&DVector::from_iterator(m + 1, mesh.r.iter().map(|r| 1.0 - r * r)));
    let c0 = params.c0().expect("n = 1");
    // K ≈ −vol·Δ, so q ≈ vol·[Δ(aΔ) + 2NΔ]
    let q = (&k * &a * mesh.inv_vol() * &k - &k * (2.0 * dim as f64)) * c0;
    let q = drop_last(&(-q));
    let w: Vec<f64> = (0..m).map(|i| mesh.vol[i] / (1.0 - mesh.r[i] * mesh.r[i])).collect();
    let mut s = q.clone();
    let mut nodal = q;
    for i in 0..m {
        for j in 0..m {
            s[(i, j)] /= (w[i] * w[j]).sqrt();
            nodal[(i, j)] /= w[i];
        }
    }
    let s = (&s + s.transpose()) * 0.5;
    DiscreteOperator { params: *params, grid: mesh.r[..m].to_vec(), matrix: s, nodal, symmetric: true }
}

/// The profile form on a profile whose interface sits at r = 1.
pub fn discretize_with_profile(profile: &Profile, grid_size: usize) -> Result<DiscreteOperator, SpectralError> {
    let params = profile.params;
    if grid_size < MIN_GRID {
        return Err(SpectralError::Domain(format!("grid size {grid_size} below {MIN_GRID}")));
    }
    if (profile.interface - 1.0).abs() > 1e-9 {
        return Err(SpectralError::Domain(format!("profile interface at {} instead of 1", profile.interface)));
    }
    let (dim, n, beta) = (params.dim, params.n, params.beta());
    let mesh = Mesh::new(dim, grid_size);
    let mob = |r: f64| if r >= 1.0 { 0.0 } else { profile.eval(r).max(0.0).powf(n) };
    let kf = mesh.stiffness(dim, mob);
    let k = mesh.stiffness(dim, |_| 1.0);
    let vi = mesh.inv_vol();
    let np = grid_size + 1;
    let mut g = DMatrix::zeros(np, np);
    for i in 0..np - 1 {
        let rf = mesh.r[i] + 0.5 * mesh.h;
        let w = 0.5 * rf.powi(dim as i32);
        // outward flux r_f^N·Y_f leaves cell i and enters cell i+1
        g[(i, i)] += w;
        g[(i, i + 1)] += w;
        g[(i + 1, i)] -= w;
        g[(i + 1, i + 1)] -= w;
    }
    // discrete Laplacian; the half cell at r = 1 has no outer flux, so its
    // value is extrapolated from the interior instead
    let mut lap = -(&vi * &k);
    for j in 0..np {
        lap[(np - 1, j)] = 2.0 * lap[(np - 2, j)] - lap[(np - 3, j)];
    }
    let l = &vi * &kf * lap + &vi * g * ((1.0 - n) * beta);
    let l = drop_last(&l);
    Ok(DiscreteOperator {
        params,
        grid: mesh.r[..grid_size].to_vec(),
        matrix: l.clone(),
        nodal: l,
        symmetric: false,
    })
}

impl DiscreteOperator {
    /// Eigenvalues (re, im), ascending in modulus.
    pub fn eigenvalues(&self) -> Result<Vec<(f64, f64)>, SpectralError> {
        let mut ev: Vec<(f64, f64)> = if self.symmetric {
            eig_banded_symmetric(&self.matrix)?.into_iter().map(|(l, _)| (l, 0.0)).collect()
        } else {
            self.matrix.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect()
        };
        ev.sort_by(|a, b| a.0.hypot(a.1).total_cmp(&b.0.hypot(b.1)));
        Ok(ev)
    }

    /// Real parts of the eigenvalues, ascending in modulus.
    pub fn real_spectrum(&self) -> Result<Vec<f64>, SpectralError> {
        Ok(self.eigenvalues()?.into_iter().map(|z| z.0).collect())
    }

    /// Sign of the dominant part of the low spectrum: −1 when the operator is
    /// dissipative (printed sign convention), +1 otherwise.
    pub fn observed_sign(&self) -> Result<f64, SpectralError> {
        let ev = self.real_spectrum()?;
        let s: f64 = ev.iter().skip(1).take(4).sum();
        Ok(if s < 0.0 { -1.0 } else { 1.0 })
    }

    pub fn symmetry_defect(&self) -> f64 {
        crate::numerics::eig::symmetry_defect(&self.matrix)
    }

    /// Discrete operator applied to nodal values.
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(values);
        (&self.nodal * v).iter().copied().collect()
    }

    /// ‖Lψ‖ / (‖L‖·‖ψ‖) in Frobenius/Euclidean norms.
    pub fn relative_residual(&self, values: &[f64]) -> f64 {
        let r: f64 = self.apply(values).iter().map(|x| x * x).sum::<f64>().sqrt();
        let v: f64 = values.iter().map(|x| x * x).sum::<f64>().sqrt();
        r / (self.nodal.norm() * v)
    }

    fn check_against_closed_form(&self) -> Result<(), SpectralError> {
        let expected = eigenvalues_closed_form(2, self.params.dim, 2)?;
        let ev = self.real_spectrum()?;
        let observed = ev.get(1).copied().unwrap_or(f64::NAN).abs();
        if !((observed - expected).abs() <= COARSE_TOL * expected) {
            return Err(SpectralError::GridTooCoarse { observed, expected });
        }
        Ok(())
    }
}

/// Explicit-profile variant of the profile form at n = 1, for comparison
/// with the self-adjoint form.
pub fn divergence_form_n1(dim: usize, grid_size: usize) -> Result<DiscreteOperator, SpectralError> {
    let p = explicit_profile_n1(dim, 1.0)?;
    discretize_with_profile(&p, grid_size)
}
