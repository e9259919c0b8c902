//! The n = 0 kernel F‴ = yF/4 and its approximation by FBP profiles.

use super::fbp::ProfileError;
use super::params::ProblemParams;
use super::profile::{Profile, ProblemKind};
use crate::numerics::{integrate_ivp, try_solve_bracketed, IvpOptions, Trajectory};
use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

/// WKBJ data of the decaying oscillatory bundle at infinity.
#[derive(Debug, Clone, Serialize)]
pub struct KernelBundle {
    pub c1: f64,
    pub c2: f64,
    /// Bundle amplitudes of y^{−1/3}e^{−c₁y^{4/3}}(A₁cos c₂y^{4/3} + A₂sin c₂y^{4/3}).
    pub a1: f64,
    pub a2: f64,
    /// Phase s₀ with A₁cos + A₂sin = R cos(c₂y^{4/3} − s₀).
    pub s0: f64,
}

/// c₁ = (3/8)·4^{−1/3}.
pub fn wkbj_c1() -> f64 {
    0.375 * 4f64.powf(-1.0 / 3.0)
}

/// c₂ = √3·c₁.
pub fn wkbj_c2() -> f64 {
    wkbj_c1() * 3f64.sqrt()
}

fn kernel_rhs(y: f64, x: &[f64], d: &mut [f64]) {
    d[0] = x[1];
    d[1] = x[2];
    d[2] = 0.25 * y * x[0];
}

fn params_n0() -> ProblemParams {
    ProblemParams::critical(0.0, 1).expect("valid n = 0 parameters")
}

/// Profile on [0, Y] from a backward trajectory scaled by `c`.
fn profile_from_backward(tr: &Trajectory, c: f64, kind: ProblemKind) -> Profile {
    let mut rows: Vec<[f64; 5]> = tr
        .times
        .iter()
        .zip(&tr.states)
        .rev()
        .map(|(&y, x)| [y, c * x[0], c * x[1], c * x[2], 0.25 * y * c * x[0]])
        .collect();
    rows.dedup_by(|a, b| a[0] <= b[0]);
    let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
    Profile::assemble(params_n0(), col(0), col(1), col(2), col(3), col(4), kind)
}

/// Matching radius where the bundle envelope has dropped below `tol`.
pub fn kernel_radius(tol: f64) -> f64 {
    ((-tol.ln() + 2.0) / wkbj_c1()).powf(0.75)
}

/// Kernel normalized to F(0) = 1 on [0, Y]; `mass` records ∫F over ℝ.
pub fn fundamental_kernel(tol: f64) -> Result<(Profile, KernelBundle), ProfileError> {
    let big_y = kernel_radius(tol.clamp(1e-14, 1e-4));
    let opts = IvpOptions::tolerances(1e-13, 1e-300).h_max(0.05);
    let launch = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
    let mut ends = Vec::new();
    let mut trajs = Vec::new();
    for x0 in &launch {
        let tr = integrate_ivp(kernel_rhs, big_y, x0, 0.0, &opts, &[])?;
        ends.push(tr.last_state().to_vec());
        trajs.push(tr);
    }
    // combination with F′(0) = 0 and F(0) = 1
    let m = Matrix2::new(ends[0][0], ends[1][0], ends[0][1], ends[1][1]);
    let w = m
        .lu()
        .solve(&Vector2::new(1.0, 0.0))
        .ok_or_else(|| ProfileError::Numerical("degenerate kernel launch".into()))?;
    let x0: Vec<f64> = (0..3).map(|i| w[0] * launch[0][i] + w[1] * launch[1][i]).collect();
    let tr = integrate_ivp(kernel_rhs, big_y, &x0, 0.0, &opts, &[])?;
    let end = tr.last_state();
    if (end[0] - 1.0).abs() > 1e-8 || end[1].abs() > 1e-8 {
        return Err(ProfileError::Numerical(format!(
            "growth-mode contamination at Y = {big_y}: F(0) = {}, F'(0) = {}",
            end[0], end[1]
        )));
    }
    let profile = profile_from_backward(&tr, 1.0 / end[0], ProblemKind::CauchyProblem);
    let bundle = fit_bundle(&profile);
    Ok((profile, bundle))
}

/// Least-squares fit of the bundle amplitudes on the outer half of the range.
fn fit_bundle(p: &Profile) -> KernelBundle {
    let (c1, c2) = (wkbj_c1(), wkbj_c2());
    let (mut ata, mut atb) = (Matrix2::zeros(), Vector2::zeros());
    for (&y, &f) in p.grid.iter().zip(&p.values) {
        if y < 0.5 * p.interface {
            continue;
        }
        let z = y.powf(4.0 / 3.0);
        let env = y.powf(-1.0 / 3.0) * (-c1 * z).exp();
        let row = Vector2::new(env * (c2 * z).cos(), env * (c2 * z).sin());
        let wgt = 1.0 / (env * env);
        ata += row * row.transpose() * wgt;
        atb += row * f * wgt;
    }
    let sol = ata.lu().solve(&atb).unwrap_or_else(Vector2::zeros);
    KernelBundle { c1, c2, a1: sol[0], a2: sol[1], s0: sol[1].atan2(sol[0]) }
}

/// F′(0) after backward integration from (F, F′, F″)(Y) = (0, 0, 1).
fn sequence_mismatch(big_y: f64) -> Option<f64> {
    let tr = integrate_ivp(kernel_rhs, big_y, &[0.0, 0.0, 1.0], 0.0, &IvpOptions::tolerances(1e-13, 1e-300).sparse(), &[]).ok()?;
    Some(tr.last_state()[1])
}

/// k-th FBP approximant (k-th interface radius y_k in increasing order),
/// normalized to F(0) = 1.
pub fn fbp_kernel_sequence(k: usize) -> Result<Profile, ProfileError> {
    if k == 0 {
        return Err(ProfileError::NoMatch("sequence index starts at 1".into()));
    }
    let step = 0.05;
    let limit = 4.0 * (std::f64::consts::PI * k as f64 / wkbj_c2()).powf(0.75) + 10.0;
    let mut found = 0;
    let mut y0 = 0.5;
    let mut g0 = sequence_mismatch(y0).ok_or_else(|| ProfileError::Numerical("kernel sequence scan failed".into()))?;
    while y0 < limit {
        let y1 = y0 + step;
        let g1 = sequence_mismatch(y1).ok_or_else(|| ProfileError::Numerical("kernel sequence scan failed".into()))?;
        if g0 * g1 < 0.0 {
            found += 1;
            if found == k {
                let yk = try_solve_bracketed(|y| sequence_mismatch(y).unwrap_or(f64::NAN), y0, y1, 1e-14)
                    .map_err(|e| ProfileError::NoMatch(e.to_string()))?;
                let tr = integrate_ivp(kernel_rhs, yk, &[0.0, 0.0, 1.0], 0.0, &IvpOptions::tolerances(1e-13, 1e-300).h_max(0.05), &[])?;
                let f0 = tr.last_state()[0];
                let mut p = profile_from_backward(&tr, 1.0 / f0, ProblemKind::Fbp);
                p.interface = yk;
                return Ok(p);
            }
        }
        y0 = y1;
        g0 = g1;
    }
    Err(ProfileError::NoMatch(format!("only {found} interface radii below {limit}")))
}

/// Predicted asymptotic location (πk/c₂)^{3/4} of the k-th interface.
pub fn sequence_asymptote(k: usize) -> f64 {
    (std::f64::consts::PI * k as f64 / wkbj_c2()).powf(0.75)
}

/// sup |a − b| over [−y_max, y_max] on a uniform sample (both even).
pub fn sup_distance(a: &Profile, b: &Profile, y_max: f64, samples: usize) -> f64 {
    (0..=samples)
        .map(|i| y_max * i as f64 / samples as f64)
        .map(|y| (a.eval(y) - b.eval(y)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wkbj_constants() {
        assert!((wkbj_c1() - 0.23624).abs() < 5e-6);
        assert!((wkbj_c2() - 0.40917).abs() < 5e-6);
        assert!((wkbj_c2() / wkbj_c1() - 3f64.sqrt()).abs() < 1e-15);
    }
}
