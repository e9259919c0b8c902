//! Free-boundary profiles for general n by shooting inward from the interface.

use super::interface::{interface_expansion, InterfaceExpansion};
use super::params::{ParamError, ProblemParams};
use super::profile::{Profile, ProblemKind};
use crate::numerics::{integrate_ivp, try_solve_bracketed, Direction, EventSpec, IvpError, IvpOptions};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("no match found in the shooting bracket: {0}")]
    NoMatch(String),
    #[error("integration failed: {0}")]
    Ivp(#[from] IvpError),
    #[error(transparent)]
    Orbit(#[from] crate::orbits::OrbitError),
    #[error("{0}")]
    Numerical(String),
}

#[derive(Debug, Clone)]
pub struct FbpOptions {
    pub tol: f64,
    pub order: usize,
    pub scan_points: usize,
}

impl Default for FbpOptions {
    fn default() -> Self {
        Self { tol: 1e-12, order: 10, scan_points: 161 }
    }
}

/// Solved shooting problem with the interface at y = 1 before normalization.
#[derive(Debug, Clone)]
pub struct FbpSolution {
    /// Profile normalized to F(0) = 1.
    pub profile: Profile,
    /// Shooting parameter at the match (A, c or η depending on the form).
    pub parameter: f64,
    /// Distance from the interface where integration was launched.
    pub launch_distance: f64,
    pub expansion: InterfaceExpansion,
    /// Number of distinct matches found in the scanned bracket.
    pub matches: usize,
}

const R_MIN: f64 = 1e-4;
const SENTINEL: f64 = 1e6;
const TURN_GUARD: f64 = 0.02;

struct Shooter<'a> {
    params: &'a ProblemParams,
    expansion: InterfaceExpansion,
    tol: f64,
}

impl Shooter<'_> {
    fn launch_distance(&self, q: f64) -> f64 {
        match &self.expansion {
            InterfaceExpansion::Regular { delta, .. } => {
                let eps = self.params.beta() * q.powf(-self.params.n);
                (0.02 * delta.min(1.0) / eps).powf(1.0 / delta).clamp(1e-10, 1e-2)
            }
            InterfaceExpansion::LogCorrected { .. } => 1e-6,
            InterfaceExpansion::Singular { gamma, .. } => (1e-3 / q.abs().max(1e-300)).powf(1.0 / gamma).clamp(1e-10, 1e-3),
        }
    }

    fn end_radius(&self) -> f64 {
        if self.params.dim == 1 {
            0.0
        } else {
            R_MIN
        }
    }

    /// State (F, r^{N−1}F′, ΔF) at distance s from the interface.
    fn launch_state(&self, q: f64, s: f64) -> [f64; 3] {
        let [f, fp, fpp] = self.expansion.launch(self.params, q, s);
        let r = 1.0 - s;
        let nm1 = self.params.dim as f64 - 1.0;
        [f, r.powf(nm1) * fp, fpp + nm1 * fp / r]
    }

    fn rhs(&self) -> impl Fn(f64, &[f64], &mut [f64]) + '_ {
        let beta = self.params.beta();
        let n = self.params.n;
        let nm1 = self.params.dim as i32 - 1;
        move |r, x, d| {
            let w = r.powi(nm1);
            d[0] = if nm1 == 0 { x[1] } else { x[1] / w };
            d[1] = w * x[2];
            d[2] = beta * r * x[0].signum() * x[0].abs().powf(1.0 - n);
        }
    }

    /// Normalized mismatch of the symmetry condition at the origin; a large
    /// positive sentinel when F vanishes first.
    fn mismatch(&self, q: f64) -> Option<f64> {
        let s0 = self.launch_distance(q);
        let x0 = self.launch_state(q, s0);
        if !x0.iter().all(|v| v.is_finite()) || x0[0] <= 0.0 {
            return None;
        }
        // A zero of F, or F turning back up away from the origin, marks an
        // overshooting trajectory; both (and step collapse as F → 0) map to a
        // positive sentinel.
        let ev = [
            EventSpec::new(|_, x: &[f64]| x[0]).terminal(),
            EventSpec::new(|r, x: &[f64]| if r > TURN_GUARD { x[1] } else { -1.0 })
                .direction(Direction::Rising)
                .terminal(),
        ];
        let opts = IvpOptions::tolerances(self.tol, self.tol * 1e-6 * x0[0]).sparse();
        let Ok(tr) = integrate_ivp(self.rhs(), 1.0 - s0, &x0, self.end_radius(), &opts, &ev) else {
            return Some(SENTINEL);
        };
        if tr.terminated {
            return Some(SENTINEL);
        }
        let x = tr.last_state();
        let r = self.end_radius();
        let nf = self.params.dim as f64;
        let h_regular = r.powf(nf) * x[2] / nf;
        Some((x[1] - h_regular) / x[0])
    }
}

fn scan_grid(expansion: &InterfaceExpansion, points: usize) -> Vec<f64> {
    let geo = |lo: f64, hi: f64, k: usize| -> Vec<f64> {
        (0..k).map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (k - 1) as f64)).collect()
    };
    match expansion {
        InterfaceExpansion::Regular { .. } => geo(-16.0, 4.0, points),
        InterfaceExpansion::LogCorrected { .. } => {
            let l0 = -(1e-6f64).ln();
            geo(-3.0, 5.0, points).into_iter().map(|x| x - l0).collect()
        }
        InterfaceExpansion::Singular { .. } => {
            let half = geo(-6.0, 6.0, points / 2);
            let mut g: Vec<f64> = half.iter().rev().map(|x| -x).collect();
            g.push(0.0);
            g.extend(half);
            g
        }
    }
}

/// Symmetry mismatch at the origin for shooting parameter `q` (diagnostic).
pub fn fbp_mismatch(params: &ProblemParams, q: f64, opts: &FbpOptions) -> Result<Option<f64>, ProfileError> {
    let expansion = interface_expansion(params, opts.order)?;
    Ok(Shooter { params, expansion, tol: opts.tol }.mismatch(q))
}

/// FBP profile normalized to F(0) = 1, launched from the interface expansion.
pub fn shoot_fbp_profile(params: &ProblemParams) -> Result<Profile, ProfileError> {
    Ok(shoot_fbp_profile_with(params, &FbpOptions::default())?.profile)
}

pub fn shoot_fbp_profile_with(params: &ProblemParams, opts: &FbpOptions) -> Result<FbpSolution, ProfileError> {
    let expansion = interface_expansion(params, opts.order)?;
    let shooter = Shooter { params, expansion: expansion.clone(), tol: opts.tol };
    let grid = scan_grid(&expansion, opts.scan_points);
    let vals: Vec<Option<f64>> = grid.iter().map(|&q| shooter.mismatch(q)).collect();
    let mut roots = Vec::new();
    for i in 0..grid.len() - 1 {
        let (Some(a), Some(b)) = (vals[i], vals[i + 1]) else { continue };
        if a * b > 0.0 || a.abs() >= SENTINEL && b.abs() >= SENTINEL {
            continue;
        }
        let g = |q: f64| shooter.mismatch(q).unwrap_or(f64::NAN);
        let span = (grid[i + 1] - grid[i]).abs();
        let Ok(q) = try_solve_bracketed(g, grid[i], grid[i + 1], 1e-15 * span.max(grid[i].abs())) else { continue };
        if shooter.mismatch(q).is_some_and(|m| m.abs() < 1e-6) {
            roots.push(q);
        }
    }
    let Some(&q) = roots.first() else {
        return Err(ProfileError::NoMatch(format!("n = {}, N = {}", params.n, params.dim)));
    };
    let (profile, s0) = build_profile(&shooter, q)?;
    Ok(FbpSolution { profile, parameter: q, launch_distance: s0, expansion, matches: roots.len() })
}

fn build_profile(sh: &Shooter, q: f64) -> Result<(Profile, f64), ProfileError> {
    let params = sh.params;
    let nm1 = params.dim as f64 - 1.0;
    let n = params.n;
    let beta = params.beta();
    let s0 = sh.launch_distance(q);
    let x0 = sh.launch_state(q, s0);
    let opts = IvpOptions::tolerances(sh.tol, sh.tol * 1e-6 * x0[0]).h_max(5e-3);
    let tr = integrate_ivp(sh.rhs(), 1.0 - s0, &x0, sh.end_radius(), &opts, &[])?;

    let mut rows: Vec<[f64; 5]> = Vec::new();
    let d3_of = |r: f64, f: f64, fp: f64, fpp: f64| {
        let wp = beta * r * f.signum() * f.abs().powf(1.0 - n);
        if r == 0.0 || nm1 == 0.0 {
            wp / (1.0 + nm1 / 2.0)
        } else {
            wp - nm1 * (fpp / r - fp / (r * r))
        }
    };
    for (r, x) in tr.times.iter().zip(&tr.states).rev() {
        let r = *r;
        let fp = if nm1 == 0.0 { x[1] } else { x[1] / r.powf(nm1) };
        let fpp = if r == 0.0 { x[2] / (1.0 + nm1) } else { x[2] - nm1 * fp / r };
        rows.push([r, x[0], fp, fpp, d3_of(r, x[0], fp, fpp)]);
    }
    if rows[0][0] > 0.0 {
        let [r, f, _, fpp, _] = rows[0];
        let w = fpp;
        rows.insert(0, [0.0, f - w * r * r / 2.0, 0.0, w, 0.0]);
    }
    // expansion segment between the launch point and the interface
    let layers = 40;
    for j in 1..=layers {
        let s = s0 * (1e-12 / s0).max(1e-8).powf(j as f64 / layers as f64);
        let [f, fp, fpp] = sh.expansion.launch(params, q, s);
        rows.push([1.0 - s, f, fp, fpp, d3_of(1.0 - s, f, fp, fpp)]);
    }
    let last = *rows.last().unwrap();
    let end_d2 = match &sh.expansion {
        InterfaceExpansion::Regular { .. } => 2.0 * q,
        _ => last[3],
    };
    rows.push([1.0, 0.0, 0.0, end_d2, last[4]]);
    rows.dedup_by(|a, b| a[0] <= b[0]);

    let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
    let raw = Profile::assemble(*params, col(0), col(1), col(2), col(3), col(4), ProblemKind::Fbp);
    let f0 = raw.values[0];
    Ok((raw.rescaled(f0.powf(-n / 4.0)), s0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_matches_explicit() {
        let p = ProblemParams::critical(1.0, 1).unwrap();
        let sol = shoot_fbp_profile_with(&p, &FbpOptions::default()).unwrap();
        assert!((sol.parameter - 1.0 / 30.0).abs() < 1e-10, "A = {}", sol.parameter);
        let f2 = sol.profile.second_deriv_origin;
        assert!((f2 + 4.0 / 120f64.sqrt()).abs() < 1e-8, "F''(0) = {f2}");
    }
}
