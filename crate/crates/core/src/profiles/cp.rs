//! Cauchy-problem profiles for N = 1: the interface behaviour follows the
//! one-parameter bundle F = (1−y)^μ φ*(ln(1−y) + s0) built on the periodic
//! orbit, and the phase s0 is fixed by the symmetry condition at the origin.

use super::fbp::ProfileError;
use super::kernel::fundamental_kernel;
use super::params::{ParamError, ProblemParams};
use super::profile::{Profile, ProblemKind};
use crate::numerics::try_solve_bracketed;
use crate::orbits::{
    default_initial_state, find_periodic_orbit, n_plus, patched_flow, patched_flow_from_zero, FlowOptions,
    OscillatorySystem, PatchedFlow, ZeroCrossing,
};

#[derive(Debug, Clone)]
pub struct CpOptions {
    /// Launch point σ = ln(1−y) of the bundle; e^σ is the distance to the interface.
    pub launch: f64,
    /// Phase scan points per period.
    pub scan_points: usize,
    /// Samples in σ when building the profile.
    pub samples: usize,
    /// Truncation tolerance of the n = 0 kernel.
    pub kernel_tol: f64,
}

impl Default for CpOptions {
    fn default() -> Self {
        Self { launch: -20.0, scan_points: 48, samples: 4000, kernel_tol: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub struct CpSolution {
    /// Profile normalized to F(0) = 1; `mass` records ∫F.
    pub profile: Profile,
    /// Matched phase s0 and orbit period (absent for the n = 0 kernel).
    pub phase: Option<f64>,
    pub period: Option<f64>,
    /// Admissible matches (F(0) > 0) within one period of phase.
    pub matches: usize,
}

pub fn shoot_cp_profile(n: f64) -> Result<Profile, ProfileError> {
    Ok(shoot_cp_profile_with(n, &CpOptions::default())?.profile)
}

struct Bundle {
    sys: OscillatorySystem,
    crossing: ZeroCrossing,
    launch: f64,
}

impl Bundle {
    fn gain(&self) -> f64 {
        self.sys.gain()
    }

    /// Orbit state at phase `s0` past the upward zero (internal units).
    fn orbit_state(&self, s0: f64) -> Result<[f64; 3], ProfileError> {
        let k = self.gain();
        Ok(patched_flow_from_zero(&self.sys, &|_| k, self.crossing, s0, &FlowOptions::default())?.state_end)
    }

    fn run(&self, s0: f64, dense: bool) -> Result<PatchedFlow, ProfileError> {
        let k = self.gain();
        let x0 = self.orbit_state(s0)?;
        let opts = FlowOptions { dense, ..FlowOptions::default() };
        Ok(patched_flow(&self.sys, &|s: f64| k * (1.0 - s.exp()), x0, self.launch, 0.0, &opts)?)
    }

    /// −(φ′ + μφ) at σ = 0, proportional to F′(0).
    fn mismatch(&self, s0: f64) -> f64 {
        match self.run(s0, false) {
            Ok(fl) => -(fl.state_end[1] + self.sys.mu * fl.state_end[0]),
            Err(_) => f64::NAN,
        }
    }
}

pub fn shoot_cp_profile_with(n: f64, opts: &CpOptions) -> Result<CpSolution, ProfileError> {
    if n == 0.0 {
        let (profile, _) = fundamental_kernel(opts.kernel_tol)?;
        return Ok(CpSolution { profile, phase: None, period: None, matches: 1 });
    }
    if !(n > 0.0 && n < n_plus()) {
        return Err(ParamError::Unsupported(format!("oscillatory bundle needs n in [0, n+), got {n}")).into());
    }
    let params = ProblemParams::critical(n, 1)?;
    let sys = OscillatorySystem::new(n)?;
    let orbit = find_periodic_orbit(n, default_initial_state(n)?)?;
    let scale = sys.amplitude_scale();
    let crossing = ZeroCrossing { s: 0.0, v: orbit.crossing[0] * scale, w: orbit.crossing[1] * scale, kappa: sys.gain() };
    let bundle = Bundle { sys, crossing, launch: opts.launch };

    let period = orbit.period;
    let offset = 4.0 * FlowOptions::default().h_stop;
    let grid: Vec<f64> = (0..=opts.scan_points).map(|i| offset + period * i as f64 / opts.scan_points as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&s| bundle.mismatch(s)).collect();
    let mut roots = Vec::new();
    for i in 0..opts.scan_points {
        if !(vals[i] * vals[i + 1] < 0.0) {
            continue;
        }
        let Ok(s0) = try_solve_bracketed(|s| bundle.mismatch(s), grid[i], grid[i + 1], 1e-13) else { continue };
        let fl = bundle.run(s0, false)?;
        if fl.state_end[0] > 0.0 {
            roots.push(s0);
        }
    }
    let Some(&s0) = roots.first() else {
        return Err(ProfileError::NoMatch(format!("no admissible phase for n = {n}")));
    };
    let profile = build_profile(&bundle, &params, s0, opts.samples)?;
    Ok(CpSolution { profile, phase: Some(s0), period: Some(period), matches: roots.len() })
}

/// F(y) = (β/κ)^{1/n} (1−y)^μ Φ(ln(1−y)) with interface at y = 1, then
/// rescaled to F(0) = 1.
fn build_profile(b: &Bundle, params: &ProblemParams, s0: f64, samples: usize) -> Result<Profile, ProfileError> {
    let fl = b.run(s0, true)?;
    let (n, mu, k) = (b.sys.n, b.sys.mu, b.gain());
    let c = (params.beta() / k).powf(1.0 / n);
    let mut rows: Vec<[f64; 5]> = Vec::with_capacity(samples + 2);
    for j in 0..=samples {
        let sigma = b.launch * j as f64 / samples as f64;
        let x = sigma.exp();
        let p = fl
            .state_at(sigma)
            .ok_or_else(|| ProfileError::Numerical(format!("no dense state at sigma = {sigma}")))?;
        let kappa = k * (1.0 - x);
        let sing = if p[0] == 0.0 { 0.0 } else { p[0].signum() * p[0].abs().powf(1.0 - n) };
        rows.push([
            1.0 - x,
            c * x.powf(mu) * p[0],
            -c * x.powf(mu - 1.0) * (mu * p[0] + p[1]),
            c * x.powf(mu - 2.0) * (mu * (mu - 1.0) * p[0] + (2.0 * mu - 1.0) * p[1] + p[2]),
            c * x.powf(mu - 3.0) * kappa * sing,
        ]);
    }
    let last = *rows.last().unwrap();
    let d2_end = if mu > 2.0 { 0.0 } else { last[3] };
    rows.push([1.0, 0.0, 0.0, d2_end, 0.0]);
    rows.dedup_by(|a, b| a[0] <= b[0]);
    let col = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<_>>();
    let raw = Profile::assemble(*params, col(0), col(1), col(2), col(3), col(4), ProblemKind::CauchyProblem);
    let f0 = raw.values[0];
    Ok(raw.rescaled(f0.powf(-n / 4.0)))
}
