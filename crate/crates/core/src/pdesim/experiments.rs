//! Driven runs: trace recording, the critical decay experiment and the
//! supercritical convergence experiment.

use super::scheme::{lyapunov_monitor, Scheme, SimState};
use super::SimError;
use crate::profiles::params::explicit_c0;
use crate::profiles::ProblemParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub n: f64,
    /// Absorption exponent; the critical p₀ when absent.
    pub p: Option<f64>,
    /// Height of the initial bell c₀(a₀² − y²)₊².
    pub amplitude: f64,
    pub spacing: f64,
    /// Half-width of the domain in units of the initial support radius.
    pub domain_factor: f64,
    pub tau_max: f64,
    pub dt0: f64,
    pub dt_growth: f64,
    /// Step cap max(dt_max, dt_rel·τ).
    pub dt_max: f64,
    pub dt_rel: f64,
    pub absorb: bool,
    /// ε = max(eps_factor·(sup data)ⁿ, βh⁴/8).
    pub eps_factor: f64,
    pub snapshots: Vec<f64>,
    pub check_regularization: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 1.0,
            p: None,
            amplitude: 1.0,
            spacing: 0.02,
            domain_factor: 3.0,
            tau_max: 200.0,
            dt0: 1e-3,
            dt_growth: 1.1,
            dt_max: 0.05,
            dt_rel: 0.005,
            absorb: true,
            eps_factor: 1e-8,
            snapshots: Vec::new(),
            check_regularization: false,
        }
    }
}

impl RunConfig {
    pub fn params(&self) -> Result<ProblemParams, SimError> {
        let base = ProblemParams::critical(self.n, 1)?;
        Ok(match self.p {
            Some(p) => base.with_p(p)?,
            None => base,
        })
    }

    fn validate(&self) -> Result<(), SimError> {
        let positive = [
            ("amplitude", self.amplitude),
            ("spacing", self.spacing),
            ("tau_max", self.tau_max),
            ("dt0", self.dt0),
            ("dt_max", self.dt_max),
            ("eps_factor", self.eps_factor),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SimError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.domain_factor > 1.0) || !(self.dt_growth >= 1.0) || !(self.dt_rel >= 0.0) {
            return Err(SimError::Config("domain_factor > 1, dt_growth >= 1 and dt_rel >= 0 required".into()));
        }
        Ok(())
    }

    /// Initial support radius a₀ with c₀a₀⁴ = amplitude.
    pub fn initial_radius(&self) -> f64 {
        (self.amplitude / explicit_c0(2, 1)).powf(0.25)
    }

    pub fn initial_state(&self) -> Result<SimState, SimError> {
        self.validate()?;
        let params = self.params()?;
        let c0 = explicit_c0(2, 1);
        let a0 = self.initial_radius();
        let half = self.domain_factor * a0;
        let cells = (2.0 * half / self.spacing).round() as usize;
        let mut st = SimState::new(params, half, cells, |y| {
            let s = a0 * a0 - y * y;
            if s > 0.0 {
                c0 * s * s
            } else {
                0.0
            }
        });
        // the grid-scale mode grows at rate β unless 16ε/h⁴ damps it
        let floor = params.beta() * self.spacing.powi(4) / 8.0;
        st.eps = (self.eps_factor * self.amplitude.powf(self.n)).max(floor);
        Ok(st)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TraceRow {
    pub tau: f64,
    pub b_amp: f64,
    pub b_supp: f64,
    pub mass: f64,
    pub lyapunov: f64,
    pub fitted_exponent: f64,
    /// dM/dτ + e^{−γτ}∫|v|^{p−1}v over the step.
    pub mass_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimTrace {
    pub params: ProblemParams,
    pub rows: Vec<TraceRow>,
    pub enlargements: usize,
    #[serde(skip)]
    pub snapshots: Vec<SimState>,
    #[serde(skip)]
    pub final_state: Option<SimState>,
}

impl SimTrace {
    pub fn to_csv(&self) -> String {
        use crate::output::fmt17;
        let mut out = String::from("tau,b_amp,b_supp,mass,lyapunov,fitted_exponent\n");
        for r in &self.rows {
            let cols = [r.tau, r.b_amp, r.b_supp, r.mass, r.lyapunov, r.fitted_exponent];
            out += &cols.iter().map(|v| fmt17(*v)).collect::<Vec<_>>().join(",");
            out.push('\n');
        }
        out
    }

    /// Least-squares slope of ln b_amp against ln τ over τ ∈ [lo, hi].
    pub fn decay_exponent(&self, lo: f64, hi: f64) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.tau >= lo && r.tau <= hi && r.b_amp > 0.0)
            .map(|r| (r.tau.ln(), r.b_amp.ln()))
            .collect();
        slope(&pts)
    }

    /// Row nearest to τ.
    pub fn at(&self, tau: f64) -> Option<&TraceRow> {
        self.rows.iter().min_by(|a, b| (a.tau - tau).abs().total_cmp(&(b.tau - tau).abs()))
    }

    pub fn max_mass_defect(&self) -> f64 {
        self.rows.iter().fold(0.0_f64, |m, r| m.max(r.mass_defect.abs()))
    }

    fn fill_local_exponents(&mut self) {
        let logs: Vec<(f64, f64)> = self.rows.iter().map(|r| (r.tau.ln(), r.b_amp.max(f64::MIN_POSITIVE).ln())).collect();
        let mut start = 0;
        for i in 0..self.rows.len() {
            let tau = self.rows[i].tau;
            while self.rows[start].tau < 0.5 * tau {
                start += 1;
            }
            self.rows[i].fitted_exponent = if tau >= 2.0 && i >= start + 2 { slope(&logs[start..=i]) } else { f64::NAN };
        }
    }
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx).powi(2)));
    num / den
}

/// Runs the configured experiment to τ_max, recording one row per step.
pub fn run_trace(cfg: &RunConfig) -> Result<SimTrace, SimError> {
    let mut st = cfg.initial_state()?;
    let trace = advance(cfg, &mut st)?;
    if cfg.check_regularization {
        let mut half = cfg.initial_state()?;
        half.eps *= 0.5;
        let other = advance(cfg, &mut half)?;
        let (a, b) = (last_amp(&trace), last_amp(&other));
        let change = (a - b).abs() / a;
        if !(change < 0.01) {
            return Err(SimError::Regularization { change });
        }
    }
    Ok(trace)
}

fn last_amp(t: &SimTrace) -> f64 {
    t.rows.last().map_or(f64::NAN, |r| r.b_amp)
}

fn advance(cfg: &RunConfig, st: &mut SimState) -> Result<SimTrace, SimError> {
    let scheme = Scheme::new(st.params, cfg.absorb);
    let lyap = |s: &SimState| if s.params.n == 1.0 { lyapunov_monitor(s) } else { f64::NAN };
    let mut snaps: Vec<f64> = cfg.snapshots.iter().copied().filter(|t| *t >= 0.0 && *t <= cfg.tau_max).collect();
    snaps.sort_by(f64::total_cmp);
    let mut trace = SimTrace { params: st.params, rows: Vec::new(), enlargements: 0, snapshots: Vec::new(), final_state: None };
    let mut pending = snaps.into_iter().peekable();
    while pending.peek().is_some_and(|t| *t <= st.tau) {
        pending.next();
        trace.snapshots.push(st.clone());
    }
    let mut dt = cfg.dt0;
    while st.tau < cfg.tau_max - 1e-12 {
        let mut d = dt.min(cfg.tau_max - st.tau);
        if let Some(&t) = pending.peek() {
            d = d.min(t - st.tau);
        }
        let m0 = st.mass();
        let taken = scheme.step(st, d)?;
        let defect = (st.mass() - m0) / taken + scheme.absorption_integral(st);
        while pending.peek().is_some_and(|t| *t <= st.tau + 1e-12) {
            pending.next();
            trace.snapshots.push(st.clone());
        }
        if st.support_radius() > st.half_width() - 4.0 * st.h() {
            if trace.enlargements >= 8 {
                return Err(SimError::SupportContact { tau: st.tau });
            }
            st.enlarge(1.5);
            trace.enlargements += 1;
        }
        trace.rows.push(TraceRow {
            tau: st.tau,
            b_amp: st.amplitude(),
            b_supp: st.support_radius(),
            mass: st.mass(),
            lyapunov: lyap(st),
            fitted_exponent: f64::NAN,
            mass_defect: defect,
        });
        dt = (taken * cfg.dt_growth).min(cfg.dt_max.max(cfg.dt_rel * st.tau));
    }
    trace.fill_local_exponents();
    trace.final_state = Some(st.clone());
    Ok(trace)
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalReport {
    pub trace: SimTrace,
    /// Decay exponent of b_amp fitted over the final decade of τ.
    pub final_decade_exponent: f64,
    /// b_amp·τ^{1/(p−1)} at τ_max/10 and τ_max.
    pub compensated: [f64; 2],
    pub compensated_drift: f64,
    /// sup-distance of v/b against ζ = y/b^{n/4} to the unit-height profile.
    pub collapse_error: f64,
    pub mass_monotone: bool,
}

pub fn run_critical_experiment(cfg: &RunConfig) -> Result<CriticalReport, SimError> {
    let params = cfg.params()?;
    if (params.p - params.p0()).abs() > 1e-12 {
        return Err(SimError::Config(format!("critical run needs p = p0 = {}", params.p0())));
    }
    let trace = run_trace(cfg)?;
    let tmax = cfg.tau_max;
    let k = 1.0 / (params.p - 1.0);
    let comp = |t: f64| trace.at(t).map_or(f64::NAN, |r| r.b_amp * r.tau.powf(k));
    let compensated = [comp(tmax / 10.0), comp(tmax)];
    let st = trace.final_state.as_ref().expect("run stores its final state");
    Ok(CriticalReport {
        final_decade_exponent: trace.decay_exponent(tmax / 10.0, tmax),
        compensated,
        compensated_drift: (compensated[1] - compensated[0]).abs() / compensated[1],
        collapse_error: collapse_error(st),
        mass_monotone: trace.rows.windows(2).all(|w| w[1].mass < w[0].mass),
        trace,
    })
}

/// sup_ζ |v(b^{n/4}ζ)/b − F₁(ζ)| with F₁ the unit-height n = 1 profile.
pub fn collapse_error(st: &SimState) -> f64 {
    let b = st.amplitude();
    let c0 = explicit_c0(2, 1);
    let a = c0.powf(-0.25);
    let scale = b.powf(st.params.n / 4.0);
    st.grid
        .iter()
        .zip(&st.v)
        .map(|(y, v)| {
            let z = y / scale;
            let s = (a * a - z * z).max(0.0);
            (v / b - c0 * s * s).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct SupercriticalReport {
    pub trace: SimTrace,
    pub gamma: f64,
    pub limit_mass: f64,
    pub mass_monotone: bool,
    /// (τ, sup-distance to the mass-matched n = 1 profile) at the snapshots.
    pub profile_distances: Vec<[f64; 2]>,
    /// Smallest step change of E after τ = 5.
    pub min_lyapunov_increment: f64,
}

/// sup |v − F_a| with F_a = c₀(a² − y²)₊² of the same mass (N = 1).
pub fn mass_matched_distance(st: &SimState) -> f64 {
    let c0 = explicit_c0(2, 1);
    let a = (st.mass() / (c0 * 16.0 / 15.0)).powf(0.2);
    st.grid
        .iter()
        .zip(&st.v)
        .map(|(y, v)| {
            let s = (a * a - y * y).max(0.0);
            (v - c0 * s * s).abs()
        })
        .fold(0.0, f64::max)
}

pub fn run_supercritical_experiment(cfg: &RunConfig) -> Result<SupercriticalReport, SimError> {
    let params = cfg.params()?;
    if !(params.p > params.p0()) {
        return Err(SimError::Config(format!("supercritical run needs p > p0 = {}", params.p0())));
    }
    let mut cfg = cfg.clone();
    if cfg.snapshots.is_empty() {
        let k = 10;
        cfg.snapshots = (1..=k).map(|i| cfg.tau_max * i as f64 / k as f64).collect();
    }
    let trace = run_trace(&cfg)?;
    let gamma = Scheme::new(params, true).gamma;
    let profile_distances = if params.n == 1.0 {
        trace.snapshots.iter().map(|s| [s.tau, mass_matched_distance(s)]).collect()
    } else {
        Vec::new()
    };
    let late: Vec<&super::TraceRow> = trace.rows.iter().filter(|r| r.tau >= 5.0).collect();
    let min_lyapunov_increment =
        late.windows(2).map(|w| w[1].lyapunov - w[0].lyapunov).fold(f64::INFINITY, f64::min);
    Ok(SupercriticalReport {
        gamma,
        limit_mass: trace.rows.last().map_or(f64::NAN, |r| r.mass),
        mass_monotone: trace.rows.windows(2).all(|w| w[1].mass <= w[0].mass),
        profile_distances,
        min_lyapunov_increment,
        trace,
    })
}
