//! Stable periodic orbit: transient, Poincaré return map on φ = 0, φ′ > 0,
//! Newton polish, Floquet data and integral checks.

use super::flow::{patched_flow, patched_flow_from_zero, FlowOptions, PatchedFlow, ZeroCrossing};
use super::system::OscillatorySystem;
use super::OrbitError;
use crate::numerics::solve_bracketed;
use nalgebra::{Complex, Matrix2, Matrix3, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct OrbitOptions {
    pub transient: f64,
    pub flow: FlowOptions,
    pub newton_tol: f64,
    pub max_newton: usize,
    pub samples: usize,
    /// Longest admissible return time.
    pub horizon: f64,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self { transient: 50.0, flow: FlowOptions::default(), newton_tol: 1e-12, max_newton: 30, samples: 512, horizon: 200.0 }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct OrbitSample {
    pub s: f64,
    pub phi: f64,
    pub dphi: f64,
    pub d2phi: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicOrbit {
    pub n: f64,
    pub mu: f64,
    pub period: f64,
    /// One period starting at the upward zero, uniform in s.
    pub samples: Vec<OrbitSample>,
    /// Moduli of the two nontrivial multipliers, descending.
    pub floquet_moduli: Vec<f64>,
    pub section: &'static str,
    /// (φ′, φ″) at the upward zero.
    pub crossing: [f64; 2],
    /// Return-map defect |P(u) − u| at the accepted crossing (internal units).
    pub closure_defect: f64,
    #[serde(skip)]
    pub sys: OscillatorySystem,
}

pub const SECTION: &str = "phi = 0, dphi > 0";

impl PeriodicOrbit {
    pub fn to_csv(&self) -> String {
        use crate::output::fmt17;
        let mut out = String::from("s,phi,dphi,d2phi\n");
        for p in &self.samples {
            out += &format!("{},{},{},{}\n", fmt17(p.s), fmt17(p.phi), fmt17(p.dphi), fmt17(p.d2phi));
        }
        out
    }

    fn internal_crossing(&self) -> [f64; 2] {
        let k = self.sys.amplitude_scale();
        [self.crossing[0] * k, self.crossing[1] * k]
    }

    /// max over samples of |φ(s) − ψ(s)| after aligning both at their upward zero.
    pub fn sup_distance(&self, other: &PeriodicOrbit) -> f64 {
        self.samples
            .iter()
            .map(|p| (p.phi - other.phi_at(p.s)).abs())
            .fold(0.0, f64::max)
    }

    /// φ at phase s by periodic cubic Hermite interpolation of the samples.
    pub fn phi_at(&self, s: f64) -> f64 {
        let m = self.samples.len();
        let h = self.period / m as f64;
        let t = s.rem_euclid(self.period) / h;
        let i = (t.floor() as usize).min(m - 1);
        let (a, b) = (&self.samples[i], &self.samples[(i + 1) % m]);
        let x = t - i as f64;
        let (h00, h10, h01, h11) =
            (2.0 * x.powi(3) - 3.0 * x * x + 1.0, x.powi(3) - 2.0 * x * x + x, -2.0 * x.powi(3) + 3.0 * x * x, x.powi(3) - x * x);
        h00 * a.phi + h10 * h * a.dphi + h01 * b.phi + h11 * h * b.dphi
    }
}

fn unit_gain(sys: &OscillatorySystem) -> impl Fn(f64) -> f64 {
    let k = sys.gain();
    move |_| k
}

fn zero(sys: &OscillatorySystem, u: [f64; 2]) -> ZeroCrossing {
    ZeroCrossing { s: 0.0, v: u[0], w: u[1], kappa: sys.gain() }
}

/// Return time and next upward crossing starting from the crossing `u`
/// (internal units).
pub fn return_map(sys: &OscillatorySystem, u: [f64; 2], opts: &OrbitOptions) -> Result<(f64, [f64; 2]), OrbitError> {
    let fo = FlowOptions { max_zeros: 2, dense: false, ..opts.flow.clone() };
    let fl = patched_flow_from_zero(sys, &unit_gain(sys), zero(sys, u), opts.horizon, &fo)?;
    match fl.zeros.get(1) {
        Some(z) if z.v > 0.0 => Ok((z.s, [z.v, z.w])),
        Some(_) => Err(OrbitError::NoOscillation("second crossing is not upward".into())),
        None => Err(OrbitError::NoOscillation(format!("no return within s = {}", opts.horizon))),
    }
}

struct Polished {
    u: [f64; 2],
    period: f64,
    defect: f64,
}

fn polish(sys: &OscillatorySystem, u0: [f64; 2], opts: &OrbitOptions) -> Result<Polished, OrbitError> {
    let mut u = Vector2::new(u0[0], u0[1]);
    for _ in 0..opts.max_newton {
        let (_, y) = return_map(sys, [u[0], u[1]], opts)?;
        let f = Vector2::new(y[0] - u[0], y[1] - u[1]);
        let mut jac = Matrix2::zeros();
        for k in 0..2 {
            let d = 1e-6 * u[k].abs().max(1e-6 * u.amax());
            let mut up = u;
            let mut um = u;
            up[k] += d;
            um[k] -= d;
            let (_, yp) = return_map(sys, [up[0], up[1]], opts)?;
            let (_, ym) = return_map(sys, [um[0], um[1]], opts)?;
            jac.set_column(k, &(Vector2::new(yp[0] - ym[0], yp[1] - ym[1]) / (2.0 * d)));
        }
        let du = (jac - Matrix2::identity())
            .lu()
            .solve(&(-f))
            .ok_or_else(|| OrbitError::Newton("singular return-map Jacobian".into()))?;
        u += du;
        if u[0] <= 0.0 || !u.iter().all(|c| c.is_finite()) {
            return Err(OrbitError::Newton("crossing left the section".into()));
        }
        if (0..2).map(|i| du[i].abs() / u[i].abs().max(1e-300)).fold(0.0, f64::max) < opts.newton_tol {
            let (period, y) = return_map(sys, [u[0], u[1]], opts)?;
            let defect = (y[0] - u[0]).abs().max((y[1] - u[1]).abs());
            return Ok(Polished { u: [u[0], u[1]], period, defect });
        }
    }
    Err(OrbitError::Newton(format!("return map did not converge in {} iterations", opts.max_newton)))
}

pub fn find_periodic_orbit(n: f64, initial_state: [f64; 3]) -> Result<PeriodicOrbit, OrbitError> {
    find_periodic_orbit_with(n, initial_state, &OrbitOptions::default())
}

/// Upward crossing reached after the transient from `initial_state` (φ units).
pub fn settle(sys: &OscillatorySystem, initial_state: [f64; 3], opts: &OrbitOptions) -> Result<[f64; 2], OrbitError> {
    let k = sys.amplitude_scale();
    let x0 = initial_state.map(|c| c * k);
    let fl = patched_flow(sys, &unit_gain(sys), x0, 0.0, opts.transient, &opts.flow)?;
    let up: Vec<&ZeroCrossing> = fl.zeros.iter().filter(|z| z.v > 0.0).collect();
    if fl.zeros.len() < 2 || up.is_empty() {
        return Err(OrbitError::NoOscillation(format!("{} zeros during the transient", fl.zeros.len())));
    }
    let z = up[up.len() - 1];
    Ok([z.v, z.w])
}

pub fn find_periodic_orbit_with(n: f64, initial_state: [f64; 3], opts: &OrbitOptions) -> Result<PeriodicOrbit, OrbitError> {
    let sys = OscillatorySystem::new(n)?;
    let u = settle(&sys, initial_state, opts)?;
    orbit_from_crossing(&sys, u, opts)
}

/// Polishes a crossing guess (internal units) and assembles the orbit.
pub fn orbit_from_crossing(sys: &OscillatorySystem, u: [f64; 2], opts: &OrbitOptions) -> Result<PeriodicOrbit, OrbitError> {
    let p = polish(sys, u, opts)?;
    let fo = FlowOptions { dense: true, ..opts.flow.clone() };
    let fl = patched_flow_from_zero(sys, &unit_gain(sys), zero(sys, p.u), p.period, &fo)?;
    let k = sys.amplitude_scale();
    let m = opts.samples;
    let samples = (0..m)
        .map(|i| {
            let s = p.period * i as f64 / m as f64;
            let x = fl.state_at(s).ok_or_else(|| OrbitError::Numerical(format!("no dense state at s = {s}")))?;
            Ok(OrbitSample { s, phi: x[0] / k, dphi: x[1] / k, d2phi: x[2] / k })
        })
        .collect::<Result<Vec<_>, OrbitError>>()?;
    let mut orbit = PeriodicOrbit {
        n: sys.n,
        mu: sys.mu,
        period: p.period,
        samples,
        floquet_moduli: Vec::new(),
        section: SECTION,
        crossing: [p.u[0] / k, p.u[1] / k],
        closure_defect: p.defect,
        sys: *sys,
    };
    orbit.floquet_moduli = floquet_multipliers_with(&orbit, opts)?.nontrivial_moduli;
    Ok(orbit)
}

#[derive(Debug, Clone, Serialize)]
pub struct FloquetData {
    pub multipliers: Vec<[f64; 2]>,
    pub phase_multiplier: [f64; 2],
    pub nontrivial_moduli: Vec<f64>,
}

struct Monodromy {
    matrix: Matrix3<f64>,
    s0: f64,
    start: [f64; 3],
    deltas: [f64; 3],
}

fn monodromy(orbit: &PeriodicOrbit, opts: &OrbitOptions, dense: bool) -> Result<(Monodromy, Vec<[PatchedFlow; 2]>), OrbitError> {
    let sys = &orbit.sys;
    let (s0, start) = peak_state(orbit, opts)?;
    let scale = start.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let fo = FlowOptions { dense, ..opts.flow.clone() };
    let gain = unit_gain(sys);
    let mut matrix = Matrix3::zeros();
    let mut deltas = [0.0; 3];
    let mut flows = Vec::new();
    for j in 0..3 {
        let d = 1e-6 * scale;
        deltas[j] = d;
        let mut xp = start;
        let mut xm = start;
        xp[j] += d;
        xm[j] -= d;
        let fp = patched_flow(sys, &gain, xp, s0, s0 + orbit.period, &fo)?;
        let fm = patched_flow(sys, &gain, xm, s0, s0 + orbit.period, &fo)?;
        for i in 0..3 {
            matrix[(i, j)] = (fp.state_end[i] - fm.state_end[i]) / (2.0 * d);
        }
        flows.push([fp, fm]);
    }
    Ok((Monodromy { matrix, s0, start, deltas }, flows))
}

/// Phase and internal state of the sample with the largest |φ|, away from
/// the zeros where φ″ is only Hölder continuous.
fn peak_state(orbit: &PeriodicOrbit, opts: &OrbitOptions) -> Result<(f64, [f64; 3]), OrbitError> {
    let sys = &orbit.sys;
    let peak = orbit.samples.iter().max_by(|a, b| a.phi.abs().total_cmp(&b.phi.abs())).expect("orbit has samples");
    let fo = FlowOptions { dense: false, ..opts.flow.clone() };
    let fl = patched_flow_from_zero(sys, &unit_gain(sys), zero(sys, orbit.internal_crossing()), peak.s, &fo)?;
    Ok((peak.s, fl.state_end))
}

pub fn floquet_multipliers(orbit: &PeriodicOrbit) -> Result<FloquetData, OrbitError> {
    floquet_multipliers_with(orbit, &OrbitOptions::default())
}

/// Multipliers from the finite-difference monodromy of the patched flow over
/// one period; the one closest to 1 is the phase direction.
pub fn floquet_multipliers_with(orbit: &PeriodicOrbit, opts: &OrbitOptions) -> Result<FloquetData, OrbitError> {
    let (m, _) = monodromy(orbit, opts, false)?;
    let ev: Vec<Complex<f64>> = m.matrix.complex_eigenvalues().iter().copied().collect();
    if !ev.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(OrbitError::Numerical("non-finite monodromy spectrum".into()));
    }
    let phase = (0..3).min_by(|&a, &b| (ev[a] - 1.0).norm().total_cmp(&(ev[b] - 1.0).norm())).unwrap();
    let mut moduli: Vec<f64> = (0..3).filter(|&i| i != phase).map(|i| ev[i].norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    Ok(FloquetData {
        multipliers: ev.iter().map(|z| [z.re, z.im]).collect(),
        phase_multiplier: [ev[phase].re, ev[phase].im],
        nontrivial_moduli: moduli,
    })
}

/// The three quadratic-form terms −3(μ−1)∫|Y′|², C∫|Y|², (1−n)∫|φ|^{−n}|Y|²
/// evaluated on the periodic part of the dominant nontrivial Floquet mode.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StabilityTerms {
    pub gradient: f64,
    pub linear: f64,
    pub singular: f64,
}

pub fn stability_terms(orbit: &PeriodicOrbit) -> Result<StabilityTerms, OrbitError> {
    let opts = OrbitOptions::default();
    let sys = &orbit.sys;
    let (m, flows) = monodromy(orbit, &opts, true)?;
    let ev: Vec<Complex<f64>> = m.matrix.complex_eigenvalues().iter().copied().collect();
    let phase = (0..3).min_by(|&a, &b| (ev[a] - 1.0).norm().total_cmp(&(ev[b] - 1.0).norm())).unwrap();
    let lead = (0..3).filter(|&i| i != phase).max_by(|&a, &b| ev[a].norm().total_cmp(&ev[b].norm())).unwrap();
    let lambda = ev[lead];
    let shifted = m.matrix.map(Complex::from) - Matrix3::from_diagonal_element(lambda);
    let svd = shifted.svd(false, true);
    let vt = svd.v_t.ok_or_else(|| OrbitError::Numerical("eigenvector extraction failed".into()))?;
    let smallest = (0..3).min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b])).unwrap();
    let xi: Vec<Complex<f64>> = (0..3).map(|j| vt[(smallest, j)].conj()).collect();

    let hp = m.s0;
    let base = patched_flow(sys, &unit_gain(sys), m.start, hp, hp + orbit.period, &FlowOptions { dense: true, ..opts.flow.clone() })?;
    let k = 4 * opts.samples;
    let h = orbit.period / k as f64;
    let growth = lambda.norm().ln() / orbit.period;
    let (mut g1, mut g2, mut g3) = (0.0, 0.0, 0.0);
    for i in 0..k {
        let s = hp + (i as f64 + 0.5) * h;
        let phi = base.state_at(s).ok_or_else(|| OrbitError::Numerical("missing base state".into()))?[0];
        let mut y = [Complex::new(0.0, 0.0); 2];
        for j in 0..3 {
            let p = flows[j][0].state_at(s).ok_or_else(|| OrbitError::Numerical("missing state".into()))?;
            let q = flows[j][1].state_at(s).ok_or_else(|| OrbitError::Numerical("missing state".into()))?;
            for c in 0..2 {
                y[c] += xi[j] * ((p[c] - q[c]) / (2.0 * m.deltas[j]));
            }
        }
        let damp = (-growth * (s - hp)).exp();
        let (a0, a1) = ((y[0] * damp).norm_sqr(), (y[1] * damp).norm_sqr());
        g1 += a1 * h;
        g2 += a0 * h;
        if phi != 0.0 {
            g3 += phi.abs().powf(-sys.n) * a0 * h;
        }
    }
    Ok(StabilityTerms {
        gradient: -3.0 * (sys.mu - 1.0) * g1,
        linear: sys.c * g2,
        singular: (1.0 - sys.n) * sys.gain() * g3,
    })
}

/// Relative defect of ∫(φ″)² = (3μ²−6μ+2)∫(φ′)² over one period.
pub fn energy_identity_defect(orbit: &PeriodicOrbit) -> Result<f64, OrbitError> {
    let opts = OrbitOptions::default();
    let sys = &orbit.sys;
    let fo = FlowOptions { dense: true, ..opts.flow.clone() };
    let fl = patched_flow_from_zero(sys, &unit_gain(sys), zero(sys, orbit.internal_crossing()), orbit.period, &fo)?;
    let missing = || OrbitError::Numerical("quadrature left the dense range".into());
    let i2 = fl.integrate(0.0, orbit.period, |x| x[2] * x[2]).ok_or_else(missing)?;
    let i1 = fl.integrate(0.0, orbit.period, |x| x[1] * x[1]).ok_or_else(missing)?;
    Ok((i2 - sys.b * i1).abs() / i2)
}

/// Root of θ³ − 2θ² − 2θ + 1 in (0, 1).
pub fn theta_n1() -> f64 {
    solve_bracketed(|t| t * t * t - 2.0 * t * t - 2.0 * t + 1.0, 0.0, 1.0, 1e-16)
}

/// Closed-form n = 1 orbit: on the positive half φ = −1/6 + a e^{−s} + b e^{−2s} + c e^{−3s},
/// with the odd half-period symmetry fixing a, b, c.
pub fn exact_orbit_n1() -> Result<PeriodicOrbit, OrbitError> {
    exact_orbit_n1_with(&OrbitOptions::default())
}

pub fn exact_orbit_n1_with(opts: &OrbitOptions) -> Result<PeriodicOrbit, OrbitError> {
    let sys = OscillatorySystem::new(1.0)?;
    let th = theta_n1();
    let period = -2.0 * th.ln();
    let cc = 1.0 / 6.0 / (3.0 / (1.0 + th) - 3.0 / (1.0 + th * th) + 1.0 / (1.0 + th.powi(3)));
    let (a, b, c) = (3.0 * cc / (1.0 + th), -3.0 * cc / (1.0 + th * th), cc / (1.0 + th.powi(3)));
    let half = |s: f64| -> [f64; 3] {
        let (e1, e2, e3) = ((-s).exp(), (-2.0 * s).exp(), (-3.0 * s).exp());
        [
            -1.0 / 6.0 + a * e1 + b * e2 + c * e3,
            -a * e1 - 2.0 * b * e2 - 3.0 * c * e3,
            a * e1 + 4.0 * b * e2 + 9.0 * c * e3,
        ]
    };
    let state = |s: f64| -> [f64; 3] {
        let s = s.rem_euclid(period);
        if s < period / 2.0 {
            half(s)
        } else {
            half(s - period / 2.0).map(|x| -x)
        }
    };
    let m = opts.samples;
    let samples = (0..m)
        .map(|i| {
            let s = period * i as f64 / m as f64;
            let x = state(s);
            OrbitSample { s, phi: x[0], dphi: x[1], d2phi: x[2] }
        })
        .collect();
    let x0 = half(0.0);
    let xt = half(period / 2.0).map(|x| -x);
    let defect = (0..3).map(|i| (x0[i] - xt[i]).abs()).fold(0.0, f64::max);
    let mut orbit = PeriodicOrbit {
        n: 1.0,
        mu: 3.0,
        period,
        samples,
        floquet_moduli: Vec::new(),
        section: SECTION,
        crossing: [x0[1], x0[2]],
        closure_defect: defect,
        sys,
    };
    orbit.floquet_moduli = floquet_multipliers_with(&orbit, opts)?.nontrivial_moduli;
    Ok(orbit)
}

/// Upward crossings reached from `count` random initial states drawn
/// uniformly from the box [−1, 1]³ (internal units), each polished.
pub fn basin_crossings(n: f64, count: usize, seed: u64) -> Result<Vec<[f64; 2]>, OrbitError> {
    let sys = OscillatorySystem::new(n)?;
    let opts = OrbitOptions::default();
    let k = sys.amplitude_scale();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let x: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0) / k);
            let u = settle(&sys, x, &opts)?;
            Ok(polish(&sys, u, &opts)?.u.map(|c| c / k))
        })
        .collect()
}

/// Default initial data for the transient: φ = 0.1 in internal units.
pub fn default_initial_state(n: f64) -> Result<[f64; 3], OrbitError> {
    let sys = OscillatorySystem::new(n)?;
    Ok([0.1 / sys.amplitude_scale(), 0.0, 0.0])
}
