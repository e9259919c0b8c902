//! Continuation of the periodic orbit in n up to its loss at the heteroclinic
//! limit.

use super::periodic::{default_initial_state, orbit_from_crossing, settle, OrbitOptions, PeriodicOrbit};
use super::system::{n_plus, OscillatorySystem};
use super::OrbitError;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct BifurcationTrace {
    pub n_values: Vec<f64>,
    pub periods: Vec<f64>,
    pub n_h_estimate: f64,
    /// Bracket [last accepted n, first rejected n].
    pub bracket: [f64; 2],
    pub threshold: f64,
    pub dwell_threshold: f64,
}

impl BifurcationTrace {
    pub fn to_csv(&self) -> String {
        use crate::output::fmt17;
        let mut out = String::from("n,T\n");
        for (n, t) in self.n_values.iter().zip(&self.periods) {
            out += &format!("{},{}\n", fmt17(*n), fmt17(*t));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct BifurcationOptions {
    pub initial_step: f64,
    pub min_step: f64,
    /// Fraction of the period spent within `dwell_radius` of φ± that counts as
    /// divergence.
    pub dwell_fraction: f64,
    pub dwell_radius: f64,
}

impl Default for BifurcationOptions {
    fn default() -> Self {
        Self { initial_step: 0.01, min_step: 1e-7, dwell_fraction: 0.5, dwell_radius: 1e-2 }
    }
}

/// Fraction of the period the orbit spends within `radius` of either
/// equilibrium (internal units).
pub fn dwell_fraction(orbit: &PeriodicOrbit, radius: f64) -> f64 {
    let Some((ep, em)) = orbit.sys.equilibria() else { return 0.0 };
    let k = orbit.sys.amplitude_scale();
    let near = orbit
        .samples
        .iter()
        .filter(|p| {
            let x = p.phi * k;
            (x - ep * k).abs() < radius || (x - em * k).abs() < radius
        })
        .count();
    near as f64 / orbit.samples.len() as f64
}

fn accept(
    n: f64,
    seed: [f64; 2],
    cap: f64,
    opts: &OrbitOptions,
    bo: &BifurcationOptions,
) -> Option<(PeriodicOrbit, [f64; 2])> {
    let sys = OscillatorySystem::new(n).ok()?;
    let orbit = orbit_from_crossing(&sys, seed, opts).ok()?;
    if orbit.period > cap || dwell_fraction(&orbit, bo.dwell_radius) > bo.dwell_fraction {
        return None;
    }
    let k = sys.amplitude_scale();
    let u = [orbit.crossing[0] * k, orbit.crossing[1] * k];
    Some((orbit, u))
}

pub fn trace_heteroclinic_bifurcation(n_range: (f64, f64), period_cap: f64) -> Result<BifurcationTrace, OrbitError> {
    trace_heteroclinic_bifurcation_with(n_range, period_cap, &BifurcationOptions::default())
}

/// Continuation from `n_range.0` with halving steps; the orbit counts as lost
/// when Newton fails, the period exceeds `period_cap`, or the dwell criterion
/// fires. Halving stops at `min_step`, which brackets n_h.
pub fn trace_heteroclinic_bifurcation_with(
    n_range: (f64, f64),
    period_cap: f64,
    bo: &BifurcationOptions,
) -> Result<BifurcationTrace, OrbitError> {
    let (lo, hi) = n_range;
    if !(lo >= 1.5 && hi <= n_plus() && lo < hi) {
        return Err(OrbitError::Domain(format!("range ({lo}, {hi}) not inside (3/2, n+)")));
    }
    if period_cap < 20.0 {
        return Err(OrbitError::Domain(format!("period cap {period_cap} below 20")));
    }
    let opts = OrbitOptions { horizon: 2.0 * period_cap, ..OrbitOptions::default() };
    let sys = OscillatorySystem::new(lo)?;
    let u0 = settle(&sys, default_initial_state(lo)?, &opts)?;
    let (first, mut u) = accept(lo, u0, period_cap, &opts, bo)
        .ok_or_else(|| OrbitError::Newton(format!("no orbit at the range start n = {lo}")))?;
    let mut n_values = vec![lo];
    let mut periods = vec![first.period];
    let mut n = lo;
    let mut step = bo.initial_step;
    loop {
        let next = (n + step).min(hi);
        match accept(next, u, period_cap, &opts, bo) {
            Some((orbit, un)) => {
                n = next;
                u = un;
                n_values.push(n);
                periods.push(orbit.period);
                if n >= hi {
                    return Err(OrbitError::NoDivergence(hi));
                }
            }
            None => {
                if step <= bo.min_step {
                    return Ok(BifurcationTrace {
                        n_values,
                        periods,
                        n_h_estimate: 0.5 * (n + next),
                        bracket: [n, next],
                        threshold: period_cap,
                        dwell_threshold: bo.dwell_fraction,
                    });
                }
                step *= 0.5;
            }
        }
    }
}
