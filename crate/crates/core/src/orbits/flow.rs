//! Forward integration that stops just before each zero of φ, continues
//! through it with the local series and restarts a fixed arclength beyond.

use super::system::OscillatorySystem;
use super::OrbitError;
use crate::numerics::{gauss_legendre, integrate_ivp, Direction, EventSpec, IvpOptions, Trajectory};

#[derive(Debug, Clone)]
pub struct FlowOptions {
    pub tol: f64,
    /// Stop when |φ| ≤ h_stop |φ′|; restart 2·h_stop past the zero.
    pub h_stop: f64,
    pub max_zeros: usize,
    /// |φ| beyond this (internal units) counts as escape.
    pub bound: f64,
    pub dense: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { tol: 1e-12, h_stop: 1e-5, max_zeros: usize::MAX, bound: 1e8, dense: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroCrossing {
    pub s: f64,
    pub v: f64,
    pub w: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone)]
enum Piece {
    Smooth(Trajectory),
    Patch { zero: ZeroCrossing, from: f64, to: f64 },
}

#[derive(Debug, Clone)]
pub struct PatchedFlow {
    pub sys: OscillatorySystem,
    pub s_start: f64,
    pub s_end: f64,
    pub state_end: [f64; 3],
    pub zeros: Vec<ZeroCrossing>,
    pieces: Vec<Piece>,
}

impl PatchedFlow {
    fn patch_state(&self, z: &ZeroCrossing, s: f64) -> [f64; 3] {
        self.sys.local(z.v, z.w, s - z.s, z.kappa)
    }

    /// State at `s`; needs a dense run.
    pub fn state_at(&self, s: f64) -> Option<[f64; 3]> {
        for p in &self.pieces {
            match p {
                Piece::Patch { zero, from, to } if s >= *from && s <= *to => return Some(self.patch_state(zero, s)),
                Piece::Smooth(tr) if s >= tr.first_time() && s <= tr.last_time() => {
                    let x = tr.eval(s)?;
                    return Some([x[0], x[1], x[2]]);
                }
                _ => {}
            }
        }
        None
    }

    /// ∫_a^b g(state) ds by Gauss–Legendre on every dense step and on both
    /// sides of each patched zero.
    pub fn integrate(&self, a: f64, b: f64, g: impl Fn(&[f64; 3]) -> f64) -> Option<f64> {
        let (xg, wg) = gauss_legendre(8);
        let mut total = 0.0;
        let mut panel = |lo: f64, hi: f64, f: &dyn Fn(f64) -> Option<[f64; 3]>| -> Option<()> {
            let (lo, hi) = (lo.max(a), hi.min(b));
            if hi <= lo {
                return Some(());
            }
            let (m, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for (x, w) in xg.iter().zip(&wg) {
                total += w * r * g(&f(m + r * x)?);
            }
            Some(())
        };
        for p in &self.pieces {
            match p {
                Piece::Patch { zero, from, to } => {
                    // geometric panels toward the zero resolve the |h|^{2−n} cusp of φ″
                    let f = |s: f64| Some(self.patch_state(zero, s));
                    for side in [-1.0, 1.0] {
                        let mut outer = if side < 0.0 { zero.s - from } else { to - zero.s };
                        for _ in 0..40 {
                            if outer <= 0.0 {
                                break;
                            }
                            let (x, y) = (zero.s + side * 0.5 * outer, zero.s + side * outer);
                            panel(x.min(y).max(*from), x.max(y).min(*to), &f)?;
                            outer *= 0.5;
                        }
                    }
                }
                Piece::Smooth(tr) => {
                    let f = |s: f64| tr.eval(s).map(|x| [x[0], x[1], x[2]]);
                    for win in tr.times.windows(2) {
                        panel(win[0], win[1], &f)?;
                    }
                }
            }
        }
        Some(total)
    }
}

fn integrate_segment(
    sys: &OscillatorySystem,
    kappa: &dyn Fn(f64) -> f64,
    s: f64,
    x: &[f64; 3],
    s_max: f64,
    opts: &FlowOptions,
) -> Result<Trajectory, OrbitError> {
    let rhs = |t: f64, y: &[f64], d: &mut [f64]| {
        d[0] = y[1];
        d[1] = y[2];
        d[2] = sys.third_derivative(kappa(t), y);
    };
    let h_stop = opts.h_stop;
    let bound = opts.bound;
    let events = [
        EventSpec::new(move |_, y: &[f64]| y[0].abs() - h_stop * y[1].abs())
            .direction(Direction::Falling)
            .terminal(),
        EventSpec::new(|_, y: &[f64]| y[0]).terminal(),
        EventSpec::new(move |_, y: &[f64]| y[0].abs() - bound).direction(Direction::Rising).terminal(),
    ];
    let mut ivp = IvpOptions::tolerances(opts.tol, opts.tol * 1e-3);
    ivp.dense = opts.dense;
    Ok(integrate_ivp(rhs, s, x, s_max, &ivp, &events)?)
}

/// Integrates from state `x0` at `s0` to `s_max`, or until `max_zeros` zeros
/// have been passed (the run then ends at the restart point after the last).
pub fn patched_flow(
    sys: &OscillatorySystem,
    kappa: &dyn Fn(f64) -> f64,
    x0: [f64; 3],
    s0: f64,
    s_max: f64,
    opts: &FlowOptions,
) -> Result<PatchedFlow, OrbitError> {
    let mut out = PatchedFlow { sys: *sys, s_start: s0, s_end: s0, state_end: x0, zeros: Vec::new(), pieces: Vec::new() };
    run(&mut out, kappa, s_max, opts)?;
    Ok(out)
}

/// Like `patched_flow` but starting exactly at a zero crossing.
pub fn patched_flow_from_zero(
    sys: &OscillatorySystem,
    kappa: &dyn Fn(f64) -> f64,
    zero: ZeroCrossing,
    s_max: f64,
    opts: &FlowOptions,
) -> Result<PatchedFlow, OrbitError> {
    let hp = 2.0 * opts.h_stop;
    let to = (zero.s + hp).min(s_max);
    let mut out = PatchedFlow {
        sys: *sys,
        s_start: zero.s,
        s_end: to,
        state_end: sys.local(zero.v, zero.w, to - zero.s, zero.kappa),
        zeros: Vec::new(),
        pieces: vec![Piece::Patch { zero, from: zero.s, to }],
    };
    run(&mut out, kappa, s_max, opts)?;
    Ok(out)
}

fn run(out: &mut PatchedFlow, kappa: &dyn Fn(f64) -> f64, s_max: f64, opts: &FlowOptions) -> Result<(), OrbitError> {
    let sys = out.sys;
    let hp = 2.0 * opts.h_stop;
    let mut s = out.s_end;
    let mut x = out.state_end;
    while s < s_max && out.zeros.len() < opts.max_zeros {
        let tr = integrate_segment(&sys, kappa, s, &x, s_max, opts)?;
        if !tr.terminated {
            let y = tr.last_state();
            x = [y[0], y[1], y[2]];
            s = s_max;
            out.pieces.push(Piece::Smooth(tr));
            break;
        }
        let ev = tr.events.last().expect("terminated run records its event").clone();
        if ev.id == 2 {
            return Err(OrbitError::Escape { s: ev.time });
        }
        let k = kappa(ev.time);
        let (v, w, h) = sys.solve_zero(&ev.state, k)?;
        let zero = ZeroCrossing { s: ev.time - h, v, w, kappa: k };
        out.pieces.push(Piece::Smooth(tr));
        out.zeros.push(zero);
        let to = (zero.s + hp).min(s_max);
        out.pieces.push(Piece::Patch { zero, from: ev.time, to });
        x = sys.local(v, w, to - zero.s, k);
        s = to;
    }
    out.s_end = s;
    out.state_end = x;
    Ok(())
}
