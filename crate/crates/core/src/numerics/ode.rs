//! Adaptive Dormand–Prince 5(4) integration with dense output and events.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IvpError {
    #[error("step size underflow at t = {t:e} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("non-finite right-hand side near t = {t:e}")]
    NonFinite { t: f64 },
    #[error("maximum number of steps ({steps}) exceeded at t = {t:e}")]
    MaxSteps { t: f64, steps: usize },
}

/// Which sign changes of an event function count, measured along the
/// direction of integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Any,
    Rising,
    Falling,
}

pub struct EventSpec<'a> {
    pub func: Box<dyn Fn(f64, &[f64]) -> f64 + 'a>,
    pub direction: Direction,
    pub terminal: bool,
}

impl<'a> EventSpec<'a> {
    pub fn new(func: impl Fn(f64, &[f64]) -> f64 + 'a) -> Self {
        Self { func: Box::new(func), direction: Direction::Any, terminal: false }
    }

    pub fn terminal(mut self) -> Self {
        self.terminal = true;
        self
    }

    pub fn direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Event {
    pub time: f64,
    pub state: Vec<f64>,
    pub id: usize,
}

#[derive(Debug, Clone)]
pub struct IvpOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h0: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
    /// Keep the continuous extension of every step for `Trajectory::eval`.
    pub dense: bool,
}

impl Default for IvpOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, h0: None, h_max: f64::INFINITY, max_steps: 2_000_000, dense: true }
    }
}

impl IvpOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, ..Self::default() }
    }

    pub fn tolerances(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, ..Self::default() }
    }

    pub fn h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }

    pub fn sparse(mut self) -> Self {
        self.dense = false;
        self
    }
}

#[derive(Debug, Clone)]
struct DenseStep {
    t0: f64,
    h: f64,
    r: [Vec<f64>; 5],
}

impl DenseStep {
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &self.r;
        for i in 0..out.len() {
            out[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        }
    }
}

/// Accepted steps of one integration run. Times are strictly monotone along
/// the integration direction (increasing for forward spans).
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub events: Vec<Event>,
    /// True when a terminal event stopped the run before the span end.
    pub terminated: bool,
    dense: Vec<DenseStep>,
}

impl Trajectory {
    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("trajectory has an initial point")
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has an initial point")
    }

    pub fn first_time(&self) -> f64 {
        self.times[0]
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    /// Dense-output state at `t`; `None` outside the covered span or when the
    /// run kept no continuous extension.
    pub fn eval(&self, t: f64) -> Option<Vec<f64>> {
        let (a, b) = (self.first_time(), self.last_time());
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if t < lo || t > hi {
            return None;
        }
        if t == a {
            return Some(self.states[0].clone());
        }
        if t == b {
            return Some(self.last_state().to_vec());
        }
        if self.dense.is_empty() {
            return None;
        }
        let forward = b >= a;
        let idx = self.dense.partition_point(|d| {
            let end = d.t0 + d.h;
            if forward {
                end < t
            } else {
                end > t
            }
        });
        let step = &self.dense[idx.min(self.dense.len() - 1)];
        let mut out = vec![0.0; self.dim()];
        step.eval_into(t, &mut out);
        Some(out)
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn crossed(dir: Direction, g0: f64, g1: f64) -> bool {
    if g0 == 0.0 {
        return false;
    }
    match dir {
        Direction::Any => (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0),
        Direction::Rising => g0 < 0.0 && g1 >= 0.0,
        Direction::Falling => g0 > 0.0 && g1 <= 0.0,
    }
}

/// Locates the crossing of `g` inside one step by Illinois-safeguarded secant
/// iteration on the dense output. Returns the step fraction.
fn refine_event(ev: &EventSpec, step: &DenseStep, g0: f64, g1: f64, buf: &mut [f64]) -> f64 {
    let (mut a, mut b) = (0.0_f64, 1.0_f64);
    let (mut ga, mut gb) = (g0, g1);
    if gb == 0.0 {
        return 1.0;
    }
    let t_scale = step.t0.abs().max(step.h.abs()).max(1.0);
    let tol = 4.0 * f64::EPSILON * t_scale / step.h.abs();
    let mut side = 0i8;
    for _ in 0..200 {
        let x = (a * gb - b * ga) / (gb - ga);
        let x = if x.is_finite() && x > a && x < b { x } else { 0.5 * (a + b) };
        step.eval_into(step.t0 + x * step.h, buf);
        let gx = (ev.func)(step.t0 + x * step.h, buf);
        if gx == 0.0 {
            return x;
        }
        if (gx < 0.0) == (ga < 0.0) {
            a = x;
            ga = gx;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            gb = gx;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
        if b - a <= tol {
            break;
        }
    }
    b
}

fn initial_step<F>(rhs: &mut F, t0: f64, y0: &[f64], f0: &[f64], dir: f64, opts: &IvpOptions) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len() as f64;
    let sc: Vec<f64> = y0.iter().map(|y| opts.atol + opts.rtol * y.abs()).collect();
    let d0 = (y0.iter().zip(&sc).map(|(y, s)| (y / s).powi(2)).sum::<f64>() / n).sqrt();
    let d1 = (f0.iter().zip(&sc).map(|(f, s)| (f / s).powi(2)).sum::<f64>() / n).sqrt();
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(opts.h_max);
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + dir * h0 * f).collect();
    let mut f1 = vec![0.0; y0.len()];
    rhs(t0 + dir * h0, &y1, &mut f1);
    if !all_finite(&f1) {
        return h0 * 1e-3;
    }
    let d2 = (f1.iter().zip(f0).zip(&sc).map(|((a, b), s)| ((a - b) / s).powi(2)).sum::<f64>() / n).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1).min(opts.h_max)
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t1` (either direction).
pub fn integrate_ivp<F>(
    mut rhs: F,
    t0: f64,
    y0: &[f64],
    t1: f64,
    opts: &IvpOptions,
    events: &[EventSpec],
) -> Result<Trajectory, IvpError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let dim = y0.len();
    let mut traj = Trajectory {
        times: vec![t0],
        states: vec![y0.to_vec()],
        events: Vec::new(),
        terminated: false,
        dense: Vec::new(),
    };
    if t1 == t0 {
        return Ok(traj);
    }
    let dir = (t1 - t0).signum();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; dim];
    rhs(t, &y, &mut k1);
    if !all_finite(&k1) {
        return Err(IvpError::NonFinite { t });
    }
    let span = (t1 - t0).abs();
    let mut h = opts
        .h0
        .unwrap_or_else(|| initial_step(&mut rhs, t0, &y, &k1, dir, opts).max(1e-10 * span.max(t0.abs())))
        .abs();
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.func)(t, &y)).collect();

    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    let mut ys = vec![0.0; dim];
    let mut y5 = vec![0.0; dim];
    let mut buf = vec![0.0; dim];
    let mut steps = 0usize;
    let mut last_rejected = false;

    loop {
        let remaining = (t1 - t) * dir;
        if remaining <= 4.0 * f64::EPSILON * t1.abs().max(1.0) {
            break;
        }
        steps += 1;
        if steps > opts.max_steps {
            return Err(IvpError::MaxSteps { t, steps: opts.max_steps });
        }
        h = h.min(opts.h_max);
        let mut last = false;
        if h >= remaining {
            h = remaining;
            last = true;
        }
        let h_min = 16.0 * f64::EPSILON * t.abs().max(1e-3);
        if h < h_min {
            return Err(IvpError::StepUnderflow { t, h });
        }
        let hs = dir * h;

        for i in 0..dim {
            ys[i] = y[i] + hs * A21 * k1[i];
        }
        rhs(t + C2 * hs, &ys, &mut k2);
        for i in 0..dim {
            ys[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs(t + C3 * hs, &ys, &mut k3);
        for i in 0..dim {
            ys[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(t + C4 * hs, &ys, &mut k4);
        for i in 0..dim {
            ys[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(t + C5 * hs, &ys, &mut k5);
        for i in 0..dim {
            ys[i] = y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        rhs(t + hs, &ys, &mut k6);
        for i in 0..dim {
            y5[i] = y[i] + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        let t_new = if last { t1 } else { t + hs };
        rhs(t_new, &y5, &mut k7);

        let mut err = 0.0;
        for i in 0..dim {
            let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / dim as f64).sqrt();

        if !err.is_finite() || !all_finite(&y5) || !all_finite(&k7) {
            h *= 0.25;
            if h < h_min {
                return Err(IvpError::NonFinite { t });
            }
            last_rejected = true;
            continue;
        }

        if err > 1.0 {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            last_rejected = true;
            continue;
        }

        let mut r5 = vec![0.0; dim];
        let mut r2 = vec![0.0; dim];
        let mut r3 = vec![0.0; dim];
        let mut r4 = vec![0.0; dim];
        for i in 0..dim {
            let ydiff = y5[i] - y[i];
            let bspl = hs * k1[i] - ydiff;
            r2[i] = ydiff;
            r3[i] = bspl;
            r4[i] = ydiff - hs * k7[i] - bspl;
            r5[i] = hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        let step = DenseStep { t0: t, h: t_new - t, r: [y.clone(), r2, r3, r4, r5] };

        let mut hits: Vec<(f64, usize)> = Vec::new();
        let g_new: Vec<f64> = events.iter().map(|e| (e.func)(t_new, &y5)).collect();
        for (id, ev) in events.iter().enumerate() {
            if crossed(ev.direction, g_prev[id], g_new[id]) {
                let th = refine_event(ev, &step, g_prev[id], g_new[id], &mut buf);
                hits.push((th, id));
            }
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));
        let stop = hits.iter().find(|(_, id)| events[*id].terminal).map(|h| h.0);
        for &(th, id) in &hits {
            if stop.is_some_and(|s| th > s) {
                continue;
            }
            let te = step.t0 + th * step.h;
            step.eval_into(te, &mut buf);
            traj.events.push(Event { time: te, state: buf.clone(), id });
        }
        if let Some(th) = stop {
            let te = step.t0 + th * step.h;
            step.eval_into(te, &mut buf);
            if opts.dense {
                traj.dense.push(step);
            }
            if te != t {
                traj.times.push(te);
                traj.states.push(buf.clone());
            }
            traj.terminated = true;
            return Ok(traj);
        }

        if opts.dense {
            traj.dense.push(step);
        }
        t = t_new;
        std::mem::swap(&mut y, &mut y5);
        std::mem::swap(&mut k1, &mut k7);
        for (id, g) in g_new.into_iter().enumerate() {
            if g != 0.0 || g_prev[id] == 0.0 {
                g_prev[id] = g;
            }
        }
        traj.times.push(t);
        traj.states.push(y.clone());

        let mut fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
        if last_rejected {
            fac = fac.min(1.0);
        }
        last_rejected = false;
        h *= fac;
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_is_constant() {
        let tr = integrate_ivp(|_, _, d| d[0] = 0.0, 0.0, &[1.0], 1.0, &IvpOptions::default(), &[]).unwrap();
        assert_eq!(tr.last_state(), &[1.0]);
        assert!(tr.events.is_empty());
    }

    #[test]
    fn exponential_growth() {
        let tr = integrate_ivp(|_, y, d| d[0] = y[0], 0.0, &[1.0], 1.0, &IvpOptions::with_tol(1e-10), &[]).unwrap();
        assert!((tr.last_state()[0] - std::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn backward_and_dense_output() {
        let tr = integrate_ivp(|_, y, d| d[0] = -y[0], 2.0, &[1.0], 0.0, &IvpOptions::with_tol(1e-12), &[]).unwrap();
        assert!((tr.last_state()[0] - 2f64.exp()).abs() < 1e-9);
        let mid = tr.eval(1.3).unwrap()[0];
        assert!((mid - 0.7f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn event_location_on_harmonic_oscillator() {
        let ev = [EventSpec::new(|_, y| y[0]).direction(Direction::Falling)];
        let tr = integrate_ivp(
            |_, y, d| {
                d[0] = y[1];
                d[1] = -y[0];
            },
            0.0,
            &[1.0, 0.0],
            10.0,
            &IvpOptions::with_tol(1e-12),
            &ev,
        )
        .unwrap();
        let times: Vec<f64> = tr.events.iter().map(|e| e.time).collect();
        assert_eq!(times.len(), 2);
        assert!((times[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        assert!((times[1] - 2.5 * std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn terminal_event_stops() {
        let ev = [EventSpec::new(|_, y| y[0] - 2.0).terminal()];
        let tr = integrate_ivp(|_, y, d| d[0] = y[0], 0.0, &[1.0], 5.0, &IvpOptions::with_tol(1e-12), &ev).unwrap();
        assert!(tr.terminated);
        assert!((tr.last_time() - 2f64.ln()).abs() < 1e-11);
    }

    #[test]
    fn blow_up_reports_error() {
        let r = integrate_ivp(|_, y, d| d[0] = y[0] * y[0], 0.0, &[1.0], 2.0, &IvpOptions::with_tol(1e-10), &[]);
        assert!(r.is_err());
    }
}
