//! Conservative implicit scheme for the rescaled equation in one dimension,
//! v_τ = −((v₊ⁿ + ε) v_yyy)_y + β(y v)_y − e^{−γτ}|v|^{p−1}v,
//! on nodes y_i = −L + i·h with two zero ghost nodes beyond each end.

use super::SimError;
use crate::numerics::BandedMatrix;
use crate::profiles::ProblemParams;
use serde::Serialize;

const MAX_NEWTON: usize = 40;
const MAX_HALVINGS: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct SimState {
    pub tau: f64,
    pub grid: Vec<f64>,
    pub v: Vec<f64>,
    pub eps: f64,
    pub params: ProblemParams,
}

#[derive(Debug, Clone, Copy)]
pub struct Scheme {
    pub params: ProblemParams,
    /// Absorption switch; off leaves the conservative rescaled TFE.
    pub absorb: bool,
    /// Rate in the absorption factor e^{−γτ} (zero at p = p₀).
    pub gamma: f64,
    pub newton_tol: f64,
}

impl SimState {
    /// Uniform grid on [−L, L] with `cells` cells.
    pub fn new(params: ProblemParams, half_width: f64, cells: usize, data: impl Fn(f64) -> f64) -> Self {
        let h = 2.0 * half_width / cells as f64;
        let grid: Vec<f64> = (0..=cells).map(|i| -half_width + i as f64 * h).collect();
        let v: Vec<f64> = grid.iter().map(|&y| data(y)).collect();
        let sup = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        Self { tau: 0.0, grid, v, eps: 1e-8 * sup.powf(params.n), params }
    }

    pub fn h(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    pub fn half_width(&self) -> f64 {
        -self.grid[0]
    }

    pub fn mass(&self) -> f64 {
        self.h() * self.v.iter().sum::<f64>()
    }

    pub fn amplitude(&self) -> f64 {
        self.v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Largest |y| where |v| exceeds 1e−10 of the amplitude.
    pub fn support_radius(&self) -> f64 {
        let floor = 1e-10 * self.amplitude();
        self.grid.iter().zip(&self.v).filter(|(_, v)| v.abs() > floor).fold(0.0_f64, |m, (y, _)| m.max(y.abs()))
    }

    /// max |v(y) − v(−y)|.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.v.len();
        (0..n / 2).fold(0.0_f64, |m, i| m.max((self.v[i] - self.v[n - 1 - i]).abs()))
    }

    /// Pads with zero nodes so the half-width grows by `factor`.
    pub fn enlarge(&mut self, factor: f64) {
        let h = self.h();
        let extra = ((factor - 1.0) * self.half_width() / h).ceil() as usize;
        let lo = self.grid[0] - extra as f64 * h;
        let cells = self.grid.len() - 1 + 2 * extra;
        self.grid = (0..=cells).map(|i| lo + i as f64 * h).collect();
        let mut v = vec![0.0; extra];
        v.extend_from_slice(&self.v);
        v.extend(std::iter::repeat_n(0.0, extra));
        self.v = v;
    }

    /// Samples `y,v` as CSV.
    pub fn to_csv(&self) -> String {
        use crate::output::fmt17;
        let mut out = String::from("y,v\n");
        for (y, v) in self.grid.iter().zip(&self.v) {
            out += &format!("{},{}\n", fmt17(*y), fmt17(*v));
        }
        out
    }
}

impl Scheme {
    pub fn new(params: ProblemParams, absorb: bool) -> Self {
        let gamma = (params.p - params.p0()) * params.nf() * params.beta();
        Self { params, absorb, gamma: gamma.max(0.0), newton_tol: 1e-10 }
    }

    fn mobility(&self, v: f64) -> f64 {
        if v > 0.0 {
            v.powf(self.params.n)
        } else {
            0.0
        }
    }

    fn mobility_deriv(&self, v: f64) -> f64 {
        let n = self.params.n;
        if v > 0.0 && n > 0.0 {
            n * v.powf(n - 1.0)
        } else {
            0.0
        }
    }

    fn absorption_factor(&self, tau: f64) -> f64 {
        if self.absorb {
            (-self.gamma * tau).exp()
        } else {
            0.0
        }
    }

    /// Residual (and banded Jacobian) of the backward-Euler step.
    fn residual(
        &self,
        st: &SimState,
        u: &[f64],
        dt: f64,
        tau: f64,
        jac: bool,
    ) -> (Vec<f64>, Option<BandedMatrix>) {
        let nn = u.len();
        let h = st.h();
        let h3 = h * h * h;
        let beta = self.params.beta();
        let p = self.params.p;
        let a = self.absorption_factor(tau);
        let at = |i: isize| if i < 0 || i >= nn as isize { 0.0 } else { u[i as usize] };
        let mut r: Vec<f64> = (0..nn)
            .map(|i| (u[i] - st.v[i]) / dt + a * u[i].abs().powf(p - 1.0) * u[i])
            .collect();
        let mut jm = jac.then(|| BandedMatrix::zeros(nn, 2, 2));
        // interior faces f = 1..nn−1 between nodes f−1 and f; end faces carry no flux
        for f in 1..nn {
            let fi = f as isize;
            let (vl, vr) = (u[f - 1], u[f]);
            let yf = st.grid[f - 1] + 0.5 * h;
            let d3 = (at(fi + 1) - 3.0 * vr + 3.0 * vl - at(fi - 2)) / h3;
            let mf = 0.5 * (self.mobility(vl) + self.mobility(vr)) + st.eps;
            let g = mf * d3 - beta * yf * 0.5 * (vl + vr);
            r[f - 1] += g / h;
            r[f] -= g / h;
            if let Some(jm) = jm.as_mut() {
                let coef = [
                    (fi - 2, -mf / h3),
                    (fi - 1, 3.0 * mf / h3 + 0.5 * self.mobility_deriv(vl) * d3 - 0.5 * beta * yf),
                    (fi, -3.0 * mf / h3 + 0.5 * self.mobility_deriv(vr) * d3 - 0.5 * beta * yf),
                    (fi + 1, mf / h3),
                ];
                for (k, c) in coef {
                    if k < 0 || k >= nn as isize {
                        continue;
                    }
                    let k = k as usize;
                    jm.add(f - 1, k, c / h);
                    jm.add(f, k, -c / h);
                }
            }
        }
        if let Some(jm) = jm.as_mut() {
            for (i, ui) in u.iter().enumerate() {
                jm.add(i, i, 1.0 / dt + a * p * ui.abs().powf(p - 1.0));
            }
        }
        (r, jm)
    }

    /// One Newton-solved backward-Euler step of size `dt`.
    fn try_step(&self, st: &SimState, dt: f64) -> Option<Vec<f64>> {
        let tau = st.tau + dt;
        let norm = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut u = st.v.clone();
        let scale = st.amplitude().max(f64::MIN_POSITIVE);
        for _ in 0..MAX_NEWTON {
            let (r, jm) = self.residual(st, &u, dt, tau, true);
            let rmax = r.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            if !rmax.is_finite() {
                return None;
            }
            if rmax * dt < self.newton_tol {
                return Some(u);
            }
            let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
            let du = jm?.solve(&rhs)?;
            // residuals bottom out near roundoff of the h⁻⁴ stiffness; a
            // negligible Newton update is convergence as well
            if du.iter().all(|x| x.abs() <= self.newton_tol * scale) {
                return Some(u.iter().zip(&du).map(|(a, b)| a + b).collect());
            }
            let r0 = norm(&r);
            let mut lam = 1.0;
            let mut next = u.clone();
            while lam > 1e-6 {
                next = u.iter().zip(&du).map(|(a, b)| a + lam * b).collect();
                if norm(&self.residual(st, &next, dt, tau, false).0) < (1.0 - 1e-4 * lam) * r0 {
                    break;
                }
                lam *= 0.5;
            }
            u = next;
        }
        None
    }

    /// Advances by at most `dt`, halving on Newton failure; returns the step
    /// actually taken.
    pub fn step(&self, st: &mut SimState, dt: f64) -> Result<f64, SimError> {
        let mut d = dt;
        for _ in 0..=MAX_HALVINGS {
            if let Some(u) = self.try_step(st, d) {
                st.v = u;
                st.tau += d;
                return Ok(d);
            }
            d *= 0.5;
        }
        Err(SimError::Newton { tau: st.tau, dt })
    }

    /// Discrete absorption integral e^{−γτ}∫|v|^{p−1}v at the state's time.
    pub fn absorption_integral(&self, st: &SimState) -> f64 {
        let a = self.absorption_factor(st.tau);
        st.h() * st.v.iter().map(|v| a * v.abs().powf(self.params.p - 1.0) * v).sum::<f64>()
    }
}

/// E = −½∫|v_y|² − (1/(2(4+N)))∫v y², the n = 1 Lyapunov-type functional.
pub fn lyapunov_monitor(st: &SimState) -> f64 {
    let h = st.h();
    let nn = st.v.len();
    let at = |i: isize| if i < 0 || i >= nn as isize { 0.0 } else { st.v[i as usize] };
    let grad: f64 = (0..=nn as isize).map(|i| ((at(i) - at(i - 1)) / h).powi(2)).sum::<f64>() * h;
    let moment: f64 = st.grid.iter().zip(&st.v).map(|(y, v)| v * y * y).sum::<f64>() * h;
    -0.5 * grad - moment / (2.0 * (4.0 + st.params.nf()))
}
