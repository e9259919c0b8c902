//! Radial similarity profiles stored on a non-uniform grid.

use super::params::{sphere_area, ProblemParams};
use crate::numerics::quad::gauss_legendre;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProblemKind {
    #[serde(rename = "FBP")]
    Fbp,
    CauchyProblem,
}

/// Even radial profile F(y), y ∈ [0, a], with its first three derivatives.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Profile {
    pub params: ProblemParams,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub d3: Vec<f64>,
    /// Interface radius (outer truncation radius for unbounded support).
    pub interface: f64,
    pub mass: f64,
    pub kind: ProblemKind,
    pub second_deriv_origin: f64,
    pub zero_count: usize,
}

/// Quintic Hermite interpolation on one cell from (f, f′, f″) at both ends.
/// Returns (f, f′, f″) at fraction `t` of the cell of width `h`.
pub fn hermite5(h: f64, left: [f64; 3], right: [f64; 3], t: f64) -> [f64; 3] {
    let a0 = left[0];
    let a1 = h * left[1];
    let a2 = 0.5 * h * h * left[2];
    let f1 = right[0] - (a0 + a1 + a2);
    let d1 = h * right[1] - (a1 + 2.0 * a2);
    let s1 = h * h * right[2] - 2.0 * a2;
    let a3 = 10.0 * f1 - 4.0 * d1 + 0.5 * s1;
    let a4 = -15.0 * f1 + 7.0 * d1 - s1;
    let a5 = 6.0 * f1 - 3.0 * d1 + 0.5 * s1;
    let v = a0 + t * (a1 + t * (a2 + t * (a3 + t * (a4 + t * a5))));
    let dv = a1 + t * (2.0 * a2 + t * (3.0 * a3 + t * (4.0 * a4 + t * 5.0 * a5)));
    let d2v = 2.0 * a2 + t * (6.0 * a3 + t * (12.0 * a4 + t * 20.0 * a5));
    [v, dv / h, d2v / (h * h)]
}

impl Profile {
    /// Assembles a profile, computing mass and the sign-change count.
    pub fn assemble(
        params: ProblemParams,
        grid: Vec<f64>,
        values: Vec<f64>,
        d1: Vec<f64>,
        d2: Vec<f64>,
        d3: Vec<f64>,
        kind: ProblemKind,
    ) -> Self {
        assert!(grid.len() >= 2 && grid.len() == values.len());
        assert!(grid.windows(2).all(|w| w[1] > w[0]), "profile grid must be increasing");
        let interface = *grid.last().unwrap();
        let second_deriv_origin = d2[0];
        let mut p = Self {
            params,
            grid,
            values,
            d1,
            d2,
            d3,
            interface,
            mass: 0.0,
            kind,
            second_deriv_origin,
            zero_count: 0,
        };
        p.mass = p.radial_integral(|_, f| f);
        p.zero_count = p.count_sign_changes();
        p
    }

    fn cell(&self, y: f64) -> Option<usize> {
        if y < self.grid[0] || y > self.interface {
            return None;
        }
        let i = self.grid.partition_point(|&g| g <= y);
        Some(i.clamp(1, self.grid.len() - 1) - 1)
    }

    /// (F, F′, F″) at radius `y` by quintic Hermite interpolation; zero
    /// beyond the interface, even extension for negative `y`.
    pub fn eval3(&self, y: f64) -> [f64; 3] {
        let r = y.abs();
        let Some(i) = self.cell(r) else { return [0.0; 3] };
        let h = self.grid[i + 1] - self.grid[i];
        let l = [self.values[i], self.d1[i], self.d2[i]];
        let rr = [self.values[i + 1], self.d1[i + 1], self.d2[i + 1]];
        let mut out = hermite5(h, l, rr, (r - self.grid[i]) / h);
        if y < 0.0 {
            out[1] = -out[1];
        }
        out
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.eval3(y)[0]
    }

    /// F‴ by linear interpolation of the stored samples.
    pub fn eval_d3(&self, y: f64) -> f64 {
        let r = y.abs();
        let Some(i) = self.cell(r) else { return 0.0 };
        let t = (r - self.grid[i]) / (self.grid[i + 1] - self.grid[i]);
        let v = self.d3[i] + t * (self.d3[i + 1] - self.d3[i]);
        if y < 0.0 {
            -v
        } else {
            v
        }
    }

    /// ∫_{ℝᴺ} g(r, F(r)) dy for radial integrands, cellwise Gauss–Legendre.
    pub fn radial_integral(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        let (x, w) = gauss_legendre(8);
        let k = self.params.dim as i32 - 1;
        let mut s = 0.0;
        for i in 0..self.grid.len() - 1 {
            let (a, b) = (self.grid[i], self.grid[i + 1]);
            let h = b - a;
            let l = [self.values[i], self.d1[i], self.d2[i]];
            let r = [self.values[i + 1], self.d1[i + 1], self.d2[i + 1]];
            for (xi, wi) in x.iter().zip(&w) {
                let t = 0.5 * (xi + 1.0);
                let y = a + t * h;
                let f = hermite5(h, l, r, t)[0];
                s += 0.5 * h * wi * y.powi(k) * g(y, f);
            }
        }
        s * sphere_area(self.params.dim)
    }

    fn count_sign_changes(&self) -> usize {
        let scale = self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let floor = 1e-12 * scale;
        let mut last = 0.0_f64;
        let mut count = 0;
        let n = self.values.len();
        for &v in &self.values[..n - 1] {
            if v.abs() <= floor {
                continue;
            }
            if last != 0.0 && v.signum() != last.signum() {
                count += 1;
            }
            last = v;
        }
        count
    }

    /// Member of the scaling family F_λ(y) = λ^{4/n} F(y/λ).
    pub fn rescaled(&self, lambda: f64) -> Self {
        let n = self.params.n;
        assert!(n > 0.0, "scaling family needs n > 0");
        let amp = lambda.powf(4.0 / n);
        let grid = self.grid.iter().map(|y| y * lambda).collect();
        let scale = |v: &[f64], k: i32| v.iter().map(|x| x * amp / lambda.powi(k)).collect::<Vec<_>>();
        Self::assemble(
            self.params,
            grid,
            scale(&self.values, 0),
            scale(&self.d1, 1),
            scale(&self.d2, 2),
            scale(&self.d3, 3),
            self.kind,
        )
    }

    /// Unit-mass member of the family: the scaling family for n > 0, a
    /// constant multiple for the linear n = 0 case.
    pub fn unit_mass(&self) -> Self {
        let n = self.params.n;
        if n == 0.0 {
            self.scaled_values(1.0 / self.mass)
        } else {
            let e = 4.0 / n + self.params.dim as f64;
            self.rescaled(self.mass.powf(-1.0 / e))
        }
    }

    /// Multiplies values by a constant (linear problems only).
    pub fn scaled_values(&self, c: f64) -> Self {
        let s = |v: &[f64]| v.iter().map(|x| x * c).collect::<Vec<_>>();
        Self::assemble(self.params, self.grid.clone(), s(&self.values), s(&self.d1), s(&self.d2), s(&self.d3), self.kind)
    }

    /// Pointwise residual of the once-integrated radial profile equation
    /// |F|ⁿ (ΔF)′ − β y F (zero-flux form), from stored derivative samples.
    pub fn flux_residual(&self) -> Vec<f64> {
        let beta = self.params.beta();
        let nm1 = self.params.dim as f64 - 1.0;
        (0..self.grid.len())
            .map(|i| {
                let y = self.grid[i];
                let lap_d = if y == 0.0 {
                    self.d3[i] * (1.0 + nm1 / 2.0)
                } else {
                    self.d3[i] + nm1 * (self.d2[i] / y - self.d1[i] / (y * y))
                };
                self.values[i].abs().powf(self.params.n) * lap_d - beta * y * self.values[i]
            })
            .collect()
    }

    /// Uniformly resampled rows (y, F, F′, F″, F‴).
    pub fn resample(&self, points: usize) -> Vec<[f64; 5]> {
        let points = points.max(2);
        (0..points)
            .map(|j| {
                let y = self.interface * j as f64 / (points - 1) as f64;
                let [f, d1, d2] = self.eval3(y);
                [y, f, d1, d2, self.eval_d3(y)]
            })
            .collect()
    }

    /// CSV with header `y,F,dF,d2F,d3F` on a uniform grid.
    pub fn to_csv(&self, points: usize) -> String {
        let mut s = String::from("y,F,dF,d2F,d3F\n");
        for row in self.resample(points) {
            let cells: Vec<String> = row.iter().map(|v| crate::output::fmt17(*v)).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    /// Maximum of |F| over the stored samples.
    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_reproduces_quintics() {
        let p = |x: f64| [x.powi(5) - 2.0 * x * x + 1.0, 5.0 * x.powi(4) - 4.0 * x, 20.0 * x.powi(3) - 4.0];
        let (a, b) = (0.3, 1.1);
        for t in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let v = hermite5(b - a, p(a), p(b), t);
            let e = p(a + t * (b - a));
            for k in 0..3 {
                assert!((v[k] - e[k]).abs() < 1e-12);
            }
        }
    }
}
