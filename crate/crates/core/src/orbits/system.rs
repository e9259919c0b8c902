//! The autonomous third-order ODE for the oscillatory interface component and
//! its local continuation through transversal zeros.

use super::OrbitError;
use nalgebra::{Matrix3, Vector3};

/// φ‴ + Aφ″ + Bφ′ + Cφ + κ sgn φ |φ|^{1−n} = 0 with μ = 3/n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorySystem {
    pub n: f64,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl OscillatorySystem {
    pub fn new(n: f64) -> Result<Self, OrbitError> {
        if !(n > 0.0 && n < 2.0) {
            return Err(OrbitError::Domain(format!("n = {n} outside (0, 2)")));
        }
        let mu = 3.0 / n;
        Ok(Self {
            n,
            mu,
            a: 3.0 * (mu - 1.0),
            b: 3.0 * mu * mu - 6.0 * mu + 2.0,
            c: mu * (mu - 1.0) * (mu - 2.0),
        })
    }

    /// Gain κ used internally: Φ = κ^{1/n} φ solves the same equation with the
    /// nonlinearity multiplied by κ, which keeps orbit amplitudes of order one.
    pub fn gain(&self) -> f64 {
        self.c.max(1.0)
    }

    /// Factor converting φ to internal units.
    pub fn amplitude_scale(&self) -> f64 {
        self.gain().powf(1.0 / self.n)
    }

    /// Constant equilibria ±[−1/C]^{1/n}, present when C < 0 (n ∈ (3/2, 3)).
    pub fn equilibria(&self) -> Option<(f64, f64)> {
        (self.c < 0.0).then(|| {
            let e = (-1.0 / self.c).powf(1.0 / self.n);
            (e, -e)
        })
    }

    pub fn third_derivative(&self, kappa: f64, x: &[f64]) -> f64 {
        let s = if x[0] == 0.0 { 0.0 } else { x[0].signum() * x[0].abs().powf(1.0 - self.n) };
        -self.a * x[2] - self.b * x[1] - self.c * x[0] - kappa * s
    }

    /// State at offset `h` from a zero where (φ′, φ″) = (v, w): quartic Taylor
    /// part of the linear operator plus the leading singular correction.
    pub fn local(&self, v: f64, w: f64, h: f64, kappa: f64) -> [f64; 3] {
        let (a_, b_, c_, n) = (self.a, self.b, self.c, self.n);
        let q = -a_ * w - b_ * v;
        let q1 = -a_ * q - b_ * w - c_ * v;
        let q2 = -a_ * q1 - b_ * q - c_ * w;
        let (h2, h3, h4) = (h * h, h * h * h, h * h * h * h);
        let mut p = v * h + w * h2 / 2.0 + q * h3 / 6.0 + q1 * h4 / 24.0;
        let mut dp = v + w * h + q * h2 / 2.0 + q1 * h3 / 6.0 + q2 * h4 / 24.0;
        let mut d2p = w + q * h + q1 * h2 / 2.0 + q2 * h3 / 6.0;
        let a = h.abs();
        let sh = if h == 0.0 { 0.0 } else { h.signum() };
        let r = (1.0 - n) * w / (2.0 * v);
        let sg = v.signum();
        let av = kappa * v.abs().powf(1.0 - n);
        let (e2, e3, e4) = (a.powf(2.0 - n), a.powf(3.0 - n), a.powf(4.0 - n));
        let i1 = e2 / (2.0 - n) + r * sh * e3 / (3.0 - n);
        let i2 = sh * e3 / ((2.0 - n) * (3.0 - n)) + r * e4 / ((3.0 - n) * (4.0 - n));
        let i3 = e4 / ((2.0 - n) * (3.0 - n) * (4.0 - n));
        d2p += -sg * av * i1 + a_ * sg * av * sh * e3 / ((2.0 - n) * (3.0 - n));
        dp += -sg * av * i2;
        p += -sg * av * i3;
        [p, dp, d2p]
    }

    /// Inverts `local`: finds (v, w, h) with local(v, w, h) = x for a state x
    /// just before (h > 0) or after (h < 0) a zero.
    pub fn solve_zero(&self, x: &[f64], kappa: f64) -> Result<(f64, f64, f64), OrbitError> {
        let target = Vector3::new(x[0], x[1], x[2]);
        let f = |u: &Vector3<f64>| Vector3::from(self.local(u[0], u[1], u[2], kappa)) - target;
        let mut u = Vector3::new(x[1], x[2], -x[0] / x[1]);
        if !u.iter().all(|c| c.is_finite()) || x[1] == 0.0 {
            return Err(OrbitError::Patch(format!("tangential zero at state {x:?}")));
        }
        for _ in 0..40 {
            let r = f(&u);
            let mut jac = Matrix3::zeros();
            for j in 0..3 {
                let d = 1e-7 * u[j].abs().max(1e-12);
                let mut up = u;
                let mut um = u;
                up[j] += d;
                um[j] -= d;
                jac.set_column(j, &((f(&up) - f(&um)) / (2.0 * d)));
            }
            let du = jac.lu().solve(&(-r)).ok_or_else(|| OrbitError::Patch("singular patch Jacobian".into()))?;
            u += du;
            let rel = (0..3).map(|i| du[i].abs() / u[i].abs().max(1e-300)).fold(0.0, f64::max);
            if rel < 1e-14 {
                return Ok((u[0], u[1], u[2]));
            }
        }
        let r = f(&u);
        if r.amax() <= 1e-13 * target.amax().max(1e-300) {
            Ok((u[0], u[1], u[2]))
        } else {
            Err(OrbitError::Patch(format!("zero patch did not converge (residual {:e})", r.amax())))
        }
    }
}

/// Vector field on (φ, φ′, φ″) with unit gain; φ = 0 maps the singular term
/// to zero, so callers must route zero crossings through the patch protocol.
pub fn oscillatory_rhs(n: f64) -> Result<impl Fn(f64, &[f64], &mut [f64]), OrbitError> {
    let sys = OscillatorySystem::new(n)?;
    Ok(move |_s: f64, x: &[f64], d: &mut [f64]| {
        d[0] = x[1];
        d[1] = x[2];
        d[2] = sys.third_derivative(1.0, x);
    })
}

/// n₊ = 9/(3+√3), the upper end of the range where 3μ² − 6μ + 2 > 0.
pub fn n_plus() -> f64 {
    9.0 / (3.0 + 3f64.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_coefficients() {
        let s = OscillatorySystem::new(1.0).unwrap();
        assert_eq!((s.a, s.b, s.c), (6.0, 11.0, 6.0));
    }

    #[test]
    fn patch_round_trip() {
        for n in [0.3, 1.0, 1.7] {
            let s = OscillatorySystem::new(n).unwrap();
            let x = s.local(0.8, -0.3, -1e-4, 1.5);
            let (v, w, h) = s.solve_zero(&x, 1.5).unwrap();
            assert!((v - 0.8).abs() < 1e-10 && (w + 0.3).abs() < 1e-8 && (h + 1e-4).abs() < 1e-14, "{v} {w} {h}");
        }
    }
}
