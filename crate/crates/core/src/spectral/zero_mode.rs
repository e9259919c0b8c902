//! Zero-eigenvalue eigenfunction generated by the scaling family
//! F_λ(y) = λ^{4/n}F(y/λ): ψ₀ = (4/n)F − y·F′.

use super::SpectralError;
use crate::profiles::Profile;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct ZeroMode {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn zero_mode_value(profile: &Profile, y: f64) -> f64 {
    let [f, d1, _] = profile.eval3(y);
    4.0 / profile.params.n * f - y * d1
}

/// ψ₀ on the profile grid; rejects profiles where ψ₀ turns negative in the
/// interior beyond roundoff of its scale.
pub fn zero_eigenfunction_general_n(profile: &Profile) -> Result<ZeroMode, SpectralError> {
    let n = profile.params.n;
    if !(n > 0.0 && n < 3.0) {
        return Err(SpectralError::Domain(format!("zero mode needs n in (0, 3), got {n}")));
    }
    let values: Vec<f64> =
        profile.grid.iter().enumerate().map(|(i, y)| 4.0 / n * profile.values[i] - y * profile.d1[i]).collect();
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let last = values.len() - 1;
    for (i, &v) in values.iter().enumerate().take(last).skip(1) {
        if v < -1e-8 * scale {
            return Err(SpectralError::Negativity { y: profile.grid[i], value: v });
        }
    }
    Ok(ZeroMode { grid: profile.grid.clone(), values })
}

impl ZeroMode {
    /// Least-squares exponent α of ψ₀ ≈ C(a − y)^α over distances in
    /// [lo, hi] from the interface `a`.
    pub fn interface_exponent(&self, a: f64, lo: f64, hi: f64) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .grid
            .iter()
            .zip(&self.values)
            .filter(|(y, v)| {
                let d = a - *y;
                d >= lo && d <= hi && **v > 0.0
            })
            .map(|(y, v)| ((a - y).ln(), v.ln()))
            .collect();
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
        let (mx, my) = (sx / m, sy / m);
        let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx).powi(2)));
        num / den
    }
}
