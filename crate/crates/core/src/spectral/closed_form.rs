//! Closed-form radial eigenvalues of the n = 1 linearization.

use super::SpectralError;
use crate::profiles::params::explicit_c0;

fn check_even(k: usize) -> Result<(), SpectralError> {
    if k % 2 == 1 {
        Err(SpectralError::OddIndex(k))
    } else {
        Ok(())
    }
}

/// ∏_{i<count} (k+2−2i)(k+N+2−2i).
fn pair_product(k: usize, dim: usize, count: usize) -> f64 {
    (0..count)
        .map(|i| {
            let s = 2.0 * i as f64;
            (k as f64 + 2.0 - s) * ((k + dim) as f64 + 2.0 - s)
        })
        .product()
}

/// m = 2: c₀k(k+2)(k+N)(k+N+2) ≥ 0. General m: the product formula as
/// printed, −c₀(k+2)k⋯[k+2−2(m−2)]·(k+N+2)(k+N)⋯[k+N−2(m−2)], read as m−1
/// factor pairs, valid for k ≥ max(0, 2(m−3)).
pub fn eigenvalues_closed_form(m: usize, dim: usize, k: usize) -> Result<f64, SpectralError> {
    check_even(k)?;
    if m < 2 || dim < 1 {
        return Err(SpectralError::Domain(format!("need m >= 2 and N >= 1, got m = {m}, N = {dim}")));
    }
    let c0 = explicit_c0(m, dim);
    if m == 2 {
        return Ok(c0 * pair_product(k, dim, 2));
    }
    let min = 2 * (m - 3);
    if k < min {
        return Err(SpectralError::IndexRange { k, min });
    }
    Ok(-c0 * pair_product(k, dim, m - 1))
}

/// Eigenvalue of the symmetric 2m-th order form on the polynomial of degree
/// k+2, with the sign of the printed eigenvalue problem: −c₀ times m factor
/// pairs. At m = 2 this is the negative of the positive closed form.
pub fn eigenvalue_general_m_derived(m: usize, dim: usize, k: usize) -> Result<f64, SpectralError> {
    check_even(k)?;
    if m < 2 || dim < 1 {
        return Err(SpectralError::Domain(format!("need m >= 2 and N >= 1, got m = {m}, N = {dim}")));
    }
    Ok(-explicit_c0(m, dim) * pair_product(k, dim, m))
}

/// ν_k = k(k+N−2), eigenvalues of −Δ on the unit sphere.
pub fn laplace_beltrami_eigenvalue(k: usize, dim: usize) -> f64 {
    k as f64 * (k as f64 + dim as f64 - 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m2_instances() {
        assert_eq!(eigenvalues_closed_form(2, 1, 0).unwrap(), 0.0);
        assert!((eigenvalues_closed_form(2, 1, 2).unwrap() - 1.0).abs() < 1e-14);
        assert!((eigenvalues_closed_form(2, 2, 2).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(eigenvalues_closed_form(2, 1, 3), Err(SpectralError::OddIndex(3))));
    }

    #[test]
    fn derived_matches_m2_up_to_sign() {
        for dim in 1..4 {
            for k in (0..12).step_by(2) {
                let a = eigenvalues_closed_form(2, dim, k).unwrap();
                let b = eigenvalue_general_m_derived(2, dim, k).unwrap();
                assert!((a + b).abs() < 1e-12 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn sphere_eigenvalues() {
        assert_eq!(laplace_beltrami_eigenvalue(2, 3), 6.0);
        assert_eq!(laplace_beltrami_eigenvalue(1, 2), 1.0);
    }
}
