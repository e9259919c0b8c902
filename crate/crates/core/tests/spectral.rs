use num_rational::BigRational;
use tfe_core::profiles::{explicit_profile_n1, shoot_fbp_profile, ProblemParams};
use tfe_core::spectral::discrete::divergence_form_n1;
use tfe_core::spectral::{
    discretize_operator, eigenvalue_general_m_derived, eigenvalues_closed_form, laplace_beltrami_eigenvalue,
    parse_rational, polynomial_eigenfunctions, symmetry_certificate, zero_eigenfunction_general_n, SpectralError,
    Verdict,
};

fn q(s: &str) -> BigRational {
    parse_rational(s).unwrap()
}

#[test]
fn closed_form_values() {
    // c₀k(k+2)(k+N)(k+N+2) with c₀ = 1/120 at N = 1
    assert_eq!(eigenvalues_closed_form(2, 1, 0).unwrap(), 0.0);
    assert!((eigenvalues_closed_form(2, 1, 2).unwrap() - 1.0).abs() < 1e-14);
    assert!((eigenvalues_closed_form(2, 1, 4).unwrap() - 4.0 * 6.0 * 5.0 * 7.0 / 120.0).abs() < 1e-12);
    assert!(matches!(eigenvalues_closed_form(2, 1, 3), Err(SpectralError::OddIndex(3))));
    assert_eq!(eigenvalue_general_m_derived(3, 1, 2).unwrap(), 0.0);
    assert!(eigenvalue_general_m_derived(3, 1, 4).unwrap() < 0.0);
    assert_eq!(laplace_beltrami_eigenvalue(2, 3), 2.0 * 3.0);
}

#[test]
fn polynomial_modes_are_orthonormal() {
    for dim in 1..=3 {
        let s = polynomial_eigenfunctions(dim, 8).unwrap();
        assert_eq!(s.indices, vec![0, 2, 4, 6, 8]);
        let g = s.gram();
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((v - target).abs() < 1e-8, "N = {dim}: G[{i}][{j}] = {v}");
            }
        }
        // stored normalization agrees with quadrature
        for j in 0..s.indices.len() {
            let nrm = s.weighted_inner(|r| s.eval(j, r), |r| s.eval(j, r));
            assert!((nrm - 1.0).abs() < 1e-8, "N = {dim}, mode {j}: {nrm}");
        }
        for (k, lam) in s.indices.iter().zip(&s.eigenvalues) {
            assert!((lam - eigenvalues_closed_form(2, dim, *k).unwrap()).abs() < 1e-9 * lam.abs().max(1.0));
        }
    }
}

#[test]
fn projection_remainder_shrinks() {
    let s = polynomial_eigenfunctions(1, 10).unwrap();
    let g = |r: f64| (1.0 - r * r) * (1.0 + r * r * r * r);
    let rem: Vec<f64> = (0..=6).map(|c| s.projection_remainder(&g, c)).collect();
    assert!(rem.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{rem:?}");
    assert!(rem[4] < 1e-10, "degree-6 data lies in the first four modes: {}", rem[4]);
}

#[test]
fn discrete_n1_matches_closed_form_with_dissipative_sign() {
    for dim in [1, 2] {
        let p = ProblemParams::critical(1.0, dim).unwrap();
        let op = discretize_operator(&p, 100).unwrap();
        assert!(op.symmetric && op.symmetry_defect() < 1e-12);
        assert_eq!(op.observed_sign().unwrap(), -1.0);
        let ev = op.real_spectrum().unwrap();
        for (j, k) in [0usize, 2, 4].iter().enumerate() {
            let exact = eigenvalues_closed_form(2, dim, *k).unwrap();
            let err = (ev[j] + exact).abs();
            assert!(err <= 0.01 * exact.max(1.0), "N = {dim}, k = {k}: {} vs {}", ev[j], -exact);
        }
    }
}

#[test]
fn discrete_second_dimension_converges_at_fourth_order() {
    let p = ProblemParams::critical(1.0, 2).unwrap();
    let exact = eigenvalues_closed_form(2, 2, 2).unwrap();
    let err = |m| (discretize_operator(&p, m).unwrap().real_spectrum().unwrap()[1] + exact).abs();
    let (e1, e2) = (err(25), err(50));
    let order = (e1 / e2).log2();
    assert!(order > 3.5, "observed order {order} ({e1:e}, {e2:e})");
}

#[test]
fn divergence_form_agrees_with_self_adjoint_form() {
    let sa = discretize_operator(&ProblemParams::critical(1.0, 1).unwrap(), 200).unwrap().real_spectrum().unwrap();
    let dv = divergence_form_n1(1, 200).unwrap().real_spectrum().unwrap();
    assert!(dv[0].abs() < 1e-6);
    for j in 1..3 {
        assert!((dv[j] / sa[j] - 1.0).abs() < 0.01, "mode {j}: {} vs {}", dv[j], sa[j]);
    }
}

#[test]
fn general_n_operator_has_zero_mode() {
    let p = ProblemParams::critical(0.5, 1).unwrap();
    let op = discretize_operator(&p, 100).unwrap();
    assert!(!op.symmetric);
    let ev = op.real_spectrum().unwrap();
    assert!(ev[0].abs() < 1e-4, "λ0 = {}", ev[0]);
    assert!((ev[1] + 1.0).abs() < 0.02, "λ1 = {}", ev[1]);
    assert_eq!(op.observed_sign().unwrap(), -1.0);

    let prof = shoot_fbp_profile(&p).unwrap();
    let unit = prof.rescaled(1.0 / prof.interface);
    let zm = zero_eigenfunction_general_n(&unit).unwrap();
    let vals: Vec<f64> = op.grid.iter().map(|&r| tfe_core::spectral::zero_mode::zero_mode_value(&unit, r)).collect();
    assert!(op.relative_residual(&vals) < 1e-6);
    let e = zm.interface_exponent(1.0, 1e-3, 1e-2);
    assert!((e - 1.0).abs() < 0.1, "interface exponent {e}");
}

#[test]
fn grid_too_small_is_rejected() {
    let p = ProblemParams::critical(1.0, 1).unwrap();
    assert!(matches!(discretize_operator(&p, 4), Err(SpectralError::Domain(_))));
    let e = explicit_profile_n1(1, 2.0).unwrap();
    assert!(tfe_core::spectral::discretize_with_profile(&e, 50).is_err());
}

#[test]
fn certificate_verdicts() {
    for n in ["1/2", "4/5", "6/5"] {
        let v = symmetry_certificate(&q(n)).unwrap();
        assert_eq!(v.verdict, Verdict::NotSymmetric, "n = {n}");
        assert!(v.b_candidates_y4.iter().all(|z| !v.b_candidates_y6.contains(z)), "n = {n}");
    }
    assert_eq!(symmetry_certificate(&q("2/3")).unwrap().verdict, Verdict::Degenerate);
    let one = symmetry_certificate(&q("1")).unwrap();
    assert_eq!(one.verdict, Verdict::Symmetric);
    assert_eq!(one.b_candidates_y4, vec![q("2/15")]);
    // b = ±√(2/15) = ±√30/15, the magnitude of F″(0) at unit interface scaled to F(0) = 1
    let b = (2.0f64 / 15.0).sqrt();
    assert!((b - 30f64.sqrt() / 15.0).abs() < 1e-15);
    assert!((b - 4.0 / 120f64.sqrt()).abs() < 1e-15);
    assert_eq!(symmetry_certificate(&q("4/5")).unwrap().b_candidates_y4, vec![q("25/432")]);
    assert!(symmetry_certificate(&q("0")).is_err());
    assert!(symmetry_certificate(&q("-1/2")).is_err());
}

#[test]
fn rational_parsing() {
    assert_eq!(q("0.25"), q("1/4"));
    assert_eq!(q("3"), q("6/2"));
    assert!(parse_rational("1/0").is_err());
    assert!(parse_rational("x").is_err());
    assert!(parse_rational("1.").is_err());
}
