use tfe_core::centre::{critical_exponent, gamma_closed_form, gamma_coefficients, psi0, CentreError};
use tfe_core::profiles::ProblemParams;

#[test]
fn projection_coefficients_in_one_dimension() {
    let q = gamma_coefficients(&ProblemParams::critical(1.0, 1).unwrap()).unwrap();
    assert!((q.gamma1 - 0.0096225044864938).abs() < 1e-13);
    assert!((q.gamma2 / 1.43953191e-13 - 1.0).abs() < 1e-7);
    assert!((q.gamma_star - 105.978889468).abs() < 1e-6);
    assert!((q.a_star - 3.20852066720).abs() < 1e-9);
    assert_eq!(q.p0, 6.0);
}

#[test]
fn quadrature_agrees_with_beta_function_form() {
    for dim in 1..=3 {
        let p = ProblemParams::critical(1.0, dim).unwrap();
        let (a, b) = (gamma_coefficients(&p).unwrap(), gamma_closed_form(&p));
        assert!((a.gamma1 / b.gamma1 - 1.0).abs() < 1e-10);
        assert!((a.gamma2 / b.gamma2 - 1.0).abs() < 1e-10);
        assert!((a.gamma_star / b.gamma_star - 1.0).abs() < 1e-9);
    }
}

#[test]
fn amplitude_law_is_an_exact_solution_of_the_matched_ode() {
    let q = gamma_coefficients(&ProblemParams::critical(1.0, 1).unwrap()).unwrap();
    assert!((q.decay_exponent() - 0.2).abs() < 1e-15);
    let b = q.integrate_matched(q.predicted_amplitude(1.0), 1.0, 1e4).unwrap();
    assert!((b / q.predicted_amplitude(1e4) - 1.0).abs() < 1e-8);
}

#[test]
fn matched_ode_approaches_the_law_from_other_data() {
    let q = gamma_coefficients(&ProblemParams::critical(1.0, 3).unwrap()).unwrap();
    let gap: Vec<f64> = [1e4, 1e6, 1e8]
        .iter()
        .map(|&t| (q.integrate_matched(0.5, 1.0, t).unwrap() / q.predicted_amplitude(t) - 1.0).abs())
        .collect();
    assert!(gap.windows(2).all(|w| w[1] < w[0]), "{gap:?}");
    assert!(gap[2] < 0.05, "{gap:?}");
}

#[test]
fn pattern_mass_has_only_a_logarithmic_factor() {
    for dim in 1..=3 {
        let q = gamma_coefficients(&ProblemParams::critical(1.0, dim).unwrap()).unwrap();
        let (et, el) = q.pattern_mass_exponents();
        assert!(et.abs() < 1e-15);
        assert!((el + dim as f64 / 4.0).abs() < 1e-14);
        // the pattern keeps the support-radius law a*·t^β·(ln t)^{−βN/4}
        let t = 1e3;
        let r = q.support_radius(t);
        let x_in = 0.99 * r;
        assert!(q.evaluate_pattern(x_in, t) > 0.0 && q.evaluate_pattern(1.01 * r, t) == 0.0);
        assert!(q.fixed_profile_mass() > 0.0);
    }
}

#[test]
fn zero_mode_and_exponent() {
    let psi = psi0(1);
    assert_eq!(psi(1.0), 0.0);
    assert!(psi(0.0) > 0.0);
    assert!((critical_exponent(1.0, 1, 2) - 6.0).abs() < 1e-15);
}

#[test]
fn only_the_self_adjoint_critical_case_is_supported() {
    let off = ProblemParams::critical(0.5, 1).unwrap();
    assert!(matches!(gamma_coefficients(&off), Err(CentreError::Unsupported(_))));
    let supercritical = ProblemParams::critical(1.0, 1).unwrap().with_p(7.0).unwrap();
    assert!(matches!(gamma_coefficients(&supercritical), Err(CentreError::Unsupported(_))));
}
