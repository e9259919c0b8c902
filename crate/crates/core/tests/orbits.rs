use tfe_core::orbits::{
    default_initial_state, energy_identity_defect, exact_orbit_n1, find_periodic_orbit, floquet_multipliers, n_plus,
    stability_terms, theta_n1, trace_heteroclinic_bifurcation, OrbitError, OscillatorySystem,
};

#[test]
fn cubic_root_and_exact_period() {
    let theta = theta_n1();
    assert!((theta - 0.381966011250105).abs() < 1e-12);
    assert!((theta - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-14);
    let o = exact_orbit_n1().unwrap();
    assert!((o.period + 2.0 * theta.ln()).abs() < 1e-10);
    assert!((o.period - 1.9248473002385).abs() < 1e-9);
}

#[test]
fn newton_orbit_matches_exact_orbit() {
    let exact = exact_orbit_n1().unwrap();
    let found = find_periodic_orbit(1.0, default_initial_state(1.0).unwrap()).unwrap();
    assert!((found.period - exact.period).abs() < 1e-6);
    assert!(found.sup_distance(&exact) < 1e-5);
    assert!(found.closure_defect < 1e-9);
}

#[test]
fn energy_identity_holds_along_orbits() {
    for n in [0.5, 1.0, 1.5] {
        let o = find_periodic_orbit(n, default_initial_state(n).unwrap()).unwrap();
        let d = energy_identity_defect(&o).unwrap();
        assert!(d < 1e-6, "n = {n}: relative defect {d:e}");
    }
}

#[test]
fn orbit_at_three_halves_is_stable() {
    let o = find_periodic_orbit(1.5, default_initial_state(1.5).unwrap()).unwrap();
    let fl = floquet_multipliers(&o).unwrap();
    assert!((fl.phase_multiplier[0] - 1.0).abs() < 1e-6);
    assert!(fl.nontrivial_moduli.iter().all(|&m| m < 1.0), "{:?}", fl.nontrivial_moduli);
    // linear term vanishes where C = μ(μ−1)(μ−2) = 0, i.e. μ = 2
    let st = stability_terms(&o).unwrap();
    assert!(st.linear.abs() < 1e-12 && st.gradient < 0.0);
}

#[test]
fn turning_point_constant() {
    let np = n_plus();
    assert!((np - 9.0 / (3.0 + 3f64.sqrt())).abs() < 1e-15);
    assert!((np - 1.9019238).abs() < 1e-7);
    let mu = 3.0 / np;
    assert!((3.0 * mu * mu - 6.0 * mu + 2.0).abs() < 1e-14);
    let sys = OscillatorySystem::new(np).unwrap();
    assert!(sys.b.abs() < 1e-14);
}

#[test]
fn equilibria_only_above_three_halves() {
    assert!(OscillatorySystem::new(1.2).unwrap().equilibria().is_none());
    let (p, m) = OscillatorySystem::new(1.8).unwrap().equilibria().unwrap();
    assert!(p > 0.0 && (p + m).abs() < 1e-15);
}

#[test]
fn period_grows_toward_heteroclinic_limit() {
    let tr = trace_heteroclinic_bifurcation((1.6, 1.9), 50.0).unwrap();
    assert!(tr.periods.windows(2).all(|w| w[1] > w[0]), "{:?}", tr.periods);
    assert!(tr.bracket[0] < tr.bracket[1] && tr.bracket[1] - tr.bracket[0] < 1e-6);
    assert!(tr.bracket[0] > 1.75 && tr.bracket[1] < 1.77);
}

#[test]
fn invalid_mobility_rejected() {
    assert!(matches!(OscillatorySystem::new(0.0), Err(OrbitError::Domain(_))));
    assert!(matches!(OscillatorySystem::new(2.5), Err(OrbitError::Domain(_))));
    assert!(trace_heteroclinic_bifurcation((1.0, 1.2), 50.0).is_err());
}
