use tfe_core::pdesim::experiments::mass_matched_distance;
use tfe_core::pdesim::{lyapunov_monitor, run_critical_experiment, run_supercritical_experiment, run_trace, RunConfig, Scheme, SimError, SimState};
use tfe_core::profiles::ProblemParams;

fn short(tau_max: f64) -> RunConfig {
    RunConfig { tau_max, spacing: 0.05, ..RunConfig::default() }
}

#[test]
fn conservative_run_keeps_mass_and_symmetry() {
    let cfg = RunConfig { absorb: false, ..short(3.0) };
    let tr = run_trace(&cfg).unwrap();
    let m0 = tr.rows[0].mass;
    assert!(tr.rows.iter().all(|r| (r.mass / m0 - 1.0).abs() < 1e-10));
    let st = tr.final_state.unwrap();
    assert!(st.symmetry_defect() < 1e-10 * st.amplitude());
}

#[test]
fn conservative_run_relaxes_toward_the_mass_matched_profile() {
    let params = ProblemParams::critical(1.0, 1).unwrap();
    let mut st = SimState::new(params, 10.0, 400, |y| (1.0 - y * y / 16.0).max(0.0).powi(3));
    let scheme = Scheme::new(params, false);
    let d0 = mass_matched_distance(&st);
    let mut dt: f64 = 1e-3;
    while st.tau < 10.0 {
        let want = dt.min(10.0 - st.tau);
        dt = (scheme.step(&mut st, want).unwrap() * 1.2).min(0.05);
    }
    assert!(mass_matched_distance(&st) < 0.1 * d0, "{} vs {d0}", mass_matched_distance(&st));
}

#[test]
fn absorbing_run_satisfies_discrete_mass_identity() {
    let tr = run_trace(&short(5.0)).unwrap();
    assert!(tr.max_mass_defect() < 1e-9, "{:e}", tr.max_mass_defect());
    assert!(tr.rows.windows(2).all(|w| w[1].mass < w[0].mass));
}

#[test]
fn critical_decay_on_a_short_horizon() {
    let rep = run_critical_experiment(&RunConfig { tau_max: 40.0, ..RunConfig::default() }).unwrap();
    assert!(rep.mass_monotone);
    assert!((rep.final_decade_exponent + 0.2).abs() < 0.04, "{}", rep.final_decade_exponent);
    assert!(rep.collapse_error < 0.05);
}

#[test]
fn supercritical_mass_levels_off() {
    let cfg = RunConfig { p: Some(8.0), dt_rel: 0.0, ..short(15.0) };
    let rep = run_supercritical_experiment(&cfg).unwrap();
    assert!((rep.gamma - 0.4).abs() < 1e-14);
    assert!(rep.mass_monotone && rep.limit_mass > 0.0);
    let d: Vec<f64> = rep.profile_distances.iter().map(|x| x[1]).collect();
    assert!(d.last().unwrap() < &(0.1 * d[0]), "{d:?}");
}

#[test]
fn wrong_absorption_exponent_is_rejected() {
    let cfg = RunConfig { p: Some(7.0), ..short(1.0) };
    assert!(matches!(run_critical_experiment(&cfg), Err(SimError::Config(_))));
    let cfg = RunConfig { p: Some(5.0), ..short(1.0) };
    assert!(matches!(run_supercritical_experiment(&cfg), Err(SimError::Config(_))));
    let cfg = RunConfig { spacing: -1.0, ..short(1.0) };
    assert!(matches!(run_trace(&cfg), Err(SimError::Config(_))));
    assert!(serde_json::from_str::<RunConfig>(r#"{"tau_max": 3, "typo": 1}"#).is_err());
}

#[test]
fn single_step_and_lyapunov_monitor() {
    let params = ProblemParams::critical(1.0, 1).unwrap();
    let mut st = SimState::new(params, 4.0, 160, |y| (1.0 - y * y / 9.0).max(0.0).powi(2));
    let scheme = Scheme::new(params, false);
    assert_eq!(scheme.gamma, 0.0);
    let (m0, e0) = (st.mass(), lyapunov_monitor(&st));
    let dt = scheme.step(&mut st, 1e-3).unwrap();
    assert!(dt > 0.0 && (st.tau - dt).abs() < 1e-15);
    assert!((st.mass() - m0).abs() < 1e-12 * m0);
    assert!(lyapunov_monitor(&st) >= e0 - 1e-12);
    st.enlarge(1.5);
    assert!((st.half_width() - 6.0).abs() < st.h());
    assert!((st.mass() - m0).abs() < 1e-12 * m0);
}
