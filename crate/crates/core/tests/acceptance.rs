//! Acceptance checks: one PASS/FAIL line per criterion. The process exits 0 so
//! that a failing criterion is reported without breaking the test build.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;
use num_rational::BigRational;
use tfe_core::orbits::{
    default_initial_state, energy_identity_defect, exact_orbit_n1, find_periodic_orbit, n_plus, theta_n1,
    trace_heteroclinic_bifurcation,
};
use tfe_core::pdesim::{run_critical_experiment, run_supercritical_experiment, RunConfig, Scheme};
use tfe_core::profiles::explicit::{interface_graded_grid, od11_residual_poly, unit_height_radius, RadialPoly};
use tfe_core::profiles::kernel::{sequence_asymptote, sup_distance};
use tfe_core::profiles::{
    explicit_profile_n1, fbp_kernel_sequence, fundamental_kernel, shoot_cp_profile, shoot_fbp_profile, ProblemParams,
};
use tfe_core::spectral::{
    discretize_operator, eigenvalues_closed_form, parse_rational, polynomial_eigenfunctions, symmetry_certificate,
    Verdict,
};

type Outcome = (bool, String);

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn explicit_residual() -> Outcome {
    let mut worst = 0.0_f64;
    for dim in 1..=3 {
        let p = ProblemParams::critical(1.0, dim).unwrap();
        let a = unit_height_radius(dim);
        let poly = RadialPoly::bump(p.c0().unwrap(), a, 2);
        worst = worst.max(max_abs(od11_residual_poly(&poly, &p, &interface_graded_grid(a, 400))));
        let prof = explicit_profile_n1(dim, a).unwrap();
        worst = worst.max(max_abs((0..=100).map(|i| a * i as f64 / 100.0).map(|y| prof.eval(y) - poly.eval(y))));
    }
    let c0 = ProblemParams::critical(1.0, 1).unwrap().c0().unwrap();
    let ok = worst <= 1e-10 && (c0 - 1.0 / 120.0).abs() < 1e-15;
    (ok, format!("max residual {worst:.2e}, c0 = {c0:.15}"))
}

fn shooting_vs_explicit() -> Outcome {
    let params = ProblemParams::critical(1.0, 1).unwrap();
    let shot = shoot_fbp_profile(&params).unwrap();
    let exact = explicit_profile_n1(1, unit_height_radius(1)).unwrap();
    let sup = max_abs((0..=1000).map(|i| exact.interface * i as f64 / 1000.0).map(|y| shot.eval(y) - exact.eval(y)));
    let d2 = shot.second_deriv_origin + 4.0 / 120f64.sqrt();
    (sup <= 1e-6 && d2.abs() <= 1e-8, format!("sup-norm {sup:.2e}, F''(0) error {:.2e}", d2.abs()))
}

fn cauchy_data() -> Outcome {
    let targets = [(0.0, -0.3379890), (0.2, -0.3414702), (0.5, -0.3490986), (1.0, -0.3697143), (1.5, -0.4052680)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, t) in targets {
        match shoot_cp_profile(n) {
            Ok(p) => {
                let e = (p.second_deriv_origin - t).abs();
                ok &= e <= 1e-3;
                parts.push(format!("n={n}: {:.7} (err {e:.1e})", p.second_deriv_origin));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("n={n}: {e}"));
            }
        }
    }
    (ok, parts.join("; "))
}

fn spectrum_cross_check() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for dim in [1, 2] {
        let p = ProblemParams::critical(1.0, dim).unwrap();
        let errs = |m: usize| -> Vec<f64> {
            let ev = discretize_operator(&p, m).unwrap().real_spectrum().unwrap();
            [0usize, 2, 4].iter().enumerate().map(|(j, k)| (ev[j] + eigenvalues_closed_form(2, dim, *k).unwrap()).abs()).collect()
        };
        let (coarse, fine) = (errs(50), errs(100));
        let rel = [0usize, 2, 4]
            .iter()
            .zip(&fine)
            .map(|(k, e)| e / eigenvalues_closed_form(2, dim, *k).unwrap().max(1.0))
            .fold(0.0, f64::max);
        ok &= rel <= 0.01;
        // order from the k = 2 mode; errors at roundoff level mean the scheme is exact there
        let order = if coarse[1] > 1e-10 { (coarse[1] / fine[1]).log2() } else { f64::INFINITY };
        ok &= order >= 1.5;
        parts.push(format!("N={dim}: max rel err {rel:.1e}, order {}", if order.is_finite() { format!("{order:.2}") } else { "exact".into() }));
    }
    let mut gram = 0.0_f64;
    for dim in 1..=3 {
        let s = polynomial_eigenfunctions(dim, 8).unwrap();
        for (i, row) in s.gram().iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                gram = gram.max((v - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    ok &= gram <= 1e-8;
    parts.push(format!("Gram defect {gram:.1e}"));
    (ok, parts.join("; "))
}

fn root_and_period() -> Outcome {
    let theta = theta_n1();
    let exact = exact_orbit_n1().unwrap();
    let found = find_periodic_orbit(1.0, default_initial_state(1.0).unwrap()).unwrap();
    let dt = (found.period - exact.period).abs();
    let dist = found.sup_distance(&exact);
    let ok = (theta - 0.381966).abs() <= 1e-6
        && (theta - (3.0 - 5f64.sqrt()) / 2.0).abs() <= 1e-9
        && (exact.period + 2.0 * theta.ln()).abs() <= 1e-6
        && (exact.period - 1.9248).abs() <= 1e-4
        && dt <= 1e-6
        && dist <= 1e-5;
    (ok, format!("theta {theta:.12}, T {:.10}, Newton period err {dt:.1e}, sup-dist {dist:.1e}", exact.period))
}

fn integral_identity() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [0.5, 1.0, 1.5] {
        let d = find_periodic_orbit(n, default_initial_state(n).unwrap()).and_then(|o| energy_identity_defect(&o));
        match d {
            Ok(d) => {
                ok &= d <= 1e-6;
                parts.push(format!("n={n}: {d:.1e}"));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("n={n}: {e}"));
            }
        }
    }
    (ok, format!("relative defects {}", parts.join(", ")))
}

fn heteroclinic() -> Outcome {
    let tr = trace_heteroclinic_bifurcation((1.6, 1.9), 50.0).unwrap();
    let [lo, hi] = tr.bracket;
    let inside = lo >= 1.7590 && hi <= 1.7610;
    let monotone = tr.periods.windows(2).all(|w| w[1] > w[0]);
    (inside && monotone, format!("n_h ~ {:.7} in [{lo:.9}, {hi:.9}], periods monotone: {monotone}", tr.n_h_estimate))
}

fn constants() -> Outcome {
    let np = n_plus();
    let mu = 3.0 / np;
    let q = 3.0 * mu * mu - 6.0 * mu + 2.0;
    let ok = (np - 9.0 / (3.0 + 3f64.sqrt())).abs() <= 1e-15 && (np - 1.9019238).abs() <= 1e-7 && q.abs() <= 1e-14;
    (ok, format!("n_+ = {np:.10}, 3mu^2-6mu+2 = {q:.1e}"))
}

fn certificate() -> Outcome {
    let q = |s: &str| parse_rational(s).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in ["1/2", "4/5", "6/5"] {
        let v = symmetry_certificate(&q(n)).unwrap();
        let disjoint = v.b_candidates_y4.iter().all(|b| !v.b_candidates_y6.contains(b));
        ok &= v.verdict == Verdict::NotSymmetric && disjoint;
        parts.push(format!("n={n}: {:?}", v.verdict));
    }
    let deg = symmetry_certificate(&q("2/3")).unwrap().verdict;
    ok &= deg == Verdict::Degenerate;
    parts.push(format!("n=2/3: {deg:?}"));
    let one = symmetry_certificate(&q("1")).unwrap();
    let b2: Option<BigRational> = one.b_candidates_y4.first().cloned();
    let b = b2.as_ref().map_or(f64::NAN, |r| num_traits::ToPrimitive::to_f64(r).unwrap().sqrt());
    let shot = shoot_fbp_profile(&ProblemParams::critical(1.0, 1).unwrap()).unwrap();
    ok &= b2 == Some(q("2/15")) && (b - 30f64.sqrt() / 15.0).abs() <= 1e-15;
    ok &= (b - shot.second_deriv_origin.abs()).abs() <= 1e-8;
    parts.push(format!("n=1: b = {b:.12} vs |F''(0)| = {:.12}", shot.second_deriv_origin.abs()));
    (ok, parts.join("; "))
}

fn critical_decay() -> Outcome {
    let cfg = RunConfig { tau_max: 50.0, ..RunConfig::default() };
    let tol = Scheme::new(cfg.params().unwrap(), true).newton_tol;
    let rep = run_critical_experiment(&cfg).unwrap();
    let e = rep.final_decade_exponent;
    let defect = rep.trace.max_mass_defect();
    let ok = (e + 0.2).abs() <= 0.02 && rep.compensated_drift < 0.2 && defect < tol;
    (ok, format!("exponent {e:.4}, compensated drift {:.3}, max mass defect {defect:.1e} (tol {tol:.0e})", rep.compensated_drift))
}

fn supercritical() -> Outcome {
    let cfg = RunConfig { p: Some(8.0), tau_max: 40.0, dt_rel: 0.0, ..RunConfig::default() };
    let rep = run_supercritical_experiment(&cfg).unwrap();
    let rows = &rep.trace.rows;
    let last = rows.last().unwrap();
    let start = rows.iter().find(|r| r.tau >= 0.8 * cfg.tau_max).unwrap();
    let dm = (start.mass - last.mass).abs() / last.mass;
    let d: Vec<f64> = rep.profile_distances.iter().map(|x| x[1]).collect();
    let floor = *d.last().unwrap();
    // once at the grid-level floor the distance is flat; allow 5% of that floor
    let decreasing = d.windows(2).all(|w| w[1] <= w[0] + 0.05 * floor) && floor < 1e-2 * d[0];
    let lyap = rows
        .windows(2)
        .filter(|w| w[0].tau >= 5.0)
        .all(|w| w[1].lyapunov - w[0].lyapunov >= -1e-6 * (w[1].tau - w[0].tau));
    let ok = dm < 1e-3 && decreasing && lyap && rep.mass_monotone;
    (ok, format!("mass change {dm:.1e} over last 20%, distance {:.1e} -> {floor:.1e}, Lyapunov non-decreasing: {lyap}", d[0]))
}

fn kernel_sequence() -> Outcome {
    let (kern, _) = fundamental_kernel(1e-10).unwrap();
    let seq: Vec<_> = (1..=8).map(|k| fbp_kernel_sequence(k).unwrap()).collect();
    let counts: Vec<usize> = seq.iter().take(5).map(|p| p.zero_count).collect();
    let sturm = counts.iter().enumerate().all(|(i, c)| *c == i + 1);
    let ratio = seq[7].interface / sequence_asymptote(8);
    let dist: Vec<f64> = seq.iter().map(|p| sup_distance(p, &kern, 2.0, 400)).collect();
    let decreasing = dist.windows(2).all(|w| w[1] < w[0]);
    let ok = sturm && (ratio - 1.0).abs() <= 0.05 && decreasing;
    (
        ok,
        format!(
            "zero counts k=1..5 {counts:?} (Sturm: {sturm}), y_8 ratio {ratio:.4}, sup-distance decreasing: {decreasing} ({:.1e} -> {:.1e})",
            dist[0],
            dist[7]
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("explicit-profile-residual", explicit_residual),
        ("shooting-vs-explicit", shooting_vs_explicit),
        ("cauchy-shooting-data", cauchy_data),
        ("spectrum-cross-check", spectrum_cross_check),
        ("cubic-root-and-period", root_and_period),
        ("integral-identity", integral_identity),
        ("heteroclinic-bifurcation", heteroclinic),
        ("turning-point-constants", constants),
        ("symmetry-certificate", certificate),
        ("pde-critical-decay", critical_decay),
        ("supercritical-convergence", supercritical),
        ("kernel-sequence", kernel_sequence),
    ];
    let quiet = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    let mut passed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            (false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        passed += ok as usize;
        println!("{} {:>2} {name}: {detail} [{:.2} s]", if ok { "PASS" } else { "FAIL" }, i + 1, t.elapsed().as_secs_f64());
    }
    std::panic::set_hook(quiet);
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
}
