//! Subcommand bodies: each resolves its settings, computes, writes artifacts
//! and returns the summary recorded in the manifest.

use super::svg::{emit_svg, PlotStyle, Series};
use super::{CliError, Command, RunContext};
use crate::centre::{gamma_closed_form, gamma_coefficients};
use crate::orbits::{
    default_initial_state, exact_orbit_n1, find_periodic_orbit, floquet_multipliers, patched_flow, stability_terms,
    theta_n1, trace_heteroclinic_bifurcation, energy_identity_defect, FlowOptions, OscillatorySystem, PeriodicOrbit,
};
use crate::output::fmt17;
use crate::pdesim::{run_critical_experiment, run_supercritical_experiment, RunConfig, SimTrace};
use crate::profiles::kernel::{sequence_asymptote, sup_distance};
use crate::profiles::{
    explicit_profile_2m_n1, fbp_kernel_sequence, fundamental_kernel, shoot_cp_profile_with, shoot_fbp_profile_with,
    CpOptions, FbpOptions, Profile, ProblemParams,
};
use crate::spectral::{
    discretize_operator, eigenvalue_general_m_derived, eigenvalues_closed_form, parse_rational,
    polynomial_eigenfunctions, symmetry_certificate,
};
use serde_json::{json, Value};
use std::thread;

pub(super) fn dispatch(cmd: &Command, ctx: &mut RunContext) -> Result<Value, CliError> {
    match cmd {
        Command::ProfileFbp { .. } => profile_fbp(ctx),
        Command::ProfileCp { .. } => profile_cp(ctx),
        Command::Kernel { .. } => kernel(ctx),
        Command::KernelSequence { .. } => kernel_sequence(ctx),
        Command::ProfileExplicit { .. } => profile_explicit(ctx),
        Command::Spectrum { .. } => spectrum(ctx),
        Command::SymmetryCheck { .. } => symmetry_check(ctx),
        Command::Centre { .. } => centre(ctx),
        Command::Orbit { .. } => orbit(ctx),
        Command::OrbitExact => orbit_exact(ctx),
        Command::Bifurcate { .. } => bifurcate(ctx),
        Command::SimulateCritical { .. } => simulate(ctx, false),
        Command::SimulateSupercritical { .. } => simulate(ctx, true),
        Command::Preset { .. } => preset(ctx),
    }
}

fn profile_points(p: &Profile, points: usize) -> Vec<(f64, f64)> {
    p.resample(points).iter().map(|r| (r[0], r[1])).collect()
}

fn points(ctx: &mut RunContext) -> Result<usize, CliError> {
    let pts = ctx.resolver.take("points", ctx.resolver.settings.points, 401);
    if pts < 2 {
        return Err(CliError::Validation(format!("points = {pts} must be at least 2")));
    }
    Ok(pts)
}

fn dim(ctx: &mut RunContext) -> usize {
    ctx.resolver.take("dim", ctx.resolver.settings.dim, 1)
}

fn profile_summary(p: &Profile) -> Value {
    json!({
        "params": p.params,
        "F2_0": p.second_deriv_origin,
        "interface": p.interface,
        "mass": p.mass,
        "zero_count": p.zero_count,
    })
}

fn finish(ctx: &mut RunContext, results: Value) -> Result<Value, CliError> {
    ctx.write_json("summary.json", &results)?;
    Ok(results)
}

fn profile_fbp(ctx: &mut RunContext) -> Result<Value, CliError> {
    let (_, n) = ctx.resolver.n("1")?;
    let dim = dim(ctx);
    let tol = ctx.resolver.take("tol", ctx.resolver.settings.tol, FbpOptions::default().tol);
    let pts = points(ctx)?;
    let params = ProblemParams::critical(n, dim)?;
    let sol = shoot_fbp_profile_with(&params, &FbpOptions { tol, ..FbpOptions::default() })?;
    ctx.write("profile.csv", &sol.profile.to_csv(pts))?;
    let style = PlotStyle::new(&format!("FBP profile, n = {n}, N = {dim}"), "y", "F");
    ctx.write("profile.svg", &emit_svg(&[Series::new(format!("n = {n}"), profile_points(&sol.profile, pts))], &style))?;
    let mut results = profile_summary(&sol.profile);
    results["shooting_parameter"] = json!(sol.parameter);
    results["matches"] = json!(sol.matches);
    finish(ctx, results)
}

fn profile_cp(ctx: &mut RunContext) -> Result<Value, CliError> {
    let (_, n) = ctx.resolver.n("0")?;
    let pts = points(ctx)?;
    let sol = shoot_cp_profile_with(n, &CpOptions::default())?;
    ctx.write("profile.csv", &sol.profile.to_csv(pts))?;
    let style = PlotStyle::new(&format!("Cauchy-problem profile, n = {n}"), "y", "F");
    ctx.write("profile.svg", &emit_svg(&[Series::new(format!("n = {n}"), profile_points(&sol.profile, pts))], &style))?;
    let mut results = profile_summary(&sol.profile);
    results["phase"] = json!(sol.phase);
    results["period"] = json!(sol.period);
    results["matches"] = json!(sol.matches);
    finish(ctx, results)
}

fn kernel(ctx: &mut RunContext) -> Result<Value, CliError> {
    let tol = ctx.resolver.take("tol", ctx.resolver.settings.tol, 1e-10);
    let pts = points(ctx)?;
    let (p, bundle) = fundamental_kernel(tol)?;
    ctx.write("kernel.csv", &p.to_csv(pts))?;
    let style = PlotStyle::new("Fundamental kernel", "y", "F");
    ctx.write("kernel.svg", &emit_svg(&[Series::new("kernel", profile_points(&p, pts))], &style))?;
    let mut results = profile_summary(&p);
    results["bundle"] = json!(bundle);
    finish(ctx, results)
}

fn kernel_sequence(ctx: &mut RunContext) -> Result<Value, CliError> {
    let k_max = ctx.resolver.take("k_max", ctx.resolver.settings.k_max, 8);
    let pts = points(ctx)?;
    if k_max == 0 {
        return Err(CliError::Validation("k_max must be at least 1".into()));
    }
    let (kern, _) = fundamental_kernel(1e-10)?;
    let seq: Vec<Profile> = thread::scope(|s| {
        let handles: Vec<_> = (1..=k_max).map(|k| s.spawn(move || fbp_kernel_sequence(k))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect::<Result<_, _>>()
    })?;
    let mut rows = Vec::new();
    let mut csv = String::from("k,y_k,asymptote,ratio,zero_count,sup_distance\n");
    let mut series = vec![Series::new("kernel", profile_points(&kern, pts).into_iter().filter(|p| p.0 <= 6.0).collect())];
    for (i, p) in seq.iter().enumerate() {
        let k = i + 1;
        let asym = sequence_asymptote(k);
        let dist = sup_distance(p, &kern, 2.0, 400);
        csv += &format!("{k},{},{},{},{},{}\n", fmt17(p.interface), fmt17(asym), fmt17(p.interface / asym), p.zero_count, fmt17(dist));
        rows.push(json!({
            "k": k, "y_k": p.interface, "asymptote": asym, "ratio": p.interface / asym,
            "zero_count": p.zero_count, "sup_distance": dist,
        }));
        ctx.write(&format!("k-{k}/profile.csv"), &p.to_csv(pts))?;
        if k <= 6 {
            series.push(Series::new(format!("k = {k}"), profile_points(p, pts)));
        }
    }
    ctx.write("sequence.csv", &csv)?;
    let style = PlotStyle::new("FBP approximants of the kernel", "y", "F");
    ctx.write("sequence.svg", &emit_svg(&series, &style))?;
    finish(ctx, json!({ "sequence": rows }))
}

fn profile_explicit(ctx: &mut RunContext) -> Result<Value, CliError> {
    let (text, n) = ctx.resolver.n("1")?;
    if n != 1.0 {
        return Err(CliError::Validation(format!("closed-form profile exists only for n = 1, got n = {text}")));
    }
    let dim = dim(ctx);
    let m = ctx.resolver.take("m", ctx.resolver.settings.m, 2);
    let pts = points(ctx)?;
    let ex = explicit_profile_2m_n1(m, dim)?;
    ctx.write("profile.csv", &ex.profile.to_csv(pts))?;
    let style = PlotStyle::new(&format!("Explicit profile, m = {m}, N = {dim}"), "y", "F");
    ctx.write("profile.svg", &emit_svg(&[Series::new("c0 (1 - y^2)^m", profile_points(&ex.profile, pts))], &style))?;
    let mut results = profile_summary(&ex.profile);
    results["c0"] = json!(ex.c0);
    results["c0_printed"] = json!(ex.c0_printed);
    results["residual"] = json!(ex.residual);
    results["m"] = json!(m);
    finish(ctx, results)
}

fn spectrum(ctx: &mut RunContext) -> Result<Value, CliError> {
    let (_, n) = ctx.resolver.n("1")?;
    let dim = dim(ctx);
    let k_max = ctx.resolver.take("k_max", ctx.resolver.settings.k_max, 8);
    let grid = ctx.resolver.take("grid", ctx.resolver.settings.grid, 100);
    let params = ProblemParams::critical(n, dim)?;
    let op = discretize_operator(&params, grid)?;
    let ev = op.eigenvalues()?;
    let sign = op.observed_sign()?;
    let mut csv = String::from("index,re,im\n");
    for (i, (re, im)) in ev.iter().enumerate().take(20) {
        csv += &format!("{i},{},{}\n", fmt17(*re), fmt17(*im));
    }
    ctx.write("discrete.csv", &csv)?;
    let low: Vec<(f64, f64)> = ev.iter().take(12).enumerate().map(|(i, z)| (i as f64, z.0)).collect();
    let mut results = json!({
        "params": params,
        "grid": grid,
        "observed_sign": sign,
        "discrete_low": ev.iter().take(12).map(|z| [z.0, z.1]).collect::<Vec<_>>(),
    });
    let mut series = vec![Series::new("discrete", low)];
    if n == 1.0 {
        let spec = polynomial_eigenfunctions(dim, k_max)?;
        ctx.write_json("spectrum.json", &spec)?;
        let gram = spec.gram();
        let gram_defect = gram
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, g)| (g - if i == j { 1.0 } else { 0.0 }).abs()))
            .fold(0.0, f64::max);
        let table: Vec<Value> = spec
            .indices
            .iter()
            .zip(&spec.eigenvalues)
            .enumerate()
            .map(|(j, (k, lam))| {
                json!({
                    "k": k,
                    "closed_form": eigenvalues_closed_form(2, dim, *k).unwrap_or(f64::NAN),
                    "polynomial": lam,
                    "discrete": ev.get(j).map(|z| z.0),
                    "general_m_derived_m2": eigenvalue_general_m_derived(2, dim, *k).unwrap_or(f64::NAN),
                })
            })
            .collect();
        series.push(Series::new(
            "closed form (signed)",
            spec.eigenvalues.iter().enumerate().map(|(i, l)| (i as f64, sign * l)).collect(),
        ));
        results["closed_form_table"] = json!(table);
        results["gram_defect"] = json!(gram_defect);
    }
    let style = PlotStyle::new(&format!("Low spectrum, n = {n}, N = {dim}"), "index", "eigenvalue");
    ctx.write("spectrum.svg", &emit_svg(&series, &style))?;
    finish(ctx, results)
}

fn symmetry_check(ctx: &mut RunContext) -> Result<Value, CliError> {
    let (text, _) = ctx.resolver.n("1/2")?;
    let r = parse_rational(&text)?;
    let v = symmetry_certificate(&r)?;
    let results = serde_json::to_value(&v).map_err(|e| CliError::Numerical(e.to_string()))?;
    finish(ctx, results)
}

fn centre(ctx: &mut RunContext) -> Result<Value, CliError> {
    let dim = dim(ctx);
    let pts = points(ctx)?;
    let params = ProblemParams::critical(1.0, dim)?;
    let q = gamma_coefficients(&params)?;
    let c = gamma_closed_form(&params);
    let mut csv = String::from("zeta,F_star\n");
    let mut line = Vec::new();
    for i in 0..pts {
        let z = q.a_star * i as f64 / (pts - 1) as f64;
        let f = q.fixed_profile(z);
        csv += &format!("{},{}\n", fmt17(z), fmt17(f));
        line.push((z, f));
    }
    ctx.write("fixed_profile.csv", &csv)?;
    let style = PlotStyle::new(&format!("Rescaled critical pattern, N = {dim}"), "zeta", "F*");
    ctx.write("fixed_profile.svg", &emit_svg(&[Series::new("F*", line)], &style))?;
    let (e_t, e_log) = q.pattern_mass_exponents();
    finish(
        ctx,
        json!({
            "coefficients": q,
            "closed_form": { "gamma1": c.gamma1, "gamma2": c.gamma2 },
            "decay_exponent": q.decay_exponent(),
            "mass_exponents": { "t": e_t, "log_t": e_log },
            "fixed_profile_mass": q.fixed_profile_mass(),
        }),
    )
}

fn orbit_summary(o: &PeriodicOrbit) -> Result<Value, CliError> {
    let fl = floquet_multipliers(o)?;
    Ok(json!({
        "n": o.n,
        "mu": o.mu,
        "period": o.period,
        "closure_defect": o.closure_defect,
        "floquet": fl,
        "stability_terms": stability_terms(o)?,
        "energy_identity_defect": energy_identity_defect(o)?,
    }))
}

fn orbit_series(o: &PeriodicOrbit, label: String) -> Series {
    Series::new(label, o.samples.iter().map(|p| (p.s, p.phi)).collect())
}

fn orbit(ctx: &mut RunContext) -> Result<Value, CliError> {
    let (_, n) = ctx.resolver.n("1.5")?;
    let o = find_periodic_orbit(n, default_initial_state(n)?)?;
    ctx.write("orbit.csv", &o.to_csv())?;
    let style = PlotStyle::new(&format!("Periodic orbit, n = {n}"), "s", "phi");
    ctx.write("orbit.svg", &emit_svg(&[orbit_series(&o, format!("n = {n}"))], &style))?;
    let results = orbit_summary(&o)?;
    finish(ctx, results)
}

fn orbit_exact(ctx: &mut RunContext) -> Result<Value, CliError> {
    let o = exact_orbit_n1()?;
    ctx.write("orbit.csv", &o.to_csv())?;
    let style = PlotStyle::new("Exact periodic orbit, n = 1", "s", "phi");
    ctx.write("orbit.svg", &emit_svg(&[orbit_series(&o, "n = 1".into())], &style))?;
    let theta = theta_n1();
    let mut results = orbit_summary(&o)?;
    results["theta"] = json!(theta);
    results["period_closed_form"] = json!(-2.0 * theta.ln());
    finish(ctx, results)
}

fn bifurcate(ctx: &mut RunContext) -> Result<Value, CliError> {
    let range = ctx.resolver.range("1.6:1.9")?;
    let cap = ctx.resolver.take("period_cap", ctx.resolver.settings.period_cap, 50.0);
    let tr = trace_heteroclinic_bifurcation(range, cap)?;
    ctx.write("trace.csv", &tr.to_csv())?;
    let line = tr.n_values.iter().copied().zip(tr.periods.iter().copied()).collect();
    let style = PlotStyle::new("Period along the branch", "n", "T");
    ctx.write("trace.svg", &emit_svg(&[Series::new("T(n)", line)], &style))?;
    finish(
        ctx,
        json!({
            "n_h_estimate": tr.n_h_estimate,
            "bracket": tr.bracket,
            "threshold": tr.threshold,
            "dwell_threshold": tr.dwell_threshold,
            "points": tr.n_values.len(),
        }),
    )
}

fn write_trace(ctx: &mut RunContext, trace: &SimTrace, title: &str) -> Result<(), CliError> {
    ctx.write("trace.csv", &trace.to_csv())?;
    if let Some(st) = &trace.final_state {
        ctx.write("final.csv", &st.to_csv())?;
    }
    for (i, st) in trace.snapshots.iter().enumerate() {
        ctx.write(&format!("snapshots/{i:02}.csv"), &st.to_csv())?;
    }
    let amp = trace.rows.iter().filter(|r| r.tau > 0.0).map(|r| (r.tau.ln(), r.b_amp.ln())).collect();
    let style = PlotStyle::new(title, "ln tau", "ln b");
    ctx.write("trace.svg", &emit_svg(&[Series::new("amplitude", amp)], &style))
}

fn without_trace<T: serde::Serialize>(report: &T) -> Result<Value, CliError> {
    let mut v = serde_json::to_value(report).map_err(|e| CliError::Numerical(e.to_string()))?;
    if let Some(o) = v.as_object_mut() {
        o.remove("trace");
    }
    Ok(v)
}

fn simulate(ctx: &mut RunContext, supercritical: bool) -> Result<Value, CliError> {
    let s = ctx.resolver.settings.clone();
    let base = RunConfig::default();
    let (_, n) = ctx.resolver.n("1")?;
    let p = if supercritical { Some(ctx.resolver.take("p", s.p, 8.0)) } else { None };
    let cfg = RunConfig {
        n,
        p,
        tau_max: ctx.resolver.take("tau_max", s.tau_max, if supercritical { 40.0 } else { base.tau_max }),
        spacing: ctx.resolver.take("spacing", s.spacing, base.spacing),
        amplitude: ctx.resolver.take("amplitude", s.amplitude, base.amplitude),
        dt_max: ctx.resolver.take("dt_max", s.dt_max, base.dt_max),
        dt_rel: if supercritical { 0.0 } else { base.dt_rel },
        ..base
    };
    let (mut results, trace) = if supercritical {
        let r = run_supercritical_experiment(&cfg)?;
        (without_trace(&r)?, r.trace)
    } else {
        let r = run_critical_experiment(&cfg)?;
        (without_trace(&r)?, r.trace)
    };
    results["max_mass_defect"] = json!(trace.max_mass_defect());
    results["steps"] = json!(trace.rows.len());
    results["enlargements"] = json!(trace.enlargements);
    let title = if supercritical { "Supercritical run" } else { "Critical run" };
    write_trace(ctx, &trace, title)?;
    finish(ctx, results)
}

fn preset(ctx: &mut RunContext) -> Result<Value, CliError> {
    let name = ctx.resolver.take("preset", ctx.resolver.settings.preset.clone(), String::new());
    match name.as_str() {
        "figure-1" => preset_fbp_family(ctx),
        "figure-3" => preset_cp_family(ctx),
        "periodic-basin" => preset_periodic_basin(ctx),
        "heteroclinic" => preset_heteroclinic(ctx),
        "" => Err(CliError::Validation("preset name required (figure-1, figure-3, periodic-basin, heteroclinic)".into())),
        other => Err(CliError::Validation(format!(
            "unknown preset '{other}' (figure-1, figure-3, periodic-basin, heteroclinic)"
        ))),
    }
}

/// Runs `f` on every value concurrently, preserving order.
fn fan_out<T: Sync, R: Send, E: Send>(values: &[T], f: impl Fn(&T) -> Result<R, E> + Sync) -> Result<Vec<R>, E> {
    thread::scope(|s| {
        let handles: Vec<_> = values.iter().map(|v| s.spawn(|| f(v))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn preset_fbp_family(ctx: &mut RunContext) -> Result<Value, CliError> {
    let pts = points(ctx)?;
    let ns = [0.25, 0.5, 0.75, 1.0];
    let profiles = fan_out(&ns, |&n| -> Result<Profile, CliError> {
        let params = ProblemParams::critical(n, 1)?;
        Ok(shoot_fbp_profile_with(&params, &FbpOptions::default())?.profile)
    })?;
    let mut series = Vec::new();
    let mut table = Vec::new();
    for (n, p) in ns.iter().zip(&profiles) {
        ctx.write(&format!("n-{n}/profile.csv"), &p.to_csv(pts))?;
        series.push(Series::new(format!("n = {n}"), profile_points(p, pts)));
        table.push(json!({ "n": n, "mu": p.second_deriv_origin, "interface": p.interface }));
    }
    let style = PlotStyle::new("FBP profiles, N = 1, F(0) = 1", "y", "F");
    ctx.write("profiles.svg", &emit_svg(&series, &style))?;
    finish(ctx, json!({ "profiles": table }))
}

fn preset_cp_family(ctx: &mut RunContext) -> Result<Value, CliError> {
    let pts = points(ctx)?;
    let ns = [0.0, 0.2, 0.5, 1.0, 1.5];
    let sols = fan_out(&ns, |&n| shoot_cp_profile_with(n, &CpOptions::default()))?;
    let mut series = Vec::new();
    let mut table = Vec::new();
    let mut csv = String::from("n,F2_0\n");
    for (n, sol) in ns.iter().zip(&sols) {
        let p = &sol.profile;
        ctx.write(&format!("n-{n}/profile.csv"), &p.to_csv(pts))?;
        series.push(Series::new(format!("n = {n}"), profile_points(p, pts)));
        csv += &format!("{n},{}\n", fmt17(p.second_deriv_origin));
        table.push(json!({ "n": n, "F2_0": p.second_deriv_origin, "phase": sol.phase, "period": sol.period }));
    }
    ctx.write("shooting_table.csv", &csv)?;
    let style = PlotStyle::new("Oscillatory Cauchy-problem profiles", "y", "F");
    ctx.write("profiles.svg", &emit_svg(&series, &style))?;
    finish(ctx, json!({ "profiles": table }))
}

fn preset_periodic_basin(ctx: &mut RunContext) -> Result<Value, CliError> {
    let n = 1.5;
    let s_max = 40.0;
    let sys = OscillatorySystem::new(n)?;
    let k = sys.amplitude_scale();
    let gain = sys.gain();
    let starts: [[f64; 3]; 4] = [[0.05, 0.0, 0.0], [1.0, 0.0, 0.0], [-0.5, 1.0, 0.0], [0.3, -1.0, 2.0]];
    let opts = FlowOptions { dense: true, ..FlowOptions::default() };
    let flows = fan_out(&starts, |x| {
        let x0 = x.map(|c| c / k);
        patched_flow(&sys, &|_| gain, x0, 0.0, s_max, &opts)
    })?;
    let mut series = Vec::new();
    for (i, (x, fl)) in starts.iter().zip(&flows).enumerate() {
        let samples = 2000;
        let mut csv = String::from("s,phi\n");
        let mut line = Vec::new();
        for j in 0..=samples {
            let s = fl.s_end * j as f64 / samples as f64;
            if let Some(st) = fl.state_at(s) {
                let phi = st[0] * k;
                csv += &format!("{},{}\n", fmt17(s), fmt17(phi));
                line.push((s, phi));
            }
        }
        ctx.write(&format!("run-{i}/trajectory.csv"), &csv)?;
        series.push(Series::new(format!("data ({}, {}, {})", x[0], x[1], x[2]), line));
    }
    let orbit = find_periodic_orbit(n, default_initial_state(n)?)?;
    ctx.write("orbit.csv", &orbit.to_csv())?;
    let style = PlotStyle::new("Convergence to the periodic orbit, n = 3/2", "s", "phi");
    ctx.write("trajectories.svg", &emit_svg(&series, &style))?;
    finish(ctx, json!({ "n": n, "period": orbit.period, "floquet_moduli": orbit.floquet_moduli, "runs": starts.len() }))
}

fn preset_heteroclinic(ctx: &mut RunContext) -> Result<Value, CliError> {
    let ns = [1.5, 1.65, 1.72, 1.75];
    let orbits = fan_out(&ns, |&n| -> Result<PeriodicOrbit, CliError> { Ok(find_periodic_orbit(n, default_initial_state(n)?)?) })?;
    let mut series = Vec::new();
    let mut table = Vec::new();
    for (n, o) in ns.iter().zip(&orbits) {
        ctx.write(&format!("n-{n}/orbit.csv"), &o.to_csv())?;
        series.push(Series::new(format!("n = {n}"), o.samples.iter().map(|p| (p.s / o.period, p.phi)).collect()));
        table.push(json!({ "n": n, "period": o.period }));
    }
    let style = PlotStyle::new("Periodic orbits approaching the heteroclinic limit", "s / T", "phi");
    ctx.write("orbits.svg", &emit_svg(&series, &style))?;
    finish(ctx, json!({ "orbits": table }))
}
