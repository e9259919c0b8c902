use num_rational::BigRational;
use proptest::prelude::*;
use tfe_core::cli::svg::{emit_svg, PlotStyle, Series};
use tfe_core::numerics::BandedMatrix;
use tfe_core::output::fmt17;
use tfe_core::pdesim::{Scheme, SimState};
use tfe_core::profiles::ProblemParams;
use tfe_core::spectral::certificate::rat_string;
use tfe_core::spectral::{parse_rational, polynomial_eigenfunctions, symmetry_certificate, Verdict};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fmt17_round_trips(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL) {
        prop_assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn rationals_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let r = BigRational::new(p.into(), q.into());
        prop_assert_eq!(parse_rational(&rat_string(&r)).unwrap(), r.clone());
        prop_assert_eq!(parse_rational(&format!("{p}/{q}")).unwrap(), r);
    }

    #[test]
    fn critical_exponent_matches_similarity_rate(n in 0.0f64..3.0, dim in 1usize..6, m in 2usize..5) {
        let p = ProblemParams::new(n, dim, m, 2.0).unwrap();
        let lhs = 1.0 / (p.p0() - 1.0);
        prop_assert!((lhs - p.beta() * dim as f64).abs() < 1e-14);
    }

    #[test]
    fn banded_solve_has_small_residual(
        n in 3usize..40,
        kl in 0usize..3,
        ku in 0usize..3,
        seed in prop::collection::vec(-1.0f64..1.0, 400),
    ) {
        let mut a = BandedMatrix::zeros(n, kl, ku);
        let mut s = seed.iter().cycle();
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                a.set(i, j, *s.next().unwrap());
            }
            // diagonal dominance keeps the system well conditioned
            a.add(i, i, (kl + ku + 2) as f64);
        }
        let b: Vec<f64> = (0..n).map(|_| *s.next().unwrap()).collect();
        let x = a.solve(&b).unwrap();
        let r = a.mul_vec(&x);
        let worst = r.iter().zip(&b).fold(0.0_f64, |m, (u, v)| m.max((u - v).abs()));
        prop_assert!(worst < 1e-12, "residual {worst:e}");
    }

    #[test]
    fn svg_output_is_deterministic(ys in prop::collection::vec(-5.0f64..5.0, 2..50)) {
        let pts: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, y)| (i as f64, *y)).collect();
        let series = [Series::new("s", pts)];
        let style = PlotStyle::default();
        let a = emit_svg(&series, &style);
        prop_assert_eq!(&a, &emit_svg(&series, &style));
        prop_assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn certificate_verdict_is_consistent(p in 1i64..60, q in 1i64..30) {
        let n = BigRational::new(p.into(), q.into());
        let v = symmetry_certificate(&n).unwrap();
        let zero = BigRational::from_integer(0.into());
        let shared: Vec<_> = v.b_candidates_y4.iter().filter(|b| v.b_candidates_y6.contains(b)).collect();
        match v.verdict {
            Verdict::Symmetric => prop_assert!(shared.iter().any(|b| **b != zero)),
            Verdict::NotSymmetric => prop_assert!(shared.is_empty()),
            Verdict::Degenerate => prop_assert!(shared.iter().all(|b| **b == zero) && !shared.is_empty()),
        }
    }

    #[test]
    fn gram_matrix_is_identity(dim in 1usize..5, half in 0usize..5) {
        let s = polynomial_eigenfunctions(dim, 2 * half).unwrap();
        let g = s.gram();
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                prop_assert!((v - target).abs() < 1e-8, "N = {}: G[{}][{}] = {}", dim, i, j, v);
            }
        }
    }

    #[test]
    fn projection_remainder_is_monotone(dim in 1usize..4, c in prop::collection::vec(-1.0f64..1.0, 4)) {
        let s = polynomial_eigenfunctions(dim, 8).unwrap();
        let g = |r: f64| c[0] + c[1] * r * r + c[2] * r.powi(4) + c[3] * (3.0 * r).sin();
        let rem: Vec<f64> = (0..=5).map(|k| s.projection_remainder(&g, k)).collect();
        prop_assert!(rem.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{:?}", rem);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn implicit_step_satisfies_mass_identity(amp in 0.2f64..2.0, width in 1.5f64..3.0, dt in 1e-3f64..5e-2) {
        let params = ProblemParams::critical(1.0, 1).unwrap();
        let mut st = SimState::new(params, 6.0, 240, |y| amp * (1.0 - (y / width).powi(2)).max(0.0).powi(2));
        let scheme = Scheme::new(params, true);
        let m0 = st.mass();
        let taken = scheme.step(&mut st, dt).unwrap();
        let defect = (st.mass() - m0) / taken + scheme.absorption_integral(&st);
        prop_assert!(defect.abs() < 1e-9 * m0.max(1.0), "defect {defect:e}");
    }
}
