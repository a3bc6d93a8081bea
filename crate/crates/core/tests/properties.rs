//! Property-based checks of the library invariants.

use std::f64::consts::PI;

use fluctlab::audit::{classify, entropy_surrogate, time_energy, Verdict, DEFAULT_EPSILON};
use fluctlab::density::{
    density_eval, extremal_variances, peak_value, reduced_density, verify_extremum,
    FluctuationParams, PhasePoint, DEFAULT_FD_STEP,
};
use fluctlab::quantum::{
    build_state, ensemble_moments, phase_space_moments, MixedEnsemble, MomentReport, PureState,
    StateRecipe,
};
use fluctlab::scenarios::relaxation_walk;
use fluctlab::{GridSpec, UnitSystem};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid() -> GridSpec {
    GridSpec::new(-20.0, 20.0, 2048).unwrap()
}

fn packet(center: f64, momentum: f64, width: f64) -> StateRecipe {
    StateRecipe::GaussianPacket {
        center,
        momentum,
        width,
    }
}

fn recipe() -> impl Strategy<Value = StateRecipe> {
    prop_oneof![
        (-3.0..3.0f64, -3.0..3.0f64, 0.5..1.5f64).prop_map(|(c, k, s)| packet(c, k, s)),
        (0usize..=8, 0.5..2.0f64, 0.5..2.0f64)
            .prop_map(|(n, mass, omega)| StateRecipe::OscillatorEigenstate { n, mass, omega }),
        (0.0..2.5f64, 0.0..(2.0 * PI)).prop_map(|(r, phi)| StateRecipe::CoherentState {
            alpha: Complex64::from_polar(r, phi),
            mass: 1.0,
            omega: 1.0,
        }),
    ]
}

fn sign() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(-1.0)]
}

/// Nonzero separation with magnitude log-uniform in [1e-3, 1e3].
fn separation() -> impl Strategy<Value = f64> {
    (-3.0..3.0f64, sign()).prop_map(|(e, s)| s * 10f64.powf(e))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn built_states_are_normalized_and_respect_the_bound(r in recipe()) {
        let u = UnitSystem::default();
        let s = build_state(&r, &grid(), &u).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-10);
        let m = phase_space_moments(&s, &u).unwrap();
        prop_assert!(m.var_x * m.var_p >= u.bound().powi(2) - 1e-8);
        prop_assert_ne!(classify(&m, &u, DEFAULT_EPSILON).verdict, Verdict::BelowBound);
    }

    #[test]
    fn translation_shifts_mean_only(c in -2.0..2.0f64, a in -3.0..3.0f64, k in -2.0..2.0f64, w in 0.5..1.5f64) {
        let u = UnitSystem::default();
        let m0 = phase_space_moments(&build_state(&packet(c, k, w), &grid(), &u).unwrap(), &u).unwrap();
        let m1 = phase_space_moments(&build_state(&packet(c + a, k, w), &grid(), &u).unwrap(), &u).unwrap();
        prop_assert!((m1.mean_x - m0.mean_x - a).abs() <= 1e-8);
        prop_assert!((m1.var_x - m0.var_x).abs() <= 1e-8);
        prop_assert!((m1.var_p - m0.var_p).abs() <= 1e-8);
    }

    #[test]
    fn boost_shifts_momentum_mean_only(r in recipe(), k in -3.0..3.0f64, h in 1.0..10.0f64) {
        let u = UnitSystem::new(h).unwrap();
        let s = build_state(&r, &grid(), &u).unwrap();
        let m0 = phase_space_moments(&s, &u).unwrap();
        let m1 = phase_space_moments(&s.boosted(k), &u).unwrap();
        prop_assert!((m1.mean_p - m0.mean_p - u.hbar() * k).abs() <= 1e-6);
        prop_assert!((m1.var_p - m0.var_p).abs() <= 1e-6);
        prop_assert!((m1.var_x - m0.var_x).abs() <= 1e-12);
    }

    #[test]
    fn ensemble_variance_is_law_of_total_variance(
        members in prop::collection::vec(recipe(), 1..5),
        raw in prop::collection::vec(0.05..1.0f64, 5),
    ) {
        let u = UnitSystem::default();
        let states: Vec<PureState> = members.iter().map(|r| build_state(r, &grid(), &u).unwrap()).collect();
        let total: f64 = raw[..states.len()].iter().sum();
        let weights: Vec<f64> = raw[..states.len()].iter().map(|w| w / total).collect();
        let e = MixedEnsemble::new(weights.clone(), states.clone()).unwrap();
        let m = ensemble_moments(&e, &u).unwrap();
        let parts: Vec<MomentReport> = states.iter().map(|s| phase_space_moments(s, &u).unwrap()).collect();
        let mean_x: f64 = weights.iter().zip(&parts).map(|(w, p)| w * p.mean_x).sum();
        let mean_p: f64 = weights.iter().zip(&parts).map(|(w, p)| w * p.mean_p).sum();
        let var_x: f64 = weights.iter().zip(&parts).map(|(w, p)| w * (p.var_x + (p.mean_x - mean_x).powi(2))).sum();
        let var_p: f64 = weights.iter().zip(&parts).map(|(w, p)| w * (p.var_p + (p.mean_p - mean_p).powi(2))).sum();
        prop_assert!((m.var_x - var_x).abs() <= 1e-10 * var_x.max(1.0));
        prop_assert!((m.var_p - var_p).abs() <= 1e-10 * var_p.max(1.0));
        let s = entropy_surrogate(&e).value;
        prop_assert!(s >= -1e-15 && s <= (states.len() as f64).ln() + 1e-12);
    }

    #[test]
    fn gaussian_moments_converge_under_grid_doubling(c in -1.0..1.0f64, k in -2.0..2.0f64, w in 0.7..1.2f64) {
        let u = UnitSystem::default();
        let coarse = GridSpec::new(-12.0, 12.0, 1024).unwrap();
        let fine = GridSpec::new(-12.0, 12.0, 2048).unwrap();
        let a = phase_space_moments(&build_state(&packet(c, k, w), &coarse, &u).unwrap(), &u).unwrap();
        let b = phase_space_moments(&build_state(&packet(c, k, w), &fine, &u).unwrap(), &u).unwrap();
        for (x, y) in [(a.mean_x, b.mean_x), (a.mean_p, b.mean_p), (a.var_x, b.var_x), (a.var_p, b.var_p)] {
            prop_assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn classify_is_scale_consistent(vx in 0.01..100.0f64, vp in 0.01..100.0f64, c in 0.01..100.0f64) {
        let u = UnitSystem::default();
        let a = classify(&MomentReport::new(0.0, 0.0, vx, vp).unwrap(), &u, DEFAULT_EPSILON);
        let b = classify(&MomentReport::new(0.0, 0.0, vx * c, vp / c).unwrap(), &u, DEFAULT_EPSILON);
        prop_assert!(rel(a.product, b.product) <= 1e-12);
        prop_assert_eq!(a.bound, b.bound);
        // Skip draws that sit on a verdict boundary to within rounding.
        if (a.relative_excess - DEFAULT_EPSILON).abs() > 1e-12 && a.relative_excess.abs() > 1e-12 {
            prop_assert_eq!(a.verdict, b.verdict);
        }
    }

    #[test]
    fn classify_boundary_sits_at_epsilon(eps_exp in -8.0..-1.5f64, h in 0.5..20.0f64) {
        let u = UnitSystem::new(h).unwrap();
        let eps = 10f64.powf(eps_exp);
        let at = |factor: f64| {
            let product = u.bound() * (1.0 + eps * factor);
            classify(&MomentReport::new(0.0, 0.0, product, product).unwrap(), &u, eps).verdict
        };
        prop_assert_eq!(at(1.0 - 1e-3), Verdict::Minimal);
        prop_assert_eq!(at(1.0 + 1e-3), Verdict::Strict);
    }

    #[test]
    fn time_energy_is_reciprocal(e in -6.0..6.0f64, h in 0.1..100.0f64) {
        let u = UnitSystem::new(h).unwrap();
        let de = 10f64.powf(e);
        let dt = time_energy(de, &u).unwrap();
        prop_assert!(rel(de * dt, u.bound()) <= 1e-12);
        prop_assert!(time_energy(de * 1.5, &u).unwrap() < dt);
    }

    #[test]
    fn extremal_variances_saturate_the_bound(
        mx in -10.0..10.0f64, mp in -10.0..10.0f64, dx in separation(), dp in separation(), h in 0.1..100.0f64,
    ) {
        let u = UnitSystem::new(h).unwrap();
        let (vx, vp) = extremal_variances(mx, mp, PhasePoint::new(mx + dx, mp + dp), &u).unwrap();
        prop_assert!(rel(vx * vp, u.bound().powi(2)) <= 1e-12);
    }

    #[test]
    fn extremal_variances_maximize_the_constrained_density(
        mx in -10.0..10.0f64, mp in -10.0..10.0f64, dx in separation(), dp in separation(),
    ) {
        let u = UnitSystem::default();
        let c = verify_extremum(mx, mp, PhasePoint::new(mx + dx, mp + dp), &u, DEFAULT_FD_STEP).unwrap();
        prop_assert!(c.is_max, "{c:?}");
    }

    #[test]
    fn substitution_matches_reduced_density(
        mx in -10.0..10.0f64, mp in -10.0..10.0f64, dx in separation(), dp in separation(),
    ) {
        let u = UnitSystem::default();
        let pt = PhasePoint::new(mx + dx, mp + dp);
        let (vx, vp) = extremal_variances(mx, mp, pt, &u).unwrap();
        let a = density_eval(&FluctuationParams::new(mx, mp, vx, vp, u).unwrap(), pt);
        let b = reduced_density(mx, mp, pt, &u);
        prop_assert!((a - b).abs() <= 1e-12 * b.max(f64::MIN_POSITIVE), "{a:e} vs {b:e}");
    }

    #[test]
    fn densities_are_reflection_symmetric(
        mx in -5.0..5.0f64, mp in -5.0..5.0f64, dx in -4.0..4.0f64, dp in -4.0..4.0f64,
        vx in 0.1..5.0f64, excess in 0.0..3.0f64,
    ) {
        let u = UnitSystem::default();
        let vp = u.bound().powi(2) / vx * (1.0 + excess);
        let params = FluctuationParams::new(mx, mp, vx, vp, u).unwrap();
        let base = PhasePoint::new(mx + dx, mp + dp);
        for (sx, sp) in [(-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
            let pt = PhasePoint::new(mx + sx * dx, mp + sp * dp);
            // mx ± dx is rounded, so the reflected separation can differ in the last ulp
            prop_assert!(rel(density_eval(&params, pt), density_eval(&params, base)) <= 1e-12);
            prop_assert!(rel(reduced_density(mx, mp, pt, &u), reduced_density(mx, mp, base, &u)) <= 1e-12);
        }
    }

    #[test]
    fn reduced_density_scales_with_h(dx in -3.0..3.0f64, dp in -3.0..3.0f64, h in 0.5..20.0f64, c in 0.1..10.0f64) {
        let u = UnitSystem::new(h).unwrap();
        let scaled = UnitSystem::new(h * c).unwrap();
        let s = c.sqrt();
        let a = reduced_density(0.0, 0.0, PhasePoint::new(dx, dp), &u);
        let b = reduced_density(0.0, 0.0, PhasePoint::new(s * dx, s * dp), &scaled);
        prop_assert!(rel(b * c, a) <= 1e-12);
    }

    #[test]
    fn peak_decreases_with_product(vx in 0.1..10.0f64, e1 in 0.0..5.0f64, e2 in 0.0..5.0f64) {
        prop_assume!((e1 - e2).abs() > 1e-6);
        let u = UnitSystem::default();
        let make = |e: f64| FluctuationParams::new(0.0, 0.0, vx, u.bound().powi(2) / vx * (1.0 + e), u).unwrap();
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(peak_value(&make(lo)) > peak_value(&make(hi)));
    }

    #[test]
    fn relaxation_walk_descends_toward_the_bound(
        excess in 0.0..5.0f64, steps in 0usize..200, step in 0.001..0.49f64, seed in any::<u64>(),
    ) {
        let u = UnitSystem::default();
        let vx = 1.0;
        let vp = (u.bound() * (1.0 + excess)).powi(2) / vx;
        let start = FluctuationParams::new(0.0, 0.0, vx, vp, u).unwrap();
        let trace = relaxation_walk(&start, steps, step, seed).unwrap();
        prop_assert_eq!(trace.len(), steps + 1);
        for pair in trace.windows(2) {
            prop_assert!(pair[1].product <= pair[0].product);
        }
        for t in &trace {
            prop_assert!(t.distance_to_bound >= -1e-9);
        }
    }
}
