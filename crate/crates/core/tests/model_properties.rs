use cavityfit::lindblad::{
    evolve_master_equation, Basis, BasisState, DissipatorSpec, StepSize, TimeGrid, TruncatedState,
};
use cavityfit::qed::{
    branching_fraction, cooperativity_from_rates, effective_decay_rate, lifetime_ratio, purcell_enhancement_from_factor,
};
use cavityfit::CoupledSystem;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn rate(sys: &CoupledSystem) -> f64 {
    effective_decay_rate(sys).unwrap().rate
}

proptest! {
    #[test]
    fn effective_rate_is_even_and_peaked(
        gamma in 0.1f64..10.0,
        kappa in 1.0f64..1e3,
        g in 0.0f64..10.0,
        delta in 0.0f64..1e4,
    ) {
        let sys = CoupledSystem::from_rates(gamma, 0.0, kappa, g, delta).unwrap();
        let plus = rate(&sys);
        let minus = rate(&sys.with_delta(-delta));
        prop_assert_eq!(plus, minus);
        prop_assert!(plus <= rate(&sys.with_delta(0.0)));
    }

    #[test]
    fn cavity_term_halves_at_half_kappa(gamma in 0.1f64..10.0, kappa in 1.0f64..1e3, g in 0.1f64..10.0) {
        let sys = CoupledSystem::from_rates(gamma, 0.0, kappa, g, 0.0).unwrap();
        let peak = rate(&sys);
        let half = rate(&sys.with_delta(0.5 * kappa));
        prop_assert!(rel(half, gamma + 0.5 * (peak - gamma)) < 1e-12);
    }

    #[test]
    fn lifetime_ratio_identities(gamma in 0.1f64..10.0, kappa in 1.0f64..1e3, g in 0.0f64..10.0) {
        let sys = CoupledSystem::from_rates(gamma, 0.0, kappa, g, 0.0).unwrap();
        let r = lifetime_ratio(&sys).unwrap();
        prop_assert!(rel(r * gamma, rate(&sys)) < 1e-12);
        let c = cooperativity_from_rates(&sys).unwrap();
        prop_assert!((c - (r - 1.0)).abs() <= 1e-12 * r);
    }

    #[test]
    fn purcell_enhancement_on_resonance(fp in 0.0f64..100.0, kappa in 1e9f64..1e12) {
        let f = purcell_enhancement_from_factor(fp, 1.0, kappa, 0.0, 1.0).unwrap();
        prop_assert!((f - (1.0 + fp)).abs() <= 1e-12 * (1.0 + fp));
    }

    #[test]
    fn branching_fraction_is_monotone(
        eta in 0.0f64..1.0, dw in 0.0f64..1.0, xi in 0.0f64..1.0, bump in 0.0f64..1.0,
    ) {
        let base = branching_fraction(eta, dw, xi).unwrap().value();
        let up = |x: f64| x + bump * (1.0 - x);
        prop_assert!(branching_fraction(up(eta), dw, xi).unwrap().value() >= base);
        prop_assert!(branching_fraction(eta, up(dw), xi).unwrap().value() >= base);
        prop_assert!(branching_fraction(eta, dw, up(xi)).unwrap().value() >= base);
    }

    #[test]
    fn formulas_are_pure(gamma in 0.1f64..10.0, kappa in 1.0f64..1e3, g in 0.0f64..10.0, delta in -1e3f64..1e3) {
        let sys = CoupledSystem::from_rates(gamma, 0.0, kappa, g, delta).unwrap();
        prop_assert_eq!(rate(&sys).to_bits(), rate(&sys.clone()).to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn master_equation_invariants_and_parity(
        gamma in 0.2f64..2.0,
        gamma_d in 0.0f64..2.0,
        kappa in 5.0f64..200.0,
        g in 0.0f64..5.0,
        delta in 0.0f64..200.0,
    ) {
        let sys = CoupledSystem::from_rates(gamma, gamma_d, kappa, g, delta).unwrap();
        let diss = DissipatorSpec::from_system(&sys);
        let grid = TimeGrid::new(2.0 / gamma, 101).unwrap();
        let rho0 = TruncatedState::pure(Basis::single_excitation(), BasisState::E0).unwrap();
        let plus = evolve_master_equation(&sys, &diss, &rho0, &grid, StepSize::Auto).unwrap();
        prop_assert!(plus.diagnostics.max_trace_drift <= 1e-9);
        prop_assert!(plus.diagnostics.max_hermiticity_error <= 1e-12);
        prop_assert!(plus.diagnostics.min_population >= -1e-12);
        for (row, tr) in plus.populations.iter().zip(plus.traces()) {
            prop_assert!((row.iter().sum::<f64>() - tr).abs() < 1e-12);
        }

        let minus_sys = sys.with_delta(-delta);
        let minus = evolve_master_equation(&minus_sys, &DissipatorSpec::from_system(&minus_sys), &rho0, &grid, StepSize::Auto).unwrap();
        for (a, b) in plus.excited_population().iter().zip(minus.excited_population()) {
            prop_assert!((a - b).abs() < 1e-10);
        }

        let wide = TruncatedState::pure(Basis::extended(), BasisState::E0).unwrap();
        let ext = evolve_master_equation(&sys, &diss, &wide, &grid, StepSize::Auto).unwrap();
        for state in [BasisState::E0, BasisState::G1, BasisState::G0] {
            let a = plus.population(state).unwrap();
            let b = ext.population(state).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }
}
