//! Property-based tests of the library invariants. Heavy numerical draws go
//! through the crate's seeded samplers (proptest supplies the seed and the
//! dimension), which keeps matrices well-scaled while still exploring a wide
//! input space.

use gaugenet::csvout;
use gaugenet::gauge::{
    apply_gauge_map, intertwining_residual, inverse_gauge, transitive_solution, GaugePair,
};
use gaugenet::linalg::{self, CMatrix, RVector};
use gaugenet::network::{
    emit_netlist, fidelity_frequencies, netlist_fidelity_defect, simulate_network, synthesize,
    ClassicalSystem, SynthesisPolicy,
};
use gaugenet::quantum::{evolve_state, HamiltonianSpec, StateVector};
use gaugenet::realify::{
    build_real_system, decomplexify, evolve_decoupled, initial_conditions_from_quantum,
    recomplexify,
};
use gaugenet::sample;
use gaugenet::TimeGrid;
use proptest::prelude::*;

fn seeded_dim() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 2usize..=5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The induced map obeys the composition, identity and inverse laws for
    /// any well-conditioned frames and any generator sample.
    #[test]
    fn gauge_map_group_laws((seed, n) in seeded_dim()) {
        let mut rng = sample::rng_from_seed(seed);
        let omega = sample::random_well_conditioned(n, &mut rng);
        let omega_dot = sample::random_matrix(n, &mut rng);
        let inner = sample::random_well_conditioned(n, &mut rng);
        let inner_dot = sample::random_matrix(n, &mut rng);
        let h = sample::random_matrix(n, &mut rng);

        let once = apply_gauge_map(&inner, &inner_dot, &h).unwrap();
        let twice = apply_gauge_map(&omega, &omega_dot, &once).unwrap();
        let product = &omega * &inner;
        let product_dot = &omega_dot * &inner + &omega * &inner_dot;
        let direct = apply_gauge_map(&product, &product_dot, &h).unwrap();
        prop_assert!(linalg::max_abs(&(twice - direct)) <= 1e-9);

        let eye = linalg::identity(n);
        let zero = CMatrix::zeros(n, n);
        let fixed = apply_gauge_map(&eye, &zero, &h).unwrap();
        prop_assert!(linalg::max_abs(&(fixed - &h)) == 0.0);

        let omega_inv = linalg::try_inverse(&omega, "prop inverse").unwrap();
        let omega_inv_dot = -(&omega_inv * &omega_dot * &omega_inv);
        let mapped = apply_gauge_map(&omega, &omega_dot, &h).unwrap();
        let back = apply_gauge_map(&omega_inv, &omega_inv_dot, &mapped).unwrap();
        prop_assert!(linalg::max_abs(&(back - &h)) <= 1e-9);
    }

    /// Realification and its inverse are mutually inverse, exactly.
    #[test]
    fn realify_round_trips_exactly((seed, n) in seeded_dim(), t in -10.0f64..10.0) {
        let mut rng = sample::rng_from_seed(seed);
        let psi = StateVector::new(t, sample::random_state(n, &mut rng)).unwrap();
        let back = recomplexify(&decomplexify(&psi));
        prop_assert_eq!(back.time, psi.time);
        prop_assert_eq!(&back.data, &psi.data);
        let real = decomplexify(&psi);
        let again = decomplexify(&recomplexify(&real));
        prop_assert_eq!(again.phi1, real.phi1);
        prop_assert_eq!(again.phi2, real.phi2);
    }

    /// Synthesis followed by reconstruction recovers the classical system,
    /// and a clean netlist reassembles the expected node admittance.
    #[test]
    fn synthesis_reconstruction_and_fidelity((seed, n) in seeded_dim()) {
        let mut rng = sample::rng_from_seed(seed);
        let a = sample::random_passive_damping(n, &mut rng);
        let b = sample::random_passive_stiffness(n, &mut rng);
        let sys = ClassicalSystem::new(a, b).unwrap();
        let c = sample::positive_vector(n, &mut rng);

        for policy in [
            SynthesisPolicy::DefaultFrequencies,
            SynthesisPolicy::ExplicitInductance(sample::positive_vector(n, &mut rng)),
        ] {
            let net = synthesize(&sys, &c, &policy).unwrap();
            let rebuilt = net.reconstruct();
            prop_assert!(linalg::max_abs_real(&(rebuilt.a() - sys.a())) <= 1e-12);
            prop_assert!(linalg::max_abs_real(&(rebuilt.b() - sys.b())) <= 1e-12);

            let list = emit_netlist(&net);
            if !list.has_diagnostics() {
                let defect =
                    netlist_fidelity_defect(&net, &list, &fidelity_frequencies()).unwrap();
                prop_assert!(defect <= 1e-10, "fidelity defect {defect}");
            }
        }
    }

    /// The network simulator and the decoupled realified evolution share one
    /// integrator: identical inputs give bit-identical trajectories.
    #[test]
    fn network_and_decoupled_paths_are_bitwise_equal((seed, n) in seeded_dim()) {
        let mut rng = sample::rng_from_seed(seed);
        let h = sample::random_hermitian_nonsingular_real_part(n, &mut rng);
        let spec = HamiltonianSpec::constant(h, true).unwrap();
        let grid = TimeGrid::new(0.0, 1.0, 50).unwrap();
        let real = build_real_system(&spec, 0.0, true).unwrap();
        prop_assume!(real.decoupled_valid());
        let sys = ClassicalSystem::from_real_system(&real).unwrap();
        let psi0 = StateVector::new(0.0, sample::random_state(n, &mut rng)).unwrap();
        let (phi1, phidot1, _, _) = initial_conditions_from_quantum(&real, &psi0).unwrap();
        let via_network = simulate_network(&sys, &phi1, &phidot1, &grid).unwrap();
        let via_realify = evolve_decoupled(&real, &phi1, &phidot1, &grid).unwrap();
        for (x, y) in via_network.iter().zip(&via_realify) {
            prop_assert_eq!(&x.0, &y.0);
            prop_assert_eq!(&x.1, &y.1);
        }
    }

    /// 17-significant-digit rendering round-trips arbitrary finite doubles.
    #[test]
    fn csv_floats_round_trip(x in any::<f64>()) {
        prop_assume!(x.is_finite());
        let rendered = csvout::fmt_f64(x);
        let parsed: f64 = rendered.parse().unwrap();
        prop_assert!(parsed == x || (parsed.is_nan() && x.is_nan()), "{rendered}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The transitive connector intertwines any seeded Hermitian pair, and
    /// its inverse connects the swapped pair.
    #[test]
    fn transitive_connector_intertwines((seed, n) in seeded_dim()) {
        let mut rng = sample::rng_from_seed(seed);
        let source = HamiltonianSpec::constant(sample::random_hermitian(n, &mut rng), true).unwrap();
        let target = HamiltonianSpec::constant(sample::random_hermitian(n, &mut rng), true).unwrap();
        let pair = GaugePair::new(source, target).unwrap();
        let grid = TimeGrid::new(0.0, 1.0, 200).unwrap();
        let sol = transitive_solution(&pair, &grid, None).unwrap();
        prop_assert!(intertwining_residual(&sol, &pair).unwrap() <= 1e-6);
        let inv = inverse_gauge(&sol).unwrap();
        prop_assert!(intertwining_residual(&inv, &pair.swapped()).unwrap() <= 1e-6);
    }

    /// Unitary evolution preserves the norm of any seeded initial state for
    /// Hermitian generators (fourth-order accuracy on desk grids).
    #[test]
    fn hermitian_evolution_preserves_norm((seed, n) in seeded_dim()) {
        let mut rng = sample::rng_from_seed(seed);
        let spec = HamiltonianSpec::constant(sample::random_hermitian(n, &mut rng), true).unwrap();
        let psi0 = StateVector::new(0.0, sample::random_state(n, &mut rng)).unwrap();
        let grid = TimeGrid::new(0.0, 2.0, 400).unwrap();
        let path = evolve_state(&spec, &psi0, &grid).unwrap();
        prop_assert!(gaugenet::quantum::norm_drift(&path) <= 1e-7);
    }

    /// Voltage trajectories are capacitance-independent: the network's C
    /// rescales currents, not the second-order voltage dynamics.
    #[test]
    fn voltage_paths_do_not_depend_on_capacitance((seed, n) in seeded_dim()) {
        let mut rng = sample::rng_from_seed(seed);
        let a = sample::random_passive_damping(n, &mut rng);
        let b = sample::random_passive_stiffness(n, &mut rng);
        let sys = ClassicalSystem::new(a, b).unwrap();
        let c1 = sample::positive_vector(n, &mut rng);
        let c2 = sample::positive_vector(n, &mut rng);
        let v0 = RVector::from_fn(n, |k, _| 0.3 * (k as f64 + 1.0));
        let vdot0 = RVector::zeros(n);
        let grid = TimeGrid::new(0.0, 1.0, 40).unwrap();
        for policy in [SynthesisPolicy::DefaultFrequencies] {
            let net1 = synthesize(&sys, &c1, &policy).unwrap();
            let net2 = synthesize(&sys, &c2, &policy).unwrap();
            let p1 = simulate_network(&net1.reconstruct(), &v0, &vdot0, &grid).unwrap();
            let p2 = simulate_network(&net2.reconstruct(), &v0, &vdot0, &grid).unwrap();
            for (x, y) in p1.iter().zip(&p2) {
                prop_assert!(linalg::max_abs_rvec(&(&x.0 - &y.0)) <= 1e-12);
            }
        }
    }
}
