//! Property tests for the automaton invariants: rule unitarity, norm
//! preservation, locality of the stencil, translation covariance, gauge
//! behavior of constant potentials, dispersion symmetries, plane-wave
//! completeness, and the packet momentum closed form.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use qlga::{
    dispersion_omega, evolve, fourier_amplitudes, group_velocity, homogeneous_spectrum,
    packet_momentum_amplitudes, plane_wave, step, transfer_matrix, wave_packet, Branch,
    LatticeSpec, LocalRule, PlaneWaveIndex, PotentialProfile, RuleParams, Spinor, StateVector,
    WavePacketSpec,
};

fn angle() -> impl Strategy<Value = f64> {
    -PI..PI
}

fn spinor_raw() -> impl Strategy<Value = Spinor> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_map(|(a, b, c, d)| Spinor::new(C64::new(a, b), C64::new(c, d)))
}

fn state(sites: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec(spinor_raw(), sites).prop_filter_map("state must be nonzero", move |amps| {
        let lattice = LatticeSpec::new(sites).unwrap();
        StateVector::normalized(lattice, amps).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn built_rules_are_unitary(theta in angle(), rho in angle()) {
        let rule = LocalRule::new(&RuleParams::new(theta, rho));
        prop_assert!(rule.unitarity_residual() <= 1e-14);
    }

    #[test]
    fn transfer_matrix_is_unitary(theta in angle(), rho in angle(), k in -PI..PI) {
        let rule = LocalRule::new(&RuleParams::new(theta, rho));
        let d = transfer_matrix(k, &rule);
        let gram = d.mul(&d.adjoint()) - qlga::Mat2::identity();
        prop_assert!(gram.max_abs() <= 1e-13);
    }

    #[test]
    fn dispersion_symmetries(theta in angle(), rho in angle(), k in -PI..PI) {
        let p = RuleParams::new(theta, rho);
        let swapped = RuleParams::new(rho, theta);
        prop_assert!((dispersion_omega(k, &p) - dispersion_omega(-k, &p)).abs() <= 1e-12);
        prop_assert!((dispersion_omega(k, &p) - dispersion_omega(k, &swapped)).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn group_velocity_matches_finite_differences(
        theta in angle(),
        rho in angle(),
        k in -3.0f64..3.0,
    ) {
        let p = RuleParams::new(theta, rho);
        // Stay away from band edges where the derivative is singular.
        prop_assume!(dispersion_omega(k, &p).sin() > 1e-3);
        let h = 1e-6;
        let numeric = (dispersion_omega(k + h, &p) - dispersion_omega(k - h, &p)) / (2.0 * h);
        let analytic = group_velocity(k, &p).unwrap();
        prop_assert!((numeric - analytic).abs() <= 1e-6, "num {numeric} vs {analytic}");
    }

    #[test]
    fn step_preserves_norm(s in state(24), theta in angle(), rho in angle(), depth in angle()) {
        let rule = LocalRule::new(&RuleParams::new(theta, rho));
        let well = PotentialProfile::square_well(s.lattice(), depth);
        let next = step(&s, &rule, &well).unwrap();
        prop_assert!((next.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn step_is_local(s in state(16), site in 0usize..16, theta in angle(), rho in angle()) {
        // Two unit-norm states differing at exactly one site: swapping the
        // spinor components there changes the state but not its norm.
        let lattice = s.lattice();
        let mut amps = s.amps().to_vec();
        let old = amps[site];
        amps[site] = Spinor::new(old.plus * C64::new(0.0, 1.0), old.minus);
        prop_assume!(old.norm_sqr() > 1e-12);
        let altered = StateVector::normalized(lattice, amps).ok();
        prop_assume!(altered.is_some());
        let altered = altered.unwrap();

        let rule = LocalRule::new(&RuleParams::new(theta, rho));
        let flat = PotentialProfile::flat(lattice);
        let a = step(&s, &rule, &flat).unwrap();
        let b = step(&altered, &rule, &flat).unwrap();
        for x in 0..16 {
            let diff = (a.amp(x).minus - b.amp(x).minus).norm()
                + (a.amp(x).plus - b.amp(x).plus).norm();
            let neighborhood = [
                lattice.wrap(site as i64 - 1),
                site,
                lattice.wrap(site as i64 + 1),
            ];
            if !neighborhood.contains(&x) {
                prop_assert!(diff <= 1e-13, "leak at x={x}, site={site}, diff={diff}");
            }
        }
    }

    #[test]
    fn homogeneous_step_commutes_with_translation(
        s in state(20),
        theta in angle(),
        rho in angle(),
        delta in -19i64..19,
    ) {
        let rule = LocalRule::new(&RuleParams::new(theta, rho));
        let flat = PotentialProfile::flat(s.lattice());
        let a = step(&s.translated(delta), &rule, &flat).unwrap();
        let b = step(&s, &rule, &flat).unwrap().translated(delta);
        prop_assert!(a.distance(&b) <= 1e-13);
    }

    #[test]
    fn constant_potential_leaves_density_invariant(
        s in state(12),
        theta in angle(),
        rho in angle(),
        shift in angle(),
    ) {
        let rule = LocalRule::new(&RuleParams::new(theta, rho));
        let flat = PotentialProfile::flat(s.lattice());
        let constant = PotentialProfile::new(s.lattice(), vec![shift; 12]).unwrap();
        let a = evolve(&s, &rule, &flat, 5).unwrap();
        let b = evolve(&s, &rule, &constant, 5).unwrap();
        let pa = a[5].probability_density();
        let pb = b[5].probability_density();
        for (x, y) in pa.iter().zip(pb.iter()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn fourier_round_trip_and_parseval(s in state(18), theta in angle(), rho in angle()) {
        let p = RuleParams::new(theta, rho);
        let spectrum = fourier_amplitudes(&s, &p);
        prop_assert!((spectrum.total_probability() - 1.0).abs() <= 1e-10);
        let back = spectrum.reconstruct(&p, s.lattice()).unwrap();
        prop_assert!(s.distance(&back) <= 1e-10);
    }

    #[test]
    fn packet_momentum_closed_form_matches_transform(
        n0 in 0usize..48,
        x0 in 0usize..48,
        s_half in 0usize..23,
    ) {
        let lattice = LatticeSpec::new(48).unwrap();
        let p = RuleParams::new(PI / 3.0, PI / 4.0);
        let spec = WavePacketSpec::new(2.0 * PI * n0 as f64 / 48.0, x0, 2 * s_half);
        let (closed, route) = packet_momentum_amplitudes(&spec, &p, lattice).unwrap();
        prop_assert_eq!(route, qlga::MomentumRoute::ClosedForm);
        let packet = wave_packet(&spec, &p, lattice).unwrap();
        prop_assert!((packet.norm() - 1.0).abs() <= 1e-12);
        let numeric = fourier_amplitudes(&packet, &p);
        for n in 0..48 {
            for branch in Branch::ALL {
                let diff = (closed.amp(n, branch) - numeric.amp(n, branch)).norm();
                prop_assert!(diff <= 1e-10, "n={n} {branch:?} diff={diff}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn assembled_operators_stay_unitary(
        sites in 2usize..24,
        theta in angle(),
        rho in angle(),
        depth in angle(),
    ) {
        let lattice = LatticeSpec::new(sites).unwrap();
        let rule = LocalRule::new(&RuleParams::new(theta, rho));
        let well = PotentialProfile::square_well(lattice, depth);
        let u = qlga::assemble_global_u(&rule, &well, lattice).unwrap();
        prop_assert!(u.unitarity_residual() <= 1e-12);
    }
}

/// Plane waves are eigenstates of the homogeneous step for every index,
/// including odd lattices and the degenerate massless origin.
#[test]
fn plane_waves_are_eigenstates_everywhere() {
    for sites in [2usize, 3, 5, 16, 64] {
        let lattice = LatticeSpec::new(sites).unwrap();
        for params in [
            RuleParams::new(PI / 3.0, PI / 4.0),
            RuleParams::new(PI / 6.0, PI / 6.0),
        ] {
            let rule = LocalRule::new(&params);
            let flat = PotentialProfile::flat(lattice);
            for n in 0..sites {
                for branch in Branch::ALL {
                    let index = PlaneWaveIndex::new(n, branch);
                    let wave = plane_wave(index, &params, lattice).unwrap();
                    let omega = dispersion_omega(index.wave_number(lattice), &params);
                    let phase = C64::from_polar(1.0, -branch.sign() * omega);
                    let expected = StateVector::normalized(
                        lattice,
                        wave.amps().iter().map(|&a| a * phase).collect(),
                    )
                    .unwrap();
                    let stepped = step(&wave, &rule, &flat).unwrap();
                    assert!(
                        stepped.distance(&expected) <= 1e-12,
                        "sites={sites} n={n} {branch:?}"
                    );
                }
            }
        }
    }
}

/// The closed-form frequency multiset is symmetric under negation up to the
/// branch-cut fold at +pi.
#[test]
fn homogeneous_spectrum_branch_pairing() {
    let lattice = LatticeSpec::new(24).unwrap();
    for params in [
        RuleParams::new(PI / 3.0, PI / 4.0),
        RuleParams::new(0.9, -0.3),
    ] {
        let omegas = homogeneous_spectrum(&params, lattice);
        for &w in &omegas {
            if w.abs() < PI {
                assert!(
                    omegas.iter().any(|&v| (v + w).abs() <= 1e-12),
                    "missing mirror of {w}"
                );
            }
        }
    }
}

/// Long-horizon drift: a thousand steps of a generic rule on a well keeps
/// the norm to 1e-9 and the packet construction stays unit-norm.
#[test]
fn packet_norm_drift_over_long_runs() {
    let lattice = LatticeSpec::new(64).unwrap();
    let params = RuleParams::new(PI / 3.0, PI / 4.0);
    let spec = WavePacketSpec::new(PI / 4.0, 31, 32);
    let packet = wave_packet(&spec, &params, lattice).unwrap();
    assert!((packet.norm() - 1.0).abs() <= 1e-12);
    let rule = LocalRule::new(&params);
    let well = PotentialProfile::square_well(lattice, PI / 6.0);
    let mut state = packet;
    for _ in 0..1000 {
        state = step(&state, &rule, &well).unwrap();
    }
    assert!((state.norm() - 1.0).abs() <= 1e-9);
}
