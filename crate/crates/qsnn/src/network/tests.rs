use approx::assert_relative_eq;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use super::*;
use crate::linalg::{commutator, CMatrix, CVector};
use crate::quantum::{CollapseChannel, FockConfig, HamiltonianParams, ThetaSchedule};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn exchange_schedule(j: f64) -> TwoQubitCouplingSchedule {
    TwoQubitCouplingSchedule {
        tau_e: 1.0,
        entries: vec![CouplingEntry {
            t_start: 0.0,
            t_end: None,
            j_exchange: j,
            drive_pair: (0.0, 0.0),
            theta_pair: (0.0, 0.0),
        }],
    }
}

/// |q1 q2> basis state, index 2*q1 + q2.
fn basis(q1: usize, q2: usize) -> DensityMatrix {
    DensityMatrix::basis_state(4, 2 * q1 + q2)
}

fn bell_psi_plus() -> DensityMatrix {
    // (|ge> + |eg>)/sqrt(2)
    let mut psi = CVector::zeros(4);
    psi[1] = c(1.0, 0.0);
    psi[2] = c(1.0, 0.0);
    DensityMatrix::from_pure(&psi).unwrap()
}

fn bell_phi_plus() -> DensityMatrix {
    // (|gg> + |ee>)/sqrt(2)
    let mut psi = CVector::zeros(4);
    psi[0] = c(1.0, 0.0);
    psi[3] = c(1.0, 0.0);
    DensityMatrix::from_pure(&psi).unwrap()
}

mod hamiltonian {
    use super::*;

    #[test]
    fn vanishes_with_zero_rates() {
        let sched = TwoQubitCouplingSchedule {
            tau_e: 1.0,
            entries: vec![CouplingEntry {
                t_start: 0.0,
                t_end: None,
                j_exchange: 0.0,
                drive_pair: (0.0, 0.0),
                theta_pair: (1.0, 2.0),
            }],
        };
        assert_eq!(coupled_hamiltonian(0.8, &sched).norm(), 0.0);
    }

    #[test]
    fn exchange_population_oscillates_with_period_pi_over_j() {
        let j = 2.0;
        let sys = TwoQubitSystem::bare();
        let rho0 = basis(1, 0); // |e, g>
        let dt = 1e-3 / j;
        let period = PI / j;
        let traj = sys.evolve(&rho0, &exchange_schedule(j), &[], dt, period, 1).unwrap();
        // two-level exchange oracle: P_eg(t) = cos^2(j t)
        for (t, state) in traj.times.iter().zip(&traj.states) {
            let p_eg = state.matrix()[(2, 2)].re;
            assert!(
                (p_eg - (j * t).cos().powi(2)).abs() < 1e-4,
                "P_eg off at t={t}"
            );
        }
        // halfway through the period the excitation sits fully on qubit 2
        let mid = &traj.states[traj.states.len() / 2];
        assert!(mid.matrix()[(1, 1)].re > 1.0 - 1e-3);
    }

    #[test]
    fn exchange_commutes_with_total_excitation() {
        let sys = TwoQubitSystem::bare();
        let h = sys.hamiltonian_at(0.3, &exchange_schedule(1.7));
        let comm = commutator(&h, sys.number_total());
        assert!(comm.norm() < 1e-12);
    }

    #[test]
    fn total_excitation_is_conserved_without_drive() {
        let sys = TwoQubitSystem::bare();
        let rho0 = bell_psi_plus();
        let traj = sys.evolve(&rho0, &exchange_schedule(1.3), &[], 1e-3, 2.0, 100).unwrap();
        let n_tot = sys.number_total();
        let expect = |rho: &DensityMatrix| crate::linalg::trace(&(rho.matrix() * n_tot)).re;
        let n0 = expect(&traj.states[0]);
        for state in &traj.states {
            assert!((expect(state) - n0).abs() < 1e-8);
        }
    }

    #[test]
    fn cavity_variant_matches_bare_exchange_when_cavities_idle() {
        let cfg = FockConfig::new(1).unwrap();
        let sys = TwoQubitSystem::with_cavities(&cfg);
        assert_eq!(sys.dim(), 16);
        // |e,0; g,0>
        let rho0 = DensityMatrix::basis_state(16, cfg.index(true, 0) * cfg.dim() + cfg.index(false, 0));
        let j = 1.0;
        let traj = sys.evolve(&rho0, &exchange_schedule(j), &[], 1e-3, 1.0, 250).unwrap();
        for (t, state) in traj.times.iter().zip(&traj.states) {
            let idx = cfg.index(true, 0) * cfg.dim() + cfg.index(false, 0);
            let p = state.matrix()[(idx, idx)].re;
            assert!((p - (j * t).cos().powi(2)).abs() < 1e-4);
        }
    }
}

mod entanglement {
    use super::*;

    #[test]
    fn bell_state_has_unit_concurrence() {
        assert_relative_eq!(concurrence(&bell_psi_plus()).unwrap(), 1.0, epsilon = 1e-10);
        assert_relative_eq!(concurrence(&bell_phi_plus()).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn product_states_have_zero_concurrence() {
        for (q1, q2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert!(concurrence(&basis(q1, q2)).unwrap() < 1e-12);
        }
        // a non-basis product state
        let plus = CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let psi = CVector::from_vec(vec![c(1.0, 0.0), c(0.4, 0.3)]);
        let q1 = DensityMatrix::from_pure(&plus).unwrap();
        let q2 = DensityMatrix::from_pure(&psi).unwrap();
        let product = DensityMatrix::new(q1.matrix().kronecker(q2.matrix())).unwrap();
        assert!(concurrence(&product).unwrap() < 1e-10);
    }

    #[test]
    fn werner_states_match_the_analytic_formula() {
        let phi = bell_phi_plus();
        let mixed = DensityMatrix::maximally_mixed(4);
        for i in 0..=20 {
            let p = i as f64 / 20.0;
            let rho = DensityMatrix::new(
                phi.matrix().scale(p) + mixed.matrix().scale(1.0 - p),
            )
            .unwrap();
            let expected = (1.5 * p - 0.5).max(0.0);
            assert_relative_eq!(concurrence(&rho).unwrap(), expected, epsilon = 1e-8);
        }
    }

    #[test]
    fn concurrence_is_invariant_under_local_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let random_unitary = |rng: &mut ChaCha8Rng| -> CMatrix {
            // orthonormalize two random columns
            let mut u = CMatrix::from_fn(2, 2, |_, _| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let n0 = u.column(0).norm();
            let col0 = u.column(0).unscale(n0).into_owned();
            let proj = col0.adjoint() * u.column(1);
            let col1 = u.column(1) - &col0 * proj[(0, 0)];
            let n1 = col1.norm();
            u.set_column(0, &col0);
            u.set_column(1, &col1.unscale(n1));
            u
        };
        let states = [
            bell_psi_plus(),
            DensityMatrix::new(
                bell_phi_plus().matrix().scale(0.7)
                    + DensityMatrix::maximally_mixed(4).matrix().scale(0.3),
            )
            .unwrap(),
        ];
        for rho in &states {
            let c0 = concurrence(rho).unwrap();
            for _ in 0..10 {
                let u = random_unitary(&mut rng).kronecker(&random_unitary(&mut rng));
                let rotated = DensityMatrix::new(&u * rho.matrix() * u.adjoint()).unwrap();
                assert!((concurrence(&rotated).unwrap() - c0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn depolarizing_noise_never_increases_concurrence() {
        let sys = TwoQubitSystem::bare();
        let rho0 = basis(1, 0);
        let t_fix = PI / 4.0; // maximally entangled point of the exchange
        let paulis = [
            crate::quantum::pauli_x(),
            crate::quantum::pauli_y(),
            crate::quantum::pauli_z(),
        ];
        let id = CMatrix::identity(2, 2);
        let run = |rate: f64| {
            let mut channels = Vec::new();
            for p in &paulis {
                channels.push(CollapseChannel::new(p.kronecker(&id), rate).unwrap());
                channels.push(CollapseChannel::new(id.kronecker(p), rate).unwrap());
            }
            let traj = sys
                .evolve(&rho0, &exchange_schedule(1.0), &channels, 1e-3, t_fix, 100)
                .unwrap();
            concurrence(traj.final_state()).unwrap()
        };
        let sweep: Vec<f64> = [0.0, 0.05, 0.15, 0.4].iter().map(|&r| run(r)).collect();
        for pair in sweep.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-9, "concurrence rose: {sweep:?}");
        }
        assert!(sweep[0] > 0.99);
    }
}

mod correlation {
    use super::*;

    fn still_params() -> HamiltonianParams {
        HamiltonianParams {
            g: 0.0,
            drive_amp: 0.0,
            tau_e: 1.0,
            theta_schedule: ThetaSchedule::empty(),
        }
    }

    #[test]
    fn normalized_value_at_tau_zero_is_one() {
        let cfg = FockConfig::new(1).unwrap();
        let rho = DensityMatrix::basis_state(cfg.dim(), cfg.index(true, 0));
        let channels = [CollapseChannel::qubit_decay(&cfg, 0.4).unwrap()];
        let series =
            g1_correlation(&still_params(), &channels, &cfg, &rho, 0.0, 1e-3, 1.0, 100).unwrap();
        assert_relative_eq!(series.normalized[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pure_decay_gives_exponential_half_rate() {
        let cfg = FockConfig::new(1).unwrap();
        let gamma = 0.4;
        let rho = DensityMatrix::basis_state(cfg.dim(), cfg.index(true, 0));
        let channels = [CollapseChannel::qubit_decay(&cfg, gamma).unwrap()];
        let series =
            g1_correlation(&still_params(), &channels, &cfg, &rho, 0.0, 1e-3, 2.0, 50).unwrap();
        for (tau, value) in series.tau.iter().zip(&series.normalized) {
            let analytic = (-gamma * tau / 2.0).exp();
            assert!(
                (value - analytic).abs() < 1e-6,
                "|g1|({tau}) = {value}, expected {analytic}"
            );
        }
    }

    #[test]
    fn eigenstate_correlation_is_stationary() {
        let cfg = FockConfig::new(1).unwrap();
        let p = HamiltonianParams {
            g: 1.0,
            drive_amp: 0.0,
            tau_e: 1.0,
            theta_schedule: ThetaSchedule::constant(PI),
        };
        // (|e,0> + |g,1>)/sqrt(2) is an exchange eigenstate
        let mut psi = CVector::zeros(cfg.dim());
        psi[cfg.index(true, 0)] = c(1.0, 0.0);
        psi[cfg.index(false, 1)] = c(1.0, 0.0);
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        let series = g1_correlation(&p, &[], &cfg, &rho, 0.0, 1e-3, 3.0, 100).unwrap();
        for value in &series.normalized {
            assert!((value - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_population_is_an_undefined_normalization() {
        let cfg = FockConfig::new(1).unwrap();
        let rho = DensityMatrix::basis_state(cfg.dim(), cfg.index(false, 0));
        let result = g1_correlation(&still_params(), &[], &cfg, &rho, 0.0, 1e-2, 0.5, 10);
        match result {
            Err(crate::error::Error::UndefinedNormalization { raw }) => {
                assert!(raw.iter().all(|z| z.norm() < 1e-12));
            }
            other => panic!("expected undefined normalization, got {other:?}"),
        }
    }
}

mod mixing_tests {
    use super::*;

    #[test]
    fn maximally_mixed_is_a_fixed_point() {
        let half = DensityMatrix::maximally_mixed(2);
        let mixed = mix_density_matrices(
            &[half.clone(), half.clone(), half.clone()],
            &MixtureWeights::default(),
        )
        .unwrap();
        assert_relative_eq!((mixed.matrix() - half.matrix()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn forced_arithmetic_example_is_exact() {
        let g = DensityMatrix::basis_state(2, 0);
        let e = DensityMatrix::basis_state(2, 1);
        let mixed =
            mix_density_matrices(&[g.clone(), e, g], &MixtureWeights::default()).unwrap();
        // 1/3 + 1/6 = 1/2 exactly in f64
        assert_eq!(mixed.matrix()[(0, 0)].re, 0.5);
        assert_eq!(mixed.matrix()[(1, 1)].re, 0.5);
        assert_eq!(mixed.matrix()[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn random_mixtures_stay_positive_and_unit_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..100 {
            let draw = |rng: &mut ChaCha8Rng| {
                let psi = CVector::from_iterator(
                    2,
                    (0..2).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))),
                );
                let pure = DensityMatrix::from_pure(&psi).unwrap();
                let w: f64 = rng.random_range(0.0..1.0);
                DensityMatrix::new(
                    pure.matrix().scale(w)
                        + DensityMatrix::maximally_mixed(2).matrix().scale(1.0 - w),
                )
                .unwrap()
            };
            let rhos = [draw(&mut rng), draw(&mut rng), draw(&mut rng)];
            let mixed = mix_density_matrices(&rhos, &MixtureWeights::default()).unwrap();
            assert!((mixed.trace_re() - 1.0).abs() < 1e-12);
            assert!(mixed.min_eigenvalue() >= -1e-12);
        }
    }

    #[test]
    fn invalid_weights_are_rejected() {
        assert!(MixtureWeights::new([0.5, 0.4, 0.2]).is_err());
        assert!(MixtureWeights::new([-0.1, 0.6, 0.5]).is_err());
    }
}

mod reduction {
    use super::*;

    #[test]
    fn product_state_reduces_to_its_factors() {
        let q1 = DensityMatrix::from_pure(&CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)])).unwrap();
        let q2 = DensityMatrix::basis_state(2, 1);
        let joint = DensityMatrix::new(q1.matrix().kronecker(q2.matrix())).unwrap();
        let r1 = reduce_to_first(&joint).unwrap();
        let r2 = reduce_to_second(&joint).unwrap();
        assert_relative_eq!((r1.matrix() - q1.matrix()).norm(), 0.0, epsilon = 1e-12);
        assert_relative_eq!((r2.matrix() - q2.matrix()).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        let r1 = reduce_to_first(&bell_psi_plus()).unwrap();
        assert_relative_eq!(
            (r1.matrix() - DensityMatrix::maximally_mixed(2).matrix()).norm(),
            0.0,
            epsilon = 1e-12
        );
    }
}
