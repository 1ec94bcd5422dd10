//! Invariants checked over randomly drawn states and grids.

use ccplab::ccp::{
    block_mass, ccp, chain_rule_compose, deviation_up_to_phase, ergodicity_check, kd_distribution,
    reconstruct_wavefunction,
};
use ccplab::dynamics::{unwrap_phase, Propagator};
use ccplab::hilbert::{
    discretize_hamiltonian, eigensystem, make_momentum_basis, make_position_basis, HilbertSpec, StateVector,
};
use ccplab::weak::{projector_config, simulate};
use num_complex::Complex;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn setup(dim: usize, length: f64, seed: u64) -> (HilbertSpec<f64>, ChaCha8Rng) {
    (HilbertSpec::new(dim, length).unwrap(), ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kd_marginals_are_born_probabilities(dim in 2usize..24, length in 1.0f64..20.0, seed in any::<u64>()) {
        let (space, mut rng) = setup(dim, length, seed);
        let e = StateVector::random(space, &mut rng);
        let xb = make_position_basis(space).unwrap();
        let pb = make_momentum_basis(space).unwrap();
        let kd = kd_distribution(&e, &xb, &pb).unwrap();
        prop_assert!((kd.total() - 1.0).norm() < 1e-12);
        for (r, a) in kd.row_sums().iter().zip(e.amplitudes()) {
            prop_assert!((r - a.norm_sqr()).norm() < 1e-12);
        }
        let c = e.momentum_amplitudes();
        for (s, a) in kd.column_sums().iter().zip(&c) {
            prop_assert!((s - a.norm_sqr()).norm() < 1e-12);
        }
    }

    #[test]
    fn conditional_probabilities_sum_to_one(dim in 2usize..16, seed in any::<u64>()) {
        let (space, mut rng) = setup(dim, 4.0, seed);
        let a = StateVector::random(space, &mut rng);
        let b = StateVector::random(space, &mut rng);
        prop_assume!(b.inner(&a).unwrap().norm() > 1e-3);
        let total = make_momentum_basis(space).unwrap().vectors().iter()
            .map(|m| ccp(m, &a, &b).unwrap().value)
            .fold(Complex::new(0.0, 0.0), |s, v| s + v);
        prop_assert!((total - 1.0).norm() < 1e-9);
    }

    #[test]
    fn action_phase_on_principal_branch(dim in 2usize..16, seed in any::<u64>(), hbar in 0.1f64..3.0) {
        let space = HilbertSpec::with_units(dim, 4.0, hbar, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, a, b) = (StateVector::random(space, &mut rng), StateVector::random(space, &mut rng), StateVector::random(space, &mut rng));
        let v = ccp(&m, &a, &b).unwrap();
        prop_assert!(v.action_phase > -PI * hbar && v.action_phase <= PI * hbar);
        prop_assert!((v.polar() - v.value).norm() <= 1e-12 * v.magnitude.max(1.0));
    }

    #[test]
    fn ergodicity_law_holds(dim in 2usize..32, seed in any::<u64>()) {
        let (space, mut rng) = setup(dim, 6.0, seed);
        let e = StateVector::random(space, &mut rng);
        let r = ergodicity_check(&e, &make_position_basis(space).unwrap(), &make_momentum_basis(space).unwrap()).unwrap();
        prop_assert!(r.max_residual < 1e-12 * dim as f64);
    }

    #[test]
    fn reconstruction_and_chain_rule(dim in 2usize..24, seed in any::<u64>(), reference in 0usize..24) {
        let (space, mut rng) = setup(dim, 5.0, seed);
        let e = StateVector::random(space, &mut rng);
        let m = StateVector::random(space, &mut rng);
        let xb = make_position_basis(space).unwrap();
        let pb = make_momentum_basis(space).unwrap();
        let k = reference % dim;
        prop_assume!(pb.vectors()[k].inner(&e).unwrap().norm() > 1e-3);
        let rec = reconstruct_wavefunction(&e, &xb, &pb, k).unwrap();
        // The reference momentum only contributes the gauge factor <p_k|x_j> / |<p_k|x_j>|.
        let ungauged: Vec<Complex<f64>> = rec.raw.iter().enumerate()
            .map(|(j, z)| z * Complex::from_polar(1.0, 2.0 * PI * ((j * k) % dim) as f64 / dim as f64))
            .collect();
        prop_assert!(deviation_up_to_phase(&ungauged, e.amplitudes()) < 1e-10);
        for (r, a) in rec.raw.iter().zip(e.amplitudes()) {
            prop_assert!((r.norm() - a.norm()).abs() < 1e-12);
        }
        let composed = chain_rule_compose(&m, &e, &xb, &pb.vectors()[k]).unwrap();
        let direct = ccp(&m, &e, &pb.vectors()[k]).unwrap().value;
        prop_assert!((composed - direct).norm() < 1e-9 * direct.norm().max(1.0));
    }

    #[test]
    fn evolution_is_unitary_with_group_law(dim in 2usize..32, seed in any::<u64>(), t1 in -2.0f64..2.0, t2 in -2.0f64..2.0) {
        let (space, mut rng) = setup(dim, 6.0, seed);
        let psi = StateVector::random(space, &mut rng);
        let u = Propagator::from_hamiltonian(&discretize_hamiltonian(space, |x| 0.3 * x * x).unwrap()).unwrap();
        let once = u.apply(psi.amplitudes(), t1 + t2).unwrap();
        let twice = u.apply(&u.apply(psi.amplitudes(), t1).unwrap(), t2).unwrap();
        let norm: f64 = once.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-10);
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn unwrapped_phase_is_continuous(phases in proptest::collection::vec(-PI..PI, 2..100), hbar in 0.2f64..2.0) {
        let s: Vec<f64> = phases.iter().map(|p| p * hbar).collect();
        let u = unwrap_phase(&s, hbar);
        for w in u.windows(2) {
            prop_assert!((w[1] - w[0]).abs() <= PI * hbar * (1.0 + 1e-12));
        }
        for (a, b) in u.iter().zip(&s) {
            let turns = (a - b) / (2.0 * PI * hbar);
            prop_assert!((turns - turns.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn block_mass_never_grows(values in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..120), window in 1usize..20) {
        let v: Vec<Complex<f64>> = values.iter().map(|&(a, b)| Complex::new(a, b)).collect();
        prop_assume!(window <= v.len());
        let covered = v.len() / window * window;
        let fine = block_mass(&v[..covered], 1).unwrap();
        prop_assert!(block_mass(&v, window).unwrap() <= fine + 1e-12);
    }

    #[test]
    fn eigenvectors_are_orthonormal(dim in 2usize..24, omega in 0.1f64..3.0) {
        let space = HilbertSpec::<f64>::new(dim, 8.0).unwrap();
        let h = discretize_hamiltonian(space, |x| 0.5 * omega * omega * x * x).unwrap();
        let system = eigensystem(&h).unwrap();
        prop_assert!(system.states.orthonormality_residual() < 1e-10);
        prop_assert!(system.energies.windows(2).all(|w| w[0] <= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn weak_record_is_thread_independent(seed in any::<u64>(), g in 0.01f64..1.0) {
        let (space, mut rng) = setup(3, 3.0, seed);
        let c = projector_config(
            StateVector::random(space, &mut rng),
            StateVector::random(space, &mut rng),
            &StateVector::random(space, &mut rng),
            g,
            1.0,
            2000,
            seed,
        );
        let run = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(|| simulate(&c).unwrap());
        let one = run(1);
        prop_assert!(one.accepted_trials <= one.total_trials);
        prop_assert_eq!(one, run(5));
    }
}

#[test]
fn single_precision_path() {
    let space = HilbertSpec::<f32>::new(8, 4.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let a = StateVector::random(space, &mut rng);
    let b = StateVector::random(space, &mut rng);
    let total = make_position_basis(space)
        .unwrap()
        .vectors()
        .iter()
        .map(|m| ccp(m, &a, &b).unwrap().value)
        .fold(Complex::new(0.0f32, 0.0), |s, v| s + v);
    assert!((total - 1.0).norm() < 1e-4);
    let e = StateVector::random(space, &mut rng);
    let r = ergodicity_check(&e, &make_position_basis(space).unwrap(), &make_momentum_basis(space).unwrap()).unwrap();
    assert!(r.max_residual < 1e-5);
}
