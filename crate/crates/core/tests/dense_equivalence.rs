mod oracle;

use chaoscorr_core::spin_chain::{diagonalize, eigenvalues_only};
use chaoscorr_core::{
    additive_fluctuation, build_hamiltonian, compute_vcm, make_cat_state, partial_trace, pauli_expectation, purity,
    purity_direct, sample_state, AdditiveOperatorSpec, Axis, EnsembleClass, PauliString, SampleSeed, SpinChainSpec,
    StateVector,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use oracle::*;
use rand::Rng;
use rand::SeedableRng;

#[test]
fn every_fast_path_matches_dense_algebra_up_to_four_sites() {
    for n in 1..=4 {
        for class in EnsembleClass::ALL {
            for k in 0..3 {
                let state = sample_state(class, n, SampleSeed::new(17, k)).unwrap();
                for (name, err) in equivalence_defects(&state, k) {
                    assert!(err < 1e-10, "{name} N={n} {class} sample {k}: {err:e}");
                }
            }
        }
        for state in [make_cat_state(n).unwrap(), StateVector::basis(n, (1 << n) - 2).unwrap()] {
            for (name, err) in equivalence_defects(&state, 99) {
                assert!(err < 1e-10, "{name} N={n} special state: {err:e}");
            }
        }
    }
}

#[test]
fn sigma_y_on_seeded_three_site_state() {
    let s = sample_state(EnsembleClass::Gue, 3, SampleSeed::new(3, 0)).unwrap();
    let p = PauliString::single(2, Axis::Y).unwrap();
    let fast = pauli_expectation(&s, &p).unwrap();
    assert!((fast - dense_expectation(&s, &dense_pauli_string(3, &p))).norm() < 1e-10);
    assert!(fast.im.abs() < 1e-10);
}

#[test]
fn partial_trace_of_four_sites_keep_two_and_four() {
    let s = sample_state(EnsembleClass::Gue, 4, SampleSeed::new(4, 0)).unwrap();
    let rho = partial_trace(&s, &[2, 4]).unwrap();
    assert!(max_abs_diff(rho.matrix(), &naive_partial_trace(&s, &[2, 4])) < 1e-12);
}

#[test]
fn purity_matches_eigenvalues_for_six_sites() {
    let s = sample_state(EnsembleClass::Gue, 6, SampleSeed::new(6, 0)).unwrap();
    let rho = partial_trace(&s, &[1, 2, 3]).unwrap();
    assert!((purity(&rho) - eigen_purity(rho.matrix())).abs() < 1e-10);
}

#[test]
fn purity_direct_matches_explicit_rho_for_ten_sites() {
    let s = sample_state(EnsembleClass::Gue, 10, SampleSeed::new(10, 0)).unwrap();
    for keep in [vec![1, 2, 3, 4, 5], vec![2, 4, 6, 8, 9, 10, 1], vec![7]] {
        let explicit = purity(&partial_trace(&s, &keep).unwrap());
        assert!((purity_direct(&s, &keep).unwrap() - explicit).abs() < 1e-12);
    }
}

#[test]
fn two_site_heisenberg_like_chain_matches_dense_eigenvalues() {
    let spec = SpinChainSpec::new(2, 1.0, 0.0, vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
    let h = build_hamiltonian(&spec).unwrap();
    let dense = dense_hamiltonian(&spec);
    let mut expected: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
    expected.sort_by(f64::total_cmp);
    let got = diagonalize(&h).unwrap();
    for (a, b) in got.eigenvalues.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-10);
    }
    assert!(got.max_residual(&h) < 1e-8 * h.norm());
}

#[test]
fn diagonal_input_gives_sorted_diagonal_and_trace_is_preserved() {
    let d = [3.0, -1.0, 0.5, 2.0, -7.0, 0.0, 1.0, 4.0];
    let h = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&d));
    let mut sorted = d.to_vec();
    sorted.sort_by(f64::total_cmp);
    assert_eq!(eigenvalues_only(&h).unwrap().eigenvalues, sorted);

    let spec = chaoscorr_core::sample_spec(8, 1.0, 1.0, SampleSeed::new(8, 8)).unwrap();
    let h = build_hamiltonian(&spec).unwrap();
    let sum: f64 = eigenvalues_only(&h).unwrap().eigenvalues.iter().sum();
    assert!((sum - h.trace()).abs() < 1e-8 * h.norm());
}

#[test]
fn vcm_of_three_site_state_matches_dense_construction() {
    let s = sample_state(EnsembleClass::Gue, 3, SampleSeed::new(33, 1)).unwrap();
    assert!(max_abs_diff(compute_vcm(&s).unwrap().matrix(), &dense_vcm(&s)) < 1e-10);
}

#[test]
fn additive_fluctuation_matches_direct_application() {
    let n = 8;
    let s = sample_state(EnsembleClass::Gue, n, SampleSeed::new(8, 3)).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..3 {
        let coeffs: Vec<Complex64> = (0..3 * n)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let spec = AdditiveOperatorSpec::normalized(n, coeffs).unwrap();
        let mut a = CMat::zeros(1 << n, 1 << n);
        for l in 1..=n {
            for axis in Axis::ALL {
                a += dense_single(n, l, axis) * spec.coefficients()[3 * (l - 1) + axis.index()];
            }
        }
        let mean = dense_expectation(&s, &a);
        let delta = a - CMat::identity(1 << n, 1 << n) * mean;
        let direct = dense_expectation(&s, &(delta.adjoint() * &delta)).re;
        assert!((additive_fluctuation(&s, &spec).unwrap() - direct).abs() < 1e-9);
    }
}
