use chaoscorr_core::local_ops::{haar_unitary, max_purity_deficit, random_local_basis, DISENTANGLE_EPSILON};
use chaoscorr_core::{
    apply_local_unitary, compute_vcm, disentangling_cost_probe, extremal_eigenvalues, invariance_experiment,
    make_cat_state, predicted_purity, projective_measure, purity_direct, sample_state, BasisChoice, EnsembleClass,
    InvarianceConfig, InvarianceStatistic, LocalUnitary, MeasurementMode, SampleSeed, StateFamily, StateVector,
};
use num_complex::Complex64;
use rand::SeedableRng;

fn config(class: EnsembleClass, statistic: InvarianceStatistic, basis: BasisChoice) -> InvarianceConfig {
    InvarianceConfig {
        class,
        n_sites: 8,
        final_sites: 4,
        samples: 300,
        statistic,
        basis,
        master_seed: 77,
    }
}

#[test]
fn measured_states_stay_random_matrix_distributed() {
    for class in EnsembleClass::ALL {
        for statistic in [
            InvarianceStatistic::MeanPurity { m: 3 },
            InvarianceStatistic::FourthMoment,
            InvarianceStatistic::VcmMeanDiagonal,
        ] {
            for basis in [BasisChoice::Computational, BasisChoice::Random] {
                let report = invariance_experiment(&config(class, statistic, basis)).unwrap();
                assert_eq!(report.steps.len(), 4);
                assert_eq!(report.steps[0].n_sites, 7);
                assert!(report.all_agree, "{class} {statistic:?} {basis:?}: {:#?}", report.steps);
            }
        }
    }
}

#[test]
fn first_step_prediction_is_seven_site_purity() {
    let report = invariance_experiment(&config(
        EnsembleClass::Gue,
        InvarianceStatistic::MeanPurity { m: 3 },
        BasisChoice::Computational,
    ))
    .unwrap();
    let p = report.steps[0].summary.prediction.unwrap();
    assert!((p - 24.0 / 129.0).abs() < 1e-15);
    assert_eq!(p, predicted_purity(3, 4, EnsembleClass::Gue));
}

#[test]
fn born_probabilities_and_post_states() {
    let s = sample_state(EnsembleClass::Gue, 6, SampleSeed::new(6, 0)).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    for site in 1..=6 {
        for basis in [LocalUnitary::identity(), haar_unitary(&mut rng)] {
            let r0 = projective_measure(&s, site, &basis, MeasurementMode::Forced(0)).unwrap();
            let r1 = projective_measure(&s, site, &basis, MeasurementMode::Forced(1)).unwrap();
            assert!((r0.probability + r1.probability - 1.0).abs() < 1e-12);
            assert_eq!(r0.probabilities, r1.probabilities);
            assert!((r0.post_state.norm_sqr() - 1.0).abs() < 1e-12);
            assert!((r1.post_state.norm_sqr() - 1.0).abs() < 1e-12);
            assert_eq!(r0.post_state.n_sites(), 5);
            let sampled = projective_measure(&s, site, &basis, MeasurementMode::Sample { uniform: 0.0 }).unwrap();
            assert_eq!(sampled.outcome, 0);
        }
    }
}

#[test]
fn computational_measurement_is_the_renormalized_slice() {
    let s = sample_state(EnsembleClass::Gue, 5, SampleSeed::new(5, 1)).unwrap();
    for site in 1..=5 {
        for outcome in 0..2u8 {
            let r = projective_measure(&s, site, &LocalUnitary::identity(), MeasurementMode::Forced(outcome)).unwrap();
            let bit = 1usize << (site - 1);
            let slice: Vec<Complex64> = (0..32)
                .filter(|i| (i & bit != 0) == (outcome == 1))
                .map(|i| s.amplitudes()[i])
                .collect();
            let norm = slice.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            for (got, want) in r.post_state.amplitudes().iter().zip(&slice) {
                assert!((got - want / norm).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn local_unitaries_preserve_entanglement_data() {
    let s = sample_state(EnsembleClass::Gue, 6, SampleSeed::new(60, 0)).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    let u = haar_unitary(&mut rng);
    let t = apply_local_unitary(&s, 3, &u).unwrap();
    for keep in [vec![1, 2, 3], vec![3], vec![4, 5], vec![1, 3, 6]] {
        assert!((purity_direct(&s, &keep).unwrap() - purity_direct(&t, &keep).unwrap()).abs() < 1e-12);
    }
    let (a_max, a_min) = extremal_eigenvalues(&compute_vcm(&s).unwrap()).unwrap();
    let (b_max, b_min) = extremal_eigenvalues(&compute_vcm(&t).unwrap()).unwrap();
    assert!((a_max - b_max).abs() < 1e-10 && (a_min - b_min).abs() < 1e-10);
    let o = random_local_basis(EnsembleClass::Goe, &mut rng);
    let g = sample_state(EnsembleClass::Goe, 4, SampleSeed::new(4, 4)).unwrap();
    assert!(apply_local_unitary(&g, 2, &o).unwrap().is_real());
}

#[test]
fn cat_state_is_disentangled_by_one_measurement() {
    for n in 3..=8 {
        let cat = make_cat_state(n).unwrap();
        for outcome in 0..2u8 {
            let r = projective_measure(&cat, 1, &LocalUnitary::identity(), MeasurementMode::Forced(outcome)).unwrap();
            assert!(max_purity_deficit(&r.post_state).unwrap() < 1e-12);
        }
        let probe = disentangling_cost_probe(StateFamily::Cat, n, n, SampleSeed::new(1, 0)).unwrap();
        assert_eq!(probe.disentangled_after, Some(1));
    }
}

#[test]
fn chaotic_states_need_almost_every_site_measured() {
    let n = 8;
    for k in 0..2 {
        let probe =
            disentangling_cost_probe(StateFamily::Chaotic(EnsembleClass::Gue), n, n, SampleSeed::new(3, k)).unwrap();
        assert_eq!(probe.disentangled_after, Some(n - 1));
        for step in &probe.history[..n - 1] {
            assert!(step.max_purity_deficit > DISENTANGLE_EPSILON, "{step:?}");
            assert_eq!(step.n_sites, n - step.measurements);
        }
    }
    let product = disentangling_cost_probe(StateFamily::Product, 5, 5, SampleSeed::new(0, 0)).unwrap();
    assert_eq!(product.disentangled_after, Some(0));
    assert_eq!(max_purity_deficit(&StateVector::all_up(1).unwrap()).unwrap(), 0.0);
}
