mod common;

use common::*;
use qgf_core::cv::{
    cv_filtered_state, cv_filtered_state_with, cv_iterate, cv_iterate_spectrum, momentum_grid_overlap, momentum_weight,
    write_cv_csv, CvWeight, MomentumGrid,
};
use qgf_core::pauli::build_tfim;
use qgf_core::spectrum::diagonalize;
use qgf_core::state::prepare_qaoa_random;

#[test]
fn success_probability_is_filtered_norm() {
    let n = 4;
    let dense = dense_tfim(n, 1.0, 2.0, true, 9.0);
    let (vals, vecs) = eigh(&dense);
    let spec = diagonalize(&build_tfim(n, 1.0, 2.0, true).unwrap().shift_spectrum(9.0)).unwrap();
    let psi = prepare_qaoa_random(n, 2).unwrap();
    for s in [0.5, 1.0, 2.0] {
        let (state, c_prob) = cv_filtered_state(&spec, &psi, s).unwrap();
        // e^{-sH²/2} ψ with H² built densely
        let a = vecs.adjoint() * vector(psi.amplitudes());
        let weighted = nalgebra::DVector::from_iterator(
            a.len(),
            a.iter().zip(&vals).map(|(x, l)| x * (-s * l * l / 2.0).exp()),
        );
        let unnorm = &vecs * weighted;
        let norm_sq: f64 = unnorm.iter().map(|x| x.norm_sqr()).sum();
        assert!((c_prob - norm_sq).abs() < 1e-12 * norm_sq.max(1e-300));
        let overlap = vector(state.amplitudes()).dotc(&unnorm).norm() / norm_sq.sqrt();
        assert!((overlap - 1.0).abs() < 1e-10);
    }
}

#[test]
fn stronger_squeezing_filters_harder() {
    let n = 4;
    let h = build_tfim(n, 1.0, 2.0, true).unwrap();
    let l0 = diagonalize(&h).unwrap().ground_energy();
    let psi = prepare_qaoa_random(n, 0).unwrap();
    let a = cv_iterate(&h, &psi, 1.0, &[-l0 + 1.0]).unwrap()[0];
    let b = cv_iterate(&h, &psi, 2.0, &[-l0 + 1.0]).unwrap()[0];
    assert!(b.energy_error < a.energy_error && b.success_probability < a.success_probability);
}

#[test]
fn energy_never_rises_along_schedule() {
    for n in [4usize, 6] {
        let h = build_tfim(n, 1.0, 2.0, true).unwrap();
        let spec = diagonalize(&h).unwrap();
        let l0 = spec.ground_energy();
        let schedule: Vec<f64> = (0..12).map(|i| -l0 + 0.3 * i as f64).collect();
        for seed in 0..3 {
            let psi = prepare_qaoa_random(n, seed).unwrap();
            for weight in [CvWeight::Squeezing, CvWeight::MomentumIntegral] {
                let stages = cv_iterate_spectrum(&spec, &psi, 1.0, &schedule, weight).unwrap();
                for w in stages.windows(2) {
                    assert!(w[1].energy <= w[0].energy + 1e-12);
                    assert!(w[1].required_measurements >= w[0].required_measurements);
                }
            }
        }
    }
}

#[test]
fn error_decays_geometrically_in_the_tail() {
    let n = 4;
    let h = build_tfim(n, 1.0, 2.0, true).unwrap();
    let l0 = diagonalize(&h).unwrap().ground_energy();
    let psi = prepare_qaoa_random(n, 0).unwrap();
    let schedule: Vec<f64> = (0..9).map(|i| -l0 + 0.5 * i as f64).collect();
    let stages = cv_iterate(&h, &psi, 1.0, &schedule).unwrap();
    let logs: Vec<f64> = stages.iter().map(|s| s.energy_error.ln()).collect();
    let steps: Vec<f64> = logs.windows(2).map(|w| w[1] - w[0]).collect();
    // constant log-decrement over the last stages: shift δE → ratio e^{-sΔ·δE}
    let tail = &steps[4..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    assert!(mean < 0.0 && tail.iter().all(|d| (d - mean).abs() < 0.05 * mean.abs()), "{steps:?}");
    let mut csv = Vec::new();
    write_cv_csv(&stages, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("shift,energy,error,success_prob,required_measurements\n"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn momentum_grid_reproduces_closed_integral() {
    for s in [0.5, 1.0, 2.0] {
        let coarse = MomentumGrid { p_max: 8.0 * s, n_points: 200 };
        let fine = MomentumGrid { p_max: 8.0 * s, n_points: 400 };
        let mut prev = f64::INFINITY;
        for i in 0..40 {
            let l = i as f64 * 0.1;
            let w = momentum_weight(l, s, fine);
            let want = (-s * s * l * l / 4.0).exp();
            assert!((w.re - want).abs() < 1e-10 && w.im.abs() < 1e-12);
            assert!((momentum_weight(l, s, coarse) - w).norm() < 1e-8);
            assert!(w.re > 0.0 && w.re < prev);
            prev = w.re;
        }
    }
}

#[test]
fn momentum_grid_state_matches_integral_weight() {
    let n = 3;
    let spec = diagonalize(&build_tfim(n, 1.0, 2.0, true).unwrap().shift_spectrum(5.0)).unwrap();
    let psi = prepare_qaoa_random(n, 1).unwrap();
    let grid = MomentumGrid { p_max: 12.0, n_points: 801 };
    let raw = momentum_grid_overlap(&spec, &psi, 1.5, grid).unwrap();
    let (state, c_prob) = cv_filtered_state_with(&spec, &psi, 1.5, CvWeight::MomentumIntegral).unwrap();
    for (a, b) in raw.amplitudes().iter().zip(state.amplitudes()) {
        assert!((a - b * c_prob.sqrt()).norm() < 1e-9);
    }
}
