mod common;

use common::*;
use qgf_core::pauli::{build_tfim, PauliSum};
use qgf_core::spectrum::diagonalize;
use qgf_core::state::{prepare_qaoa_random, StateVector};
use qgf_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(n: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<Complex64> = (0..1 << n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(n, amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

fn terms_of(h: &PauliSum) -> Vec<(f64, String)> {
    h.terms().iter().map(|(c, p)| (*c, p.to_string())).collect()
}

#[test]
fn periodic_n4_ground_energy() {
    let h = build_tfim(4, 1.0, 2.0, true).unwrap();
    let l0 = diagonalize(&h).unwrap().ground_energy();
    assert!((l0 + 8.543).abs() < 1e-3, "{l0}");
    let shifted = diagonalize(&h.shift_spectrum(8.543)).unwrap().ground_energy();
    assert!((shifted - (l0 + 8.543)).abs() < 1e-9);
}

#[test]
fn two_site_ring_matches_hand_diagonalization() {
    let spec = diagonalize(&build_tfim(2, 1.0, 2.0, true).unwrap()).unwrap();
    let s5 = 2.0 * 5f64.sqrt();
    for (got, want) in spec.eigenvalues().iter().zip([-s5, -2.0, 2.0, s5]) {
        assert!((got - want).abs() < 1e-12);
    }
    let (vals, _) = eigh(&dense_sum(2, &[(-2.0, "ZZ".into()), (2.0, "XI".into()), (2.0, "IX".into())], 0.0));
    for (a, b) in vals.iter().zip(spec.eigenvalues()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn library_hamiltonian_equals_kronecker_build() {
    for (n, periodic) in [(3, false), (4, true), (5, true)] {
        let h = build_tfim(n, 0.7, 1.3, periodic).unwrap();
        let oracle = dense_tfim(n, 0.7, 1.3, periodic, 0.0);
        assert!(max_diff(&h.to_dense(), &oracle) < 1e-14);
        assert!(max_diff(&dense_sum(n, &terms_of(&h), 0.0), &oracle) < 1e-14);
    }
}

#[test]
fn apply_matches_dense_multiplication() {
    let n = 4;
    let h = build_tfim(n, 1.0, 2.0, true).unwrap().shift_spectrum(0.4);
    let dense = dense_tfim(n, 1.0, 2.0, true, 0.4);
    for seed in 0..5 {
        let psi = random_state(n, seed);
        let got = h.apply(&psi).unwrap();
        let want = &dense * vector(psi.amplitudes());
        for (a, b) in got.amplitudes().iter().zip(want.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(psi.inner(&got).im.abs() < 1e-12);
    }
}

#[test]
fn y_terms_match_dense_oracle() {
    let text = "n=3 offset=-0.25\n0.5\tXYZ\n-1.25\tYYI\n0.75\tIZY\n";
    let h = PauliSum::from_text(text).unwrap();
    let dense = dense_sum(3, &[(0.5, "XYZ".into()), (-1.25, "YYI".into()), (0.75, "IZY".into())], -0.25);
    assert!(max_diff(&h.to_dense(), &dense) < 1e-15);
    let psi = prepare_qaoa_random(3, 7).unwrap();
    let got = h.apply(&psi).unwrap();
    let want = &dense * vector(psi.amplitudes());
    for (a, b) in got.amplitudes().iter().zip(want.iter()) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn spectrum_agrees_with_independent_eigensolver() {
    for n in [3usize, 6] {
        let spec = diagonalize(&build_tfim(n, 2.0, 1.0, true).unwrap()).unwrap();
        let (vals, _) = eigh(&dense_tfim(n, 2.0, 1.0, true, 0.0));
        for (a, b) in vals.iter().zip(spec.eigenvalues()) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
