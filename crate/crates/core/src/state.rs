//! Pure states and the initial-state recipes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QgfError, Result};
use crate::gates;
use crate::pauli::{self, PauliString, PauliSum};

/// Amplitudes of an `n`-qubit pure state, length `2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|b>` for basis index `b`.
    pub fn basis(n_qubits: usize, b: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(QgfError::invalid("state needs at least one qubit"));
        }
        let dim = 1usize << n_qubits;
        if b >= dim {
            return Err(QgfError::invalid(format!("basis index {b} out of range for {n_qubits} qubits")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[b] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Wraps amplitudes and normalizes them.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        let mut s = Self::from_amplitudes_unchecked(n_qubits, amps)?;
        let norm = s.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QgfError::invalid("cannot normalize a zero or non-finite state"));
        }
        s.scale(1.0 / norm);
        Ok(s)
    }

    /// Wraps amplitudes without normalizing (checks the length only).
    pub fn from_amplitudes_unchecked(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(QgfError::invalid("state needs at least one qubit"));
        }
        let dim = 1usize << n_qubits;
        if amps.len() != dim {
            return Err(QgfError::DimensionMismatch { expected: dim, found: amps.len() });
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, f: f64) {
        for a in &mut self.amps {
            *a *= f;
        }
    }

    /// `<self|other>`. Panics on dimension mismatch; see [`StateVector::try_inner`].
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product of mismatched states");
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn try_inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_dim(other)?;
        Ok(self.inner(other))
    }

    pub(crate) fn check_dim(&self, other: &StateVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(QgfError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    /// In-place `exp(-i θ P)`, computed as `cos θ·ψ - i sin θ·Pψ`.
    pub fn rotate_pauli(&mut self, p: &PauliString, theta: f64) {
        let mask = p.mask();
        let (c, s) = (theta.cos(), theta.sin());
        let mi = Complex64::new(0.0, -s);
        if mask.x == 0 {
            // diagonal: phase(b) = ±1
            let plus = Complex64::new(c, -s);
            let minus = Complex64::new(c, s);
            for (b, a) in self.amps.iter_mut().enumerate() {
                let (_, ph) = mask.act(b);
                *a *= if ph.re > 0.0 { plus } else { minus };
            }
            return;
        }
        for b in 0..self.amps.len() {
            let t = b ^ mask.x;
            if b < t {
                let (_, ph_b) = mask.act(b); // P|b> = ph_b |t>
                let (_, ph_t) = mask.act(t); // P|t> = ph_t |b>
                let (ab, at) = (self.amps[b], self.amps[t]);
                self.amps[b] = ab * c + mi * ph_t * at;
                self.amps[t] = at * c + mi * ph_b * ab;
            }
        }
    }

    fn apply_gate(&mut self, qubit: usize, u: &gates::Mat2) {
        let bit = self.n_qubits - 1 - qubit;
        gates::apply_1q(&mut self.amps, bit, u);
    }

    fn apply_cx(&mut self, control: usize, target: usize) {
        let n = self.n_qubits;
        gates::apply_controlled(&mut self.amps, n - 1 - control, n - 1 - target, &gates::X);
    }
}

/// `|<a|b>|²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.try_inner(b)?.norm_sqr())
}

/// GHZ state with a phase flip on every qubit: Hadamard on the first qubit,
/// a CNOT chain, then Z everywhere, giving `(|0…0> + (-1)^n |1…1>)/√2`.
pub fn prepare_ghz_z(n: usize) -> Result<StateVector> {
    let mut s = StateVector::zero(n)?;
    s.apply_gate(0, &gates::hadamard());
    for q in 0..n.saturating_sub(1) {
        s.apply_cx(q, q + 1);
    }
    for q in 0..n {
        s.apply_gate(q, &gates::Z);
    }
    Ok(s)
}

/// Product of `(|0> - |1>)/√2` on every qubit (Z after H on `|0>`), the
/// ground state of `Σ X_n`.
pub fn prepare_x_ground(n: usize) -> Result<StateVector> {
    let mut s = StateVector::zero(n)?;
    for q in 0..n {
        s.apply_gate(q, &gates::hadamard());
        s.apply_gate(q, &gates::Z);
    }
    Ok(s)
}

/// `[Π_j exp(-iβ_j h_zz) exp(-iγ_j h_x)] |0…0>` with `h_zz` the periodic
/// ZZ ring and `h_x = Σ X_n`. Layer `j = 0` is the leftmost factor, so it is
/// applied last.
pub fn qaoa_state(n: usize, betas: &[f64], gammas: &[f64]) -> Result<StateVector> {
    if n < 2 {
        return Err(QgfError::invalid("QAOA ansatz needs n >= 2"));
    }
    if betas.len() != gammas.len() {
        return Err(QgfError::invalid("beta and gamma layer counts differ"));
    }
    let zz = pauli::zz_ring(n)?;
    let xf = pauli::x_field(n)?;
    let mut s = StateVector::zero(n)?;
    for (beta, gamma) in betas.iter().zip(gammas).rev() {
        rotate_commuting(&mut s, &xf, *gamma);
        rotate_commuting(&mut s, &zz, *beta);
    }
    Ok(s)
}

/// Random QAOA-ansatz state with `n` layers. Angles are drawn uniformly on
/// `[-π, π)` from a ChaCha8 stream seeded with `seed`, in the order
/// `β_0, γ_0, β_1, γ_1, …`.
pub fn prepare_qaoa_random(n: usize, seed: u64) -> Result<StateVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut betas = Vec::with_capacity(n);
    let mut gammas = Vec::with_capacity(n);
    for _ in 0..n {
        betas.push(rng.random_range(-PI..PI));
        gammas.push(rng.random_range(-PI..PI));
    }
    qaoa_state(n, &betas, &gammas)
}

// exp(-iθ Σ c_l P_l) for mutually commuting terms
fn rotate_commuting(s: &mut StateVector, h: &PauliSum, theta: f64) {
    for (c, p) in h.terms() {
        s.rotate_pauli(p, c * theta);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn ghz_signs_follow_parity() {
        let two = prepare_ghz_z(2).unwrap();
        assert!((two.amplitudes()[0] - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((two.amplitudes()[3] - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        let three = prepare_ghz_z(3).unwrap();
        assert!((three.amplitudes()[0] - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((three.amplitudes()[7] - c(-FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn x_ground_single_qubit() {
        let s = prepare_x_ground(1).unwrap();
        assert!((s.amplitudes()[0] - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(-FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn x_ground_minimizes_field() {
        let s = prepare_x_ground(2).unwrap();
        let h = pauli::x_field(2).unwrap();
        assert!((h.expectation(&s).unwrap() + 2.0).abs() < 1e-14);
    }

    #[test]
    fn qaoa_zero_angles_is_vacuum() {
        let s = qaoa_state(4, &[0.0; 4], &[0.0; 4]).unwrap();
        assert_eq!(s, StateVector::zero(4).unwrap());
    }

    #[test]
    fn qaoa_random_is_deterministic_and_normalized() {
        let a = prepare_qaoa_random(2, 11).unwrap();
        let b = prepare_qaoa_random(2, 11).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
        let other = prepare_qaoa_random(2, 12).unwrap();
        assert_ne!(a.amplitudes(), other.amplitudes());
        assert!((prepare_qaoa_random(6, 3).unwrap().norm() - 1.0).abs() < 1e-10);
        assert!(prepare_qaoa_random(1, 0).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::zero(1).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        let plus = StateVector::from_amplitudes(1, vec![c(1.0), c(1.0)]).unwrap();
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        assert!((fidelity(&zero, &plus).unwrap() - 0.5).abs() < 1e-15);
        assert!(fidelity(&zero, &StateVector::zero(2).unwrap()).is_err());
    }

    #[test]
    fn rotation_matches_dense_exponential_for_y_string() {
        let p: PauliString = "YX".parse().unwrap();
        let psi = prepare_qaoa_random(2, 5).unwrap();
        let mut rotated = psi.clone();
        rotated.rotate_pauli(&p, 0.3);
        let pp = p.apply_amplitudes(psi.amplitudes());
        for (b, a) in rotated.amplitudes().iter().enumerate() {
            let want = psi.amplitudes()[b] * 0.3f64.cos() - Complex64::new(0.0, 0.3f64.sin()) * pp[b];
            assert!((a - want).norm() < 1e-14);
        }
    }
}
