//! Dense exact diagonalization, the ground truth for every other path.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QgfError, Result};
use crate::pauli::PauliSum;
use crate::state::StateVector;

/// Largest register handled by [`diagonalize`] (a 4096 × 4096 eigensolve).
pub const MAX_DIAG_QUBITS: usize = 12;

/// Eigenvalues in ascending order with eigenvectors as matrix columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    n_qubits: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl Spectrum {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn gap(&self) -> f64 {
        if self.dim() < 2 {
            return 0.0;
        }
        self.eigenvalues[1] - self.eigenvalues[0]
    }

    pub fn eigenstate(&self, j: usize) -> StateVector {
        let col = self.eigenvectors.column(j).iter().copied().collect();
        StateVector::from_amplitudes_unchecked(self.n_qubits, col).expect("eigenvector length matches")
    }

    pub fn ground_state(&self) -> StateVector {
        self.eigenstate(0)
    }

    /// Eigenbasis coefficients `a_j = <λ_j|ψ>`.
    pub fn coefficients(&self, psi: &StateVector) -> Result<Vec<Complex64>> {
        if psi.dim() != self.dim() {
            return Err(QgfError::DimensionMismatch { expected: self.dim(), found: psi.dim() });
        }
        let v = &self.eigenvectors;
        let amps = psi.amplitudes();
        Ok((0..self.dim())
            .map(|j| v.column(j).iter().zip(amps).map(|(e, a)| e.conj() * a).sum())
            .collect())
    }

    /// `Σ_j c_j |λ_j>` (no normalization).
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Result<StateVector> {
        if coeffs.len() != self.dim() {
            return Err(QgfError::DimensionMismatch { expected: self.dim(), found: coeffs.len() });
        }
        let dim = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (j, cj) in coeffs.iter().enumerate() {
            if *cj == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (o, e) in out.iter_mut().zip(self.eigenvectors.column(j).iter()) {
                *o += e * cj;
            }
        }
        StateVector::from_amplitudes_unchecked(self.n_qubits, out)
    }

    /// Same eigenvectors, eigenvalues moved by `e_shift`.
    pub fn shifted(&self, e_shift: f64) -> Spectrum {
        Spectrum {
            n_qubits: self.n_qubits,
            eigenvalues: self.eigenvalues.iter().map(|l| l + e_shift).collect(),
            eigenvectors: self.eigenvectors.clone(),
        }
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let mut scaled = self.eigenvectors.clone();
        for (j, l) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(*l);
        }
        scaled * self.eigenvectors.adjoint()
    }
}

/// Full Hermitian eigendecomposition of `h`. Real matrices (even Y count on
/// every term) take the cheaper real symmetric route.
pub fn diagonalize(h: &PauliSum) -> Result<Spectrum> {
    let n = h.n_qubits();
    if n > MAX_DIAG_QUBITS {
        return Err(QgfError::ResourceLimit(format!(
            "dense diagonalization limited to {MAX_DIAG_QUBITS} qubits, got {n}"
        )));
    }
    let (values, vectors) = if h.is_real() {
        let eig = h.to_dense_real().symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), eig.eigenvectors.map(|x| Complex64::new(x, 0.0)))
    } else {
        let eig = h.to_dense().symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let eigenvalues = order.iter().map(|&i| values[i]).collect();
    let eigenvectors = vectors.select_columns(order.iter());
    Ok(Spectrum { n_qubits: n, eigenvalues, eigenvectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{build_tfim, PauliString};

    #[test]
    fn single_x_spectrum() {
        let h = PauliSum::new(1, [(1.0, "X".parse::<PauliString>().unwrap())], 0.0).unwrap();
        let s = diagonalize(&h).unwrap();
        assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_site_ring_by_hand() {
        // -2 ZZ + 2 (XI + IX): eigenvalues {-2√5, -2, 2, 2√5}
        let s = diagonalize(&build_tfim(2, 1.0, 2.0, true).unwrap()).unwrap();
        let r5 = 5f64.sqrt();
        let want = [-2.0 * r5, -2.0, 2.0, 2.0 * r5];
        for (got, w) in s.eigenvalues().iter().zip(want) {
            assert!((got - w).abs() < 1e-12, "{got} vs {w}");
        }
    }

    #[test]
    fn free_spins_open_chain() {
        let s = diagonalize(&build_tfim(3, 0.0, 1.0, false).unwrap()).unwrap();
        let want = [-3.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 3.0];
        for (got, w) in s.eigenvalues().iter().zip(want) {
            assert!((got - w).abs() < 1e-12);
        }
    }

    #[test]
    fn four_site_ring_ground_energy() {
        let s = diagonalize(&build_tfim(4, 1.0, 2.0, true).unwrap()).unwrap();
        assert!((s.ground_energy() + 8.543).abs() < 1e-3, "{}", s.ground_energy());
    }

    #[test]
    fn reconstruction_matches_dense() {
        let h = PauliSum::new(
            3,
            [
                (0.4, "XYZ".parse().unwrap()),
                (-0.7, "ZZI".parse().unwrap()),
                (1.3, "IYI".parse().unwrap()),
            ],
            0.5,
        )
        .unwrap();
        let s = diagonalize(&h).unwrap();
        let dense = h.to_dense();
        let rel = (s.reconstruct() - &dense).norm() / dense.norm();
        assert!(rel < 1e-10, "{rel}");
        assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn shift_moves_every_eigenvalue() {
        let h = build_tfim(3, 1.0, 0.6, true).unwrap();
        let a = diagonalize(&h).unwrap();
        let b = diagonalize(&h.shift_spectrum(15.0)).unwrap();
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            assert!((x + 15.0 - y).abs() < 1e-11);
        }
        let zero = diagonalize(&h.shift_spectrum(0.0)).unwrap();
        assert_eq!(zero.eigenvalues(), a.eigenvalues());
    }

    #[test]
    fn rejects_oversized_register() {
        let h = build_tfim(13, 1.0, 1.0, true).unwrap();
        assert!(matches!(diagonalize(&h), Err(QgfError::ResourceLimit(_))));
    }
}
