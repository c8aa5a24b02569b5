//! Small dense gate kernels shared by the pure-state and density-matrix paths.
//!
//! Kernels act on a flat amplitude array by bit position, so the same code
//! drives a state vector and a row-major vectorized density matrix.

use num_complex::Complex64;

use crate::pauli::Pauli;

pub(crate) type Mat2 = [[Complex64; 2]; 2];

const O: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I1: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) const X: Mat2 = [[O, ONE], [ONE, O]];
pub(crate) const Y: Mat2 = [[O, Complex64::new(0.0, -1.0)], [I1, O]];
pub(crate) const Z: Mat2 = [[ONE, O], [O, Complex64::new(-1.0, 0.0)]];

pub(crate) fn hadamard() -> Mat2 {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[s, s], [s, -s]]
}

pub(crate) fn pauli_matrix(p: Pauli) -> Mat2 {
    match p {
        Pauli::I => [[ONE, O], [O, ONE]],
        Pauli::X => X,
        Pauli::Y => Y,
        Pauli::Z => Z,
    }
}

/// `exp(-i θ P)` for a single-qubit Pauli.
pub(crate) fn exp_pauli(p: Pauli, theta: f64) -> Mat2 {
    let (c, s) = (theta.cos(), theta.sin());
    let pm = pauli_matrix(p);
    let mut out = [[O; 2]; 2];
    for r in 0..2 {
        for k in 0..2 {
            let id = if r == k { c } else { 0.0 };
            out[r][k] = Complex64::new(id, 0.0) - I1 * s * pm[r][k];
        }
    }
    out
}

/// Basis change `B` with `B† Z B = P`, applied before a Z-type rotation.
pub(crate) fn to_z_basis(p: Pauli) -> Option<Mat2> {
    match p {
        Pauli::X => Some(hadamard()),
        // H·S†
        Pauli::Y => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            Some([
                [Complex64::new(s, 0.0), Complex64::new(0.0, -s)],
                [Complex64::new(s, 0.0), Complex64::new(0.0, s)],
            ])
        }
        _ => None,
    }
}

pub(crate) fn adjoint(u: &Mat2) -> Mat2 {
    [[u[0][0].conj(), u[1][0].conj()], [u[0][1].conj(), u[1][1].conj()]]
}

pub(crate) fn conj(u: &Mat2) -> Mat2 {
    [[u[0][0].conj(), u[0][1].conj()], [u[1][0].conj(), u[1][1].conj()]]
}

pub(crate) fn apply_1q(v: &mut [Complex64], bit: usize, u: &Mat2) {
    let m = 1usize << bit;
    for i in 0..v.len() {
        if i & m == 0 {
            let (a0, a1) = (v[i], v[i | m]);
            v[i] = u[0][0] * a0 + u[0][1] * a1;
            v[i | m] = u[1][0] * a0 + u[1][1] * a1;
        }
    }
}

/// Applies `u` to `target` on the subspace where `control` is set.
pub(crate) fn apply_controlled(v: &mut [Complex64], control: usize, target: usize, u: &Mat2) {
    let cm = 1usize << control;
    let tm = 1usize << target;
    for i in 0..v.len() {
        if i & cm != 0 && i & tm == 0 {
            let (a0, a1) = (v[i], v[i | tm]);
            v[i] = u[0][0] * a0 + u[0][1] * a1;
            v[i | tm] = u[1][0] * a0 + u[1][1] * a1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
        let mut out = [[O; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        out
    }

    fn close(a: &Mat2, b: &Mat2) -> bool {
        (0..2).all(|r| (0..2).all(|c| (a[r][c] - b[r][c]).norm() < 1e-14))
    }

    #[test]
    fn basis_changes_map_z_to_pauli() {
        for p in [Pauli::X, Pauli::Y] {
            let b = to_z_basis(p).unwrap();
            let got = mul(&adjoint(&b), &mul(&Z, &b));
            assert!(close(&got, &pauli_matrix(p)), "{p:?}");
        }
    }

    #[test]
    fn exp_pauli_is_unitary() {
        let u = exp_pauli(Pauli::Y, 0.37);
        let id = mul(&u, &adjoint(&u));
        assert!(close(&id, &pauli_matrix(Pauli::I)));
    }
}
