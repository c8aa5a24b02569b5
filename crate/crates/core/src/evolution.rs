//! Time evolution: exact (eigenbasis) and first-order Trotter.

use num_complex::Complex64;

use crate::error::{QgfError, Result};
use crate::pauli::PauliSum;
use crate::spectrum::Spectrum;
use crate::state::StateVector;

/// Trotter resolution expressed per slice of evolution time.
///
/// Evolving for `t` uses `round(|t| / slice) · steps_per_slice` steps, so the
/// step size stays fixed as `t` grows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrotterConfig {
    pub steps_per_slice: usize,
    pub slice: f64,
}

impl TrotterConfig {
    pub fn new(steps_per_slice: usize, slice: f64) -> Result<Self> {
        if steps_per_slice == 0 {
            return Err(QgfError::invalid("steps_per_slice must be >= 1"));
        }
        if !(slice > 0.0 && slice.is_finite()) {
            return Err(QgfError::invalid("Trotter slice must be positive"));
        }
        Ok(Self { steps_per_slice, slice })
    }

    pub fn steps_for(&self, t: f64) -> usize {
        if t == 0.0 {
            return 0;
        }
        ((t.abs() / self.slice).round() as usize * self.steps_per_slice).max(1)
    }
}

/// `V e^{-iλt} V† ψ`.
pub fn exact_evolve(spec: &Spectrum, t: f64, psi: &StateVector) -> Result<StateVector> {
    let coeffs = spec.coefficients(psi)?;
    let phased: Vec<Complex64> = coeffs
        .iter()
        .zip(spec.eigenvalues())
        .map(|(a, l)| a * Complex64::from_polar(1.0, -l * t))
        .collect();
    spec.synthesize(&phased)
}

/// First-order product formula with the step count taken from `cfg`.
pub fn trotter_evolve(h: &PauliSum, t: f64, cfg: &TrotterConfig, psi: &StateVector) -> Result<StateVector> {
    trotter_evolve_steps(h, t, cfg.steps_for(t), psi)
}

/// `[Π_l exp(-i c_l P_l t/steps)]^steps ψ`, terms in the sum's stored order.
///
/// The identity offset contributes the exact scalar phase `e^{-i·offset·t}`.
pub fn trotter_evolve_steps(h: &PauliSum, t: f64, steps: usize, psi: &StateVector) -> Result<StateVector> {
    if psi.n_qubits() != h.n_qubits() {
        return Err(QgfError::DimensionMismatch { expected: h.n_qubits(), found: psi.n_qubits() });
    }
    let mut out = psi.clone();
    if steps == 0 {
        if t != 0.0 {
            return Err(QgfError::invalid("non-zero evolution time needs at least one Trotter step"));
        }
        return Ok(out);
    }
    let dt = t / steps as f64;
    for _ in 0..steps {
        trotter_step(h, dt, &mut out);
    }
    apply_offset_phase(h, t, &mut out);
    Ok(out)
}

/// One product-formula step without the offset phase.
pub(crate) fn trotter_step(h: &PauliSum, dt: f64, state: &mut StateVector) {
    for (c, p) in h.terms() {
        state.rotate_pauli(p, c * dt);
    }
}

pub(crate) fn apply_offset_phase(h: &PauliSum, t: f64, state: &mut StateVector) {
    let off = h.identity_offset();
    if off != 0.0 {
        let ph = Complex64::from_polar(1.0, -off * t);
        for a in state.amplitudes_mut() {
            *a *= ph;
        }
    }
}

/// `‖a - b‖₂`.
pub fn state_distance(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}
