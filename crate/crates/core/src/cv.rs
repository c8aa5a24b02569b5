//! Qumode-assisted filter, modelled in the eigenbasis.
//!
//! Projecting a squeezed qumode coupled through `e^{-iHp}` multiplies each
//! eigencomponent by a Gaussian in its eigenvalue. Two weights are offered:
//! `e^{-sλ²/2}` ([`CvWeight::Squeezing`], the default) and `e^{-s²λ²/4}`
//! ([`CvWeight::MomentumIntegral`]), which is what the momentum-space
//! integral `(1/s√π)∫ e^{-p²/s²} e^{-ipλ} dp` evaluates to. They agree at `s = 2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QgfError, Result};
use crate::pauli::PauliSum;
use crate::spectrum::{diagonalize, Spectrum};
use crate::state::StateVector;

/// Below this success probability the filtered state is treated as lost.
pub const MIN_SUCCESS_PROBABILITY: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CvWeight {
    #[default]
    Squeezing,
    MomentumIntegral,
}

impl CvWeight {
    /// Amplitude factor applied to eigenvalue `lambda`.
    pub fn amplitude(self, lambda: f64, s: f64) -> f64 {
        match self {
            CvWeight::Squeezing => (-s * lambda * lambda / 2.0).exp(),
            CvWeight::MomentumIntegral => (-s * s * lambda * lambda / 4.0).exp(),
        }
    }
}

/// Filtered, renormalized state and the success probability `C`.
pub fn cv_filtered_state(spec: &Spectrum, psi: &StateVector, s: f64) -> Result<(StateVector, f64)> {
    cv_filtered_state_with(spec, psi, s, CvWeight::Squeezing)
}

pub fn cv_filtered_state_with(spec: &Spectrum, psi: &StateVector, s: f64, weight: CvWeight) -> Result<(StateVector, f64)> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(QgfError::invalid("squeezing factor must be positive"));
    }
    let a = spec.coefficients(psi)?;
    let filtered: Vec<Complex64> =
        a.iter().zip(spec.eigenvalues()).map(|(x, l)| x * weight.amplitude(*l, s)).collect();
    let c: f64 = filtered.iter().map(|x| x.norm_sqr()).sum();
    if !(c >= MIN_SUCCESS_PROBABILITY) {
        return Err(QgfError::UnderflowAnnihilated(c));
    }
    let inv = 1.0 / c.sqrt();
    let scaled = filtered.into_iter().map(|x| x * inv).collect::<Vec<_>>();
    Ok((spec.synthesize(&scaled)?, c))
}

/// One stage of the shift schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CvStage {
    #[serde(rename = "shift")]
    pub shift_energy: f64,
    /// Energy of the filtered state under the unshifted Hamiltonian.
    pub energy: f64,
    #[serde(rename = "error")]
    pub energy_error: f64,
    #[serde(rename = "success_prob")]
    pub success_probability: f64,
    pub required_measurements: f64,
}

/// Applies the filter to `psi` once per shift `E`, with the Hamiltonian
/// `H + E`. The eigendecomposition is computed once.
pub fn cv_iterate(h: &PauliSum, psi: &StateVector, s: f64, schedule: &[f64]) -> Result<Vec<CvStage>> {
    let spec = diagonalize(h)?;
    cv_iterate_spectrum(&spec, psi, s, schedule, CvWeight::Squeezing)
}

pub fn cv_iterate_spectrum(
    spec: &Spectrum,
    psi: &StateVector,
    s: f64,
    schedule: &[f64],
    weight: CvWeight,
) -> Result<Vec<CvStage>> {
    if schedule.windows(2).any(|w| w[1] < w[0]) {
        return Err(QgfError::invalid("shift schedule must be nondecreasing"));
    }
    let lambda0 = spec.ground_energy();
    schedule
        .iter()
        .map(|&shift| {
            let shifted = spec.shifted(shift);
            let (state, c) = cv_filtered_state_with(&shifted, psi, s, weight)?;
            let coeffs = spec.coefficients(&state)?;
            let energy: f64 = coeffs.iter().zip(spec.eigenvalues()).map(|(x, l)| x.norm_sqr() * l).sum();
            Ok(CvStage {
                shift_energy: shift,
                energy,
                energy_error: (energy - lambda0).abs(),
                success_probability: c,
                required_measurements: (1.0 / c).ceil(),
            })
        })
        .collect()
}

pub fn write_cv_csv<W: std::io::Write>(stages: &[CvStage], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for s in stages {
        out.serialize(s).map_err(|e| QgfError::Io(std::io::Error::other(e)))?;
    }
    out.flush()?;
    Ok(())
}

/// Momentum grid `[-p_max, p_max]` with `n_points` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumGrid {
    pub p_max: f64,
    pub n_points: usize,
}

/// Trapezoid value of `(1/s√π) ∫ e^{-p²/s²} e^{-ipλ} dp` over the grid.
pub fn momentum_weight(lambda: f64, s: f64, grid: MomentumGrid) -> Complex64 {
    let h = 2.0 * grid.p_max / (grid.n_points - 1) as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..grid.n_points {
        let p = -grid.p_max + h * i as f64;
        let w = if i == 0 || i + 1 == grid.n_points { 0.5 } else { 1.0 };
        acc += Complex64::from_polar(w * (-(p / s).powi(2)).exp(), -p * lambda);
    }
    acc * (h / (s * PI.sqrt()))
}

/// Unnormalized `Σ_j a_j w(λ_j) |λ_j>` with the weights integrated on the grid.
pub fn momentum_grid_overlap(spec: &Spectrum, psi: &StateVector, s: f64, grid: MomentumGrid) -> Result<StateVector> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(QgfError::invalid("squeezing factor must be positive"));
    }
    if grid.p_max < 6.0 * s || grid.n_points < 200 {
        return Err(QgfError::invalid("momentum grid needs p_max >= 6s and at least 200 points"));
    }
    let a = spec.coefficients(psi)?;
    let out: Vec<Complex64> =
        a.iter().zip(spec.eigenvalues()).map(|(x, l)| x * momentum_weight(*l, s, grid)).collect();
    spec.synthesize(&out)
}
