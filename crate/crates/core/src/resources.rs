//! Shot and gate budgets for planning runs. Every constant hidden in the
//! asymptotic bounds is set to 1, so outputs are estimates.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{QgfError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceInputs {
    /// Ground-state overlap `a_0²` of the initial state.
    pub a0_sq: f64,
    pub epsilon: f64,
    pub sigma_sq: f64,
    /// Spectral window `λ_m`.
    pub lambda_m: f64,
    /// Number of local terms `L`.
    pub big_l: f64,
    /// Spectral gap `Δ`.
    pub delta_gap: f64,
}

impl ResourceInputs {
    pub fn validate(&self) -> Result<()> {
        let all = [self.a0_sq, self.epsilon, self.sigma_sq, self.lambda_m, self.big_l, self.delta_gap];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(QgfError::invalid("resource inputs must be positive and finite"));
        }
        if self.a0_sq > 1.0 {
            return Err(QgfError::invalid("a0^2 cannot exceed 1"));
        }
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        self.sigma_sq.sqrt()
    }

    // ε⁻¹ a_0⁻² e^{2(λ_m - Δ)²/σ²}
    fn amplification(&self) -> f64 {
        (2.0 * (self.lambda_m - self.delta_gap).powi(2) / self.sigma_sq).exp() / (self.epsilon * self.a0_sq)
    }
}

/// `φ_m = 2λ_m/σ²`.
pub fn max_evolution_time(r: &ResourceInputs) -> Result<f64> {
    r.validate()?;
    Ok(2.0 * r.lambda_m / r.sigma_sq)
}

/// Shots for the overlap at evolution time `yΔ_y`:
/// `(σ/2√π) ε⁻¹ a_0⁻² e^{2(λ_m-Δ)²/σ²} e^{-(yΔ_y)²σ²/4}`.
pub fn shots_per_term(r: &ResourceInputs, y: i64, delta_y: f64) -> Result<f64> {
    r.validate()?;
    let t = y as f64 * delta_y;
    Ok(r.sigma() / (2.0 * PI.sqrt()) * r.amplification() * (-(t * t) * r.sigma_sq / 4.0).exp())
}

/// [`shots_per_term`] summed over `|y| ≤ 2φ_m/Δ_y`.
pub fn total_shots_summed(r: &ResourceInputs, delta_y: f64) -> Result<f64> {
    let m = (2.0 * max_evolution_time(r)? / delta_y).floor() as i64;
    (-m..=m).map(|y| shots_per_term(r, y, delta_y)).sum()
}

/// Closed form `ε⁻¹ a_0⁻² e^{2(λ_m-Δ)²/σ²} Δ_y⁻¹ erf(σφ_m)`.
pub fn total_shots_closed(r: &ResourceInputs, delta_y: f64) -> Result<f64> {
    let phi = max_evolution_time(r)?;
    if !(delta_y > 0.0) {
        return Err(QgfError::invalid("delta_y must be positive"));
    }
    Ok(r.amplification() / delta_y * erf(r.sigma() * phi))
}

/// Per-`k` shot schedule proportional to `e^{-(kΔ_y)²σ²/4}`, scaled so that
/// `k = 0` gets `shots_at_zero`; never below one shot.
pub fn weighted_shot_schedule(sigma_sq: f64, delta_y: f64, k_max: usize, shots_at_zero: u64) -> Vec<u64> {
    (0..=k_max)
        .map(|k| {
            let t = k as f64 * delta_y;
            ((shots_at_zero as f64 * (-(t * t) * sigma_sq / 4.0).exp()).ceil() as u64).max(1)
        })
        .collect()
}

/// First-order Trotter gate count `L³ t² / ε_term`.
pub fn trotter_gate_count(r: &ResourceInputs, t: f64, eps_term: f64) -> Result<f64> {
    r.validate()?;
    if !(eps_term > 0.0) {
        return Err(QgfError::invalid("per-term accuracy must be positive"));
    }
    Ok(r.big_l.powi(3) * t * t / eps_term)
}

/// Evolution time carrying the largest total gate cost, and that cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstCaseDepth {
    pub t: f64,
    pub gate_count: f64,
}

/// Maximizes `G(t) = ε⁻¹ L³ t² σ a_0⁻² e^{2λ_m²/σ²} e^{-t²σ²/4}` (gates per
/// circuit times shots at that time) over `t ≤ 4λ_m/σ²`: the maximum sits at
/// `2/σ` when `σ ≤ 2λ_m` and at the boundary `4λ_m/σ²` otherwise.
pub fn worst_case_depth(r: &ResourceInputs) -> Result<WorstCaseDepth> {
    r.validate()?;
    let sigma = r.sigma();
    let t = if sigma <= 2.0 * r.lambda_m { 2.0 / sigma } else { 4.0 * r.lambda_m / r.sigma_sq };
    let gate_count = r.big_l.powi(3) * t * t * sigma / (r.epsilon * r.a0_sq)
        * (2.0 * r.lambda_m * r.lambda_m / r.sigma_sq).exp()
        * (-(t * t) * r.sigma_sq / 4.0).exp();
    Ok(WorstCaseDepth { t, gate_count })
}
