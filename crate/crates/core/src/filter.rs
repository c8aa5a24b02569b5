//! Filter weights and the classical post-processing estimator.
//!
//! A filter is a linear combination `Σ_y b_y e^{-iH t_y}` with `t_y = y·τ`.
//! For the Gaussian filter `τ = Δ_y` and the sum carries an extra factor
//! `Δ_y` (the quadrature measure); for the cosine filter `τ = 2/L` and the
//! measure is 1. The estimator never needs the double sum over `(y, y')`:
//! only the difference `k = y - y'` enters the overlaps, so the weights are
//! collapsed once into the kernel `w_k = measure² Σ_{y-y'=k} b_y b*_{y'}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::error::{QgfError, Result};
use crate::overlap::{OverlapTable, TwoTimeTable};

/// Relative floor on `|Σ w_k D_k|`, in units of `Σ |w_k|`.
pub const DEFAULT_DENOMINATOR_FLOOR: f64 = 1e-12;

/// Gaussian filter parameters: centre `μ`, inverse width `1/σ²`, slice `Δ_y`, cutoff `M_y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterParams {
    pub mu: f64,
    pub inv_sigma_sq: f64,
    pub delta_y: f64,
    pub m_y: usize,
}

impl FilterParams {
    pub fn new(mu: f64, inv_sigma_sq: f64, delta_y: f64, m_y: usize) -> Result<Self> {
        let p = Self { mu, inv_sigma_sq, delta_y, m_y };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(QgfError::invalid("mu must be finite"));
        }
        if !(self.inv_sigma_sq > 0.0 && self.inv_sigma_sq.is_finite()) {
            return Err(QgfError::invalid("1/sigma^2 must be positive"));
        }
        if !(self.delta_y > 0.0 && self.delta_y.is_finite()) {
            return Err(QgfError::invalid("delta_y must be positive"));
        }
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        (1.0 / self.inv_sigma_sq).sqrt()
    }

    /// Maximum evolution time `M_y·Δ_y`.
    pub fn phi_m(&self) -> f64 {
        self.m_y as f64 * self.delta_y
    }
}

/// Parameters of the qumode-assisted filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvParams {
    /// Squeezing factor `s > 0`.
    pub s: f64,
    /// Fock cutoff of the qumode. Recorded for provenance; the qumode is
    /// modelled through its momentum-space wavefunction, not a number basis.
    pub fock_cutoff: usize,
    pub shift_schedule: Vec<f64>,
}

/// LCU weights `b_y` (`y ∈ [-M, M]`) and the collapsed kernel `w_k` (`k ∈ [-2M, 2M]`).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    m_y: usize,
    time_step: f64,
    measure: f64,
    b: Vec<Complex64>,
    w: Vec<Complex64>,
}

impl CoefficientSet {
    /// Builds a set from raw weights `b` (length `2M+1`, index `y + M`).
    pub fn from_weights(b: Vec<Complex64>, time_step: f64, measure: f64) -> Result<Self> {
        if b.len() % 2 == 0 {
            return Err(QgfError::invalid("weight array must have odd length 2M+1"));
        }
        if !(time_step > 0.0) {
            return Err(QgfError::invalid("time step must be positive"));
        }
        let m_y = b.len() / 2;
        let len = b.len() as isize;
        let mut w = Vec::with_capacity(4 * m_y + 1);
        for k in -(2 * m_y as isize)..=(2 * m_y as isize) {
            // Σ_{y - y' = k} b_y conj(b_y'), both in range
            let lo = k.max(0);
            let hi = (len - 1 + k).min(len - 1);
            let mut acc = Complex64::new(0.0, 0.0);
            for i in lo..=hi {
                acc += b[i as usize] * b[(i - k) as usize].conj();
            }
            w.push(acc * (measure * measure));
        }
        Ok(Self { m_y, time_step, measure, b, w })
    }

    pub fn m_y(&self) -> usize {
        self.m_y
    }

    /// Spacing between consecutive evolution times.
    pub fn time_step(&self) -> f64 {
        self.time_step
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn b(&self, y: isize) -> Complex64 {
        self.b[(y + self.m_y as isize) as usize]
    }

    pub fn w(&self, k: isize) -> Complex64 {
        self.w[(k + 2 * self.m_y as isize) as usize]
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.b
    }

    pub fn kernel(&self) -> &[Complex64] {
        &self.w
    }

    /// Effective weight applied to an eigenvalue `λ`: `measure·Σ_y b_y e^{-iλ y τ}`.
    pub fn response(&self, lambda: f64) -> Complex64 {
        let m = self.m_y as isize;
        let sum: Complex64 = (-m..=m)
            .map(|y| self.b(y) * Complex64::from_polar(1.0, -lambda * y as f64 * self.time_step))
            .sum();
        sum * self.measure
    }
}

/// `b_y = (σ/2√π) e^{-(yΔσ)²/4} e^{iμyΔ}` for `y ∈ [-M_y, M_y]`.
pub fn gaussian_coefficients(p: &FilterParams) -> Result<CoefficientSet> {
    p.validate()?;
    let sigma = p.sigma();
    let pref = sigma / (2.0 * PI.sqrt());
    let m = p.m_y as isize;
    let b = (-m..=m)
        .map(|y| {
            let t = y as f64 * p.delta_y;
            Complex64::from_polar(pref * (-(t * sigma).powi(2) / 4.0).exp(), p.mu * t)
        })
        .collect();
    CoefficientSet::from_weights(b, p.delta_y, p.delta_y)
}

/// `g_{μ,σ}(λ) = Σ_y b_y e^{-iλyΔ} Δ`.
pub fn filter_response(p: &FilterParams, lambda: f64) -> Result<Complex64> {
    Ok(gaussian_coefficients(p)?.response(lambda))
}

/// Cosine filter `cos^{P}((H - E)/L)` with `P = L²/δ²`, expanded binomially:
/// `c_y = 2^{-P} C(P, P/2 - y)` attached to times `t_y = 2y/L` with phase
/// `e^{i2yE/L}`. Terms are kept for `|y| ≤ x·L/(2δ)`, clipped to the
/// binomial support `|y| ≤ P/2`; pass `f64::INFINITY` for the full expansion.
pub fn cosine_coefficients(big_l: f64, delta: f64, e_center: f64, x_trunc: f64) -> Result<CoefficientSet> {
    if !(big_l > 0.0 && delta > 0.0) {
        return Err(QgfError::invalid("L and delta must be positive"));
    }
    let ratio = (big_l / delta).powi(2);
    let power = ratio.round();
    if !power.is_finite() || power < 2.0 || power % 2.0 != 0.0 {
        return Err(QgfError::invalid(format!("L^2/delta^2 = {ratio} does not round to an even power >= 2")));
    }
    let power = power as u64;
    let half = (power / 2) as isize;
    let cut = if x_trunc.is_infinite() {
        half
    } else {
        if !(x_trunc >= 0.0) {
            return Err(QgfError::invalid("truncation x must be non-negative"));
        }
        ((x_trunc * big_l / (2.0 * delta)).floor() as isize).min(half)
    };
    let ln2p = power as f64 * std::f64::consts::LN_2;
    let b = (-cut..=cut)
        .map(|y| {
            let m = (half - y) as u64;
            let ln_c = ln_factorial(power) - ln_factorial(m) - ln_factorial(power - m) - ln2p;
            Complex64::from_polar(ln_c.exp(), 2.0 * y as f64 * e_center / big_l)
        })
        .collect();
    CoefficientSet::from_weights(b, 2.0 / big_l, 1.0)
}

/// Numerator, denominator and the resulting filtered expectation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilteredEstimate {
    pub value: f64,
    /// Imaginary part of the ratio; zero up to rounding for exact tables.
    pub imag_residue: f64,
    pub numerator: Complex64,
    pub denominator: Complex64,
}

/// Evaluates `Σ_k w_k N_k / Σ_k w_k D_k` over `k ∈ [-2M, 2M]`, using
/// `X_{-k} = conj(X_k)` for the unstored half of the table.
///
/// The filter's cutoff may be smaller than the table's; only the first
/// `2M + 1` entries are read.
pub fn evaluate(t: &OverlapTable, c: &CoefficientSet, rel_floor: f64) -> Result<FilteredEstimate> {
    let rel = 1e-9 * t.delta_y.abs().max(c.time_step());
    if (t.delta_y - c.time_step()).abs() > rel {
        return Err(QgfError::TableMismatch(format!(
            "table slice {} differs from filter time step {}",
            t.delta_y,
            c.time_step()
        )));
    }
    if c.m_y() > t.m_y {
        return Err(QgfError::TableMismatch(format!("filter cutoff {} exceeds table cutoff {}", c.m_y(), t.m_y)));
    }
    let kmax = 2 * c.m_y();
    let mut num = c.w(0) * t.n_h[0];
    let mut den = c.w(0) * t.d[0];
    for k in 1..=kmax {
        let (wp, wm) = (c.w(k as isize), c.w(-(k as isize)));
        num += wp * t.n_h[k] + wm * t.n_h[k].conj();
        den += wp * t.d[k] + wm * t.d[k].conj();
    }
    let scale: f64 = c.kernel().iter().map(|w| w.norm()).sum();
    let floor = rel_floor * scale;
    if !(den.norm() >= floor) || den.norm() == 0.0 {
        return Err(QgfError::DegenerateDenominator { magnitude: den.norm(), floor });
    }
    let ratio = num / den;
    Ok(FilteredEstimate { value: ratio.re, imag_residue: ratio.im, numerator: num, denominator: den })
}

/// Filtered energy `Re[Σ w_k N_k / Σ w_k D_k]` with the default floor.
pub fn estimate_energy(t: &OverlapTable, c: &CoefficientSet) -> Result<f64> {
    Ok(evaluate(t, c, DEFAULT_DENOMINATOR_FLOOR)?.value)
}

/// Same estimator for a table whose numerator entries come from an observable.
pub fn estimate_observable(t_a: &OverlapTable, c: &CoefficientSet) -> Result<f64> {
    estimate_energy(t_a, c)
}

/// Filtered `<A>` from two-time overlaps:
/// `Σ_{y,y'} b*_{y'} b_y M[y, y'] / Σ_k w_k D_k`, both sides carrying the
/// same measure². Unlike [`estimate_observable`] this is the expectation in
/// the filtered state even when `A` does not commute with `H`.
pub fn estimate_observable_two_time(m: &TwoTimeTable, t: &OverlapTable, c: &CoefficientSet) -> Result<f64> {
    if (m.delta_y - c.time_step()).abs() > 1e-9 * c.time_step() {
        return Err(QgfError::TableMismatch(format!(
            "two-time slice {} differs from filter time step {}",
            m.delta_y,
            c.time_step()
        )));
    }
    if c.m_y() > m.m_y {
        return Err(QgfError::TableMismatch(format!("filter cutoff {} exceeds two-time cutoff {}", c.m_y(), m.m_y)));
    }
    let den = evaluate(t, c, DEFAULT_DENOMINATOR_FLOOR)?.denominator;
    let my = c.m_y() as isize;
    let mut num = Complex64::new(0.0, 0.0);
    for y in -my..=my {
        for y2 in -my..=my {
            num += c.b(y2).conj() * c.b(y) * m.get(y, y2);
        }
    }
    Ok((num * c.measure() * c.measure() / den).re)
}
