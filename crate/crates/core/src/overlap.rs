//! Overlap tables `D_k = <ψ|e^{-ikΔH}|ψ>` and `N_k = <ψ|A e^{-ikΔH}|ψ>`.
//!
//! Only `k = 0..=2M` is stored; the negative half follows by conjugation.
//! Tables come from one of three measurement models: exact expectation
//! values, shot-sampled Hadamard tests, or the noisy density-matrix circuit
//! in [`crate::noise`]. Evolution is either exact (eigenbasis) or Trotterized.

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QgfError, Result};
use crate::evolution::{apply_offset_phase, trotter_step};
use crate::noise::{self, NoiseModel};
use crate::pauli::PauliSum;
use crate::spectrum::{diagonalize, Spectrum};
use crate::state::StateVector;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// How `e^{-ikΔH}` is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evolver {
    Exact,
    Trotter { steps_per_slice: usize },
}

/// Shots per Hadamard-test part (real or imaginary), uniform or per `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShotPlan {
    Uniform(u64),
    PerEntry(Vec<u64>),
}

impl ShotPlan {
    fn shots(&self, k: usize) -> Result<u64> {
        let s = match self {
            ShotPlan::Uniform(s) => *s,
            ShotPlan::PerEntry(v) => *v
                .get(k)
                .ok_or_else(|| QgfError::invalid(format!("shot schedule has no entry for k = {k}")))?,
        };
        if s == 0 {
            return Err(QgfError::invalid("shot count must be >= 1"));
        }
        Ok(s)
    }
}

/// Measurement model recorded with every table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TableMode {
    Exact { evolver: Evolver },
    Sampled { evolver: Evolver, shots: ShotPlan, seed: u64 },
    Noisy { noise: NoiseModel, steps_per_slice: usize },
}

impl TableMode {
    pub fn exact() -> Self {
        TableMode::Exact { evolver: Evolver::Exact }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapTable {
    pub delta_y: f64,
    pub m_y: usize,
    pub mode: TableMode,
    pub d: Vec<Complex64>,
    pub n_h: Vec<Complex64>,
    /// Shots spent on each part of entry `k` (0 when nothing was sampled).
    pub shots_per_entry: Vec<u64>,
}

impl OverlapTable {
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// `D_k` for any sign of `k`.
    pub fn d_at(&self, k: isize) -> Complex64 {
        let v = self.d[k.unsigned_abs()];
        if k < 0 { v.conj() } else { v }
    }

    pub fn n_at(&self, k: isize) -> Complex64 {
        let v = self.n_h[k.unsigned_abs()];
        if k < 0 { v.conj() } else { v }
    }

    /// The first `2m + 1` entries as a table with cutoff `m`.
    pub fn truncated(&self, m: usize) -> Result<OverlapTable> {
        if m > self.m_y {
            return Err(QgfError::TableMismatch(format!("cannot truncate cutoff {} up to {m}", self.m_y)));
        }
        let len = 2 * m + 1;
        Ok(OverlapTable {
            delta_y: self.delta_y,
            m_y: m,
            mode: self.mode.clone(),
            d: self.d[..len].to_vec(),
            n_h: self.n_h[..len].to_vec(),
            shots_per_entry: self.shots_per_entry[..len].to_vec(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: OverlapTable = serde_json::from_str(s)?;
        let len = 2 * t.m_y + 1;
        if t.d.len() != len || t.n_h.len() != len || t.shots_per_entry.len() != len {
            return Err(QgfError::TableMismatch(format!("table with cutoff {} needs {len} entries", t.m_y)));
        }
        Ok(t)
    }
}

/// Inputs shared by every table of one experiment: the Hamiltonian, the
/// initial state and the operator in the numerator (the Hamiltonian unless
/// replaced). The eigendecomposition is computed once, on first need.
#[derive(Debug)]
pub struct OverlapProblem {
    h: PauliSum,
    a: Option<PauliSum>,
    psi: StateVector,
    spectrum: OnceLock<Spectrum>,
}

impl OverlapProblem {
    pub fn new(h: PauliSum, psi: StateVector) -> Result<Self> {
        if psi.n_qubits() != h.n_qubits() {
            return Err(QgfError::DimensionMismatch { expected: h.n_qubits(), found: psi.n_qubits() });
        }
        if (psi.norm() - 1.0).abs() > 1e-8 {
            return Err(QgfError::invalid("initial state must be normalized"));
        }
        Ok(Self { h, a: None, psi, spectrum: OnceLock::new() })
    }

    /// Replaces `H` in the numerator by the observable `a`.
    pub fn with_observable(mut self, a: PauliSum) -> Result<Self> {
        if a.n_qubits() != self.h.n_qubits() {
            return Err(QgfError::DimensionMismatch { expected: self.h.n_qubits(), found: a.n_qubits() });
        }
        self.a = Some(a);
        Ok(self)
    }

    /// Supplies an already computed eigendecomposition of `H`.
    pub fn with_spectrum(self, spec: Spectrum) -> Result<Self> {
        if spec.dim() != self.h.dim() {
            return Err(QgfError::DimensionMismatch { expected: self.h.dim(), found: spec.dim() });
        }
        let _ = self.spectrum.set(spec);
        Ok(self)
    }

    pub fn hamiltonian(&self) -> &PauliSum {
        &self.h
    }

    pub fn observable(&self) -> &PauliSum {
        self.a.as_ref().unwrap_or(&self.h)
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.psi
    }

    pub fn spectrum(&self) -> Result<&Spectrum> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let s = diagonalize(&self.h)?;
        Ok(self.spectrum.get_or_init(|| s))
    }

    pub fn compute(&self, delta_y: f64, m_y: usize, mode: &TableMode) -> Result<OverlapTable> {
        if !(delta_y > 0.0 && delta_y.is_finite()) {
            return Err(QgfError::invalid("delta_y must be positive"));
        }
        let (d, n_h, shots) = self.entries(delta_y, 0, 2 * m_y, mode)?;
        Ok(OverlapTable { delta_y, m_y, mode: mode.clone(), d, n_h, shots_per_entry: shots })
    }

    /// Grows `t` to cutoff `new_m_y`. Existing entries are kept as they are;
    /// only `k ∈ (2M, 2M']` is computed.
    pub fn extend(&self, t: &OverlapTable, new_m_y: usize) -> Result<OverlapTable> {
        if new_m_y < t.m_y {
            return Err(QgfError::TableMismatch(format!("cannot shrink cutoff {} to {new_m_y}", t.m_y)));
        }
        if new_m_y == t.m_y {
            return Ok(t.clone());
        }
        let (d, n_h, shots) = self.entries(t.delta_y, 2 * t.m_y + 1, 2 * new_m_y, &t.mode)?;
        let mut out = t.clone();
        out.m_y = new_m_y;
        out.d.extend(d);
        out.n_h.extend(n_h);
        out.shots_per_entry.extend(shots);
        Ok(out)
    }

    /// As [`OverlapProblem::extend`], but first checks that `t` was built
    /// with the given slice and mode.
    pub fn extend_checked(&self, t: &OverlapTable, new_m_y: usize, delta_y: f64, mode: &TableMode) -> Result<OverlapTable> {
        if t.delta_y != delta_y {
            return Err(QgfError::TableMismatch(format!("table slice {} differs from {delta_y}", t.delta_y)));
        }
        if &t.mode != mode {
            return Err(QgfError::TableMismatch("table mode differs from the requested mode".into()));
        }
        self.extend(t, new_m_y)
    }

    // Entries for k in [k_lo, k_hi].
    fn entries(
        &self,
        delta_y: f64,
        k_lo: usize,
        k_hi: usize,
        mode: &TableMode,
    ) -> Result<(Vec<Complex64>, Vec<Complex64>, Vec<u64>)> {
        if k_lo > k_hi {
            return Ok((vec![], vec![], vec![]));
        }
        match mode {
            TableMode::Exact { evolver: Evolver::Exact } => {
                let (d, n) = self.exact_entries(delta_y, k_lo, k_hi)?;
                let len = d.len();
                Ok((d, n, vec![0; len]))
            }
            TableMode::Exact { evolver } => {
                let mut d = Vec::with_capacity(k_hi - k_lo + 1);
                let mut n = Vec::with_capacity(k_hi - k_lo + 1);
                let a_psi = self.observable().apply(&self.psi)?;
                self.walk(delta_y, *evolver, k_lo, k_hi, |_, phi| {
                    d.push(self.psi.inner(phi));
                    n.push(a_psi.inner(phi));
                    Ok(())
                })?;
                let len = d.len();
                Ok((d, n, vec![0; len]))
            }
            TableMode::Sampled { evolver, shots, seed } => self.sampled_entries(delta_y, *evolver, shots, *seed, k_lo, k_hi),
            TableMode::Noisy { noise: model, steps_per_slice } => {
                let (d, n) = noise::noisy_entries(&self.h, self.observable(), &self.psi, delta_y, k_hi, *steps_per_slice, model)?;
                Ok((d[k_lo..].to_vec(), n[k_lo..].to_vec(), vec![0; k_hi - k_lo + 1]))
            }
        }
    }

    fn exact_entries(&self, delta_y: f64, k_lo: usize, k_hi: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let spec = self.spectrum()?;
        let a = spec.coefficients(&self.psi)?;
        // c_j = <λ_j|A ψ>; for A = H this is λ_j a_j
        let c = match &self.a {
            None => a.iter().zip(spec.eigenvalues()).map(|(x, l)| x * l).collect::<Vec<_>>(),
            Some(op) => spec.coefficients(&op.apply(&self.psi)?)?,
        };
        let weights_d: Vec<f64> = a.iter().map(|x| x.norm_sqr()).collect();
        let weights_n: Vec<Complex64> = a.iter().zip(&c).map(|(x, y)| y.conj() * x).collect();
        let lambdas = spec.eigenvalues();
        let pairs: Vec<(Complex64, Complex64)> = (k_lo..=k_hi)
            .into_par_iter()
            .map(|k| {
                if k == 0 {
                    return (Complex64::new(1.0, 0.0), weights_n.iter().sum());
                }
                let t = k as f64 * delta_y;
                let mut d = ZERO;
                let mut n = ZERO;
                for j in 0..lambdas.len() {
                    let ph = Complex64::from_polar(1.0, -lambdas[j] * t);
                    d += ph * weights_d[j];
                    n += ph * weights_n[j];
                }
                (d, n)
            })
            .collect();
        Ok(pairs.into_iter().unzip())
    }

    // Visits e^{-ikΔH}ψ for k = 0..=k_hi, calling `f` from k_lo on. The
    // Trotter path advances one slice at a time with a fixed step size.
    fn walk<F>(&self, delta_y: f64, evolver: Evolver, k_lo: usize, k_hi: usize, mut f: F) -> Result<()>
    where
        F: FnMut(usize, &StateVector) -> Result<()>,
    {
        match evolver {
            Evolver::Exact => {
                let spec = self.spectrum()?;
                let a = spec.coefficients(&self.psi)?;
                for k in k_lo..=k_hi {
                    let t = k as f64 * delta_y;
                    let phased: Vec<Complex64> = a
                        .iter()
                        .zip(spec.eigenvalues())
                        .map(|(x, l)| x * Complex64::from_polar(1.0, -l * t))
                        .collect();
                    f(k, &spec.synthesize(&phased)?)?;
                }
            }
            Evolver::Trotter { steps_per_slice } => {
                if steps_per_slice == 0 {
                    return Err(QgfError::invalid("steps_per_slice must be >= 1"));
                }
                let dt = delta_y / steps_per_slice as f64;
                let mut phi = self.psi.clone();
                for k in 0..=k_hi {
                    if k > 0 {
                        for _ in 0..steps_per_slice {
                            trotter_step(&self.h, dt, &mut phi);
                        }
                        apply_offset_phase(&self.h, delta_y, &mut phi);
                    }
                    if k >= k_lo {
                        f(k, &phi)?;
                    }
                }
            }
        }
        Ok(())
    }

    // Per-term Hadamard tests: D_k and <ψ|P_l e^{-ikΔH}|ψ> are sampled
    // separately and N_k = Σ c_l est_l + offset·est(D_k).
    fn sampled_entries(
        &self,
        delta_y: f64,
        evolver: Evolver,
        plan: &ShotPlan,
        seed: u64,
        k_lo: usize,
        k_hi: usize,
    ) -> Result<(Vec<Complex64>, Vec<Complex64>, Vec<u64>)> {
        let a = self.observable();
        let term_states: Vec<StateVector> = a
            .terms()
            .iter()
            .map(|(_, p)| StateVector::from_amplitudes_unchecked(self.psi.n_qubits(), p.apply_amplitudes(self.psi.amplitudes())))
            .collect::<Result<_>>()?;
        // true values per k: [D_k, T_{0,k}, T_{1,k}, ...]
        let mut truth: Vec<Vec<Complex64>> = Vec::with_capacity(k_hi - k_lo + 1);
        self.walk(delta_y, evolver, k_lo, k_hi, |_, phi| {
            let mut row = Vec::with_capacity(term_states.len() + 1);
            row.push(self.psi.inner(phi));
            row.extend(term_states.iter().map(|s| s.inner(phi)));
            truth.push(row);
            Ok(())
        })?;
        let shots: Vec<u64> = (k_lo..=k_hi).map(|k| plan.shots(k)).collect::<Result<_>>()?;
        let out: Vec<(Complex64, Complex64)> = truth
            .par_iter()
            .zip(&shots)
            .enumerate()
            .map(|(i, (row, &s))| {
                let k = (k_lo + i) as u64;
                // at k = 0 no evolution happens: D_0 = 1 and every term value is real
                let d = if k == 0 { Complex64::new(1.0, 0.0) } else { sample_hadamard_test(row[0], s, entry_seed(seed, k, 0)) };
                let mut n = d * a.identity_offset();
                for (l, ((c, _), v)) in a.terms().iter().zip(&row[1..]).enumerate() {
                    let mut est = sample_hadamard_test(*v, s, entry_seed(seed, k, l as u64 + 1));
                    if k == 0 {
                        est.im = 0.0;
                    }
                    n += *c * est;
                }
                (d, n)
            })
            .collect();
        let (d, n) = out.into_iter().unzip();
        Ok((d, n, shots))
    }
}

/// Exact-or-Trotter table for `A = H`.
pub fn compute_table(h: &PauliSum, psi: &StateVector, delta_y: f64, m_y: usize, mode: &TableMode) -> Result<OverlapTable> {
    OverlapProblem::new(h.clone(), psi.clone())?.compute(delta_y, m_y, mode)
}

/// Table whose numerator holds `<ψ|A e^{-ikΔH}|ψ>`.
pub fn observable_table(
    a: &PauliSum,
    h: &PauliSum,
    psi: &StateVector,
    delta_y: f64,
    m_y: usize,
    mode: &TableMode,
) -> Result<OverlapTable> {
    OverlapProblem::new(h.clone(), psi.clone())?.with_observable(a.clone())?.compute(delta_y, m_y, mode)
}

/// Extends a table built from `(h, psi)` with [`compute_table`].
pub fn extend_table(t: &OverlapTable, new_m_y: usize, h: &PauliSum, psi: &StateVector) -> Result<OverlapTable> {
    OverlapProblem::new(h.clone(), psi.clone())?.extend(t, new_m_y)
}

/// One Hadamard-test estimate of `value`: the real part from `shots` ancilla
/// outcomes with `P(0) = (1 + Re)/2`, the imaginary part from another
/// `shots` outcomes with `P(0) = (1 + Im)/2`.
pub fn sample_hadamard_test(value: Complex64, shots: u64, seed: u64) -> Complex64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut part = |x: f64| {
        let p = ((1.0 + x) / 2.0).clamp(0.0, 1.0);
        let zeros = Binomial::new(shots, p).expect("probability clamped to [0, 1]").sample(&mut rng);
        2.0 * zeros as f64 / shots as f64 - 1.0
    };
    let re = part(value.re);
    let im = part(value.im);
    Complex64::new(re, im)
}

/// Seed for entry `k`, part `part`, independent of evaluation order.
pub fn entry_seed(seed: u64, k: u64, part: u64) -> u64 {
    let mut z = seed ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ part.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Two-time overlaps `M[y, y'] = <ψ|e^{iy'ΔH} A e^{-iyΔH}|ψ>` for
/// `y, y' ∈ [-M, M]`, computed exactly. With them the filtered expectation
/// of an `A` that does not commute with `H` can be post-processed.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoTimeTable {
    pub delta_y: f64,
    pub m_y: usize,
    /// Row-major, index `(y + M)·(2M+1) + (y' + M)`.
    pub entries: Vec<Complex64>,
}

impl TwoTimeTable {
    pub fn get(&self, y: isize, y2: isize) -> Complex64 {
        let w = 2 * self.m_y + 1;
        let m = self.m_y as isize;
        self.entries[(y + m) as usize * w + (y2 + m) as usize]
    }
}

pub fn two_time_table(problem: &OverlapProblem, delta_y: f64, m_y: usize) -> Result<TwoTimeTable> {
    let spec = problem.spectrum()?;
    let a = spec.coefficients(problem.initial_state())?;
    let m = m_y as isize;
    let states: Vec<StateVector> = (-m..=m)
        .map(|y| {
            let t = y as f64 * delta_y;
            let phased: Vec<Complex64> =
                a.iter().zip(spec.eigenvalues()).map(|(x, l)| x * Complex64::from_polar(1.0, -l * t)).collect();
            spec.synthesize(&phased)
        })
        .collect::<Result<_>>()?;
    let op = problem.observable();
    let a_states: Vec<StateVector> = states.iter().map(|s| op.apply(s)).collect::<Result<_>>()?;
    let w = states.len();
    let entries: Vec<Complex64> = (0..w * w)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / w, idx % w);
            states[j].inner(&a_states[i])
        })
        .collect();
    Ok(TwoTimeTable { delta_y, m_y, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{build_tfim, PauliString};
    use crate::state::prepare_qaoa_random;

    fn plus() -> StateVector {
        StateVector::from_amplitudes(1, vec![Complex64::new(1.0, 0.0); 2]).unwrap()
    }

    #[test]
    fn two_level_by_hand() {
        let h = PauliSum::new(1, [(1.0, "Z".parse::<PauliString>().unwrap())], 0.0).unwrap();
        let t = compute_table(&h, &plus(), 0.1, 1, &TableMode::exact()).unwrap();
        assert!((t.d[1] - Complex64::new(0.1f64.cos(), 0.0)).norm() < 1e-15);
        assert!((t.n_h[1] - Complex64::new(0.0, -0.1f64.sin())).norm() < 1e-15);
        assert_eq!(t.d[0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn negative_index_is_conjugate() {
        let h = build_tfim(3, 1.0, 0.7, true).unwrap();
        let psi = prepare_qaoa_random(3, 2).unwrap();
        let t = compute_table(&h, &psi, 0.2, 3, &TableMode::exact()).unwrap();
        assert_eq!(t.len(), 7);
        assert_eq!(t.d_at(-2), t.d[2].conj());
        assert_eq!(t.n_at(-5), t.n_h[5].conj());
    }

    #[test]
    fn hadamard_test_edge_values() {
        assert_eq!(sample_hadamard_test(Complex64::new(1.0, 0.0), 17, 3).re, 1.0);
        assert_eq!(sample_hadamard_test(Complex64::new(-1.0, 1.0), 5, 3), Complex64::new(-1.0, 1.0));
        let a = sample_hadamard_test(Complex64::new(0.2, -0.4), 1000, 9);
        assert_eq!(a, sample_hadamard_test(Complex64::new(0.2, -0.4), 1000, 9));
    }

    #[test]
    fn seeds_differ_across_entries_and_parts() {
        let s = [entry_seed(1, 0, 0), entry_seed(1, 1, 0), entry_seed(1, 0, 1), entry_seed(2, 0, 0)];
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                assert_ne!(s[i], s[j]);
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let h = build_tfim(2, 1.0, 1.0, true).unwrap();
        let psi = prepare_qaoa_random(2, 0).unwrap();
        let mode = TableMode::Sampled { evolver: Evolver::Exact, shots: ShotPlan::Uniform(100), seed: 4 };
        let t = compute_table(&h, &psi, 0.3, 2, &mode).unwrap();
        let back = OverlapTable::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back, t);
        let mut broken = t.clone();
        broken.d.pop();
        assert!(OverlapTable::from_json(&serde_json::to_string(&broken).unwrap()).is_err());
    }

    #[test]
    fn extend_rejects_shrink_and_mismatch() {
        let h = build_tfim(2, 1.0, 1.0, true).unwrap();
        let psi = prepare_qaoa_random(2, 0).unwrap();
        let p = OverlapProblem::new(h, psi).unwrap();
        let t = p.compute(0.1, 3, &TableMode::exact()).unwrap();
        assert!(p.extend(&t, 2).is_err());
        assert!(p.extend_checked(&t, 5, 0.2, &TableMode::exact()).is_err());
        let other = TableMode::Exact { evolver: Evolver::Trotter { steps_per_slice: 3 } };
        assert!(p.extend_checked(&t, 5, 0.1, &other).is_err());
        assert_eq!(p.extend(&t, 3).unwrap(), t);
    }
}
