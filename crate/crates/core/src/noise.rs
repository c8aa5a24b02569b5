//! Noisy Hadamard tests on a density matrix, and zero-noise extrapolation.
//!
//! The test register is the system plus one ancilla placed on the most
//! significant bit. Controlled evolution is compiled into one- and two-qubit
//! gates:
//!
//! * weight-1 rotation `e^{-iθP}`: one ancilla-controlled single-qubit gate;
//! * longer strings: ancilla-controlled basis changes onto Z, a CNOT ladder
//!   collecting the parity on the last support qubit, an ancilla-controlled
//!   `e^{-iθZ}` there, then the ladder and basis changes undone.
//!
//! After every gate the channel acts on every qubit of the register,
//! ancilla included. The initial state is loaded noiselessly and the
//! identity offset of `H` is applied as a classical phase on the results.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QgfError, Result};
use crate::gates::{self, Mat2};
use crate::overlap::{OverlapTable, TableMode};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::state::StateVector;

/// Largest register (system plus ancilla) held as a density matrix.
pub const MAX_DM_QUBITS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    BitFlip,
    PhaseFlip,
}

/// Pauli channel with probability `p` per qubit per gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub channel: Channel,
    pub p: f64,
}

impl NoiseModel {
    pub fn new(channel: Channel, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(QgfError::invalid(format!("noise probability {p} outside [0, 1]")));
        }
        Ok(Self { channel, p })
    }

    /// Same channel with `p` multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.channel, self.p * c)
    }
}

/// `ρ` stored row-major, `data[r·2^n + c]`. Row bit `b` is flat bit `b + n`
/// and column bit `b` is flat bit `b`, so `UρU†` applies `U` on the row bits
/// and `conj(U)` on the column bits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_state(psi: &StateVector) -> Result<Self> {
        Self::pure(psi.n_qubits(), psi.amplitudes())
    }

    fn pure(n_qubits: usize, amps: &[Complex64]) -> Result<Self> {
        if n_qubits > MAX_DM_QUBITS {
            return Err(QgfError::ResourceLimit(format!(
                "density matrix limited to {MAX_DM_QUBITS} qubits, got {n_qubits}"
            )));
        }
        let dim = amps.len();
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = amps[r] * amps[c].conj();
            }
        }
        Ok(Self { n_qubits, data })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim() + c]
    }

    pub fn trace(&self) -> Complex64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i]).sum()
    }

    /// `max |ρ - ρ†|` over entries.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let dim = self.dim();
        let m = nalgebra::DMatrix::from_fn(dim, dim, |r, c| self.get(r, c));
        let herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Applies the channel to `qubit` (string position, 0 = leftmost).
    pub fn apply_channel(&mut self, m: &NoiseModel, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(QgfError::invalid(format!("qubit {qubit} outside a {}-qubit register", self.n_qubits)));
        }
        self.channel_bit(m, self.n_qubits - 1 - qubit);
        Ok(())
    }

    /// Applies a single-qubit unitary to `qubit` (string position).
    pub fn apply_unitary(&mut self, qubit: usize, u: &[[Complex64; 2]; 2]) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(QgfError::invalid(format!("qubit {qubit} outside a {}-qubit register", self.n_qubits)));
        }
        self.gate_bit(self.n_qubits - 1 - qubit, u);
        Ok(())
    }

    fn channel_bit(&mut self, m: &NoiseModel, bit: usize) {
        if m.p == 0.0 {
            return;
        }
        let n = self.n_qubits;
        match m.channel {
            Channel::BitFlip => {
                let mask = (1usize << (bit + n)) | (1usize << bit);
                let (keep, flip) = (1.0 - m.p, m.p);
                for i in 0..self.data.len() {
                    let j = i ^ mask;
                    if i < j {
                        let (a, b) = (self.data[i], self.data[j]);
                        self.data[i] = a * keep + b * flip;
                        self.data[j] = b * keep + a * flip;
                    }
                }
            }
            Channel::PhaseFlip => {
                let f = 1.0 - 2.0 * m.p;
                let (rm, cm) = (1usize << (bit + n), 1usize << bit);
                for (i, v) in self.data.iter_mut().enumerate() {
                    if ((i & rm) != 0) != ((i & cm) != 0) {
                        *v *= f;
                    }
                }
            }
        }
    }

    fn gate_bit(&mut self, bit: usize, u: &Mat2) {
        let n = self.n_qubits;
        gates::apply_1q(&mut self.data, bit + n, u);
        gates::apply_1q(&mut self.data, bit, &gates::conj(u));
    }

    fn controlled_bit(&mut self, control: usize, target: usize, u: &Mat2) {
        let n = self.n_qubits;
        gates::apply_controlled(&mut self.data, control + n, target + n, u);
        gates::apply_controlled(&mut self.data, control, target, &gates::conj(u));
    }

    /// `<Z>` on flat bit `bit`.
    fn z_expectation(&self, bit: usize) -> f64 {
        let dim = self.dim();
        (0..dim)
            .map(|r| {
                let v = self.data[r * dim + r].re;
                if r >> bit & 1 == 0 { v } else { -v }
            })
            .sum()
    }
}

// Hadamard-test register: system bits 0..n, ancilla at bit n.
struct TestCircuit<'a> {
    rho: DensityMatrix,
    noise: &'a NoiseModel,
    n_sys: usize,
}

impl TestCircuit<'_> {
    fn anc(&self) -> usize {
        self.n_sys
    }

    fn sys_bit(&self, q: usize) -> usize {
        self.n_sys - 1 - q
    }

    fn noise_all(&mut self) {
        for b in 0..=self.n_sys {
            self.rho.channel_bit(self.noise, b);
        }
    }

    fn gate(&mut self, bit: usize, u: &Mat2) {
        self.rho.gate_bit(bit, u);
        self.noise_all();
    }

    fn controlled(&mut self, control: usize, target: usize, u: &Mat2) {
        self.rho.controlled_bit(control, target, u);
        self.noise_all();
    }

    fn ccontrolled(&mut self, q: usize, u: &Mat2) {
        let (a, t) = (self.anc(), self.sys_bit(q));
        self.controlled(a, t, u);
    }

    fn controlled_rotation(&mut self, p: &PauliString, theta: f64) {
        let support = p.support();
        let ops = p.ops();
        if support.len() == 1 {
            let q = support[0];
            self.ccontrolled(q, &gates::exp_pauli(ops[q], theta));
            return;
        }
        for &q in &support {
            if let Some(b) = gates::to_z_basis(ops[q]) {
                self.ccontrolled(q, &b);
            }
        }
        for w in support.windows(2) {
            let (c, t) = (self.sys_bit(w[0]), self.sys_bit(w[1]));
            self.controlled(c, t, &gates::X);
        }
        let last = *support.last().expect("non-identity string");
        self.ccontrolled(last, &gates::exp_pauli(Pauli::Z, theta));
        for w in support.windows(2).rev() {
            let (c, t) = (self.sys_bit(w[0]), self.sys_bit(w[1]));
            self.controlled(c, t, &gates::X);
        }
        for &q in &support {
            if let Some(b) = gates::to_z_basis(ops[q]) {
                self.ccontrolled(q, &gates::adjoint(&b));
            }
        }
    }

    // Final Hadamard on the ancilla and its <Z>.
    fn close(mut self) -> f64 {
        let a = self.anc();
        self.gate(a, &gates::hadamard());
        self.rho.z_expectation(a)
    }
}

#[derive(Clone, Copy)]
enum Part {
    Re,
    Im,
}

// <Z_anc> for D_k and for every term of `a`, k = 0..=k_max, without the offset phase.
fn run_part(
    h: &PauliSum,
    a: &PauliSum,
    psi: &StateVector,
    delta_y: f64,
    k_max: usize,
    steps_per_slice: usize,
    noise: &NoiseModel,
    part: Part,
) -> Result<Vec<Vec<f64>>> {
    let n = psi.n_qubits();
    let mut amps = vec![Complex64::new(0.0, 0.0); 2 * psi.dim()];
    amps[..psi.dim()].copy_from_slice(psi.amplitudes());
    let mut circ = TestCircuit { rho: DensityMatrix::pure(n + 1, &amps)?, noise, n_sys: n };
    let prep = match part {
        Part::Re => gates::hadamard(),
        Part::Im => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            [[Complex64::new(s, 0.0), Complex64::new(0.0, -s)], [Complex64::new(0.0, -s), Complex64::new(s, 0.0)]]
        }
    };
    let anc = circ.anc();
    circ.gate(anc, &prep);
    let dt = delta_y / steps_per_slice as f64;
    let mut rows = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            for _ in 0..steps_per_slice {
                for (c, p) in h.terms() {
                    circ.controlled_rotation(p, c * dt);
                }
            }
        }
        let mut row = Vec::with_capacity(a.terms().len() + 1);
        let snap = TestCircuit { rho: circ.rho.clone(), noise, n_sys: n };
        row.push(snap.close());
        for (_, p) in a.terms() {
            let mut t = TestCircuit { rho: circ.rho.clone(), noise, n_sys: n };
            for q in p.support() {
                t.ccontrolled(q, &gates::pauli_matrix(p.ops()[q]));
            }
            row.push(t.close());
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Noisy `D_k` and `N_k = Σ_l c_l <ψ|P_l e^{-ikΔH}|ψ> + offset·D_k` for `k = 0..=k_max`.
pub(crate) fn noisy_entries(
    h: &PauliSum,
    a: &PauliSum,
    psi: &StateVector,
    delta_y: f64,
    k_max: usize,
    steps_per_slice: usize,
    noise: &NoiseModel,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    if steps_per_slice == 0 {
        return Err(QgfError::invalid("steps_per_slice must be >= 1"));
    }
    if psi.n_qubits() != h.n_qubits() || a.n_qubits() != h.n_qubits() {
        return Err(QgfError::DimensionMismatch { expected: h.n_qubits(), found: psi.n_qubits() });
    }
    if psi.n_qubits() + 1 > MAX_DM_QUBITS {
        return Err(QgfError::ResourceLimit(format!(
            "noisy Hadamard test needs {} qubits, limit is {MAX_DM_QUBITS}",
            psi.n_qubits() + 1
        )));
    }
    let (re, im) = rayon::join(
        || run_part(h, a, psi, delta_y, k_max, steps_per_slice, noise, Part::Re),
        || run_part(h, a, psi, delta_y, k_max, steps_per_slice, noise, Part::Im),
    );
    let (re, im) = (re?, im?);
    let mut d = Vec::with_capacity(k_max + 1);
    let mut n = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let phase = Complex64::from_polar(1.0, -h.identity_offset() * k as f64 * delta_y);
        let z = |i: usize| Complex64::new(re[k][i], im[k][i]) * phase;
        let dk = z(0);
        let mut nk = dk * a.identity_offset();
        for (l, (c, _)) in a.terms().iter().enumerate() {
            nk += z(l + 1) * *c;
        }
        d.push(dk);
        n.push(nk);
    }
    Ok((d, n))
}

/// Overlap table measured by noisy Hadamard-test circuits.
pub fn noisy_overlap_table(
    h: &PauliSum,
    psi: &StateVector,
    delta_y: f64,
    m_y: usize,
    steps_per_slice: usize,
    noise: &NoiseModel,
) -> Result<OverlapTable> {
    let (d, n_h) = noisy_entries(h, h, psi, delta_y, 2 * m_y, steps_per_slice, noise)?;
    Ok(OverlapTable {
        delta_y,
        m_y,
        mode: TableMode::Noisy { noise: *noise, steps_per_slice },
        shots_per_entry: vec![0; d.len()],
        d,
        n_h,
    })
}

/// Polynomial (Richardson) extrapolation of `values` measured at noise
/// `scales` down to scale zero; the degree is `scales.len() - 1`.
pub fn zne_extrapolate(scales: &[f64], values: &[f64]) -> Result<f64> {
    if scales.len() != values.len() {
        return Err(QgfError::invalid("scales and values differ in length"));
    }
    if scales.len() < 2 {
        return Err(QgfError::invalid("extrapolation needs at least two noise scales"));
    }
    for (i, a) in scales.iter().enumerate() {
        if scales[i + 1..].iter().any(|b| b == a) {
            return Err(QgfError::invalid(format!("duplicate noise scale {a}")));
        }
    }
    let mut acc = 0.0;
    for (i, (ci, vi)) in scales.iter().zip(values).enumerate() {
        let mut l = 1.0;
        for (j, cj) in scales.iter().enumerate() {
            if i != j {
                l *= cj / (cj - ci);
            }
        }
        acc += vi * l;
    }
    Ok(acc)
}

/// Entrywise extrapolation of tables measured at the given noise scales.
pub fn zne_table(scales: &[f64], tables: &[OverlapTable]) -> Result<OverlapTable> {
    let first = tables.first().ok_or_else(|| QgfError::invalid("no tables to extrapolate"))?;
    if tables.iter().any(|t| t.m_y != first.m_y || t.delta_y != first.delta_y) {
        return Err(QgfError::TableMismatch("tables differ in cutoff or slice".into()));
    }
    let mix = |pick: &dyn Fn(&OverlapTable) -> Complex64| -> Result<Complex64> {
        let re: Vec<f64> = tables.iter().map(|t| pick(t).re).collect();
        let im: Vec<f64> = tables.iter().map(|t| pick(t).im).collect();
        Ok(Complex64::new(zne_extrapolate(scales, &re)?, zne_extrapolate(scales, &im)?))
    };
    let mut out = first.clone();
    for k in 0..first.len() {
        out.d[k] = mix(&|t| t.d[k])?;
        out.n_h[k] = mix(&|t| t.n_h[k])?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ket(n: usize, b: usize) -> StateVector {
        StateVector::basis(n, b).unwrap()
    }

    #[test]
    fn zero_probability_is_identity() {
        let psi = crate::state::prepare_qaoa_random(2, 3).unwrap();
        let mut rho = DensityMatrix::from_state(&psi).unwrap();
        let before = rho.clone();
        for ch in [Channel::BitFlip, Channel::PhaseFlip] {
            rho.apply_channel(&NoiseModel::new(ch, 0.0).unwrap(), 1).unwrap();
        }
        assert_eq!(rho, before);
    }

    #[test]
    fn half_bit_flip_mixes_fully() {
        let mut rho = DensityMatrix::from_state(&ket(1, 0)).unwrap();
        rho.apply_channel(&NoiseModel::new(Channel::BitFlip, 0.5).unwrap(), 0).unwrap();
        assert!((rho.get(0, 0).re - 0.5).abs() < 1e-15 && (rho.get(1, 1).re - 0.5).abs() < 1e-15);
        assert_eq!(rho.get(0, 1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn phase_flip_scales_coherence() {
        let plus = StateVector::from_amplitudes(1, vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        let mut rho = DensityMatrix::from_state(&plus).unwrap();
        rho.apply_channel(&NoiseModel::new(Channel::PhaseFlip, 0.1).unwrap(), 0).unwrap();
        assert!((rho.get(0, 1).re - 0.5 * 0.8).abs() < 1e-15);
        assert!((rho.get(0, 0).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn channel_targets_the_named_qubit() {
        // |01>: flipping qubit 0 (leftmost) gives |11>
        let mut rho = DensityMatrix::from_state(&ket(2, 0b01)).unwrap();
        rho.apply_channel(&NoiseModel::new(Channel::BitFlip, 1.0).unwrap(), 0).unwrap();
        assert!((rho.get(0b11, 0b11).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn noise_model_validation() {
        assert!(NoiseModel::new(Channel::BitFlip, 1.5).is_err());
        assert!(NoiseModel::new(Channel::BitFlip, -0.1).is_err());
        assert!(NoiseModel::new(Channel::PhaseFlip, 0.6).unwrap().scaled(2.0).is_err());
    }

    #[test]
    fn extrapolation_examples() {
        assert!((zne_extrapolate(&[1.0, 2.0, 3.0], &[0.4, 0.4, 0.4]).unwrap() - 0.4).abs() < 1e-15);
        assert!((zne_extrapolate(&[1.0, 2.0], &[1.5 + 0.3, 1.5 + 0.6]).unwrap() - 1.5).abs() < 1e-14);
        let quad = |c: f64| 2.0 - c + 0.25 * c * c;
        let v = zne_extrapolate(&[1.0, 2.0, 3.0], &[quad(1.0), quad(2.0), quad(3.0)]).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        assert!(zne_extrapolate(&[1.0, 1.0], &[0.0, 1.0]).is_err());
        assert!(zne_extrapolate(&[1.0], &[0.0]).is_err());
    }

    #[test]
    fn register_budget() {
        let psi = StateVector::zero(MAX_DM_QUBITS).unwrap();
        let h = PauliSum::identity(MAX_DM_QUBITS).unwrap();
        let m = NoiseModel::new(Channel::BitFlip, 0.0).unwrap();
        assert!(matches!(noisy_overlap_table(&h, &psi, 0.1, 0, 1, &m), Err(QgfError::ResourceLimit(_))));
    }
}
