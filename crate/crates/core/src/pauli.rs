//! Pauli strings and real-weighted Pauli sums.
//!
//! A [`PauliSum`] stores `H = Σ_l c_l P_l + offset·I`. The identity part is
//! kept apart from the terms so that a spectrum shift is a single addition
//! and Trotter circuits never see it.
//!
//! Qubit `q` of a string (position `q`, left to right) maps to bit
//! `n - 1 - q` of a basis-state index, so `"ZI"` acts on the most
//! significant bit and strings read like kets.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QgfError, Result};
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A tensor product of single-qubit Paulis, one symbol per qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    ops: Vec<Pauli>,
}

/// Bit-level action of a Pauli string: `P|b> = phase(b) |b ^ x>`.
#[derive(Debug, Clone, Copy)]
pub struct PauliMask {
    pub x: usize,
    pub z: usize,
    /// `i^(number of Y factors)`.
    pub y_phase: Complex64,
}

impl PauliMask {
    #[inline]
    pub fn act(&self, b: usize) -> (usize, Complex64) {
        let sign = if (b & self.z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        (b ^ self.x, self.y_phase * sign)
    }

    /// True when the string has an even number of Y factors, i.e. a real matrix.
    pub fn is_real(&self) -> bool {
        self.y_phase.im == 0.0
    }
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Result<Self> {
        if ops.is_empty() {
            return Err(QgfError::invalid("Pauli string needs at least one qubit"));
        }
        Ok(Self { ops })
    }

    pub fn identity(n: usize) -> Self {
        Self { ops: vec![Pauli::I; n.max(1)] }
    }

    /// String with the given single-qubit Paulis placed at `sites`, identity elsewhere.
    pub fn from_sites(n: usize, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut ops = vec![Pauli::I; n];
        for &(q, p) in sites {
            if q >= n {
                return Err(QgfError::invalid(format!("site {q} outside register of {n} qubits")));
            }
            ops[q] = p;
        }
        Self::new(ops)
    }

    pub fn n_qubits(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&p| p == Pauli::I)
    }

    /// Positions carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, _)| q)
            .collect()
    }

    pub fn mask(&self) -> PauliMask {
        let n = self.ops.len();
        let mut x = 0usize;
        let mut z = 0usize;
        let mut ny = 0u32;
        for (q, &p) in self.ops.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Z => z |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
            }
        }
        let y_phase = match ny % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        PauliMask { x, z, y_phase }
    }

    /// `P|psi>` on raw amplitudes.
    pub fn apply_amplitudes(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mask = self.mask();
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (b, &a) in amps.iter().enumerate() {
            let (t, ph) = mask.act(b);
            out[t] = ph * a;
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.ops {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = QgfError;

    fn from_str(s: &str) -> Result<Self> {
        let ops = s
            .trim()
            .chars()
            .map(|c| {
                Pauli::from_symbol(c).ok_or_else(|| QgfError::invalid(format!("bad Pauli symbol {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ops)
    }
}

/// `Σ_l c_l P_l + identity_offset · I` with real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
    identity_offset: f64,
}

impl PauliSum {
    /// Builds a sum, merging duplicate strings in first-appearance order,
    /// folding all-identity strings into the offset and dropping zero terms.
    pub fn new(
        n_qubits: usize,
        terms: impl IntoIterator<Item = (f64, PauliString)>,
        identity_offset: f64,
    ) -> Result<Self> {
        if n_qubits == 0 {
            return Err(QgfError::invalid("register needs at least one qubit"));
        }
        if !identity_offset.is_finite() {
            return Err(QgfError::invalid("identity offset must be finite"));
        }
        let mut offset = identity_offset;
        let mut merged: Vec<(f64, PauliString)> = Vec::new();
        for (c, s) in terms {
            if !c.is_finite() {
                return Err(QgfError::invalid(format!("non-finite coefficient on {s}")));
            }
            if s.n_qubits() != n_qubits {
                return Err(QgfError::DimensionMismatch { expected: n_qubits, found: s.n_qubits() });
            }
            if s.is_identity() {
                offset += c;
                continue;
            }
            match merged.iter_mut().find(|(_, t)| *t == s) {
                Some((acc, _)) => *acc += c,
                None => merged.push((c, s)),
            }
        }
        merged.retain(|(c, _)| *c != 0.0);
        Ok(Self { n_qubits, terms: merged, identity_offset: offset })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    /// Non-identity terms, in their fixed (Trotter) order.
    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn identity_offset(&self) -> f64 {
        self.identity_offset
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, std::iter::empty(), 1.0)
    }

    /// True when every term has an even number of Y factors.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, s)| s.mask().is_real())
    }

    /// `H + e_shift·I`. Eigenvectors are unchanged.
    pub fn shift_spectrum(&self, e_shift: f64) -> Self {
        let mut out = self.clone();
        out.identity_offset += e_shift;
        out
    }

    /// `H|psi>` including the identity offset. The result is not normalized.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.n_qubits() != self.n_qubits {
            return Err(QgfError::DimensionMismatch { expected: self.n_qubits, found: psi.n_qubits() });
        }
        let amps = psi.amplitudes();
        let mut out: Vec<Complex64> = amps.iter().map(|a| a * self.identity_offset).collect();
        for (c, s) in &self.terms {
            let mask = s.mask();
            for (b, &a) in amps.iter().enumerate() {
                let (t, ph) = mask.act(b);
                out[t] += ph * a * *c;
            }
        }
        StateVector::from_amplitudes_unchecked(self.n_qubits, out)
    }

    /// `<psi|H|psi>` for a normalized state.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        let hpsi = self.apply(psi)?;
        Ok(psi.inner(&hpsi).re)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        let mut m = DMatrix::<Complex64>::identity(dim, dim) * Complex64::new(self.identity_offset, 0.0);
        for (c, s) in &self.terms {
            let mask = s.mask();
            for b in 0..dim {
                let (t, ph) = mask.act(b);
                m[(t, b)] += ph * *c;
            }
        }
        m
    }

    /// Real dense matrix; only meaningful when [`PauliSum::is_real`] holds.
    pub fn to_dense_real(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut m = DMatrix::<f64>::identity(dim, dim) * self.identity_offset;
        for (c, s) in &self.terms {
            let mask = s.mask();
            for b in 0..dim {
                let (t, ph) = mask.act(b);
                m[(t, b)] += ph.re * c;
            }
        }
        m
    }

    /// Text form: a header `n=<int> offset=<real>` then `coefficient<TAB>string` per term.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={} offset={}\n", self.n_qubits, self.identity_offset);
        for (c, s) in &self.terms {
            out.push_str(&format!("{c:?}\t{s}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(QgfError::Parse { line: 1, msg: "missing header".into() })?;
        let mut n = None;
        let mut offset = None;
        for field in header.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| QgfError::Parse { line: hline, msg: format!("bad header field {field:?}") })?;
            let bad = |msg: String| QgfError::Parse { line: hline, msg };
            match k {
                "n" => n = Some(v.parse::<usize>().map_err(|e| bad(format!("n: {e}")))?),
                "offset" => offset = Some(v.parse::<f64>().map_err(|e| bad(format!("offset: {e}")))?),
                _ => return Err(bad(format!("unknown header key {k:?}"))),
            }
        }
        let n = n.ok_or(QgfError::Parse { line: hline, msg: "header lacks n=".into() })?;
        let offset = offset.unwrap_or(0.0);
        let mut terms = Vec::new();
        for (line, l) in lines {
            let mut parts = l.split_whitespace();
            let (Some(c), Some(s), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(QgfError::Parse { line, msg: "expected `coefficient<TAB>string`".into() });
            };
            let c: f64 = c.parse().map_err(|e| QgfError::Parse { line, msg: format!("coefficient: {e}") })?;
            let s: PauliString = s.parse().map_err(|e| QgfError::Parse { line, msg: format!("{e}") })?;
            if s.n_qubits() != n {
                return Err(QgfError::Parse { line, msg: format!("string length {} != n={n}", s.n_qubits()) });
            }
            terms.push((c, s));
        }
        Self::new(n, terms, offset)
    }
}

/// Transverse-field Ising chain `-J Σ Z_n Z_{n+1} + g Σ X_n`.
///
/// Terms come out as the ZZ bonds in site order followed by the X fields in
/// site order. For a periodic chain of two sites both bonds are the same
/// string and merge into a single `-2J ZZ` term.
pub fn build_tfim(n: usize, j: f64, g: f64, periodic: bool) -> Result<PauliSum> {
    if n < 1 {
        return Err(QgfError::invalid("TFIM needs n >= 1"));
    }
    if periodic && n < 2 {
        return Err(QgfError::invalid("periodic TFIM needs n >= 2"));
    }
    let bonds = if periodic { n } else { n - 1 };
    let mut terms = Vec::with_capacity(bonds + n);
    for site in 0..bonds {
        let next = (site + 1) % n;
        terms.push((-j, PauliString::from_sites(n, &[(site, Pauli::Z), (next, Pauli::Z)])?));
    }
    for site in 0..n {
        terms.push((g, PauliString::from_sites(n, &[(site, Pauli::X)])?));
    }
    PauliSum::new(n, terms, 0.0)
}

/// `Σ_n Z_n Z_{n+1}` on a ring (the QAOA mixing-free cost term).
pub fn zz_ring(n: usize) -> Result<PauliSum> {
    build_tfim(n, -1.0, 0.0, true)
}

/// `Σ_n X_n`.
pub fn x_field(n: usize) -> Result<PauliSum> {
    let terms = (0..n)
        .map(|q| PauliString::from_sites(n, &[(q, Pauli::X)]).map(|s| (1.0, s)))
        .collect::<Result<Vec<_>>>()?;
    PauliSum::new(n, terms, 0.0)
}
