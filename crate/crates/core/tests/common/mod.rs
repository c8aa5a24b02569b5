//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the library's own linear algebra.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use qgf_core::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli(s: char) -> DMatrix<Complex64> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match s {
        'I' => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("bad symbol {s}"),
    }
}

/// Kronecker product of single-site matrices, leftmost symbol first.
pub fn dense_string(s: &str) -> DMatrix<Complex64> {
    s.chars().map(pauli).reduce(|a, b| a.kronecker(&b)).unwrap()
}

pub fn dense_sum(n: usize, terms: &[(f64, String)], offset: f64) -> DMatrix<Complex64> {
    let dim = 1 << n;
    let mut m = DMatrix::identity(dim, dim) * c(offset, 0.0);
    for (coef, s) in terms {
        m += dense_string(s) * c(*coef, 0.0);
    }
    m
}

fn site_string(n: usize, sites: &[(usize, char)]) -> String {
    (0..n).map(|q| sites.iter().find(|(s, _)| *s == q).map(|(_, p)| *p).unwrap_or('I')).collect()
}

/// `-J Σ Z_i Z_{i+1} + g Σ X_i` built term by term.
pub fn dense_tfim(n: usize, j: f64, g: f64, periodic: bool, shift: f64) -> DMatrix<Complex64> {
    let mut terms = Vec::new();
    let bonds = if periodic { n } else { n - 1 };
    for i in 0..bonds {
        terms.push((-j, site_string(n, &[(i, 'Z'), ((i + 1) % n, 'Z')])));
    }
    for i in 0..n {
        terms.push((g, site_string(n, &[(i, 'X')])));
    }
    dense_sum(n, &terms, shift)
}

pub fn x_sum(n: usize) -> DMatrix<Complex64> {
    let terms: Vec<_> = (0..n).map(|i| (1.0, site_string(n, &[(i, 'X')]))).collect();
    dense_sum(n, &terms, 0.0)
}

/// Eigenvalues ascending with matching eigenvector columns.
pub fn eigh(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    (vals, eig.eigenvectors.select_columns(order.iter()))
}

/// `e^{-iHt}` by scaling and squaring of a Taylor series.
pub fn expm_minus_i(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let a = h * c(0.0, -t);
    let norm = a.iter().map(|x| x.norm()).fold(0.0, f64::max) * a.nrows() as f64;
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let a = a / c(2f64.powi(squarings as i32), 0.0);
    let dim = a.nrows();
    let mut out = DMatrix::<Complex64>::identity(dim, dim);
    let mut term = DMatrix::<Complex64>::identity(dim, dim);
    for k in 1..30 {
        term = &term * &a / c(k as f64, 0.0);
        out += &term;
    }
    for _ in 0..squarings {
        out = &out * &out;
    }
    out
}

pub fn vector(amps: &[Complex64]) -> DVector<Complex64> {
    DVector::from_column_slice(amps)
}

/// `(σ/2√π) e^{-(yΔσ)²/4} e^{iμyΔ}`.
pub fn gaussian_b(mu: f64, inv_sigma_sq: f64, dy: f64, y: i64) -> Complex64 {
    let sigma = (1.0 / inv_sigma_sq).sqrt();
    let t = y as f64 * dy;
    Complex64::from_polar(sigma / (2.0 * PI.sqrt()) * (-(t * sigma).powi(2) / 4.0).exp(), mu * t)
}

/// `Δ Σ_{|y|≤M} b_y e^{-iλyΔ}`.
pub fn gaussian_g(mu: f64, inv_sigma_sq: f64, dy: f64, m: i64, lambda: f64) -> Complex64 {
    (-m..=m)
        .map(|y| gaussian_b(mu, inv_sigma_sq, dy, y) * Complex64::from_polar(dy, -lambda * y as f64 * dy))
        .sum()
}

/// `Σ_j |a_j|²|g(λ_j)|² λ_j / Σ_j |a_j|²|g(λ_j)|²`.
pub fn eigenbasis_energy(
    vals: &[f64],
    vecs: &DMatrix<Complex64>,
    psi: &[Complex64],
    (mu, inv_sigma_sq, dy, m): (f64, f64, f64, i64),
) -> f64 {
    let a = vecs.adjoint() * vector(psi);
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, l) in vals.iter().enumerate() {
        let w = a[j].norm_sqr() * gaussian_g(mu, inv_sigma_sq, dy, m, *l).norm_sqr();
        num += w * l;
        den += w;
    }
    num / den
}

pub fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
