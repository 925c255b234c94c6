//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Eigen-decomposition of a hermitian matrix, eigenvalues ascending.
pub fn eigh(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    // symmetrize so round-off in the input cannot leak into the decomposition
    let sym = (h + h.adjoint()) * c(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn eigvalsh(h: &CMat) -> Vec<f64> {
    eigh(h).0
}

/// `exp(i t H)` for hermitian `H`.
pub fn expi_hermitian(h: &CMat, t: f64) -> CMat {
    let (values, vectors) = eigh(h);
    let phases = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&e| Complex64::from_polar(1.0, t * e)),
    ));
    &vectors * phases * vectors.adjoint()
}

/// Largest absolute entry.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Spectral (operator 2-) norm.
pub fn op_norm(m: &CMat) -> f64 {
    m.clone().singular_values().iter().fold(0.0f64, |acc, &s| acc.max(s))
}

pub fn hermiticity_residual(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn unitarity_residual(u: &CMat) -> f64 {
    max_abs(&(u * u.adjoint() - identity(u.nrows())))
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Row-major flattening of a small matrix.
pub fn to_flat(m: &CMat) -> Vec<Complex64> {
    let (r, c) = m.shape();
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub fn from_flat(k: usize, data: &[Complex64]) -> CMat {
    CMat::from_row_slice(k, k, data)
}

/// `out += a * b` for row-major `k x k` blocks.
#[inline]
pub fn small_matmul_acc(k: usize, a: &[Complex64], b: &[Complex64], out: &mut [Complex64]) {
    for i in 0..k {
        for l in 0..k {
            let ail = a[i * k + l];
            if ail == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..k {
                out[i * k + j] += ail * b[l * k + j];
            }
        }
    }
}

pub fn small_matmul(k: usize, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); k * k];
    small_matmul_acc(k, a, b, &mut out);
    out
}

pub fn small_adjoint(k: usize, a: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); k * k];
    for i in 0..k {
        for j in 0..k {
            out[j * k + i] = a[i * k + j].conj();
        }
    }
    out
}
