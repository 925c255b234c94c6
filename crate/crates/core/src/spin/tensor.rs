//! Orthonormal spherical tensor operators `T_{lm}` on a spin-j space.
//!
//! `T_{lm}` only connects `|m'>` to `|m'+m>`, so it is stored as a single
//! shifted diagonal. Matrix elements come from Clebsch-Gordan coefficients
//! and are re-orthonormalized per `m` in the trace inner product.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use super::cg::{clebsch_gordan, installed_table, invalid};
use super::irrep::SpinIrrep;
use crate::error::Result;
use crate::linalg::{c, CMat};

/// Flat index of `(l, m)` in `l`-major order.
#[inline]
pub fn lm_index(l: usize, m: i64) -> usize {
    l * l + (l as i64 + m) as usize
}

/// Number of `(l, m)` pairs with `l <= lmax`.
#[inline]
pub fn lm_count(lmax: usize) -> usize {
    (lmax + 1) * (lmax + 1)
}

#[derive(Debug, Clone)]
pub struct TensorOperator {
    pub two_j: u32,
    pub l: usize,
    pub m: i64,
    /// Nonzero entries along the shifted diagonal, see [`TensorOperator::position`].
    pub diag: Vec<f64>,
}

impl TensorOperator {
    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    /// Matrix position of `diag[k]`.
    #[inline]
    pub fn position(&self, k: usize) -> (usize, usize) {
        if self.m >= 0 {
            (k, k + self.m as usize)
        } else {
            (k + (-self.m) as usize, k)
        }
    }

    pub fn matrix(&self) -> CMat {
        let d = self.dim();
        let mut out = CMat::zeros(d, d);
        for (k, &v) in self.diag.iter().enumerate() {
            out[self.position(k)] = c(v);
        }
        out
    }

    /// `tr(T^dagger A)`.
    pub fn overlap(&self, a: &CMat) -> Complex64 {
        self.diag
            .iter()
            .enumerate()
            .map(|(k, &v)| a[self.position(k)] * v)
            .sum()
    }
}

/// All tensor operators of one irrep up to some `lmax`, for `m >= 0`.
#[derive(Debug)]
pub struct TensorBasis {
    two_j: u32,
    lmax: usize,
    /// `columns[l][mu]`, entries `k = 0..d-mu` at positions `(k, k+mu)`.
    columns: Vec<Vec<Vec<f64>>>,
}

fn raw_column(two_j: u32, l: usize, mu: usize, table: Option<&super::cg::TensorCgTable>) -> Vec<f64> {
    let d = two_j as usize + 1;
    let norm = ((2 * l + 1) as f64 / d as f64).sqrt();
    if let Some(col) = table.and_then(|t| t.column(two_j, l, mu)) {
        return col.iter().map(|v| v * norm).collect();
    }
    // entry k: <j, m; l, mu | j, m + mu> with row k = index of m + mu, column a = k + mu
    (0..d - mu)
        .map(|k| {
            let a = k + mu;
            let two_m = two_j as i32 - 2 * a as i32;
            norm * clebsch_gordan(
                two_j as i32,
                two_m,
                2 * l as i32,
                2 * mu as i32,
                two_j as i32,
                two_m + 2 * mu as i32,
            )
        })
        .collect()
}

impl TensorBasis {
    fn compute(two_j: u32, lmax: usize) -> Self {
        use rayon::prelude::*;
        let table = installed_table();
        let d = two_j as usize + 1;
        let lmax = lmax.min(two_j as usize);
        // independent per mu: orthonormalize the l = mu..lmax columns in turn
        let per_mu: Vec<Vec<Vec<f64>>> = (0..=lmax)
            .into_par_iter()
            .map(|mu| {
                let mut done: Vec<Vec<f64>> = Vec::new();
                for l in mu..=lmax {
                    let mut v = raw_column(two_j, l, mu, table.as_deref());
                    for _ in 0..2 {
                        for u in &done {
                            let p: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                            v.iter_mut().zip(u).for_each(|(x, y)| *x -= p * y);
                        }
                    }
                    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    debug_assert!(n > 0.5, "tensor column collapsed: j2={two_j} l={l} mu={mu}");
                    v.iter_mut().for_each(|x| *x /= n);
                    done.push(v);
                }
                debug_assert!(done.iter().all(|v| v.len() == d - mu));
                done
            })
            .collect();
        let mut columns: Vec<Vec<Vec<f64>>> = (0..=lmax).map(|_| Vec::new()).collect();
        for (mu, cols) in per_mu.into_iter().enumerate() {
            for (i, v) in cols.into_iter().enumerate() {
                let l = mu + i;
                debug_assert_eq!(columns[l].len(), mu);
                columns[l].push(v);
            }
        }
        Self { two_j, lmax, columns }
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    /// Shifted-diagonal entries of `T_{l,|m|}` and the sign that turns them
    /// into `T_{lm}` through `T_{l,-mu} = (-1)^mu T_{l,mu}^T`.
    #[inline]
    pub fn entries(&self, l: usize, m: i64) -> (&[f64], f64) {
        let mu = m.unsigned_abs() as usize;
        let sign = if m < 0 && mu % 2 == 1 { -1.0 } else { 1.0 };
        (&self.columns[l][mu], sign)
    }

    pub fn get(&self, l: usize, m: i64) -> TensorOperator {
        let (col, sign) = self.entries(l, m);
        TensorOperator {
            two_j: self.two_j,
            l,
            m,
            diag: col.iter().map(|v| v * sign).collect(),
        }
    }

    /// `tr(T_{lm}^dagger A)` for a `d x d` matrix.
    pub fn overlap(&self, l: usize, m: i64, a: &CMat) -> Complex64 {
        let (col, sign) = self.entries(l, m);
        let mu = m.unsigned_abs() as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        if m >= 0 {
            for (k, &v) in col.iter().enumerate() {
                acc += a[(k, k + mu)] * v;
            }
        } else {
            for (k, &v) in col.iter().enumerate() {
                acc += a[(k + mu, k)] * v;
            }
        }
        acc * sign
    }

    /// `out += z * T_{lm}`.
    pub fn accumulate(&self, l: usize, m: i64, z: Complex64, out: &mut CMat) {
        let (col, sign) = self.entries(l, m);
        let mu = m.unsigned_abs() as usize;
        let z = z * sign;
        if m >= 0 {
            for (k, &v) in col.iter().enumerate() {
                out[(k, k + mu)] += z * v;
            }
        } else {
            for (k, &v) in col.iter().enumerate() {
                out[(k + mu, k)] += z * v;
            }
        }
    }
}

static CACHE: OnceLock<Mutex<HashMap<u32, Arc<TensorBasis>>>> = OnceLock::new();

/// Shared tensor basis of spin `two_j/2` covering at least `l <= lmax`.
pub fn tensor_basis(two_j: u32, lmax: usize) -> Arc<TensorBasis> {
    let lmax = lmax.min(two_j as usize);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().unwrap().get(&two_j) {
        if b.lmax >= lmax {
            return b.clone();
        }
    }
    // computed outside the lock; a racing thread may duplicate work, never results
    let fresh = Arc::new(TensorBasis::compute(two_j, lmax));
    let mut guard = cache.lock().unwrap();
    let entry = guard.entry(two_j).or_insert_with(|| fresh.clone());
    if entry.lmax < fresh.lmax {
        *entry = fresh;
    }
    entry.clone()
}

pub fn full_basis(two_j: u32) -> Arc<TensorBasis> {
    tensor_basis(two_j, two_j as usize)
}

pub fn tensor_operator(irrep: &SpinIrrep, l: usize, m: i64) -> Result<TensorOperator> {
    if l > irrep.two_j() as usize || m.unsigned_abs() as usize > l {
        return Err(invalid(format!(
            "tensor operator (l={l}, m={m}) outside 0 <= l <= {}, |m| <= l",
            irrep.two_j()
        )));
    }
    Ok(tensor_basis(irrep.two_j(), l).get(l, m))
}
