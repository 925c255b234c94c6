//! Stratonovich-Weyl kernel with quantization and dequantization.
//! Spin-coherent lower symbols live here too.
//!
//! The kernel is `Delta(n) = sqrt(4 pi / d) sum_{lm} conj(Y_lm(n)) T_lm`.
//! Integrals against it reduce to coefficient identities, so quantization
//! and dequantization never touch a grid:
//! `quantize(f) = sqrt(d / 4 pi) sum f_lm T_lm` and
//! `dequantize(A)_lm = sqrt(4 pi / d) tr(T_lm^dagger A)`.
//! Grid samples of the kernel exist only to check its defining properties.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{c, hermiticity_residual, max_abs, CMat};
use crate::sphere::{legendre_table, plm_index, Grid, SphereSymbol};
use crate::spin::{
    adjoint_rotation, clebsch_gordan, coherent_state_angles, full_basis, lm_count, rotate, wigner_zyz, SpinIrrep,
    TensorBasis,
};

pub const PROPERTY_TOLERANCE: f64 = 1e-10;
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;

/// Residuals of the five defining kernel properties.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct KernelResiduals {
    pub hermiticity: f64,
    pub normalization: f64,
    pub reproducing: f64,
    pub trace_duality: f64,
    pub covariance: f64,
}

impl KernelResiduals {
    pub fn max(&self) -> f64 {
        [
            self.hermiticity,
            self.normalization,
            self.reproducing,
            self.trace_duality,
            self.covariance,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct SwKernel {
    irrep: SpinIrrep,
    basis: Arc<TensorBasis>,
    grid: Option<Arc<Grid>>,
    samples: Vec<CMat>,
    residuals: Option<KernelResiduals>,
}

impl SwKernel {
    /// Kernel without grid samples; quantize and dequantize only.
    pub fn spectral(two_j: u32) -> Self {
        Self {
            irrep: SpinIrrep::new(two_j),
            basis: full_basis(two_j),
            grid: None,
            samples: Vec::new(),
            residuals: None,
        }
    }

    pub fn two_j(&self) -> u32 {
        self.irrep.two_j()
    }

    pub fn dim(&self) -> usize {
        self.irrep.dim()
    }

    pub fn irrep(&self) -> &SpinIrrep {
        &self.irrep
    }

    pub fn basis(&self) -> &TensorBasis {
        &self.basis
    }

    pub fn samples(&self) -> &[CMat] {
        &self.samples
    }

    pub fn grid(&self) -> Option<&Grid> {
        self.grid.as_deref()
    }

    pub fn residuals(&self) -> Option<KernelResiduals> {
        self.residuals
    }

    /// `Delta(n)` at spherical angles.
    pub fn evaluate(&self, theta: f64, phi: f64) -> CMat {
        kernel_at(&self.basis, theta, phi)
    }

    pub fn quantize(&self, f: &SphereSymbol) -> CMat {
        quantize_with(&self.basis, f)
    }

    pub fn dequantize(&self, a: &CMat) -> SphereSymbol {
        dequantize_with(&self.basis, a)
    }

    /// Quantization by quadrature against the sampled kernel,
    /// `(d / 4 pi) sum_i w_i f(n_i) Delta(n_i)`; scalar symbols only.
    pub fn quantize_by_quadrature(&self, f: &SphereSymbol) -> Result<CMat> {
        let grid = self
            .grid
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("kernel has no grid samples".into()))?;
        if f.lmax() + self.two_j() as usize > grid.l_exact() {
            return Err(Error::InsufficientGrid {
                needed: f.lmax() + self.two_j() as usize,
                available: grid.l_exact(),
            });
        }
        let field = f.synthesize(grid)?;
        let d = self.dim();
        let mut out = CMat::zeros(d, d);
        for (node, delta) in self.samples.iter().enumerate() {
            out += delta * (field.samples[node] * grid.weight(node));
        }
        Ok(out * c(d as f64 / (4.0 * PI)))
    }

    /// `n -> tr(Delta(n) A)` sampled at the grid nodes.
    pub fn dequantize_by_quadrature(&self, a: &CMat) -> Vec<Complex64> {
        self.samples.iter().map(|delta| trace_product(delta, a)).collect()
    }
}

fn trace_product(a: &CMat, b: &CMat) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..n {
        for k in 0..n {
            acc += a[(r, k)] * b[(k, r)];
        }
    }
    acc
}

fn kernel_at(basis: &TensorBasis, theta: f64, phi: f64) -> CMat {
    let two_j = basis.two_j() as usize;
    let d = basis.dim();
    let p = legendre_table(two_j, theta.cos(), theta.sin());
    let mut out = CMat::zeros(d, d);
    let s = (4.0 * PI / d as f64).sqrt();
    for l in 0..=two_j {
        for m in -(l as i64)..=l as i64 {
            let mu = m.unsigned_abs() as usize;
            let sign = if m < 0 && mu % 2 == 1 { -1.0 } else { 1.0 };
            // conj(Y_lm) = sign P_l|m| e^{-i m phi}
            let y = Complex64::from_polar(p[plm_index(l, mu)] * sign * s, -(m as f64) * phi);
            basis.accumulate(l, m, y, &mut out);
        }
    }
    out
}

fn quantize_with(basis: &TensorBasis, f: &SphereSymbol) -> CMat {
    let d = basis.dim();
    let k = f.k();
    let lmax = f.lmax().min(basis.two_j() as usize);
    let s = (d as f64 / (4.0 * PI)).sqrt();
    let mut out = CMat::zeros(d * k, d * k);
    for l in 0..=lmax {
        for m in -(l as i64)..=l as i64 {
            let block = f.coeff(l, m);
            if block.iter().all(|z| z.norm() == 0.0) {
                continue;
            }
            let (col, sign) = basis.entries(l, m);
            let mu = m.unsigned_abs() as usize;
            for (kk, &v) in col.iter().enumerate() {
                let (r, cc) = if m >= 0 { (kk, kk + mu) } else { (kk + mu, kk) };
                let w = v * sign * s;
                for a in 0..k {
                    for b in 0..k {
                        out[(r * k + a, cc * k + b)] += block[a * k + b] * w;
                    }
                }
            }
        }
    }
    out
}

fn dequantize_with(basis: &TensorBasis, a: &CMat) -> SphereSymbol {
    let d = basis.dim();
    assert_eq!(a.nrows() % d, 0, "operator dimension is not a multiple of d_j");
    let k = a.nrows() / d;
    let lmax = basis.two_j() as usize;
    let s = (4.0 * PI / d as f64).sqrt();
    let coeffs: Vec<Complex64> = (0..lm_count(lmax))
        .into_par_iter()
        .flat_map_iter(|idx| {
            let l = (idx as f64).sqrt() as usize;
            let l = if (l + 1) * (l + 1) <= idx { l + 1 } else { l };
            let m = idx as i64 - (l * l + l) as i64;
            let (col, sign) = basis.entries(l, m);
            let mu = m.unsigned_abs() as usize;
            let mut block = vec![Complex64::new(0.0, 0.0); k * k];
            for (kk, &v) in col.iter().enumerate() {
                let (r, cc) = if m >= 0 { (kk, kk + mu) } else { (kk + mu, kk) };
                let w = v * sign * s;
                for x in 0..k {
                    for y in 0..k {
                        block[x * k + y] += a[(r * k + x, cc * k + y)] * w;
                    }
                }
            }
            block
        })
        .collect();
    SphereSymbol::from_coeffs(lmax, k, coeffs)
}

pub fn quantize(f: &SphereSymbol, kernel: &SwKernel) -> CMat {
    kernel.quantize(f)
}

pub fn dequantize(a: &CMat, kernel: &SwKernel) -> SphereSymbol {
    kernel.dequantize(a)
}

fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMat {
    let m = CMat::from_fn(d, d, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&m + m.adjoint()) * c(0.5)
}

/// Samples the kernel on `grid` and asserts its defining properties.
///
/// The grid must integrate degree `2 two_j + 2` exactly. Property checks
/// use a fixed internal seed, so construction is deterministic.
pub fn build_kernel(irrep: &SpinIrrep, grid: Arc<Grid>) -> Result<SwKernel> {
    let two_j = irrep.two_j();
    let needed = 2 * two_j as usize + 2;
    if grid.l_exact() < needed {
        return Err(Error::InsufficientGrid {
            needed,
            available: grid.l_exact(),
        });
    }
    let basis = full_basis(two_j);
    let samples: Vec<CMat> = (0..grid.len())
        .into_par_iter()
        .map(|node| {
            let (t, p) = grid.angles(node);
            kernel_at(&basis, t, p)
        })
        .collect();
    let mut kernel = SwKernel {
        irrep: irrep.clone(),
        basis,
        grid: Some(grid),
        samples,
        residuals: None,
    };
    let residuals = kernel_residuals(&kernel, 20, 0x5eed)?;
    let checks = [
        ("hermiticity", residuals.hermiticity, HERMITICITY_TOLERANCE),
        ("normalization", residuals.normalization, PROPERTY_TOLERANCE),
        ("reproducing", residuals.reproducing, PROPERTY_TOLERANCE),
        ("trace duality", residuals.trace_duality, PROPERTY_TOLERANCE),
        ("covariance", residuals.covariance, PROPERTY_TOLERANCE),
    ];
    for (property, residual, tol) in checks {
        if !(residual < tol) {
            return Err(Error::KernelProperty {
                property,
                two_j,
                residual,
            });
        }
    }
    kernel.residuals = Some(residuals);
    Ok(kernel)
}

/// Residuals of kernel properties (a)-(e) on the kernel's grid.
///
/// `trials` random hermitian pairs enter trace duality and `trials` random
/// group elements enter covariance.
pub fn kernel_residuals(kernel: &SwKernel, trials: usize, seed: u64) -> Result<KernelResiduals> {
    let grid = kernel
        .grid
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("kernel has no grid samples".into()))?;
    let d = kernel.dim();
    let pref = d as f64 / (4.0 * PI);
    let samples = &kernel.samples;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let hermiticity = samples.iter().map(hermiticity_residual).fold(0.0, f64::max);

    let mut total = CMat::zeros(d, d);
    for (node, delta) in samples.iter().enumerate() {
        total += delta * c(grid.weight(node));
    }
    let normalization = max_abs(&(total * c(pref) - CMat::identity(d, d)));

    // (c) on a spread of nodes
    let stride = (grid.len() / 24).max(1);
    let probes: Vec<usize> = (0..grid.len()).step_by(stride).collect();
    let reproducing = probes
        .par_iter()
        .map(|&n| {
            let dn = &samples[n];
            let mut acc = CMat::zeros(d, d);
            for (m, dm) in samples.iter().enumerate() {
                acc += dm * (trace_product(dm, dn) * grid.weight(m));
            }
            max_abs(&(acc * c(pref) - dn))
        })
        .reduce(|| 0.0, f64::max);

    let mut trace_duality = 0.0f64;
    for _ in 0..trials {
        let a = random_hermitian(&mut rng, d);
        let b = random_hermitian(&mut rng, d);
        let sa = kernel.dequantize_by_quadrature(&a);
        let sb = kernel.dequantize_by_quadrature(&b);
        let integral: Complex64 = sa
            .iter()
            .zip(&sb)
            .enumerate()
            .map(|(i, (x, y))| x * y * grid.weight(i))
            .sum();
        let exact = trace_product(&a, &b);
        trace_duality = trace_duality.max((integral * pref - exact).norm());
    }

    let mut covariance = 0.0f64;
    for _ in 0..trials {
        let (alpha, beta, gamma) = (
            rng.random_range(0.0..2.0 * PI),
            rng.random_range(0.0..PI),
            rng.random_range(0.0..2.0 * PI),
        );
        let u = wigner_zyz(&kernel.irrep, alpha, beta, gamma);
        let r = adjoint_rotation(&kernel.irrep, &u);
        for &node in probes.iter().take(6) {
            let n = grid.point(node);
            let lhs = &u * &samples[node] * u.adjoint();
            let (t, p) = crate::spin::angles(rotate(&r, n));
            covariance = covariance.max(max_abs(&(lhs - kernel.evaluate(t, p))));
        }
    }

    Ok(KernelResiduals {
        hermiticity,
        normalization,
        reproducing,
        trace_duality,
        covariance,
    })
}

/// `<zeta_e3| T_l0 |zeta_e3> sqrt(4 pi / (2l+1))`: the lower symbol of
/// `T_lm` is this factor times `Y_lm`.
pub fn lower_factors(two_j: u32) -> Vec<f64> {
    let d = two_j as usize + 1;
    (0..=two_j as usize)
        .map(|l| {
            let t = ((2 * l + 1) as f64 / d as f64).sqrt()
                * clebsch_gordan(two_j as i32, two_j as i32, 2 * l as i32, 0, two_j as i32, two_j as i32);
            t * (4.0 * PI / (2 * l + 1) as f64).sqrt()
        })
        .collect()
}

/// Lower (covariant) symbol `n -> <zeta_n| A |zeta_n>`, computed through
/// the tensor expansion of `A`. Operator-valued `A` on `H_j (x) H_s` gives
/// the partial expectation.
pub fn lower_symbol(a: &CMat, two_j: u32) -> SphereSymbol {
    let d = two_j as usize + 1;
    let w = lower_factors(two_j);
    let sw = dequantize_with(&full_basis(two_j), a);
    let s = (d as f64 / (4.0 * PI)).sqrt();
    sw.map_l(|l| w[l] * s)
}

/// Lower symbol evaluated directly from coherent states at grid nodes.
pub fn lower_symbol_on_grid(a: &CMat, irrep: &SpinIrrep, grid: &Grid) -> Vec<Complex64> {
    let d = irrep.dim();
    (0..grid.len())
        .into_par_iter()
        .map(|node| {
            let (t, p) = grid.angles(node);
            let v = coherent_state_angles(irrep.two_j(), t, p);
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..d {
                for k in 0..d {
                    acc += v[r].conj() * a[(r, k)] * v[k];
                }
            }
            acc
        })
        .collect()
}

/// The unique operator whose lower symbol is `f`; fails when `f` has
/// components beyond `l = 2j`.
pub fn operator_from_lower(f: &SphereSymbol, two_j: u32, tol: f64) -> Result<CMat> {
    let lcut = two_j as usize;
    if f.tail_above(lcut) > tol {
        let l = f.effective_lmax(tol);
        return Err(Error::OutsideLowerRange { l, max_l: lcut });
    }
    let d = two_j as usize + 1;
    let w = lower_factors(two_j);
    let s = (d as f64 / (4.0 * PI)).sqrt();
    let sw = f.with_lmax(lcut.min(f.lmax())).map_l(|l| 1.0 / (w[l] * s));
    Ok(quantize_with(&full_basis(two_j), &sw))
}

/// Condition number of the lower-symbol map on `B(H_j)` with
/// Hilbert-Schmidt and `L^2` norms.
pub fn lower_condition_number(two_j: u32) -> f64 {
    let w = lower_factors(two_j);
    let hi = w.iter().cloned().fold(0.0, f64::max);
    let lo = w.iter().cloned().fold(f64::INFINITY, f64::min);
    hi / lo
}
