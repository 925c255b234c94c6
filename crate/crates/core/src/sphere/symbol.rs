use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::Grid;
use super::harmonics::{legendre_table, plm_index};
use crate::error::{Error, Result};
use crate::linalg::{c, CMat};
use crate::spin::{lm_count, lm_index};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[inline]
fn parity(m: i64) -> f64 {
    if m.rem_euclid(2) == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Band-limited function on the sphere with values in `k x k` matrices.
///
/// Coefficients are stored `(l, m)`-major, each one a row-major `k x k`
/// block: `f(n) = sum_{l <= lmax} sum_m a_lm Y_lm(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSymbol {
    lmax: usize,
    k: usize,
    coeffs: Vec<Complex64>,
}

/// Samples of a matrix-valued function at the nodes of a grid.
#[derive(Debug, Clone)]
pub struct GridField {
    pub k: usize,
    /// Node-major, each node a row-major `k x k` block.
    pub samples: Vec<Complex64>,
}

impl GridField {
    pub fn at(&self, node: usize) -> &[Complex64] {
        let kk = self.k * self.k;
        &self.samples[node * kk..(node + 1) * kk]
    }

    pub fn matrix_at(&self, node: usize) -> CMat {
        CMat::from_row_slice(self.k, self.k, self.at(node))
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |a, z| a.max(z.norm()))
    }
}

impl SphereSymbol {
    pub fn zeros(lmax: usize, k: usize) -> Self {
        Self {
            lmax,
            k,
            coeffs: vec![ZERO; lm_count(lmax) * k * k],
        }
    }

    pub fn from_coeffs(lmax: usize, k: usize, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), lm_count(lmax) * k * k, "coefficient length mismatch");
        Self { lmax, k, coeffs }
    }

    /// Constant matrix-valued symbol.
    pub fn constant(value: &CMat) -> Self {
        let k = value.nrows();
        let mut out = Self::zeros(0, k);
        let s = (4.0 * PI).sqrt();
        for r in 0..k {
            for col in 0..k {
                out.coeffs[r * k + col] = value[(r, col)] * s;
            }
        }
        out
    }

    pub fn scalar_constant(z: Complex64) -> Self {
        Self::from_coeffs(0, 1, vec![z * (4.0 * PI).sqrt()])
    }

    /// Single spherical harmonic `Y_lm`.
    pub fn harmonic(l: usize, m: i64) -> Self {
        let mut out = Self::zeros(l, 1);
        out.coeffs[lm_index(l, m)] = c(1.0);
        out
    }

    /// Cartesian coordinate function `n_a`, `a in {0, 1, 2}`.
    pub fn coordinate(a: usize) -> Self {
        let mut out = Self::zeros(1, 1);
        let s = (2.0 * PI / 3.0).sqrt();
        match a {
            0 => {
                out.coeffs[lm_index(1, -1)] = c(s);
                out.coeffs[lm_index(1, 1)] = c(-s);
            }
            1 => {
                out.coeffs[lm_index(1, -1)] = Complex64::new(0.0, s);
                out.coeffs[lm_index(1, 1)] = Complex64::new(0.0, s);
            }
            2 => out.coeffs[lm_index(1, 0)] = c((4.0 * PI / 3.0).sqrt()),
            _ => panic!("coordinate index {a} out of range"),
        }
        out
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_scalar(&self) -> bool {
        self.k == 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, l: usize, m: i64) -> &[Complex64] {
        let kk = self.k * self.k;
        let i = lm_index(l, m);
        &self.coeffs[i * kk..(i + 1) * kk]
    }

    pub fn coeff_mut(&mut self, l: usize, m: i64) -> &mut [Complex64] {
        let kk = self.k * self.k;
        let i = lm_index(l, m);
        &mut self.coeffs[i * kk..(i + 1) * kk]
    }

    /// Coefficient of a scalar symbol; zero outside the band limit.
    pub fn scalar_coeff(&self, l: usize, m: i64) -> Complex64 {
        assert!(self.is_scalar());
        if l > self.lmax {
            ZERO
        } else {
            self.coeffs[lm_index(l, m)]
        }
    }

    pub fn coeff_matrix(&self, l: usize, m: i64) -> CMat {
        CMat::from_row_slice(self.k, self.k, self.coeff(l, m))
    }

    /// Truncated or zero-padded copy with band limit `lmax`.
    pub fn with_lmax(&self, lmax: usize) -> Self {
        let kk = self.k * self.k;
        let mut out = Self::zeros(lmax, self.k);
        let n = lm_count(lmax.min(self.lmax)) * kk;
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        out
    }

    /// Smallest band limit that keeps every coefficient above `tol`.
    pub fn effective_lmax(&self, tol: f64) -> usize {
        let kk = self.k * self.k;
        (0..=self.lmax)
            .rev()
            .find(|&l| {
                let lo = lm_count(l) - (2 * l + 1);
                self.coeffs[lo * kk..lm_count(l) * kk].iter().any(|z| z.norm() > tol)
            })
            .unwrap_or(0)
    }

    /// Largest coefficient magnitude among components with `l > lcut`.
    pub fn tail_above(&self, lcut: usize) -> f64 {
        if lcut >= self.lmax {
            return 0.0;
        }
        let kk = self.k * self.k;
        self.coeffs[lm_count(lcut) * kk..]
            .iter()
            .fold(0.0, |a, z| a.max(z.norm()))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.k, other.k, "matrix size mismatch");
        let lmax = self.lmax.max(other.lmax);
        let a = self.with_lmax(lmax);
        let b = other.with_lmax(lmax);
        Self {
            lmax,
            k: self.k,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| f(*x, *y)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            lmax: self.lmax,
            k: self.k,
            coeffs: self.coeffs.iter().map(|x| x * z).collect(),
        }
    }

    pub fn scale_re(&self, x: f64) -> Self {
        self.scale(c(x))
    }

    /// Coefficient-wise multiplier depending on `l` only.
    pub fn map_l(&self, f: impl Fn(usize) -> f64) -> Self {
        let kk = self.k * self.k;
        let mut out = self.clone();
        for l in 0..=self.lmax {
            let s = f(l);
            let lo = l * l * kk;
            let hi = (l + 1) * (l + 1) * kk;
            out.coeffs[lo..hi].iter_mut().for_each(|z| *z *= s);
        }
        out
    }

    /// Scalar symbol times a constant matrix.
    pub fn times_matrix(&self, m: &CMat) -> Self {
        assert!(self.is_scalar());
        let k = m.nrows();
        let mut out = Self::zeros(self.lmax, k);
        for (i, z) in self.coeffs.iter().enumerate() {
            for r in 0..k {
                for col in 0..k {
                    out.coeffs[i * k * k + r * k + col] = z * m[(r, col)];
                }
            }
        }
        out
    }

    fn blockwise(&self, f: impl Fn(&CMat) -> CMat, k_out: usize) -> Self {
        let kk = self.k * self.k;
        let mut out = Self::zeros(self.lmax, k_out);
        for i in 0..lm_count(self.lmax) {
            let block = CMat::from_row_slice(self.k, self.k, &self.coeffs[i * kk..(i + 1) * kk]);
            let r = f(&block);
            for a in 0..k_out {
                for b in 0..k_out {
                    out.coeffs[i * k_out * k_out + a * k_out + b] = r[(a, b)];
                }
            }
        }
        out
    }

    /// Pointwise `M f(n)`.
    pub fn left_mul(&self, m: &CMat) -> Self {
        self.blockwise(|b| m * b, m.nrows())
    }

    /// Pointwise `f(n) M`.
    pub fn right_mul(&self, m: &CMat) -> Self {
        self.blockwise(|b| b * m, m.ncols())
    }

    /// Pointwise trace.
    pub fn trace(&self) -> Self {
        let k = self.k;
        let kk = k * k;
        let coeffs = (0..lm_count(self.lmax))
            .map(|i| (0..k).map(|r| self.coeffs[i * kk + r * k + r]).sum())
            .collect();
        Self::from_coeffs(self.lmax, 1, coeffs)
    }

    pub fn component(&self, r: usize, col: usize) -> Self {
        let kk = self.k * self.k;
        let coeffs = (0..lm_count(self.lmax))
            .map(|i| self.coeffs[i * kk + r * self.k + col])
            .collect();
        Self::from_coeffs(self.lmax, 1, coeffs)
    }

    /// Pointwise conjugate transpose: `b_lm = (-1)^m a_{l,-m}^dagger`.
    pub fn adjoint(&self) -> Self {
        let k = self.k;
        let mut out = Self::zeros(self.lmax, k);
        for l in 0..=self.lmax {
            for m in -(l as i64)..=l as i64 {
                let src = self.coeff(l, -m).to_vec();
                let s = parity(m);
                let dst = out.coeff_mut(l, m);
                for r in 0..k {
                    for col in 0..k {
                        dst[r * k + col] = src[col * k + r].conj() * s;
                    }
                }
            }
        }
        out
    }

    /// Largest coefficient violation of `f(n)^dagger = f(n)`.
    pub fn hermiticity_residual(&self) -> f64 {
        let adj = self.adjoint();
        self.coeffs
            .iter()
            .zip(&adj.coeffs)
            .fold(0.0, |a, (x, y)| a.max((x - y).norm()))
    }

    /// `(f + f^dagger)/2`.
    pub fn hermitian_part(&self) -> Self {
        self.add(&self.adjoint()).scale_re(0.5)
    }

    /// `integral f d^2 n` over the total-`4 pi` measure.
    pub fn integrate(&self) -> CMat {
        CMat::from_row_slice(self.k, self.k, self.coeff(0, 0)) * c((4.0 * PI).sqrt())
    }

    pub fn integrate_scalar(&self) -> Complex64 {
        self.scalar_coeff(0, 0) * (4.0 * PI).sqrt()
    }

    /// `sum |a_lm|^2`, equal to `integral tr(f^dagger f)` by Parseval.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    /// Value at `(theta, phi)` as a `k x k` matrix.
    pub fn evaluate(&self, theta: f64, phi: f64) -> CMat {
        let kk = self.k * self.k;
        let p = legendre_table(self.lmax, theta.cos(), theta.sin());
        let mut acc = vec![ZERO; kk];
        for l in 0..=self.lmax {
            for m in -(l as i64)..=l as i64 {
                let mu = m.unsigned_abs() as usize;
                let y = Complex64::from_polar(
                    p[plm_index(l, mu)] * if m < 0 { parity(m) } else { 1.0 },
                    m as f64 * phi,
                );
                let block = self.coeff(l, m);
                acc.iter_mut().zip(block).for_each(|(a, b)| *a += b * y);
            }
        }
        CMat::from_row_slice(self.k, self.k, &acc)
    }

    pub fn evaluate_scalar(&self, theta: f64, phi: f64) -> Complex64 {
        self.evaluate(theta, phi)[(0, 0)]
    }

    /// Samples at every grid node; the grid must carry Legendre values up
    /// to `lmax`.
    pub fn synthesize(&self, grid: &Grid) -> Result<GridField> {
        if self.lmax > grid.l_exact() {
            return Err(Error::InsufficientGrid {
                needed: self.lmax,
                available: grid.l_exact(),
            });
        }
        let k = self.k;
        let kk = k * k;
        let lmax = self.lmax as i64;
        let n_phi = grid.n_phi();
        let phases = phase_table(grid, self.lmax, 1.0);
        let rings: Vec<Vec<Complex64>> = (0..grid.n_theta())
            .into_par_iter()
            .map(|ring| {
                let leg = grid.legendre_ring(ring);
                // g_m = sum_l a_lm P_l|m|
                let mut g = vec![ZERO; (2 * lmax as usize + 1) * kk];
                for m in -lmax..=lmax {
                    let mu = m.unsigned_abs() as usize;
                    let sgn = if m < 0 { parity(m) } else { 1.0 };
                    let gm = &mut g[(m + lmax) as usize * kk..(m + lmax + 1) as usize * kk];
                    for l in mu..=self.lmax {
                        let p = leg[plm_index(l, mu)] * sgn;
                        let i = lm_index(l, m);
                        for (dst, src) in gm.iter_mut().zip(&self.coeffs[i * kk..(i + 1) * kk]) {
                            *dst += src * p;
                        }
                    }
                }
                let mut out = vec![ZERO; n_phi * kk];
                for kph in 0..n_phi {
                    let row = &phases[kph * (2 * lmax as usize + 1)..(kph + 1) * (2 * lmax as usize + 1)];
                    let dst = &mut out[kph * kk..(kph + 1) * kk];
                    for (mi, e) in row.iter().enumerate() {
                        let gm = &g[mi * kk..(mi + 1) * kk];
                        for (d, s) in dst.iter_mut().zip(gm) {
                            *d += s * e;
                        }
                    }
                }
                out
            })
            .collect();
        Ok(GridField {
            k,
            samples: rings.concat(),
        })
    }

    /// Quadrature projection of grid samples onto `Y_lm`, `l <= lmax`.
    /// Exact for fields whose product with `Y_lm` is within the grid's
    /// exactness degree.
    pub fn analyze(field: &GridField, grid: &Grid, lmax: usize) -> Result<Self> {
        if lmax > grid.l_exact() {
            return Err(Error::InsufficientGrid {
                needed: lmax,
                available: grid.l_exact(),
            });
        }
        let k = field.k;
        let kk = k * k;
        let li = lmax as i64;
        let n_phi = grid.n_phi();
        let width = 2 * lmax + 1;
        let phases = phase_table(grid, lmax, -1.0);
        let partial = (0..grid.n_theta())
            .into_par_iter()
            .map(|ring| {
                let w = grid.ring_weight(ring);
                let mut h = vec![ZERO; width * kk];
                for kph in 0..n_phi {
                    let node = grid.node(ring, kph);
                    let f = &field.samples[node * kk..(node + 1) * kk];
                    let row = &phases[kph * width..(kph + 1) * width];
                    for (mi, e) in row.iter().enumerate() {
                        let hm = &mut h[mi * kk..(mi + 1) * kk];
                        for (d, s) in hm.iter_mut().zip(f) {
                            *d += s * e;
                        }
                    }
                }
                let leg = grid.legendre_ring(ring);
                let mut out = vec![ZERO; lm_count(lmax) * kk];
                for m in -li..=li {
                    let mu = m.unsigned_abs() as usize;
                    let sgn = if m < 0 { parity(m) } else { 1.0 };
                    let hm = &h[(m + li) as usize * kk..(m + li + 1) as usize * kk];
                    for l in mu..=lmax {
                        let p = leg[plm_index(l, mu)] * sgn * w;
                        let i = lm_index(l, m);
                        for (d, s) in out[i * kk..(i + 1) * kk].iter_mut().zip(hm) {
                            *d += s * p;
                        }
                    }
                }
                out
            })
            .reduce(
                || vec![ZERO; lm_count(lmax) * kk],
                |mut a, b| {
                    a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        Ok(Self::from_coeffs(lmax, k, partial))
    }

    /// Projection of an arbitrary smooth function, sampled on a grid fine
    /// enough that aliasing only enters through its content above
    /// `2 lmax + 8`.
    pub fn project(lmax: usize, k: usize, f: impl Fn(f64, f64) -> CMat + Sync) -> Self {
        let grid = super::grid::shared_grid(2 * lmax + 8);
        let samples: Vec<Vec<Complex64>> = (0..grid.len())
            .into_par_iter()
            .map(|node| {
                let (theta, phi) = grid.angles(node);
                crate::linalg::to_flat(&f(theta, phi))
            })
            .collect();
        let field = GridField {
            k,
            samples: samples.concat(),
        };
        Self::analyze(&field, &grid, lmax).expect("projection grid is large enough")
    }

    pub fn project_scalar(lmax: usize, f: impl Fn(f64, f64) -> Complex64 + Sync) -> Self {
        Self::project(lmax, 1, |t, p| CMat::from_element(1, 1, f(t, p)))
    }

    /// Largest sampled entry magnitude on a grid.
    pub fn sup_norm(&self, grid: &Grid) -> Result<f64> {
        Ok(self.synthesize(grid)?.max_abs())
    }

    /// `L_z`, diagonal in `m`.
    pub fn l_z(&self) -> Self {
        let kk = self.k * self.k;
        let mut out = self.clone();
        for l in 0..=self.lmax {
            for m in -(l as i64)..=l as i64 {
                let i = lm_index(l, m);
                out.coeffs[i * kk..(i + 1) * kk].iter_mut().for_each(|z| *z *= m as f64);
            }
        }
        out
    }

    /// `L_+ Y_{l,m} = sqrt((l-m)(l+m+1)) Y_{l,m+1}`.
    pub fn l_plus(&self) -> Self {
        self.ladder(1)
    }

    /// `L_- Y_{l,m} = sqrt((l+m)(l-m+1)) Y_{l,m-1}`.
    pub fn l_minus(&self) -> Self {
        self.ladder(-1)
    }

    fn ladder(&self, step: i64) -> Self {
        let kk = self.k * self.k;
        let mut out = Self::zeros(self.lmax, self.k);
        for l in 0..=self.lmax {
            let li = l as i64;
            for m in -li..=li {
                let target = m + step;
                if target.abs() > li {
                    continue;
                }
                let f = ((li - step * m) * (li + step * m + 1)) as f64;
                let f = f.sqrt();
                let (src, dst) = (lm_index(l, m), lm_index(l, target));
                for q in 0..kk {
                    out.coeffs[dst * kk + q] = self.coeffs[src * kk + q] * f;
                }
            }
        }
        out
    }

    pub fn l_x(&self) -> Self {
        self.l_plus().add(&self.l_minus()).scale_re(0.5)
    }

    pub fn l_y(&self) -> Self {
        self.l_plus().sub(&self.l_minus()).scale(Complex64::new(0.0, -0.5))
    }

    /// `[L_x f, L_y f, L_z f]`.
    pub fn angular_momentum(&self) -> [Self; 3] {
        [self.l_x(), self.l_y(), self.l_z()]
    }

    /// `(n x grad)^2`, i.e. multiplication by `-l(l+1)`.
    pub fn angular_square(&self) -> Self {
        self.map_l(|l| -((l * (l + 1)) as f64))
    }
}

/// `e^{sign i m phi_k}` for `m = -lmax..=lmax`, phi-major.
fn phase_table(grid: &Grid, lmax: usize, sign: f64) -> Vec<Complex64> {
    let li = lmax as i64;
    grid.phis()
        .iter()
        .flat_map(|&phi| (-li..=li).map(move |m| Complex64::from_polar(1.0, sign * m as f64 * phi)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::harmonics::spherical_harmonic;
    use crate::sphere::make_grid;
    use proptest::prelude::*;

    pub(crate) fn random_symbol(lmax: usize, k: usize, seed: u64) -> SphereSymbol {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..lm_count(lmax) * k * k)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        SphereSymbol::from_coeffs(lmax, k, coeffs)
    }

    #[test]
    fn grid_examples() {
        let grid = make_grid(8);
        let one = SphereSymbol::scalar_constant(c(1.0)).synthesize(&grid).unwrap();
        assert!((grid.integrate_samples(&one.samples) - c(4.0 * PI)).norm() < 1e-12);
        let y10 = SphereSymbol::harmonic(1, 0).synthesize(&grid).unwrap();
        assert!(grid.integrate_samples(&y10.samples).norm() < 1e-14);
        let y21 = SphereSymbol::harmonic(2, 1).synthesize(&grid).unwrap();
        let sq: Vec<Complex64> = y21.samples.iter().map(|z| c(z.norm_sqr())).collect();
        assert!((grid.integrate_samples(&sq) - c(1.0)).norm() < 1e-13);
    }

    #[test]
    fn grid_orthonormality() {
        let lmax = 10;
        let grid = make_grid(2 * lmax);
        let fields: Vec<GridField> = (0..=lmax)
            .flat_map(|l| (-(l as i64)..=l as i64).map(move |m| (l, m)))
            .map(|(l, m)| SphereSymbol::harmonic(l, m).synthesize(&grid).unwrap())
            .collect();
        for (p, a) in fields.iter().enumerate() {
            for (q, b) in fields.iter().enumerate() {
                let prod: Vec<Complex64> = a.samples.iter().zip(&b.samples).map(|(x, y)| x * y.conj()).collect();
                let expected = if p == q { 1.0 } else { 0.0 };
                assert!((grid.integrate_samples(&prod) - c(expected)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn synthesis_matches_pointwise_evaluation() {
        let f = random_symbol(6, 2, 5);
        let grid = make_grid(14);
        let field = f.synthesize(&grid).unwrap();
        for node in [0, 17, grid.len() - 1] {
            let (t, p) = grid.angles(node);
            assert!(crate::linalg::max_abs(&(f.evaluate(t, p) - field.matrix_at(node))) < 1e-12);
        }
        let (t, p) = (0.4, 2.0);
        let direct: Complex64 = (0..=6usize)
            .flat_map(|l| (-(l as i64)..=l as i64).map(move |m| (l, m)))
            .map(|(l, m)| f.coeff(l, m)[1] * spherical_harmonic(l, m, t, p))
            .sum();
        assert!((f.evaluate(t, p)[(0, 1)] - direct).norm() < 1e-12);
    }

    #[test]
    fn coordinate_functions() {
        let (t, p) = (1.1_f64, -0.6_f64);
        let n = [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
        for (a, &na) in n.iter().enumerate() {
            let v = SphereSymbol::coordinate(a).evaluate_scalar(t, p);
            assert!((v - c(na)).norm() < 1e-15);
        }
    }

    #[test]
    fn n3_analysis_single_coefficient() {
        let grid = make_grid(4);
        let field = GridField {
            k: 1,
            samples: (0..grid.len()).map(|i| c(grid.point(i)[2])).collect(),
        };
        let f = SphereSymbol::analyze(&field, &grid, 2).unwrap();
        assert!((f.scalar_coeff(1, 0) - c((4.0 * PI / 3.0).sqrt())).norm() < 1e-14);
        let others = f.coeffs().iter().enumerate().filter(|(i, _)| *i != lm_index(1, 0));
        assert!(others.fold(0.0f64, |a, (_, z)| a.max(z.norm())) < 1e-14);
    }

    #[test]
    fn angular_square_eigenvalues() {
        assert!(SphereSymbol::scalar_constant(c(2.0)).angular_square().max_coeff() < 1e-15);
        let n3 = SphereSymbol::coordinate(2);
        assert_eq!(n3.angular_square(), n3.scale_re(-2.0));
        let y = SphereSymbol::harmonic(2, -1);
        assert_eq!(y.angular_square(), y.scale_re(-6.0));
    }

    #[test]
    fn angular_square_is_minus_l_squared() {
        let f = random_symbol(5, 1, 2);
        let [x, y, z] = f.angular_momentum();
        let l2 = x.l_x().add(&y.l_y()).add(&z.l_z());
        assert!(l2.add(&f.angular_square()).max_coeff() < 1e-12);
    }

    #[test]
    fn adjoint_and_hermiticity() {
        let f = random_symbol(4, 2, 9);
        let h = f.hermitian_part();
        assert!(h.hermiticity_residual() < 1e-14);
        let (t, p) = (0.8, 2.4);
        let lhs = f.adjoint().evaluate(t, p);
        assert!(crate::linalg::max_abs(&(lhs - f.evaluate(t, p).adjoint())) < 1e-13);
    }

    #[test]
    fn insufficient_grid_is_reported() {
        let grid = make_grid(4);
        assert!(matches!(
            random_symbol(6, 1, 1).synthesize(&grid),
            Err(Error::InsufficientGrid {
                needed: 6,
                available: 4
            })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn round_trip_white_noise(seed in any::<u64>(), k in 1usize..3) {
            let f = random_symbol(8, k, seed);
            let grid = make_grid(16);
            let back = SphereSymbol::analyze(&f.synthesize(&grid).unwrap(), &grid, 8).unwrap();
            prop_assert!(back.sub(&f).max_coeff() < 1e-11);
        }

        #[test]
        fn parseval(seed in any::<u64>()) {
            let f = random_symbol(6, 1, seed);
            let grid = make_grid(12);
            let field = f.synthesize(&grid).unwrap();
            let sq: Vec<Complex64> = field.samples.iter().map(|z| c(z.norm_sqr())).collect();
            prop_assert!((grid.integrate_samples(&sq).re - f.norm_sq()).abs() < 1e-10);
        }
    }
}
