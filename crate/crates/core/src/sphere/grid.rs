use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use super::harmonics::{legendre_table, plm_index};

/// Product quadrature: Gauss-Legendre in `cos(theta)`, uniform in `phi`.
///
/// Integrates every band-limited polynomial of degree `<= l_exact` exactly
/// against the full (total `4 pi`) surface measure.
#[derive(Debug)]
pub struct Grid {
    l_exact: usize,
    cos_theta: Vec<f64>,
    sin_theta: Vec<f64>,
    ring_weights: Vec<f64>,
    phi: Vec<f64>,
    /// Normalized associated Legendre values per ring up to `l_exact`.
    legendre: Vec<Vec<f64>>,
}

/// Nodes and weights of `n`-point Gauss-Legendre quadrature on `[-1, 1]`,
/// nodes in descending order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            if n == 0 {
                break;
            }
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

impl Grid {
    pub fn new(l_exact: usize) -> Self {
        let n_theta = l_exact / 2 + 1;
        let n_phi = l_exact + 1;
        let (cos_theta, gl_weights) = gauss_legendre(n_theta);
        let sin_theta: Vec<f64> = cos_theta.iter().map(|x| (1.0 - x * x).sqrt()).collect();
        let dphi = 2.0 * PI / n_phi as f64;
        let ring_weights = gl_weights.iter().map(|w| w * dphi).collect();
        let phi = (0..n_phi).map(|k| k as f64 * dphi).collect();
        let legendre = cos_theta
            .iter()
            .zip(&sin_theta)
            .map(|(&x, &s)| legendre_table(l_exact, x, s))
            .collect();
        Self {
            l_exact,
            cos_theta,
            sin_theta,
            ring_weights,
            phi,
            legendre,
        }
    }

    pub fn l_exact(&self) -> usize {
        self.l_exact
    }

    pub fn n_theta(&self) -> usize {
        self.cos_theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi.len()
    }

    pub fn len(&self) -> usize {
        self.n_theta() * self.n_phi()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cos_theta(&self) -> &[f64] {
        &self.cos_theta
    }

    pub fn sin_theta(&self) -> &[f64] {
        &self.sin_theta
    }

    pub fn theta(&self, ring: usize) -> f64 {
        self.cos_theta[ring].acos()
    }

    pub fn phis(&self) -> &[f64] {
        &self.phi
    }

    /// Quadrature weight of every node on a ring.
    pub fn ring_weight(&self, ring: usize) -> f64 {
        self.ring_weights[ring]
    }

    /// Node index of `(ring, k)`; samples are stored ring-major.
    #[inline]
    pub fn node(&self, ring: usize, k: usize) -> usize {
        ring * self.n_phi() + k
    }

    pub fn point(&self, node: usize) -> [f64; 3] {
        let (ring, k) = (node / self.n_phi(), node % self.n_phi());
        let s = self.sin_theta[ring];
        [s * self.phi[k].cos(), s * self.phi[k].sin(), self.cos_theta[ring]]
    }

    pub fn angles(&self, node: usize) -> (f64, f64) {
        (self.theta(node / self.n_phi()), self.phi[node % self.n_phi()])
    }

    pub fn points(&self) -> Vec<[f64; 3]> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn weight(&self, node: usize) -> f64 {
        self.ring_weights[node / self.n_phi()]
    }

    pub fn total_weight(&self) -> f64 {
        self.ring_weights.iter().sum::<f64>() * self.n_phi() as f64
    }

    /// `sum_i w_i f_i` over scalar samples.
    pub fn integrate_samples(&self, samples: &[num_complex::Complex64]) -> num_complex::Complex64 {
        samples.iter().enumerate().map(|(i, z)| z * self.weight(i)).sum()
    }

    /// `P_lm(cos theta_ring)` for `m >= 0`, normalized so that
    /// `P_lm e^{i m phi}` is an orthonormal spherical harmonic.
    #[inline]
    pub fn legendre(&self, ring: usize, l: usize, m: usize) -> f64 {
        self.legendre[ring][plm_index(l, m)]
    }

    pub(crate) fn legendre_ring(&self, ring: usize) -> &[f64] {
        &self.legendre[ring]
    }
}

static GRIDS: OnceLock<Mutex<HashMap<usize, Arc<Grid>>>> = OnceLock::new();

pub fn make_grid(l_exact: usize) -> Grid {
    Grid::new(l_exact)
}

/// Process-wide shared grid; grids are immutable once built.
pub fn shared_grid(l_exact: usize) -> Arc<Grid> {
    let cache = GRIDS.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(g) = cache.lock().unwrap().get(&l_exact) {
        return g.clone();
    }
    let g = Arc::new(Grid::new(l_exact));
    cache.lock().unwrap().entry(l_exact).or_insert(g).clone()
}
