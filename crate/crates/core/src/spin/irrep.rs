use std::sync::OnceLock;

use num_complex::Complex64;

use crate::linalg::{c, eigh, CMat, I};

/// Irreducible su(2) representation of dimension `two_j + 1`.
///
/// The basis is ordered by descending magnetic quantum number: index `a`
/// carries `m = j - a`, so `J3 = diag(j, j-1, ..., -j)`.
#[derive(Debug)]
pub struct SpinIrrep {
    two_j: u32,
    components: [CMat; 3],
    j2_eigen: OnceLock<(Vec<f64>, CMat)>,
}

impl Clone for SpinIrrep {
    fn clone(&self) -> Self {
        Self {
            two_j: self.two_j,
            components: self.components.clone(),
            j2_eigen: OnceLock::new(),
        }
    }
}

pub fn make_irrep(two_j: u32) -> SpinIrrep {
    SpinIrrep::new(two_j)
}

impl SpinIrrep {
    pub fn new(two_j: u32) -> Self {
        let d = two_j as usize + 1;
        let j = two_j as f64 / 2.0;
        let mut raise = CMat::zeros(d, d);
        for a in 1..d {
            // |m> -> |m+1>, column a (m = j - a) to row a - 1
            let m = j - a as f64;
            raise[(a - 1, a)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt());
        }
        let lower = raise.adjoint();
        let j1 = (&raise + &lower) * c(0.5);
        let j2 = (&raise - &lower) * Complex64::new(0.0, -0.5);
        let j3 = CMat::from_diagonal(&nalgebra::DVector::from_iterator(d, (0..d).map(|a| c(j - a as f64))));
        Self {
            two_j,
            components: [j1, j2, j3],
            j2_eigen: OnceLock::new(),
        }
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Magnetic quantum number of basis index `a`.
    pub fn m_of(&self, a: usize) -> f64 {
        self.j() - a as f64
    }

    pub fn j1(&self) -> &CMat {
        &self.components[0]
    }

    pub fn j2(&self) -> &CMat {
        &self.components[1]
    }

    pub fn j3(&self) -> &CMat {
        &self.components[2]
    }

    pub fn components(&self) -> &[CMat; 3] {
        &self.components
    }

    /// `v . J` for a real 3-vector.
    pub fn dot(&self, v: [f64; 3]) -> CMat {
        &self.components[0] * c(v[0]) + &self.components[1] * c(v[1]) + &self.components[2] * c(v[2])
    }

    pub fn casimir(&self) -> CMat {
        self.components
            .iter()
            .map(|m| m * m)
            .fold(CMat::zeros(self.dim(), self.dim()), |acc, x| acc + x)
    }

    /// Largest entry of `[J_a, J_b] - i eps_abc J_c` over all index pairs.
    pub fn commutator_residual(&self) -> f64 {
        let j = &self.components;
        let mut worst = 0.0f64;
        for a in 0..3 {
            let b = (a + 1) % 3;
            let cc = (a + 2) % 3;
            let r = &j[a] * &j[b] - &j[b] * &j[a] - &j[cc] * I;
            worst = worst.max(crate::linalg::max_abs(&r));
        }
        worst
    }

    pub fn casimir_residual(&self) -> f64 {
        let j = self.j();
        let target = CMat::identity(self.dim(), self.dim()) * c(j * (j + 1.0));
        crate::linalg::max_abs(&(self.casimir() - target))
    }

    fn j2_eigen(&self) -> &(Vec<f64>, CMat) {
        self.j2_eigen.get_or_init(|| eigh(&self.components[1]))
    }

    /// `exp(i beta J2)`.
    pub fn exp_i_j2(&self, beta: f64) -> CMat {
        let (values, vectors) = self.j2_eigen();
        let mut scaled = vectors.clone();
        for (k, &e) in values.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, beta * e);
            for r in 0..scaled.nrows() {
                scaled[(r, k)] *= phase;
            }
        }
        scaled * vectors.adjoint()
    }

    /// `exp(i alpha J3)` (diagonal).
    pub fn exp_i_j3(&self, alpha: f64) -> CMat {
        let d = self.dim();
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            d,
            (0..d).map(|a| Complex64::from_polar(1.0, alpha * self.m_of(a))),
        ))
    }
}

/// `exp(-i alpha J3) exp(i beta J2) exp(i gamma J3)`.
pub fn wigner_zyz(irrep: &SpinIrrep, alpha: f64, beta: f64, gamma: f64) -> CMat {
    irrep.exp_i_j3(-alpha) * irrep.exp_i_j2(beta) * irrep.exp_i_j3(gamma)
}

/// SO(3) image of a representation matrix: `U J_b U^dagger = sum_a R_ab J_a`.
pub fn adjoint_rotation(irrep: &SpinIrrep, u: &CMat) -> [[f64; 3]; 3] {
    let j = irrep.components();
    let norm = (0..3).map(|a| (&j[a] * &j[a]).trace().re).collect::<Vec<_>>();
    let mut r = [[0.0; 3]; 3];
    for b in 0..3 {
        let rotated = u * &j[b] * u.adjoint();
        for a in 0..3 {
            r[a][b] = (&j[a] * &rotated).trace().re / norm[a];
        }
    }
    r
}

pub fn rotate(r: &[[f64; 3]; 3], n: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for a in 0..3 {
        out[a] = (0..3).map(|b| r[a][b] * n[b]).sum();
    }
    out
}
