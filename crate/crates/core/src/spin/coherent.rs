use num_complex::Complex64;

use super::cg::invalid;
use super::irrep::SpinIrrep;
use crate::error::Result;

/// Spherical angles `(theta, phi)` of a unit vector.
pub fn angles(n: [f64; 3]) -> (f64, f64) {
    let theta = n[2].clamp(-1.0, 1.0).acos();
    let phi = n[1].atan2(n[0]);
    (theta, phi)
}

pub fn unit_vector(theta: f64, phi: f64) -> [f64; 3] {
    let s = theta.sin();
    [s * phi.cos(), s * phi.sin(), theta.cos()]
}

/// Coherent state at spherical angles, component `a` (with `m = j - a`)
/// `sqrt(C(2j, j-m)) cos^{j+m}(theta/2) sin^{j-m}(theta/2) e^{-i m phi}`.
pub fn coherent_state_angles(two_j: u32, theta: f64, phi: f64) -> Vec<Complex64> {
    let d = two_j as usize + 1;
    let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut binom = 1.0f64;
    let mut out = Vec::with_capacity(d);
    for a in 0..d {
        // a = j - m, so cos power is two_j - a and sin power is a
        let mag = binom.sqrt() * ch.powi((two_j as usize - a) as i32) * sh.powi(a as i32);
        let m = two_j as f64 / 2.0 - a as f64;
        out.push(Complex64::from_polar(mag, -m * phi));
        binom = binom * (two_j as usize - a) as f64 / (a + 1) as f64;
    }
    out
}

/// Rotated highest-weight vector pointing along `n`.
pub fn coherent_state(irrep: &SpinIrrep, n: [f64; 3]) -> Result<Vec<Complex64>> {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(invalid(format!("coherent state direction has |n| = {norm}")));
    }
    let (theta, phi) = angles(n);
    Ok(coherent_state_angles(irrep.two_j(), theta, phi))
}
