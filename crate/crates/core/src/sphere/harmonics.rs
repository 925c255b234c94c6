use std::f64::consts::PI;

use num_complex::Complex64;

/// Index of `(l, m)` with `0 <= m <= l` in a triangular table.
#[inline]
pub fn plm_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Normalized associated Legendre functions with the Condon-Shortley phase,
/// `Y_lm(theta, phi) = P_lm(cos theta) e^{i m phi}` for `m >= 0`.
pub fn legendre_table(lmax: usize, x: f64, s: f64) -> Vec<f64> {
    let mut p = vec![0.0; plm_index(lmax, lmax) + 1];
    p[0] = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            let prev = p[plm_index(m - 1, m - 1)];
            p[plm_index(m, m)] = -((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s * prev;
        }
        if m < lmax {
            p[plm_index(m + 1, m)] = ((2 * m + 3) as f64).sqrt() * x * p[plm_index(m, m)];
        }
        for l in m + 2..=lmax {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            p[plm_index(l, m)] = a * (x * p[plm_index(l - 1, m)] - b * p[plm_index(l - 2, m)]);
        }
    }
    p
}

/// Complex orthonormal spherical harmonic `Y_lm(theta, phi)`.
pub fn spherical_harmonic(l: usize, m: i64, theta: f64, phi: f64) -> Complex64 {
    let mu = m.unsigned_abs() as usize;
    if mu > l {
        return Complex64::new(0.0, 0.0);
    }
    let p = legendre_table(l, theta.cos(), theta.sin())[plm_index(l, mu)];
    let y = Complex64::from_polar(p, mu as f64 * phi);
    if m < 0 {
        let sign = if mu % 2 == 1 { -1.0 } else { 1.0 };
        y.conj() * sign
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_closed_forms() {
        let (theta, phi) = (0.7_f64, 1.9_f64);
        let y10 = spherical_harmonic(1, 0, theta, phi);
        assert!((y10.re - (3.0 / (4.0 * PI)).sqrt() * theta.cos()).abs() < 1e-15);
        let y11 = spherical_harmonic(1, 1, theta, phi);
        let expected = Complex64::from_polar(-(3.0 / (8.0 * PI)).sqrt() * theta.sin(), phi);
        assert!((y11 - expected).norm() < 1e-15);
        let y21 = spherical_harmonic(2, -1, theta, phi);
        let expected = Complex64::from_polar((15.0 / (8.0 * PI)).sqrt() * theta.sin() * theta.cos(), -phi);
        assert!((y21 - expected).norm() < 1e-15);
    }

    #[test]
    fn addition_theorem() {
        // sum_m |Y_lm|^2 = (2l+1)/4pi at any point
        for l in [0usize, 3, 10, 40] {
            let s: f64 = (-(l as i64)..=l as i64)
                .map(|m| spherical_harmonic(l, m, 1.234, -0.4).norm_sqr())
                .sum();
            assert!((s - (2 * l + 1) as f64 / (4.0 * PI)).abs() < 1e-12, "l={l}");
        }
    }
}
