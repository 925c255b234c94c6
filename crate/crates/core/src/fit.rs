//! Log-log slope fits for asymptotic-order checks.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Half-width of the 95% confidence interval of the slope.
    pub ci95: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub n_points: usize,
}

impl SlopeFit {
    pub fn within(&self, target: f64, tol: f64) -> bool {
        (self.slope - target).abs() <= tol
    }
}

/// Least-squares line through `(ln x, ln y)`. Points with `y <= 0` are
/// dropped; fewer than two usable points give a NaN slope.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> SlopeFit {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(_, &v)| v > 0.0 && v.is_finite())
        .map(|(&u, &v)| (u.ln(), v.ln()))
        .collect();
    let n = pts.len();
    if n < 2 {
        return SlopeFit {
            slope: f64::NAN,
            intercept: f64::NAN,
            ci95: f64::NAN,
            residual: f64::NAN,
            n_points: n,
        };
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let ci95 = if n > 2 {
        let se = (rss / (nf - 2.0) / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, nf - 2.0).unwrap().inverse_cdf(0.975);
        t * se
    } else {
        f64::NAN
    };
    SlopeFit {
        slope,
        intercept,
        ci95,
        residual: (rss / nf).sqrt(),
        n_points: n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let x = [11.0, 21.0, 41.0, 81.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-2.0)).collect();
        let f = loglog_slope(&x, &y);
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-10);
        assert!(f.ci95 < 1e-6);
        assert_eq!(f.n_points, 4);
    }

    #[test]
    fn noisy_fit_has_interval() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y = [1.0, 0.55, 0.24, 0.13];
        let f = loglog_slope(&x, &y);
        assert!(f.ci95 > 0.0 && f.within(-1.0, 0.1));
    }

    #[test]
    fn zeros_are_dropped() {
        let f = loglog_slope(&[1.0, 2.0], &[0.0, 1.0]);
        assert!(f.slope.is_nan());
        assert_eq!(f.n_points, 1);
    }
}
