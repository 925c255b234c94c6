use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::{berezin_exact, star_exact, FirstOrder, ProductKind};
use crate::error::{Error, Result};
use crate::fit::{loglog_slope, SlopeFit};
use crate::linalg::{c, I};
use crate::sphere::{self, shared_grid, SphereSymbol};
use crate::sw::SwKernel;

/// Representation dimensions used by the default calibration.
pub const DEFAULT_CALIBRATION_DJ: [u32; 4] = [11, 21, 41, 81];
pub const DEFAULT_CORPUS_SEED: u64 = 7;
pub const DEFAULT_CORPUS_PAIRS: usize = 10;
pub const DEFAULT_CORPUS_LMAX: usize = 4;

/// Fits with a residual slope above this are rejected.
pub const WORST_RESIDUAL_SLOPE: f64 = -0.7;
/// The fitted coefficient on `fg` must vanish since `1 star 1 = 1`.
pub const IDENTITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct TermFit {
    pub term: &'static str,
    pub coefficient: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationReport {
    pub kind: ProductKind,
    pub d_values: Vec<u32>,
    pub pairs: usize,
    pub terms: Vec<TermFit>,
    pub fitted: FirstOrder,
    /// Poisson coefficient when it is fitted as a free parameter.
    pub poisson_free: TermFit,
    /// Symmetric coefficients of the free fit, in `terms` order.
    pub symmetric_free: Vec<TermFit>,
    /// Sup-norm of the first-order remainder per `d`.
    pub residuals: Vec<f64>,
    pub residual_slope: SlopeFit,
    /// Fitted combination evaluated on the constant pair `(1, 1)`.
    pub identity_residual: f64,
}

/// Real-valued band-limited symbol with standard normal coefficients.
pub fn random_real_symbol(lmax: usize, rng: &mut impl Rng) -> SphereSymbol {
    let mut out = SphereSymbol::zeros(lmax, 1);
    for l in 0..=lmax {
        let a0: f64 = rng.sample(StandardNormal);
        out.coeff_mut(l, 0)[0] = c(a0);
        for m in 1..=l as i64 {
            let (re, im): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
            let z = Complex64::new(re, im) / 2f64.sqrt();
            out.coeff_mut(l, m)[0] = z;
            let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
            out.coeff_mut(l, -m)[0] = z.conj() * sign;
        }
    }
    out
}

/// Seeded corpus of real scalar symbol pairs.
pub fn random_corpus(seed: u64, pairs: usize, lmax: usize) -> Vec<(SphereSymbol, SphereSymbol)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..pairs)
        .map(|_| (random_real_symbol(lmax, &mut rng), random_real_symbol(lmax, &mut rng)))
        .collect()
}

fn exact_product(kind: ProductKind, f: &SphereSymbol, g: &SphereSymbol, d: u32) -> Result<SphereSymbol> {
    match kind {
        ProductKind::Moyal => Ok(star_exact(f, g, &SwKernel::spectral(d - 1))),
        ProductKind::Berezin => berezin_exact(f, g, d - 1),
    }
}

/// Real and imaginary parts of all coefficients up to `lmax`.
fn flatten(s: &SphereSymbol, lmax: usize) -> Vec<f64> {
    let s = s.with_lmax(lmax);
    s.coeffs().iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Value at `1/d = 0` of the interpolating polynomial in `1/d`.
pub(super) fn extrapolate(ds: &[u32], values: &[SphereSymbol]) -> SphereSymbol {
    let n = ds.len();
    let deg = n - 1;
    let design = DMatrix::from_fn(n, deg + 1, |r, k| (ds[r] as f64).powi(-(k as i32)));
    let pinv = (design.transpose() * &design).try_inverse().expect("distinct d values") * design.transpose();
    let lmax = values.iter().map(|v| v.lmax()).max().unwrap_or(0);
    let mut out = SphereSymbol::zeros(lmax, values[0].k());
    for (r, v) in values.iter().enumerate() {
        out = out.add(&v.with_lmax(lmax).scale_re(pinv[(0, r)]));
    }
    out
}

struct LeastSquares {
    coefficients: Vec<f64>,
    std_errors: Vec<f64>,
}

/// Least squares subject to the exact equality constraints `C beta = t`,
/// solved through the bordered normal equations.
fn least_squares(columns: &[Vec<f64>], target: &[f64], constraints: &[(Vec<f64>, f64)]) -> Result<LeastSquares> {
    let rows = target.len();
    let p = columns.len();
    let q = constraints.len();
    let x = DMatrix::from_fn(rows, p, |r, k| columns[k][r]);
    let y = DVector::from_column_slice(target);
    let mut kkt = DMatrix::zeros(p + q, p + q);
    kkt.view_mut((0, 0), (p, p)).copy_from(&(x.transpose() * &x));
    let mut rhs = DVector::zeros(p + q);
    rhs.rows_mut(0, p).copy_from(&(x.transpose() * &y));
    for (i, (row, t)) in constraints.iter().enumerate() {
        for k in 0..p {
            kkt[(p + i, k)] = row[k];
            kkt[(k, p + i)] = row[k];
        }
        rhs[p + i] = *t;
    }
    let inv = kkt
        .try_inverse()
        .ok_or_else(|| Error::Calibration("ansatz columns are linearly dependent".into()))?;
    let sol = &inv * rhs;
    let beta = sol.rows(0, p).into_owned();
    let resid = &y - &x * &beta;
    let dof = (rows + q).saturating_sub(p).max(1) as f64;
    let sigma2 = resid.norm_squared() / dof;
    Ok(LeastSquares {
        coefficients: beta.iter().cloned().collect(),
        std_errors: (0..p).map(|k| (sigma2 * inv[(k, k)].max(0.0)).sqrt()).collect(),
    })
}

struct PairData {
    lmax: usize,
    poisson: SphereSymbol,
    columns: [SphereSymbol; 3],
    /// `d (exact - fg)` per `d`.
    scaled: Vec<SphereSymbol>,
}

const TERM_NAMES: [&str; 3] = ["f g", "(Lf) g + f (Lg)", "grad f . grad g"];

/// Fits the symmetric first-order coefficients of the `kind` product.
///
/// For every pair `d (exact - fg) - i {f, g}` is extrapolated to
/// `d -> infinity` and matched against the ansatz in least squares; the
/// constant pair `(1, 1)` is always part of the corpus.
pub fn calibrate_order1(
    kind: ProductKind,
    d_values: &[u32],
    corpus: &[(SphereSymbol, SphereSymbol)],
) -> Result<CalibrationReport> {
    if d_values.len() < 3 {
        return Err(Error::InvalidArgument(
            "calibration needs at least three d_j values".into(),
        ));
    }
    if let Some(&d) = d_values.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidArgument(format!("d_j = {d} too small for calibration")));
    }
    let one = SphereSymbol::scalar_constant(c(1.0));
    let mut pairs: Vec<(SphereSymbol, SphereSymbol)> = vec![(one.clone(), one)];
    pairs.extend(corpus.iter().cloned());

    let data: Vec<PairData> = pairs
        .par_iter()
        .map(|(f, g)| -> Result<PairData> {
            let lmax = f.lmax() + g.lmax();
            let fg = sphere::product(f, g)?;
            let lap = sphere::product(&f.angular_square(), g)?.add(&sphere::product(f, &g.angular_square())?);
            let dot = sphere::dot(f, g)?;
            let poisson = sphere::cross(f, g)?;
            let scaled = d_values
                .iter()
                .map(|&d| {
                    Ok(exact_product(kind, f, g, d)?
                        .with_lmax(lmax)
                        .sub(&fg)
                        .scale_re(d as f64))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(PairData {
                lmax,
                poisson,
                columns: [fg, lap, dot],
                scaled,
            })
        })
        .collect::<Result<_>>()?;

    // fixed Poisson coefficient
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); 3];
    let mut columns_free: Vec<Vec<f64>> = vec![Vec::new(); 4];
    let mut target = Vec::new();
    let mut target_free = Vec::new();
    for p in &data[1..] {
        let limit = extrapolate(d_values, &p.scaled);
        let ip = p.poisson.scale(I);
        target.extend(flatten(&limit.sub(&ip), p.lmax));
        target_free.extend(flatten(&limit, p.lmax));
        for (k, col) in p.columns.iter().enumerate() {
            let v = flatten(col, p.lmax);
            columns[k].extend(v.iter().cloned());
            columns_free[k].extend(v);
        }
        columns_free[3].extend(flatten(&ip, p.lmax));
    }
    // The constant pair enters as exact constraints: 1 star 1 = 1 at every d,
    // so the fitted combination must vanish on it.
    let unit = &data[0];
    let unit_rows: Vec<Vec<f64>> = unit.columns.iter().map(|col| flatten(col, unit.lmax)).collect();
    let unit_poisson = flatten(&unit.poisson.scale(I), unit.lmax);
    let unit_target = flatten(&extrapolate(d_values, &unit.scaled), unit.lmax);
    let mut constraints = Vec::new();
    let mut constraints_free = Vec::new();
    for r in 0..unit_target.len() {
        let row: Vec<f64> = unit_rows.iter().map(|v| v[r]).collect();
        if row.iter().all(|v| *v == 0.0) {
            continue;
        }
        constraints.push((row.clone(), unit_target[r] - unit_poisson[r]));
        let mut row_free = row;
        row_free.push(unit_poisson[r]);
        constraints_free.push((row_free, unit_target[r]));
    }
    let fixed = least_squares(&columns, &target, &constraints)?;
    let free = least_squares(&columns_free, &target_free, &constraints_free)?;

    let fitted = FirstOrder {
        product: fixed.coefficients[0],
        laplacian: fixed.coefficients[1],
        gradient: fixed.coefficients[2],
        poisson: 1.0,
    };

    let grid = shared_grid(4 * DEFAULT_CORPUS_LMAX.max(data.iter().map(|p| p.lmax).max().unwrap_or(0)) + 8);
    let residuals: Vec<f64> = (0..d_values.len())
        .map(|i| -> Result<f64> {
            let mut worst = 0.0f64;
            for p in &data {
                let model = p.columns[0]
                    .scale_re(fitted.product)
                    .add(&p.columns[1].scale_re(fitted.laplacian))
                    .add(&p.columns[2].scale_re(fitted.gradient))
                    .add(&p.poisson.scale(I));
                worst = worst.max(p.scaled[i].sub(&model).sup_norm(&grid)?);
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let ds: Vec<f64> = d_values.iter().map(|&d| d as f64).collect();
    let residual_slope = loglog_slope(&ds, &residuals);

    // residual of the fitted combination on the constant pair
    let identity_residual = fitted.product.abs() * unit_rows[0].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let terms = (0..3)
        .map(|k| TermFit {
            term: TERM_NAMES[k],
            coefficient: fixed.coefficients[k],
            std_error: fixed.std_errors[k],
        })
        .collect();
    let symmetric_free = (0..3)
        .map(|k| TermFit {
            term: TERM_NAMES[k],
            coefficient: free.coefficients[k],
            std_error: free.std_errors[k],
        })
        .collect();
    let report = CalibrationReport {
        kind,
        d_values: d_values.to_vec(),
        pairs: corpus.len(),
        terms,
        fitted,
        poisson_free: TermFit {
            term: "i n . (grad f x grad g)",
            coefficient: free.coefficients[3],
            std_error: free.std_errors[3],
        },
        symmetric_free,
        residuals,
        residual_slope,
        identity_residual,
    };
    if identity_residual > IDENTITY_TOLERANCE {
        return Err(Error::Calibration(format!(
            "fitted combination does not annihilate constants: |a| = {identity_residual:e}"
        )));
    }
    if !(report.residual_slope.slope <= WORST_RESIDUAL_SLOPE) {
        return Err(Error::Calibration(format!(
            "first-order remainder slope {:.3} is worse than {WORST_RESIDUAL_SLOPE}",
            report.residual_slope.slope
        )));
    }
    Ok(report)
}

static MOYAL: OnceLock<CalibrationReport> = OnceLock::new();
static BEREZIN: OnceLock<CalibrationReport> = OnceLock::new();

/// Calibration on the default corpus and `d_j` list, computed once per
/// process.
pub fn calibrated(kind: ProductKind) -> Result<&'static CalibrationReport> {
    let cell = match kind {
        ProductKind::Moyal => &MOYAL,
        ProductKind::Berezin => &BEREZIN,
    };
    if let Some(r) = cell.get() {
        return Ok(r);
    }
    let corpus = random_corpus(DEFAULT_CORPUS_SEED, DEFAULT_CORPUS_PAIRS, DEFAULT_CORPUS_LMAX);
    let report = calibrate_order1(kind, &DEFAULT_CALIBRATION_DJ, &corpus)?;
    Ok(cell.get_or_init(|| report))
}
