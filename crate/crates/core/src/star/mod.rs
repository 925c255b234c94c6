//! Star products of symbols: exact (through the operator product) and
//! truncated asymptotic expansions in `1/d_j`, plus the calibration that
//! fits the first-order coefficients against the exact product.

mod asymptotics;
mod calibrate;

pub use asymptotics::{star_scaling, ErrorSeries, StarScaling, ORDER2_COMMUTATOR_FLOOR};
pub use calibrate::{
    calibrate_order1, calibrated, random_corpus, random_real_symbol, CalibrationReport, TermFit,
    DEFAULT_CALIBRATION_DJ, DEFAULT_CORPUS_LMAX, DEFAULT_CORPUS_PAIRS, DEFAULT_CORPUS_SEED, IDENTITY_TOLERANCE,
    WORST_RESIDUAL_SLOPE,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, I};
use crate::sphere::{self, SphereSymbol};
use crate::sw::{lower_symbol, operator_from_lower, SwKernel};

/// Which exact product a truncation approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductKind {
    /// Stratonovich-Weyl symbols.
    Moyal,
    /// Lower (covariant) coherent-state symbols.
    Berezin,
}

impl std::str::FromStr for ProductKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "moyal" => Ok(Self::Moyal),
            "berezin" => Ok(Self::Berezin),
            other => Err(Error::InvalidArgument(format!("unknown product {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientSet {
    Printed,
    Calibrated,
}

impl std::str::FromStr for CoefficientSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(Self::Printed),
            "calibrated" => Ok(Self::Calibrated),
            other => Err(Error::InvalidArgument(format!("unknown coefficient set {other:?}"))),
        }
    }
}

/// Real coefficients of the first-order bilinear
/// `B1(f, g) = a fg + b (Lf g + f Lg) + c grad f . grad g + p i {f, g}`
/// with `L = (n x grad)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstOrder {
    pub product: f64,
    pub laplacian: f64,
    pub gradient: f64,
    pub poisson: f64,
}

impl FirstOrder {
    pub const PRINTED_MOYAL: Self = Self {
        product: -0.5,
        laplacian: 1.0,
        gradient: 0.0,
        poisson: 1.0,
    };
    pub const PRINTED_BEREZIN: Self = Self {
        product: -0.5,
        laplacian: 0.0,
        gradient: -1.0,
        poisson: 1.0,
    };

    pub fn printed(kind: ProductKind) -> Self {
        match kind {
            ProductKind::Moyal => Self::PRINTED_MOYAL,
            ProductKind::Berezin => Self::PRINTED_BEREZIN,
        }
    }

    /// `B1(f, g)`; matrix factors keep the written order.
    pub fn apply(&self, f: &SphereSymbol, g: &SphereSymbol) -> Result<SphereSymbol> {
        let lmax = f.lmax() + g.lmax();
        let mut out = SphereSymbol::zeros(lmax, f.k());
        if self.product != 0.0 {
            out = out.add(&sphere::product(f, g)?.scale_re(self.product));
        }
        if self.laplacian != 0.0 {
            let t = sphere::product(&f.angular_square(), g)?.add(&sphere::product(f, &g.angular_square())?);
            out = out.add(&t.scale_re(self.laplacian));
        }
        if self.gradient != 0.0 {
            out = out.add(&sphere::dot(f, g)?.scale_re(self.gradient));
        }
        if self.poisson != 0.0 {
            out = out.add(&sphere::cross(f, g)?.scale(I * self.poisson));
        }
        Ok(out)
    }
}

/// Coefficients used by the truncated expansions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StarCoefficients {
    pub kind: ProductKind,
    pub set: CoefficientSet,
    pub first: FirstOrder,
}

impl StarCoefficients {
    pub fn printed(kind: ProductKind) -> Self {
        Self {
            kind,
            set: CoefficientSet::Printed,
            first: FirstOrder::printed(kind),
        }
    }

    /// The calibrated set from the default corpus (computed once).
    pub fn calibrated(kind: ProductKind) -> Result<Self> {
        Ok(Self {
            kind,
            set: CoefficientSet::Calibrated,
            first: calibrated(kind)?.fitted,
        })
    }

    pub fn select(kind: ProductKind, set: CoefficientSet) -> Result<Self> {
        match set {
            CoefficientSet::Printed => Ok(Self::printed(kind)),
            CoefficientSet::Calibrated => Self::calibrated(kind),
        }
    }
}

/// Formal series `sum_i d^{-i} x_i` in the inverse representation dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiclassicalSymbol {
    pub terms: Vec<SphereSymbol>,
}

impl SemiclassicalSymbol {
    pub fn new(terms: Vec<SphereSymbol>) -> Self {
        assert!(!terms.is_empty(), "a semiclassical symbol needs a leading term");
        Self { terms }
    }

    pub fn leading(x0: SphereSymbol) -> Self {
        Self { terms: vec![x0] }
    }

    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn term(&self, i: usize) -> Option<&SphereSymbol> {
        self.terms.get(i)
    }

    fn term_or_zero(&self, i: usize) -> SphereSymbol {
        self.terms
            .get(i)
            .cloned()
            .unwrap_or_else(|| SphereSymbol::zeros(0, self.terms[0].k()))
    }

    /// `sum_{i <= k} d^{-i} x_i`.
    pub fn truncate(&self, d: f64, k: usize) -> SphereSymbol {
        let mut out = self.terms[0].clone();
        for (i, x) in self.terms.iter().enumerate().skip(1).take(k) {
            out = out.add(&x.scale_re(d.powi(-(i as i32))));
        }
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|x| x.hermiticity_residual() < tol)
    }
}

/// `dequantize(quantize(f) quantize(g))`.
pub fn star_exact(f: &SphereSymbol, g: &SphereSymbol, kernel: &SwKernel) -> SphereSymbol {
    kernel.dequantize(&(kernel.quantize(f) * kernel.quantize(g)))
}

/// `[f, g]_star` computed exactly.
pub fn star_commutator(f: &SphereSymbol, g: &SphereSymbol, kernel: &SwKernel) -> SphereSymbol {
    let (a, b) = (kernel.quantize(f), kernel.quantize(g));
    kernel.dequantize(&(&a * &b - &b * &a))
}

/// Covariant Berezin product: the lower symbol of the product of the
/// operators whose lower symbols are `f` and `g`.
pub fn berezin_exact(f: &SphereSymbol, g: &SphereSymbol, two_j: u32) -> Result<SphereSymbol> {
    let tol = 1e-12 * f.max_coeff().max(g.max_coeff()).max(1.0);
    let a = operator_from_lower(f, two_j, tol)?;
    let b = operator_from_lower(g, two_j, tol)?;
    Ok(lower_symbol(&(a * b), two_j))
}

/// `{f, g} = n . (grad f x grad g)`.
pub fn poisson_bracket(f: &SphereSymbol, g: &SphereSymbol) -> Result<SphereSymbol> {
    sphere::poisson_bracket(f, g)
}

fn lap(f: &SphereSymbol) -> SphereSymbol {
    f.angular_square()
}

/// Printed second-order term of the Stratonovich-Weyl expansion.
fn printed_moyal_second(f: &[SphereSymbol; 3], g: &[SphereSymbol; 3]) -> Result<SphereSymbol> {
    use sphere::{cross, dot, product};
    let mut t = product(&f[0], &g[2])?
        .add(&product(&f[1], &g[1])?)
        .add(&product(&f[2], &g[0])?);
    t = t.sub(&product(&lap(&f[0]), &lap(&g[0]))?.scale_re(0.5));
    t = t.add(&lap(&dot(&f[0], &g[0])?).scale_re(0.25));
    let grad_lap = dot(&lap(&f[0]), &g[0])?.add(&dot(&f[0], &lap(&g[0]))?);
    t = t.sub(&grad_lap.scale_re(2.25));
    t = t.sub(&dot(&f[0], &g[0])?.scale_re(3.5));
    t = t
        .add(&product(&lap(&f[0]), &g[1])?)
        .add(&product(&lap(&f[1]), &g[0])?)
        .add(&product(&f[0], &lap(&g[1]))?)
        .add(&product(&f[1], &lap(&g[0]))?);
    let brackets = cross(&f[0], &g[1])?
        .add(&cross(&f[1], &g[0])?)
        .sub(&cross(&f[0], &g[0])?.scale_re(6.0))
        .add(&cross(&lap(&f[0]), &g[0])?)
        .add(&cross(&f[0], &lap(&g[0]))?);
    Ok(t.add(&brackets.scale(I)))
}

/// Printed second-order term of the Berezin expansion.
fn printed_berezin_second(f: &[SphereSymbol; 3], g: &[SphereSymbol; 3]) -> Result<SphereSymbol> {
    use sphere::{cross, dot, product};
    let mut t = product(&f[0], &g[2])?
        .add(&product(&f[1], &g[1])?)
        .add(&product(&f[2], &g[0])?);
    t = t.sub(&dot(&f[0], &g[1])?).sub(&dot(&f[1], &g[0])?);
    t = t.sub(&dot(&f[0], &g[0])?.scale_re(3.0));
    let laps = product(&lap(&f[0]), &g[0])?.add(&product(&f[0], &lap(&g[0]))?);
    t = t.add(&laps.scale_re(0.5));
    t = t.sub(&product(&lap(&f[0]), &lap(&g[0]))?.scale_re(0.5));
    t = t.add(&lap(&dot(&f[0], &g[0])?).scale_re(0.5));
    let grad_lap = dot(&lap(&f[0]), &g[0])?.add(&dot(&f[0], &lap(&g[0]))?);
    t = t.sub(&grad_lap.scale_re(0.5));
    let brackets = cross(&f[0], &g[1])?
        .add(&cross(&f[1], &g[0])?)
        .sub(&cross(&f[0], &g[0])?.scale_re(6.0))
        .add(&cross(&lap(&f[0]), &g[0])?.scale_re(0.5))
        .add(&cross(&f[0], &lap(&g[0]))?);
    t = t.add(&brackets.scale(I));
    Ok(t.sub(&lap(&cross(&f[0], &g[0])?).scale(I * 0.5)))
}

fn truncation(
    big_f: &SemiclassicalSymbol,
    big_g: &SemiclassicalSymbol,
    order: usize,
    coeffs: &StarCoefficients,
) -> Result<SemiclassicalSymbol> {
    if order > 2 {
        return Err(Error::UnsupportedOrder(order));
    }
    if order == 2 && coeffs.set == CoefficientSet::Calibrated {
        // only the printed tables carry a second-order term
        return Err(Error::UnsupportedOrder(order));
    }
    let f = [big_f.term_or_zero(0), big_f.term_or_zero(1), big_f.term_or_zero(2)];
    let g = [big_g.term_or_zero(0), big_g.term_or_zero(1), big_g.term_or_zero(2)];
    let mut terms = vec![sphere::product(&f[0], &g[0])?];
    if order >= 1 {
        let t1 = sphere::product(&f[0], &g[1])?
            .add(&sphere::product(&f[1], &g[0])?)
            .add(&coeffs.first.apply(&f[0], &g[0])?);
        terms.push(t1);
    }
    if order >= 2 {
        terms.push(match coeffs.kind {
            ProductKind::Moyal => printed_moyal_second(&f, &g)?,
            ProductKind::Berezin => printed_berezin_second(&f, &g)?,
        });
    }
    Ok(SemiclassicalSymbol::new(terms))
}

/// Truncated Stratonovich-Weyl star product through order `k`.
pub fn moyal_truncation(
    f: &SemiclassicalSymbol,
    g: &SemiclassicalSymbol,
    k: usize,
    coeffs: &StarCoefficients,
) -> Result<SemiclassicalSymbol> {
    let coeffs = StarCoefficients {
        kind: ProductKind::Moyal,
        ..*coeffs
    };
    truncation(f, g, k, &coeffs)
}

/// Truncated Berezin star product through order `k`.
pub fn berezin_truncation(
    f: &SemiclassicalSymbol,
    g: &SemiclassicalSymbol,
    k: usize,
    coeffs: &StarCoefficients,
) -> Result<SemiclassicalSymbol> {
    let coeffs = StarCoefficients {
        kind: ProductKind::Berezin,
        ..*coeffs
    };
    truncation(f, g, k, &coeffs)
}

/// First-order term of `1 star 1` under the given coefficients; the exact
/// product gives zero.
pub fn unit_anomaly(coeffs: &StarCoefficients) -> Result<Complex64> {
    let one = SemiclassicalSymbol::leading(SphereSymbol::scalar_constant(c(1.0)));
    let t = truncation(&one, &one, 1, coeffs)?;
    Ok(t.terms[1].integrate_scalar() / (4.0 * std::f64::consts::PI))
}
