//! Error scaling of truncated star products against the exact product.

use rayon::prelude::*;
use serde::Serialize;

use super::{
    berezin_exact, berezin_truncation, calibrate::extrapolate, moyal_truncation, star_commutator, star_exact,
    CoefficientSet, ProductKind, SemiclassicalSymbol, StarCoefficients,
};
use crate::error::Result;
use crate::fit::{loglog_slope, SlopeFit};
use crate::linalg::{c, I};
use crate::sphere::{self, shared_grid, SphereSymbol};
use crate::sw::SwKernel;

/// An order-2 commutator limit below this fraction of the bracket size
/// counts as vanishing.
pub const ORDER2_COMMUTATOR_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct ErrorSeries {
    pub label: String,
    pub d_values: Vec<u32>,
    /// Worst sup-norm error over the corpus at each `d`.
    pub errors: Vec<f64>,
    pub fit: SlopeFit,
}

impl ErrorSeries {
    fn new(label: impl Into<String>, d_values: &[u32], errors: Vec<f64>) -> Self {
        let ds: Vec<f64> = d_values.iter().map(|&d| d as f64).collect();
        let fit = loglog_slope(&ds, &errors);
        Self {
            label: label.into(),
            d_values: d_values.to_vec(),
            errors,
            fit,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StarScaling {
    pub kind: ProductKind,
    pub set: CoefficientSet,
    pub truncations: Vec<ErrorSeries>,
    /// `[f, g]_star - (2i/d) {f, g}`; only for the Stratonovich-Weyl product.
    pub commutator: Option<ErrorSeries>,
    /// Largest `d -> infinity` limit of `d^2 ([f, g]_star - (2i/d) {f, g})`
    /// relative to the bracket, over the corpus.
    pub order2_commutator: Option<f64>,
    /// `d (1 star_1 1 - 1)` per `d` for the selected coefficients.
    pub unit_deviation: Vec<f64>,
}

fn exact(
    kind: ProductKind,
    f: &SphereSymbol,
    g: &SphereSymbol,
    d: u32,
    kernel: Option<&SwKernel>,
) -> Result<SphereSymbol> {
    let lmax = f.lmax() + g.lmax();
    Ok(match kind {
        ProductKind::Moyal => star_exact(f, g, kernel.expect("kernel for the Moyal product")),
        ProductKind::Berezin => berezin_exact(f, g, d - 1)?,
    }
    .with_lmax(lmax))
}

fn sup(s: &SphereSymbol) -> Result<f64> {
    s.sup_norm(&shared_grid(4 * s.lmax() + 8))
}

/// Truncation errors of orders `0..=max_order`, the commutator law and the
/// unit-symbol deviation over a corpus of scalar pairs.
pub fn star_scaling(
    kind: ProductKind,
    coeffs: &StarCoefficients,
    d_values: &[u32],
    corpus: &[(SphereSymbol, SphereSymbol)],
    max_order: usize,
) -> Result<StarScaling> {
    let n_orders = max_order + 1;
    let per_d: Vec<(Vec<f64>, f64, Vec<SphereSymbol>)> = d_values
        .par_iter()
        .map(|&d| -> Result<(Vec<f64>, f64, Vec<SphereSymbol>)> {
            let kernel = (kind == ProductKind::Moyal).then(|| SwKernel::spectral(d - 1));
            let mut worst = vec![0.0f64; n_orders];
            let mut worst_comm = 0.0f64;
            let mut scaled_comm = Vec::new();
            for (f, g) in corpus {
                let ex = exact(kind, f, g, d, kernel.as_ref())?;
                let (sf, sg) = (
                    SemiclassicalSymbol::leading(f.clone()),
                    SemiclassicalSymbol::leading(g.clone()),
                );
                for (k, w) in worst.iter_mut().enumerate() {
                    let t = match kind {
                        ProductKind::Moyal => moyal_truncation(&sf, &sg, k, coeffs)?,
                        ProductKind::Berezin => berezin_truncation(&sf, &sg, k, coeffs)?,
                    };
                    *w = w.max(sup(&ex.sub(&t.truncate(d as f64, k)))?);
                }
                if let Some(kernel) = &kernel {
                    let comm = star_commutator(f, g, kernel).with_lmax(f.lmax() + g.lmax());
                    let bracket = sphere::poisson_bracket(f, g)?;
                    let rem = comm.sub(&bracket.scale(I * (2.0 / d as f64)));
                    worst_comm = worst_comm.max(sup(&rem)?);
                    scaled_comm.push(rem.scale_re((d as f64).powi(2)));
                }
            }
            Ok((worst, worst_comm, scaled_comm))
        })
        .collect::<Result<_>>()?;

    let truncations = (0..n_orders)
        .map(|k| ErrorSeries::new(format!("order {k}"), d_values, per_d.iter().map(|p| p.0[k]).collect()))
        .collect();

    let (commutator, order2_commutator) = if kind == ProductKind::Moyal {
        let series = ErrorSeries::new("commutator", d_values, per_d.iter().map(|p| p.1).collect());
        let mut worst = 0.0f64;
        for (i, (f, g)) in corpus.iter().enumerate() {
            let samples: Vec<SphereSymbol> = per_d.iter().map(|p| p.2[i].clone()).collect();
            let limit = extrapolate(d_values, &samples);
            let scale = sup(&sphere::poisson_bracket(f, g)?)?.max(f64::MIN_POSITIVE);
            worst = worst.max(sup(&limit)? / scale);
        }
        (Some(series), Some(worst))
    } else {
        (None, None)
    };

    let one = SemiclassicalSymbol::leading(SphereSymbol::scalar_constant(c(1.0)));
    let unit = match kind {
        ProductKind::Moyal => moyal_truncation(&one, &one, 1, coeffs)?,
        ProductKind::Berezin => berezin_truncation(&one, &one, 1, coeffs)?,
    };
    let unit_deviation = d_values
        .iter()
        .map(|&d| {
            let dev = unit.truncate(d as f64, 1).sub(&one.terms[0]);
            Ok(sup(&dev)? * d as f64)
        })
        .collect::<Result<_>>()?;

    Ok(StarScaling {
        kind,
        set: coeffs.set,
        truncations,
        commutator,
        order2_commutator,
        unit_deviation,
    })
}
