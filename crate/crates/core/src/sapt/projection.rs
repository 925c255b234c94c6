use rayon::prelude::*;
use serde::Serialize;

use super::{check_d_values, projector_symbol, symbol_band_limit, Series};
use crate::error::{Error, Result};
use crate::linalg::{c, commutator, eigh, op_norm, CMat};
use crate::model::{build_hamiltonian, principal_bands_angles, principal_symbol, Band, ModelParams};
use crate::sphere::{self, SphereSymbol};
use crate::star::{CoefficientSet, StarCoefficients};
use crate::sw::SwKernel;

/// The smallest kept gap must exceed the largest discarded one by this.
pub const CLUSTER_GAP_RATIO: f64 = 3.0;

#[derive(Debug, Clone)]
pub struct MoyalProjection {
    pub band: Band,
    pub lambda: f64,
    pub set: CoefficientSet,
    /// `[pi_0]` or `[pi_0, pi_1]`.
    pub terms: Vec<SphereSymbol>,
    /// Sup-norm of `pi_0 pi_1 + pi_1 pi_0 + B1(pi_0, pi_0) - pi_1`.
    pub idempotency_residual: f64,
    /// Sup-norm of `[H_0, pi_1] + B1(H_0, pi_0) - B1(pi_0, H_0)`.
    pub commutator_residual: f64,
}

impl MoyalProjection {
    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    /// `pi_0 + pi_1 / d` (or `pi_0` at order 0).
    pub fn truncate(&self, d: f64) -> SphereSymbol {
        let mut out = self.terms[0].clone();
        if let Some(p1) = self.terms.get(1) {
            out = out.with_lmax(out.lmax().max(p1.lmax())).add(&p1.scale_re(1.0 / d));
        }
        out
    }
}

fn sup(s: &SphereSymbol) -> Result<f64> {
    s.sup_norm(&sphere::shared_grid(s.lmax() + 8))
}

/// Order-0 or order-1 Moyal projection onto `band`.
///
/// The order-1 term is fixed block by block: the diagonal blocks by
/// `pi star pi = pi`, the off-diagonal ones by `[H, pi]_star = 0`.
pub fn moyal_projection(lambda: f64, band: Band, order: usize, coeffs: &StarCoefficients) -> Result<MoyalProjection> {
    if order > 1 {
        return Err(Error::UnsupportedOrder(order));
    }
    let lmax = symbol_band_limit(lambda)?;
    let p0 = projector_symbol(lambda, band, lmax);
    let mut out = MoyalProjection {
        band,
        lambda,
        set: coeffs.set,
        terms: vec![p0.clone()],
        idempotency_residual: 0.0,
        commutator_residual: 0.0,
    };
    if order == 0 {
        return Ok(out);
    }
    let h0 = principal_symbol(lambda, band.two_s);
    let g = coeffs.first.apply(&p0, &p0)?;
    let k = coeffs.first.apply(&h0, &p0)?.sub(&coeffs.first.apply(&p0, &h0)?);
    let ds = band.two_s as usize + 1;
    let target = band.index();
    let p1 = SphereSymbol::project(lmax, ds, |theta, phi| {
        let slice = principal_bands_angles(theta, phi, lambda, band.two_s);
        let gm = g.evaluate(theta, phi);
        let km = k.evaluate(theta, phi);
        let pr = &slice.projectors;
        let mut p1 = CMat::zeros(ds, ds);
        for a in 0..ds {
            let diag = &pr[a] * &gm * &pr[a];
            if a == target {
                p1 -= diag;
            } else {
                p1 += diag;
            }
            for b in 0..ds {
                if a != b {
                    let de = slice.energies[a] - slice.energies[b];
                    p1 -= &pr[a] * &km * &pr[b] * c(1.0 / de);
                }
            }
        }
        p1
    });
    let idem = sphere::product(&p0, &p1)?
        .add(&sphere::product(&p1, &p0)?)
        .add(&g)
        .sub(&p1.with_lmax(2 * lmax));
    let comm = sphere::product(&h0, &p1)?
        .sub(&sphere::product(&p1, &h0)?)
        .add(&k.with_lmax(lmax + 1));
    out.idempotency_residual = sup(&idem)?;
    out.commutator_residual = sup(&comm)?;
    out.terms.push(p1);
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub d: u32,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub quantity: String,
    pub band: Band,
    pub lambda: f64,
    pub order: usize,
    pub points: Vec<SweepPoint>,
    pub series: Series,
}

impl SweepReport {
    fn new(quantity: &str, band: Band, lambda: f64, order: usize, d_values: &[u32], values: Vec<f64>) -> Self {
        Self {
            quantity: quantity.into(),
            band,
            lambda,
            order,
            points: d_values
                .iter()
                .zip(&values)
                .map(|(&d, &value)| SweepPoint { d, value })
                .collect(),
            series: Series::new(d_values.to_vec(), values),
        }
    }
}

/// `||[H, quantize(pi_0 + pi_1/d)]||_2` over `d_j`.
pub fn almost_invariance_norms(
    d_values: &[u32],
    lambda: f64,
    band: Band,
    order: usize,
    coeffs: &StarCoefficients,
) -> Result<SweepReport> {
    check_d_values(d_values, band.two_s)?;
    let proj = moyal_projection(lambda, band, order, coeffs)?;
    let values = d_values
        .par_iter()
        .map(|&d| -> Result<f64> {
            let p = ModelParams::new(d - 1, band.two_s, lambda)?;
            let kernel = SwKernel::spectral(d - 1);
            let pi = kernel.quantize(&proj.truncate(d as f64));
            Ok(op_norm(&commutator(&build_hamiltonian(&p), &pi)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport::new(
        "commutator_norm",
        band,
        lambda,
        order,
        d_values,
        values,
    ))
}

/// Largest distance of an eigenvalue of `quantize(pi_0 + pi_1/d)` from
/// `{0, 1}`.
pub fn projection_spectrum_defect(
    d_values: &[u32],
    lambda: f64,
    band: Band,
    order: usize,
    coeffs: &StarCoefficients,
) -> Result<SweepReport> {
    check_d_values(d_values, band.two_s)?;
    let proj = moyal_projection(lambda, band, order, coeffs)?;
    let values = d_values
        .par_iter()
        .map(|&d| {
            let kernel = SwKernel::spectral(d - 1);
            let pi = kernel.quantize(&proj.truncate(d as f64));
            let (ev, _) = eigh(&pi);
            ev.iter().fold(0.0f64, |m, &e| m.max(e.abs().min((e - 1.0).abs())))
        })
        .collect();
    Ok(SweepReport::new(
        "projection_defect",
        band,
        lambda,
        order,
        d_values,
        values,
    ))
}

#[derive(Debug, Clone)]
pub struct Cluster {
    pub band: Band,
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    pub projector: CMat,
}

#[derive(Debug, Clone)]
pub struct ExactBands {
    pub params: ModelParams,
    pub eigenvalues: Vec<f64>,
    /// In band order, highest energy first.
    pub clusters: Vec<Cluster>,
    /// Smallest kept gap over the largest discarded gap.
    pub gap_ratio: f64,
}

impl ExactBands {
    pub fn cluster(&self, band: Band) -> &Cluster {
        &self.clusters[band.index()]
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.rank).collect()
    }
}

/// Spectral projectors of the exact Hamiltonian onto the `d_s` eigenvalue
/// clusters cut at the largest gaps.
pub fn exact_band_projection(p: &ModelParams) -> Result<ExactBands> {
    let h = build_hamiltonian(p);
    let (values, vectors) = eigh(&h);
    let n = values.len();
    let ds = p.ds();
    let mut gaps: Vec<(f64, usize)> = (0..n - 1).map(|i| (values[i + 1] - values[i], i)).collect();
    gaps.sort_by(|a, b| b.0.total_cmp(&a.0));
    let cut = ds - 1;
    let kept = gaps[..cut].iter().map(|g| g.0).fold(f64::INFINITY, f64::min);
    let discarded = gaps.get(cut).map_or(0.0, |g| g.0);
    let ratio = if discarded > 0.0 {
        kept / discarded
    } else {
        f64::INFINITY
    };
    if ratio < CLUSTER_GAP_RATIO {
        return Err(Error::AmbiguousClusters {
            ratio,
            threshold: CLUSTER_GAP_RATIO,
        });
    }
    let mut splits: Vec<usize> = gaps[..cut].iter().map(|g| g.1 + 1).collect();
    splits.sort_unstable();
    let mut bounds = vec![0];
    bounds.extend(splits);
    bounds.push(n);
    // ascending ranges; band index 0 is the top cluster
    let mut clusters = Vec::with_capacity(ds);
    for a in 0..ds {
        let r = ds - 1 - a;
        let (lo, hi) = (bounds[r], bounds[r + 1]);
        let block = vectors.columns(lo, hi - lo);
        clusters.push(Cluster {
            band: Band::from_index(p.two_s, a),
            eigenvalues: values[lo..hi].to_vec(),
            rank: hi - lo,
            projector: block * block.adjoint(),
        });
    }
    Ok(ExactBands {
        params: *p,
        eigenvalues: values,
        clusters,
        gap_ratio: ratio,
    })
}
