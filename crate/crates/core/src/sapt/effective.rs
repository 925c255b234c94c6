use rayon::prelude::*;
use serde::Serialize;

use super::jets::{energy_jet, first_order, principal_symbol_jet, reference_unitary_jet};
use super::projection::exact_band_projection;
use super::{check_d_values, energy_matrix_symbol, energy_symbol, reference_unitary_symbol, symbol_band_limit, Series};
use crate::error::{Error, Result};
use crate::linalg::{c, eigvalsh, CMat};
use crate::model::{
    band_angle_jet, principal_symbol, reference_unitary_angles, spectral_distance_jet, Band, ModelParams,
};
use crate::sphere::SphereSymbol;
use crate::star::{CoefficientSet, FirstOrder, StarCoefficients};
use crate::sw::SwKernel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HPath {
    /// Analytic derivatives of `u0`, `H0` and `E` in the chart.
    ClosedForm,
    /// Symbol calculus on band-limited projections.
    StarMachinery,
}

impl std::str::FromStr for HPath {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed_form" | "closed-form" => Ok(Self::ClosedForm),
            "star_machinery" | "star-machinery" | "star" => Ok(Self::StarMachinery),
            other => Err(Error::InvalidArgument(format!("unknown path {other:?}"))),
        }
    }
}

/// Effective symbol on the reference block of `band`, where it is scalar:
/// `h0 = E_m` and `h1` as below.
#[derive(Debug, Clone)]
pub struct EffectiveSymbol {
    pub band: Band,
    pub lambda: f64,
    pub path: HPath,
    pub set: CoefficientSet,
    /// `[h0]` or `[h0, h1]`, scalar symbols.
    pub terms: Vec<SphereSymbol>,
}

impl EffectiveSymbol {
    pub fn truncate(&self, d: f64) -> SphereSymbol {
        let mut out = self.terms[0].clone();
        if let Some(h1) = self.terms.get(1) {
            out = out.with_lmax(out.lmax().max(h1.lmax())).add(&h1.scale_re(1.0 / d));
        }
        out
    }

    /// `h0 pi_r` as a matrix at one point.
    pub fn h0_block(&self, theta: f64, phi: f64) -> CMat {
        let k = self.band.two_s as usize + 1;
        let mut m = CMat::zeros(k, k);
        let a = self.band.index();
        m[(a, a)] = self.terms[0].evaluate_scalar(theta, phi);
        m
    }
}

/// `pi_r [B1(u0, H0) - B1(E, u0)] u0^dagger pi_r` from analytic jets.
pub fn h1_closed_form(theta: f64, phi: f64, lambda: f64, band: Band, first: &FirstOrder) -> num_complex::Complex64 {
    let u = reference_unitary_jet(theta, phi, lambda, band.two_s);
    let h = principal_symbol_jet(theta, phi, lambda, band.two_s);
    let e = energy_jet(theta, lambda, band);
    let b = first_order(first, &u, &h, theta) - first_order(first, &e, &u, theta);
    let a = band.index();
    (b * u.v.adjoint())[(a, a)]
}

/// The same block from the symbol calculus, `b` being
/// `B1(U, H0) - B1(E, U)` for the band-limited `U` and `E`.
pub fn h1_star_at(b: &SphereSymbol, theta: f64, phi: f64, lambda: f64, band: Band) -> num_complex::Complex64 {
    let u0 = reference_unitary_angles(theta, phi, lambda, band.two_s);
    let a = band.index();
    (b.evaluate(theta, phi) * u0.adjoint())[(a, a)]
}

fn star_block(lambda: f64, band: Band, lmax: usize, first: &FirstOrder) -> Result<SphereSymbol> {
    let u = reference_unitary_symbol(lambda, band.two_s, lmax);
    let h0 = principal_symbol(lambda, band.two_s);
    let e = energy_matrix_symbol(lambda, band, lmax);
    Ok(first.apply(&u, &h0)?.sub(&first.apply(&e, &u)?))
}

/// Final closed form printed for spin one half,
/// `(2 dE A_phi + 2 E F) / sin(theta) + E ((2E F / lambda)^2 -+ A_phi) / sin^2(theta)`,
/// reported alongside the computed paths.
pub fn h1_printed(theta: f64, lambda: f64, band: Band) -> f64 {
    // F / lambda -> 0 as lambda -> 0
    if lambda == 0.0 {
        return 0.0;
    }
    let sign = band.two_m.signum() as f64;
    let m = band.m();
    let n = spectral_distance_jet(theta, lambda);
    let tl = band_angle_jet(theta, lambda);
    let e = n.value * m;
    let de = n.d1 * m;
    let a_phi = -m * (1.0 - tl.value.cos());
    let f = -m * tl.value.sin() * tl.d1;
    let s = theta.sin();
    (2.0 * de * a_phi + 2.0 * e * f) / s + e * ((2.0 * e * f / lambda).powi(2) - sign * a_phi) / (s * s)
}

/// Effective symbol through `order` on the reference block of `band`.
pub fn effective_hamiltonian(
    lambda: f64,
    band: Band,
    order: usize,
    path: HPath,
    coeffs: &StarCoefficients,
) -> Result<EffectiveSymbol> {
    if order > 1 {
        return Err(Error::UnsupportedOrder(order));
    }
    if lambda > 0.5 {
        return Err(Error::GaugeSingular(format!(
            "lambda = {lambda} > 1/2: u0 is singular at n = -e3; evaluate h1 pointwise away from it"
        )));
    }
    if path == HPath::ClosedForm && band.two_s != 1 {
        return Err(Error::InvalidArgument("the closed-form path is for two_s = 1".into()));
    }
    let lmax = symbol_band_limit(lambda)?;
    let mut terms = vec![energy_symbol(lambda, band, lmax)];
    if order == 1 {
        let first = coeffs.first;
        let h1 = match path {
            HPath::ClosedForm => {
                SphereSymbol::project_scalar(lmax, |theta, phi| h1_closed_form(theta, phi, lambda, band, &first))
            }
            HPath::StarMachinery => {
                let b = star_block(lambda, band, lmax, &first)?;
                SphereSymbol::project_scalar(lmax, |theta, phi| h1_star_at(&b, theta, phi, lambda, band))
            }
        };
        terms.push(h1);
    }
    Ok(EffectiveSymbol {
        band,
        lambda,
        path,
        set: coeffs.set,
        terms,
    })
}

/// Pointwise `h1` from both paths at the given `(theta, phi)` samples.
pub fn two_path_h1(
    lambda: f64,
    band: Band,
    coeffs: &StarCoefficients,
    points: &[(f64, f64)],
) -> Result<Vec<(num_complex::Complex64, num_complex::Complex64)>> {
    let lmax = symbol_band_limit(lambda)?;
    let b = star_block(lambda, band, lmax, &coeffs.first)?;
    Ok(points
        .iter()
        .map(|&(t, p)| {
            (
                h1_closed_form(t, p, lambda, band, &coeffs.first),
                h1_star_at(&b, t, p, lambda, band),
            )
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumComparison {
    pub band: Band,
    pub lambda: f64,
    pub order: usize,
    pub series: Series,
    /// Largest imaginary part of the quantized effective symbol.
    pub antihermitian: Vec<f64>,
}

fn hausdorff(a: &[f64], b: &[f64]) -> f64 {
    let one_way = |x: &[f64], y: &[f64]| {
        x.iter()
            .map(|&u| y.iter().map(|&v| (u - v).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0f64, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Hausdorff distance between the exact cluster of `band` and the spectrum
/// of `quantize(h0 + h1/d)`.
pub fn band_spectrum_compare(
    d_values: &[u32],
    lambda: f64,
    band: Band,
    order: usize,
    path: HPath,
    coeffs: &StarCoefficients,
) -> Result<SpectrumComparison> {
    check_d_values(d_values, band.two_s)?;
    let eff = effective_hamiltonian(lambda, band, order, path, coeffs)?;
    let per_d = d_values
        .par_iter()
        .map(|&d| -> Result<(f64, f64)> {
            let p = ModelParams::new(d - 1, band.two_s, lambda)?;
            let exact = exact_band_projection(&p)?;
            let kernel = SwKernel::spectral(d - 1);
            let h = kernel.quantize(&eff.truncate(d as f64));
            let anti = crate::linalg::hermiticity_residual(&h);
            let approx = eigvalsh(&((&h + h.adjoint()) * c(0.5)));
            Ok((hausdorff(&exact.cluster(band).eigenvalues, &approx), anti))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumComparison {
        band,
        lambda,
        order,
        series: Series::new(d_values.to_vec(), per_d.iter().map(|x| x.0).collect()),
        antihermitian: per_d.iter().map(|x| x.1).collect(),
    })
}
