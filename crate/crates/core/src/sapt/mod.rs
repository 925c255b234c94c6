//! Space adiabatic perturbation theory for the coupled spin model at
//! orders 0 and 1.
//!
//! Smooth band quantities (projectors, the reference unitary, band
//! energies) enter the symbol calculus as band-limited projections whose
//! band limit follows from the analyticity strip set by the gap.

mod dynamics;
mod effective;
mod jets;
mod projection;

#[cfg(test)]
mod tests;

pub use dynamics::{
    band_energy, classical_flow, egorov_error, flow_endpoint, EgorovReport, FlowState, EGOROV_GRID, ENERGY_DRIFT_BOUND,
    FLOW_SIGN, NORM_DRIFT_BOUND, TIME_SCALE,
};
pub use effective::{
    band_spectrum_compare, effective_hamiltonian, h1_closed_form, h1_printed, h1_star_at, two_path_h1, EffectiveSymbol,
    HPath, SpectrumComparison,
};
pub use projection::{
    almost_invariance_norms, exact_band_projection, moyal_projection, projection_spectrum_defect, Cluster, ExactBands,
    MoyalProjection, SweepPoint, SweepReport, CLUSTER_GAP_RATIO,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{loglog_slope, SlopeFit};
use crate::linalg::{c, identity};
use crate::model::{principal_bands_angles, reference_unitary_angles, spectral_distance, Band};
use crate::sphere::SphereSymbol;

/// Target size of the discarded harmonic tail of projected band symbols.
pub const SYMBOL_TAIL: f64 = 1e-12;
pub const MIN_SYMBOL_LMAX: usize = 4;
pub const MAX_SYMBOL_LMAX: usize = 64;

fn convergence_ratio(lambda: f64) -> f64 {
    let (lo, hi) = if lambda < 0.5 {
        (lambda, 1.0 - lambda)
    } else {
        (1.0 - lambda, lambda)
    };
    hi / lo
}

/// Band limit at which the projected band symbols are accurate to
/// `SYMBOL_TAIL`; their coefficients decay like `rho^{-l}` with
/// `rho = max(lambda, 1 - lambda) / min(lambda, 1 - lambda)`.
pub fn symbol_band_limit(lambda: f64) -> Result<usize> {
    let rho = convergence_ratio(lambda);
    if !rho.is_finite() {
        return Ok(MIN_SYMBOL_LMAX);
    }
    let needed = if rho > 1.0 {
        ((1.0 / SYMBOL_TAIL).ln() / rho.ln()).ceil() as usize + 4
    } else {
        usize::MAX
    };
    if needed > MAX_SYMBOL_LMAX {
        let rho_min = ((1.0 / SYMBOL_TAIL).ln() / (MAX_SYMBOL_LMAX - 4) as f64).exp();
        return Err(Error::GapTooSmall {
            gap: spectral_distance(std::f64::consts::PI, lambda),
            threshold: (rho_min - 1.0) / (rho_min + 1.0),
            lambda,
        });
    }
    Ok(needed.max(MIN_SYMBOL_LMAX))
}

/// Principal projector of `band` as a band-limited symbol.
pub fn projector_symbol(lambda: f64, band: Band, lmax: usize) -> SphereSymbol {
    let k = band.two_s as usize + 1;
    SphereSymbol::project(lmax, k, |theta, phi| {
        principal_bands_angles(theta, phi, lambda, band.two_s).projectors[band.index()].clone()
    })
}

pub fn reference_unitary_symbol(lambda: f64, two_s: u32, lmax: usize) -> SphereSymbol {
    SphereSymbol::project(lmax, two_s as usize + 1, |theta, phi| {
        reference_unitary_angles(theta, phi, lambda, two_s)
    })
}

/// `E_m = N m` as a scalar symbol.
pub fn energy_symbol(lambda: f64, band: Band, lmax: usize) -> SphereSymbol {
    SphereSymbol::project_scalar(lmax, |theta, _| c(spectral_distance(theta, lambda) * band.m()))
}

/// `E_m` times the identity on `H_s`.
fn energy_matrix_symbol(lambda: f64, band: Band, lmax: usize) -> SphereSymbol {
    energy_symbol(lambda, band, lmax).times_matrix(&identity(band.two_s as usize + 1))
}

/// Log-log fit of a quantity against `d_j`.
#[derive(Debug, Clone, Serialize)]
pub struct Series {
    pub d_values: Vec<u32>,
    pub values: Vec<f64>,
    pub fit: SlopeFit,
}

impl Series {
    pub fn new(d_values: Vec<u32>, values: Vec<f64>) -> Self {
        let ds: Vec<f64> = d_values.iter().map(|&d| d as f64).collect();
        let fit = loglog_slope(&ds, &values);
        Self { d_values, values, fit }
    }
}

fn check_d_values(d_values: &[u32], two_s: u32) -> Result<()> {
    if d_values.is_empty() {
        return Err(Error::InvalidArgument("empty d_j list".into()));
    }
    if let Some(&d) = d_values.iter().find(|&&d| d as u64 <= two_s as u64 + 1) {
        return Err(Error::InvalidArgument(format!(
            "d_j = {d} must exceed d_s = {}",
            two_s + 1
        )));
    }
    Ok(())
}
