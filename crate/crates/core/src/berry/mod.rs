//! Berry-Simon connection and curvature of the principal band line bundles,
//! and Chern numbers from plaquette products of projectors.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::model::{band_angle_jet, principal_bands_angles, Band, BandData};
use crate::sphere::Grid;

#[cfg(test)]
mod tests;

/// Step of the central differences applied to the eigenframe.
const FRAME_STEP: f64 = 1e-5;
/// Default plaquette grid used by `berry_connection_curvature`.
pub const DEFAULT_CHERN_GRID: usize = 40;

#[derive(Debug, Clone, Serialize)]
pub struct BerryData {
    pub band: Band,
    pub lambda: f64,
    /// Components in the `(theta, phi)` chart at the grid nodes.
    pub a_theta: Vec<f64>,
    pub a_phi: Vec<f64>,
    pub f_theta_phi: Vec<f64>,
    /// Quadrature value of the curvature integral.
    pub flux: f64,
    pub chern: i64,
}

fn frame(theta: f64, phi: f64, lambda: f64, band: Band) -> nalgebra::DVector<num_complex::Complex64> {
    principal_bands_angles(theta, phi, lambda, band.two_s)
        .frame
        .column(band.index())
        .into_owned()
}

/// `A = i <psi, d psi>` and `F = dA` from the explicit eigenframe
/// `psi_m = u0^dagger e_m`, differentiated numerically. The chart is
/// singular where `n_lambda = -e3`.
pub fn berry_connection_curvature(data: &BandData, grid: &Grid) -> Result<BerryData> {
    let band = data.band;
    let lambda = data.lambda;
    if data.energy.len() != grid.len() {
        return Err(Error::InvalidArgument(
            "band data was sampled on a different grid".into(),
        ));
    }
    let h = FRAME_STEP;
    let per_node: Vec<(f64, f64, f64)> = (0..grid.len())
        .into_par_iter()
        .map(|node| {
            let (theta, phi) = grid.angles(node);
            let psi = &data.frame[node];
            let dt = (frame(theta + h, phi, lambda, band) - frame(theta - h, phi, lambda, band))
                / num_complex::Complex64::new(2.0 * h, 0.0);
            let dp = (frame(theta, phi + h, lambda, band) - frame(theta, phi - h, lambda, band))
                / num_complex::Complex64::new(2.0 * h, 0.0);
            let psi = psi.column(0);
            let a_theta = -psi.dotc(&dt).im;
            let a_phi = -psi.dotc(&dp).im;
            let f = -2.0 * dt.dotc(&dp).im;
            (a_theta, a_phi, f)
        })
        .collect();
    let f_theta_phi: Vec<f64> = per_node.iter().map(|x| x.2).collect();
    // quadrature weights carry sin(theta)
    let flux = (0..grid.len())
        .map(|node| grid.weight(node) * f_theta_phi[node] / grid.angles(node).0.sin())
        .sum();
    let chern = band_chern(lambda, band, DEFAULT_CHERN_GRID)?.chern;
    Ok(BerryData {
        band,
        lambda,
        a_theta: per_node.iter().map(|x| x.0).collect(),
        a_phi: per_node.iter().map(|x| x.1).collect(),
        f_theta_phi,
        flux,
        chern,
    })
}

/// `A_phi = -m (1 - cos theta_lambda)`, `A_theta = 0`.
pub fn closed_form_connection(theta: f64, lambda: f64, band: Band) -> (f64, f64) {
    let tl = band_angle_jet(theta, lambda).value;
    (0.0, -band.m() * (1.0 - tl.cos()))
}

/// `F_theta_phi = -m sin(theta_lambda) theta_lambda'`.
pub fn closed_form_curvature(theta: f64, lambda: f64, band: Band) -> f64 {
    let j = band_angle_jet(theta, lambda);
    -band.m() * j.value.sin() * j.d1
}

/// Closed product grid `theta_i = i pi / n_theta`, `phi_k = 2 pi k / n_phi`,
/// both poles included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClosedGrid {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl ClosedGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 2 || n_phi < 3 {
            return Err(Error::InsufficientGrid {
                needed: 3,
                available: n_theta.min(n_phi),
            });
        }
        Ok(Self { n_theta, n_phi })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn theta(&self, i: usize) -> f64 {
        PI * i as f64 / self.n_theta as f64
    }

    pub fn phi(&self, k: usize) -> f64 {
        TAU * (k % self.n_phi) as f64 / self.n_phi as f64
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChernResult {
    pub chern: i64,
    /// Unrounded plaquette sum over `2 pi`.
    pub raw: f64,
}

/// Gauge-invariant first Chern number of the rank-one projector field.
///
/// Each plaquette contributes `-arg tr(P1 P2 P3 P4)` with corners taken
/// counterclockwise in `(theta, phi)`; at the poles every `phi` maps to the
/// projector of the `phi = 0` chart.
pub fn chern_plaquette(grid: &ClosedGrid, projector: impl Fn(f64, f64) -> Result<CMat> + Sync) -> Result<ChernResult> {
    let nt = grid.n_theta;
    let np = grid.n_phi;
    let rows: Vec<Vec<CMat>> = (0..=nt)
        .into_par_iter()
        .map(|i| -> Result<Vec<CMat>> {
            let theta = grid.theta(i);
            if i == 0 || i == nt {
                let p = projector(theta, 0.0)?;
                Ok(vec![p; np])
            } else {
                (0..np).map(|k| projector(theta, grid.phi(k))).collect()
            }
        })
        .collect::<Result<_>>()?;
    let total: f64 = (0..nt)
        .into_par_iter()
        .map(|i| {
            (0..np)
                .map(|k| {
                    let k1 = (k + 1) % np;
                    let prod = &rows[i][k] * &rows[i + 1][k] * &rows[i + 1][k1] * &rows[i][k1];
                    -prod.trace().arg()
                })
                .sum::<f64>()
        })
        .sum();
    let raw = total / TAU;
    Ok(ChernResult {
        chern: raw.round() as i64,
        raw,
    })
}

/// Chern number of a principal band on an `n x n` closed grid.
pub fn band_chern(lambda: f64, band: Band, n: usize) -> Result<ChernResult> {
    let grid = ClosedGrid::square(n)?;
    chern_plaquette(&grid, |theta, phi| {
        let slice = principal_bands_angles(theta, phi, lambda, band.two_s);
        if slice.degenerate {
            return Err(Error::Degenerate { n: slice.n, lambda });
        }
        Ok(slice.projectors[band.index()].clone())
    })
}
