//! The coupled spin model `H = (1 - lambda) 1 x S3 + lambda (2/d_j) J . S`
//! on `H_j x H_s`, its symbols and the principal band structure.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, identity, kron, CMat};
use crate::sphere::{Grid, SphereSymbol};
use crate::spin::{angles, make_irrep, unit_vector, wigner_zyz, SpinIrrep};
use crate::star::SemiclassicalSymbol;


/// Below this the spectral distance counts as closed.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub two_j: u32,
    pub two_s: u32,
    pub lambda: f64,
}

impl ModelParams {
    pub fn new(two_j: u32, two_s: u32, lambda: f64) -> Result<Self> {
        if two_j <= two_s {
            return Err(Error::InvalidArgument(format!(
                "need d_j > d_s, got two_j = {two_j}, two_s = {two_s}"
            )));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!("lambda = {lambda} outside [0, 1]")));
        }
        Ok(Self { two_j, two_s, lambda })
    }

    pub fn dj(&self) -> usize {
        self.two_j as usize + 1
    }

    pub fn ds(&self) -> usize {
        self.two_s as usize + 1
    }
}

/// A principal band, labelled by its magnetic number `m = two_m / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Band {
    pub two_s: u32,
    pub two_m: i32,
}

impl Band {
    pub fn new(two_s: u32, two_m: i32) -> Result<Self> {
        let s = two_s as i32;
        if two_m.abs() > s || (s - two_m) % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "no band two_m = {two_m} for two_s = {two_s}"
            )));
        }
        Ok(Self { two_s, two_m })
    }

    /// Band at basis index `a`, i.e. `m = s - a`.
    pub fn from_index(two_s: u32, a: usize) -> Self {
        Self {
            two_s,
            two_m: two_s as i32 - 2 * a as i32,
        }
    }

    pub fn all(two_s: u32) -> Vec<Self> {
        (0..=two_s as usize).map(|a| Self::from_index(two_s, a)).collect()
    }

    pub fn m(&self) -> f64 {
        self.two_m as f64 / 2.0
    }

    pub fn index(&self) -> usize {
        ((self.two_s as i32 - self.two_m) / 2) as usize
    }

    /// `+`/`-` for spin one half, otherwise the value of `m`.
    pub fn label(&self) -> String {
        match (self.two_s, self.two_m) {
            (1, 1) => "+".into(),
            (1, -1) => "-".into(),
            (_, m) if m % 2 == 0 => format!("{}", m / 2),
            (_, m) => format!("{m}/2"),
        }
    }
}

/// Value and first two derivatives in `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// `N(theta, lambda)`, the spacing of adjacent principal eigenvalues.
pub fn spectral_distance(theta: f64, lambda: f64) -> f64 {
    let mu = 1.0 - lambda;
    (lambda * lambda + mu * mu + 2.0 * lambda * mu * theta.cos())
        .max(0.0)
        .sqrt()
}

pub fn spectral_distance_jet(theta: f64, lambda: f64) -> Jet {
    let n = spectral_distance(theta, lambda);
    let k = lambda * (1.0 - lambda);
    let (s, co) = theta.sin_cos();
    Jet {
        value: n,
        d1: -k * s / n,
        d2: -k * co / n - k * k * s * s / (n * n * n),
    }
}

/// Polar angle of `n_lambda`, the direction of `(1 - lambda) e3 + lambda n`.
pub fn band_angle(theta: f64, lambda: f64) -> f64 {
    (lambda * theta.sin()).atan2((1.0 - lambda) + lambda * theta.cos())
}

pub fn band_angle_jet(theta: f64, lambda: f64) -> Jet {
    let n2 = spectral_distance(theta, lambda).powi(2);
    let (s, co) = theta.sin_cos();
    let g = lambda * (lambda + (1.0 - lambda) * co);
    Jet {
        value: band_angle(theta, lambda),
        d1: g / n2,
        d2: -lambda * (1.0 - lambda) * s * (n2 - 2.0 * g) / (n2 * n2),
    }
}

/// Coefficient of `d^{-2k} n . S` in the symbol series, from the expansion
/// of `lambda sqrt(1 - d^{-2})`.
pub fn symbol_series_coefficient(k: usize, lambda: f64) -> f64 {
    if k == 0 {
        return lambda;
    }
    let mut binom = 1.0;
    for i in 0..k {
        binom *= (2 * k - i) as f64 / (i + 1) as f64;
    }
    lambda * binom / (1.0 - 2.0 * k as f64) / 4f64.powi(k as i32)
}

/// The full Hamiltonian on `H_j x H_s`, index `a d_s + b`.
pub fn build_hamiltonian(p: &ModelParams) -> CMat {
    let jrep = make_irrep(p.two_j);
    let srep = make_irrep(p.two_s);
    let dj = p.dj() as f64;
    let mut h = kron(&identity(p.dj()), srep.j3()) * c(1.0 - p.lambda);
    for a in 0..3 {
        h += kron(&jrep.components()[a], &srep.components()[a]) * c(p.lambda * 2.0 / dj);
    }
    h
}

fn n_dot_s(srep: &SpinIrrep) -> SphereSymbol {
    (0..3)
        .map(|a| SphereSymbol::coordinate(a).times_matrix(&srep.components()[a]))
        .reduce(|x, y| x.add(&y))
        .expect("three components")
}

/// `(1 - lambda) S3 + lambda n . S`.
pub fn principal_symbol(lambda: f64, two_s: u32) -> SphereSymbol {
    let srep = make_irrep(two_s);
    SphereSymbol::constant(&(srep.j3() * c(1.0 - lambda))).add(&n_dot_s(&srep).scale_re(lambda))
}

/// Closed form `(1 - lambda) S3 + lambda sqrt(1 - d^{-2}) n . S`.
pub fn exact_symbol(p: &ModelParams) -> SphereSymbol {
    let srep = make_irrep(p.two_s);
    let dj = p.dj() as f64;
    let ns = n_dot_s(&srep).scale_re(p.lambda * (1.0 - dj.powi(-2)).sqrt());
    SphereSymbol::constant(&(srep.j3() * c(1.0 - p.lambda))).add(&ns)
}

/// Closed form of the lower symbol, `(1 - lambda) S3 + lambda (1 - 1/d) n . S`.
pub fn exact_lower_symbol(p: &ModelParams) -> SphereSymbol {
    let srep = make_irrep(p.two_s);
    let dj = p.dj() as f64;
    let ns = n_dot_s(&srep).scale_re(p.lambda * (1.0 - 1.0 / dj));
    SphereSymbol::constant(&(srep.j3() * c(1.0 - p.lambda))).add(&ns)
}

/// The symbol as a series in `1/d`: `H_0` followed by the terms through
/// order `max_order`; odd orders vanish.
pub fn hamiltonian_symbol(lambda: f64, two_s: u32, max_order: usize) -> SemiclassicalSymbol {
    let srep = make_irrep(two_s);
    let ns = n_dot_s(&srep);
    let mut terms = vec![principal_symbol(lambda, two_s)];
    for order in 1..=max_order {
        terms.push(if order % 2 == 1 {
            SphereSymbol::zeros(1, srep.dim())
        } else {
            ns.scale_re(symbol_series_coefficient(order / 2, lambda))
        });
    }
    SemiclassicalSymbol::new(terms)
}

/// `e^{-i phi S3} e^{i theta_lambda S2} e^{i phi S3}`, rotating `n_lambda`
/// to `e3` under the adjoint action.
pub fn reference_unitary(n: [f64; 3], lambda: f64, two_s: u32) -> CMat {
    let (theta, phi) = angles(n);
    reference_unitary_angles(theta, phi, lambda, two_s)
}

pub fn reference_unitary_angles(theta: f64, phi: f64, lambda: f64, two_s: u32) -> CMat {
    wigner_zyz(&make_irrep(two_s), phi, band_angle(theta, lambda), phi)
}

/// Constant projector onto the basis vector of `band`.
pub fn reference_projector(band: Band) -> CMat {
    let d = band.two_s as usize + 1;
    let mut p = CMat::zeros(d, d);
    p[(band.index(), band.index())] = c(1.0);
    p
}

/// Principal eigen-data at one point of the sphere.
#[derive(Debug, Clone)]
pub struct BandSlice {
    pub n: [f64; 3],
    pub lambda: f64,
    pub two_s: u32,
    pub distance: f64,
    /// `E_m = N m`, in basis order (`m = s - a`).
    pub energies: Vec<f64>,
    /// Columns `psi_m(n_lambda) = u0^dagger e_a`.
    pub frame: CMat,
    /// Empty at the degeneracy point.
    pub projectors: Vec<CMat>,
    pub u0: CMat,
    pub degenerate: bool,
    /// `n_lambda = -e3`, where the frame depends on the chart.
    pub gauge_singular: bool,
}

pub fn principal_bands(n: [f64; 3], lambda: f64, two_s: u32) -> Result<BandSlice> {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!("|n| = {norm} is not 1")));
    }
    let (theta, phi) = angles(n);
    Ok(principal_bands_angles(theta, phi, lambda, two_s))
}

pub fn principal_bands_angles(theta: f64, phi: f64, lambda: f64, two_s: u32) -> BandSlice {
    let distance = spectral_distance(theta, lambda);
    let ds = two_s as usize + 1;
    let degenerate = distance < DEGENERACY_TOLERANCE;
    let u0 = reference_unitary_angles(theta, phi, lambda, two_s);
    let frame = u0.adjoint();
    let energies = Band::all(two_s).iter().map(|b| distance * b.m()).collect();
    let projectors = if degenerate {
        Vec::new()
    } else {
        (0..ds)
            .map(|a| {
                let col = frame.column(a);
                col * col.adjoint()
            })
            .collect()
    };
    let gauge_singular = (band_angle(theta, lambda) - std::f64::consts::PI).abs() < 1e-9;
    BandSlice {
        n: unit_vector(theta, phi),
        lambda,
        two_s,
        distance,
        energies,
        frame,
        projectors,
        u0,
        degenerate,
        gauge_singular,
    }
}

/// One principal band sampled on a quadrature grid (ring-major nodes).
#[derive(Debug, Clone)]
pub struct BandData {
    pub band: Band,
    pub lambda: f64,
    pub energy: Vec<f64>,
    pub frame: Vec<CMat>,
    pub projector: Vec<CMat>,
    pub u0: Vec<CMat>,
    pub gauge_singular: Vec<bool>,
}

pub fn band_data(grid: &Grid, lambda: f64, band: Band) -> Result<BandData> {
    let mut out = BandData {
        band,
        lambda,
        energy: Vec::with_capacity(grid.len()),
        frame: Vec::with_capacity(grid.len()),
        projector: Vec::with_capacity(grid.len()),
        u0: Vec::with_capacity(grid.len()),
        gauge_singular: Vec::with_capacity(grid.len()),
    };
    for node in 0..grid.len() {
        let (theta, phi) = grid.angles(node);
        let slice = principal_bands_angles(theta, phi, lambda, band.two_s);
        if slice.degenerate {
            return Err(Error::Degenerate { n: slice.n, lambda });
        }
        let a = band.index();
        out.energy.push(slice.energies[a]);
        out.frame.push(slice.frame.columns(a, 1).into_owned());
        out.projector.push(slice.projectors[a].clone());
        out.u0.push(slice.u0);
        out.gauge_singular.push(slice.gauge_singular);
    }
    Ok(out)
}

/// `N(theta, lambda)` on a uniform `theta` grid over `[0, pi]`.
#[derive(Debug, Clone, Serialize)]
pub struct GapProfile {
    pub lambda: f64,
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
    /// `min_theta N = N(pi) = |1 - 2 lambda|`.
    pub minimum: f64,
    pub argmin: f64,
}

pub fn gap_profile(lambda: f64, samples: usize) -> GapProfile {
    let samples = samples.max(2);
    let thetas: Vec<f64> = (0..samples)
        .map(|i| std::f64::consts::PI * i as f64 / (samples - 1) as f64)
        .collect();
    let values = thetas.iter().map(|&t| spectral_distance(t, lambda)).collect();
    // N^2 is affine in cos(theta) with slope 2 lambda (1 - lambda) >= 0
    let argmin = std::f64::consts::PI;
    GapProfile {
        lambda,
        thetas,
        values,
        minimum: spectral_distance(argmin, lambda),
        argmin,
    }
}
