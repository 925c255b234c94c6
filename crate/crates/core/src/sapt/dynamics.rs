use rayon::prelude::*;
use serde::Serialize;

use super::{check_d_values, effective_hamiltonian, HPath, Series};
use crate::error::{Error, Result};
use crate::linalg::expi_hermitian;
use crate::model::Band;
use crate::sphere::{shared_grid, SphereSymbol};
use crate::star::StarCoefficients;
use crate::sw::SwKernel;

/// Orientation of the classical flow, `n' = FLOW_SIGN n x grad E`, fixed by
/// matching the quantum precession generated by `quantize(n3)`.
pub const FLOW_SIGN: f64 = -1.0;
/// Quantum time `s = TIME_SCALE d t` for macroscopic time `t`.
pub const TIME_SCALE: f64 = 0.5;
/// Grid on which quantum and classical observables are compared.
pub const EGOROV_GRID: usize = 160;
/// Bound on `|E(n(t)) - E(n(0))|` along a flow.
pub const ENERGY_DRIFT_BOUND: f64 = 1e-8;
pub const NORM_DRIFT_BOUND: f64 = 1e-10;

/// `E(n)` and its ambient gradient.
pub type EnergyFn<'a> = dyn Fn([f64; 3]) -> (f64, [f64; 3]) + Sync + 'a;

/// `E_m(n) = m N(n3, lambda)` with its gradient.
pub fn band_energy(lambda: f64, band: Band) -> impl Fn([f64; 3]) -> (f64, [f64; 3]) + Sync {
    let mu = 1.0 - lambda;
    let m = band.m();
    move |n: [f64; 3]| {
        let nn = (lambda * lambda + mu * mu + 2.0 * lambda * mu * n[2]).max(0.0).sqrt();
        let g = if nn > 0.0 { m * lambda * mu / nn } else { 0.0 };
        (m * nn, [0.0, 0.0, g])
    }
}

fn field(energy: &EnergyFn, n: [f64; 3]) -> [f64; 3] {
    let (_, g) = energy(n);
    let cross = [
        n[1] * g[2] - n[2] * g[1],
        n[2] * g[0] - n[0] * g[2],
        n[0] * g[1] - n[1] * g[0],
    ];
    cross.map(|x| FLOW_SIGN * x)
}

fn rk4_step(energy: &EnergyFn, n: [f64; 3], dt: f64) -> [f64; 3] {
    let add = |a: [f64; 3], b: [f64; 3], s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]];
    let k1 = field(energy, n);
    let k2 = field(energy, add(n, k1, dt / 2.0));
    let k3 = field(energy, add(n, k2, dt / 2.0));
    let k4 = field(energy, add(n, k3, dt));
    let mut out = n;
    for i in 0..3 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    let norm = (out[0] * out[0] + out[1] * out[1] + out[2] * out[2]).sqrt();
    out.map(|x| x / norm)
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowState {
    pub times: Vec<f64>,
    pub trajectory: Vec<[f64; 3]>,
    pub energies: Vec<f64>,
    pub max_norm_drift: f64,
    pub max_energy_drift: f64,
}

impl FlowState {
    pub fn end(&self) -> [f64; 3] {
        *self.trajectory.last().expect("non-empty flow")
    }
}

fn steps(t_end: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0 and T >= 0, got dt = {dt}, T = {t_end}"
        )));
    }
    let n = (t_end / dt).ceil().max(0.0) as usize;
    Ok((n, if n > 0 { t_end / n as f64 } else { dt }))
}

fn check_start(n0: [f64; 3]) -> Result<()> {
    let norm = (n0[0] * n0[0] + n0[1] * n0[1] + n0[2] * n0[2]).sqrt();
    if (norm - 1.0).abs() > NORM_DRIFT_BOUND {
        return Err(Error::InvalidArgument(format!("|n0| = {norm} is not 1")));
    }
    Ok(())
}

/// Fixed-step RK4 for `n' = FLOW_SIGN n x grad E` with renormalization
/// after every step; fails when the energy drifts.
pub fn classical_flow(energy: &EnergyFn, n0: [f64; 3], t_end: f64, dt: f64) -> Result<FlowState> {
    check_start(n0)?;
    let (count, h) = steps(t_end, dt)?;
    let e0 = energy(n0).0;
    let mut state = FlowState {
        times: vec![0.0],
        trajectory: vec![n0],
        energies: vec![e0],
        max_norm_drift: 0.0,
        max_energy_drift: 0.0,
    };
    let mut n = n0;
    for i in 1..=count {
        n = rk4_step(energy, n, h);
        let t = i as f64 * h;
        let e = energy(n).0;
        let drift = (e - e0).abs();
        if drift > ENERGY_DRIFT_BOUND {
            return Err(Error::FlowDrift {
                drift,
                bound: ENERGY_DRIFT_BOUND,
                t,
            });
        }
        let norm_drift = ((n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt() - 1.0).abs();
        state.max_energy_drift = state.max_energy_drift.max(drift);
        state.max_norm_drift = state.max_norm_drift.max(norm_drift);
        state.times.push(t);
        state.trajectory.push(n);
        state.energies.push(e);
    }
    Ok(state)
}

/// End point of `classical_flow` without recording the trajectory.
pub fn flow_endpoint(energy: &EnergyFn, n0: [f64; 3], t_end: f64, dt: f64) -> Result<([f64; 3], f64)> {
    check_start(n0)?;
    let (count, h) = steps(t_end, dt)?;
    let e0 = energy(n0).0;
    let mut n = n0;
    let mut worst = 0.0f64;
    for i in 1..=count {
        n = rk4_step(energy, n, h);
        let drift = (energy(n).0 - e0).abs();
        if drift > ENERGY_DRIFT_BOUND {
            return Err(Error::FlowDrift {
                drift,
                bound: ENERGY_DRIFT_BOUND,
                t: i as f64 * h,
            });
        }
        worst = worst.max(drift);
    }
    Ok((n, worst))
}

#[derive(Debug, Clone, Serialize)]
pub struct EgorovReport {
    pub band: Band,
    pub lambda: f64,
    pub order: usize,
    pub t_end: f64,
    pub series: Series,
    pub max_energy_drift: f64,
    pub max_norm_drift: f64,
}

/// `sup_n |dequantize(e^{i h s} O e^{-i h s}) - o0 o Phi_t|` at `t = T`,
/// `s = TIME_SCALE d T`, with `h = quantize(h0 + h1/d)`.
#[allow(clippy::too_many_arguments)]
pub fn egorov_error(
    d_values: &[u32],
    lambda: f64,
    band: Band,
    order: usize,
    observable: &SphereSymbol,
    t_end: f64,
    dt: f64,
    coeffs: &StarCoefficients,
) -> Result<EgorovReport> {
    check_d_values(d_values, band.two_s)?;
    if band.two_s != 1 {
        return Err(Error::InvalidArgument(
            "the Egorov comparison needs a scalar band (two_s = 1)".into(),
        ));
    }
    let eff = effective_hamiltonian(lambda, band, order, HPath::StarMachinery, coeffs)?;
    let grid = shared_grid(EGOROV_GRID);
    let energy = band_energy(lambda, band);
    let classical: Vec<(f64, f64, f64)> = (0..grid.len())
        .into_par_iter()
        .map(|node| -> Result<(f64, f64, f64)> {
            let n0 = grid.point(node);
            let (n, drift) = flow_endpoint(&energy, n0, t_end, dt)?;
            let (theta, phi) = crate::spin::angles(n);
            let norm = ((n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt() - 1.0).abs();
            Ok((observable.evaluate_scalar(theta, phi).re, drift, norm))
        })
        .collect::<Result<_>>()?;
    let values = d_values
        .par_iter()
        .map(|&d| -> Result<f64> {
            let kernel = SwKernel::spectral(d - 1);
            let h = kernel.quantize(&eff.truncate(d as f64));
            let h = (&h + h.adjoint()) * crate::linalg::c(0.5);
            let s = TIME_SCALE * d as f64 * t_end;
            let u = expi_hermitian(&h, s);
            let o = kernel.quantize(observable);
            let evolved = kernel.dequantize(&(&u * o * u.adjoint()));
            let field = evolved.synthesize(&grid)?;
            Ok((0..grid.len())
                .map(|node| (field.at(node)[0] - classical[node].0).norm())
                .fold(0.0f64, f64::max))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EgorovReport {
        band,
        lambda,
        order,
        t_end,
        series: Series::new(d_values.to_vec(), values),
        max_energy_drift: classical.iter().map(|x| x.1).fold(0.0, f64::max),
        max_norm_drift: classical.iter().map(|x| x.2).fold(0.0, f64::max),
    })
}
