use serde_json::json;
use sphere_sapt::model::Band;
use sphere_sapt::sapt::{
    almost_invariance_norms, band_spectrum_compare, effective_hamiltonian, egorov_error, h1_closed_form, h1_printed,
    projection_spectrum_defect, two_path_h1, HPath, ENERGY_DRIFT_BOUND, NORM_DRIFT_BOUND,
};
use sphere_sapt::sphere::SphereSymbol;
use sphere_sapt::star::{ProductKind, StarCoefficients};

use super::{check_lambda, nonempty, select_bands};
use crate::args::{BandsArgs, Common, EgorovArgs, InvarianceArgs, SweepArgs};
use crate::report::{num, Check, Outcome, Table};
use crate::CliError;

/// Pointwise agreement required between the two routes to `h1`.
const TWO_PATH_TOLERANCE: f64 = 1e-8;

fn prepare(common: &Common, s: &SweepArgs) -> Result<(Vec<Band>, StarCoefficients), CliError> {
    check_lambda(s.lambda)?;
    nonempty("d-values", &s.d_values)?;
    Ok((
        select_bands(s.two_s, &s.two_m)?,
        StarCoefficients::select(ProductKind::Moyal, common.coefficient_set)?,
    ))
}

/// Slope expected of an order-`k` approximation, with its tolerance.
fn order_target(order: usize, wide: bool) -> (f64, f64) {
    (-(order as f64 + 1.0), if wide && order > 0 { 0.4 } else { 0.3 })
}

pub fn invariance_slopes(common: &Common, a: &InvarianceArgs) -> Result<Outcome, CliError> {
    let (bands, coeffs) = prepare(common, &a.sweep)?;
    nonempty("orders", &a.orders)?;
    let mut table = Table::new(&["band", "order", "d", "quantity", "value"]);
    let mut checks = Vec::new();
    let mut results = Vec::new();
    for band in &bands {
        for &order in &a.orders {
            let inv = almost_invariance_norms(&a.sweep.d_values, a.sweep.lambda, *band, order, &coeffs)?;
            let def = projection_spectrum_defect(&a.sweep.d_values, a.sweep.lambda, *band, order, &coeffs)?;
            for r in [&inv, &def] {
                for p in &r.points {
                    table.push(vec![
                        band.label(),
                        order.to_string(),
                        p.d.to_string(),
                        r.quantity.clone(),
                        num(p.value),
                    ]);
                }
            }
            let (target, tol) = order_target(order, false);
            checks.push(Check::slope(
                format!("invariance_band_{}_order_{order}", band.label()),
                &inv.series.fit,
                target,
                tol,
            ));
            results.push(json!({ "band": band.label(), "order": order, "commutator": inv, "projection_defect": def }));
        }
    }
    Ok(Outcome {
        checks,
        table,
        results: json!({ "sweeps": results }),
    })
}

/// Sample points for the pointwise `h1` comparisons, away from the poles.
fn h1_points() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 1..=7 {
        let theta = std::f64::consts::PI * i as f64 / 8.0;
        for phi in [0.0, 1.3, 4.0] {
            out.push((theta, phi));
        }
    }
    out
}

pub fn bands(common: &Common, a: &BandsArgs) -> Result<Outcome, CliError> {
    let (bands, coeffs) = prepare(common, &a.sweep)?;
    nonempty("orders", &a.orders)?;
    let lambda = a.sweep.lambda;
    let mut table = Table::new(&["band", "order", "d", "distance"]);
    let mut checks = Vec::new();
    let mut sweeps = Vec::new();
    for band in &bands {
        for &order in &a.orders {
            let r = band_spectrum_compare(&a.sweep.d_values, lambda, *band, order, a.path, &coeffs)?;
            for (d, v) in r.series.d_values.iter().zip(&r.series.values) {
                table.push(vec![band.label(), order.to_string(), d.to_string(), num(*v)]);
            }
            let (target, tol) = order_target(order, true);
            checks.push(Check::slope(
                format!("spectrum_band_{}_order_{order}", band.label()),
                &r.series.fit,
                target,
                tol,
            ));
            sweeps.push(r);
        }
    }

    let mut samples = Vec::new();
    let mut decoupled_h1_star = None;
    if a.sweep.two_s == 1 && a.orders.contains(&1) {
        let points = h1_points();
        let mut worst = 0.0f64;
        let mut decoupled = 0.0f64;
        let mut decoupled_star = 0.0f64;
        for band in &bands {
            let pairs = two_path_h1(lambda, *band, &coeffs, &points)?;
            for (&(theta, phi), (closed, star)) in points.iter().zip(&pairs) {
                worst = worst.max((closed - star).norm());
                samples.push(
                    json!({ "band": band.label(), "theta": theta, "phi": phi, "closed_form": closed.re,
                    "star": star.re, "printed": h1_printed(theta, lambda, *band) }),
                );
                decoupled = decoupled.max(h1_closed_form(theta, phi, 0.0, *band, &coeffs.first).norm());
            }
            let eff = effective_hamiltonian(0.0, *band, 1, HPath::ClosedForm, &coeffs)?;
            decoupled = decoupled.max(eff.terms[1].max_coeff());
            // the projected route carries quadrature roundoff, reported only
            let eff = effective_hamiltonian(0.0, *band, 1, HPath::StarMachinery, &coeffs)?;
            decoupled_star = decoupled_star.max(eff.terms[1].max_coeff());
        }
        checks.push(Check::below("two_path_h1", worst, TWO_PATH_TOLERANCE));
        checks.push(Check::equals("h1_decoupled_zero", decoupled, 0.0, 0.0));
        decoupled_h1_star = Some(decoupled_star);
    }
    Ok(Outcome {
        checks,
        table,
        results: json!({ "sweeps": sweeps, "h1_samples": samples, "decoupled_h1_star": decoupled_h1_star }),
    })
}

pub fn egorov(common: &Common, a: &EgorovArgs) -> Result<Outcome, CliError> {
    let (bands, coeffs) = prepare(common, &a.sweep)?;
    let observable = SphereSymbol::coordinate(a.observable.axis());
    let mut table = Table::new(&["band", "d", "error"]);
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    let (mut energy, mut norm) = (0.0f64, 0.0f64);
    for band in &bands {
        let r = egorov_error(
            &a.sweep.d_values,
            a.sweep.lambda,
            *band,
            a.order,
            &observable,
            a.t_end,
            a.dt,
            &coeffs,
        )?;
        for (d, v) in r.series.d_values.iter().zip(&r.series.values) {
            table.push(vec![band.label(), d.to_string(), num(*v)]);
        }
        checks.push(Check::slope(
            format!("egorov_band_{}", band.label()),
            &r.series.fit,
            -1.0,
            0.3,
        ));
        energy = energy.max(r.max_energy_drift);
        norm = norm.max(r.max_norm_drift);
        reports.push(r);
    }
    checks.push(Check::below("energy_drift", energy, ENERGY_DRIFT_BOUND));
    checks.push(Check::below("norm_drift", norm, NORM_DRIFT_BOUND));
    Ok(Outcome {
        checks,
        table,
        results: json!({ "reports": reports }),
    })
}
