use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use sphere_sapt::linalg::{max_abs, CMat};
use sphere_sapt::model::{build_hamiltonian, exact_lower_symbol, exact_symbol, ModelParams};
use sphere_sapt::sphere::{shared_grid, SphereSymbol};
use sphere_sapt::spin::{lm_count, make_irrep};
use sphere_sapt::sw::{build_kernel, kernel_residuals, lower_symbol, SwKernel, PROPERTY_TOLERANCE};

use super::{check_lambda, nonempty};
use crate::args::{Common, KernelCheckArgs};
use crate::report::{num, Check, Outcome, Table};
use crate::CliError;

fn random_symbol(lmax: usize, rng: &mut ChaCha8Rng) -> SphereSymbol {
    let coeffs = (0..lm_count(lmax))
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    SphereSymbol::from_coeffs(lmax, 1, coeffs)
}

fn random_operator(d: usize, rng: &mut ChaCha8Rng) -> CMat {
    CMat::from_fn(d, d, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Largest `|quantize(Y_lm)|` over the two degrees just above `2j`.
fn projected_out(kernel: &SwKernel) -> f64 {
    let top = kernel.two_j() as usize;
    let mut worst = 0.0f64;
    for l in top + 1..=top + 2 {
        for m in -(l as i64)..=l as i64 {
            worst = worst.max(max_abs(&kernel.quantize(&SphereSymbol::harmonic(l, m))));
        }
    }
    worst
}

pub fn kernel_check(common: &Common, a: &KernelCheckArgs) -> Result<Outcome, CliError> {
    nonempty("two-j", &a.two_j)?;
    for &l in &a.lambdas {
        check_lambda(l)?;
    }
    let mut table = Table::new(&["two_j", "quantity", "lambda", "value"]);
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let (mut axioms, mut round_trip, mut projects) = (0.0f64, 0.0f64, 0.0f64);
    let mut per_kernel = Vec::new();
    for &two_j in &a.two_j {
        let kernel = build_kernel(&make_irrep(two_j), shared_grid(2 * two_j as usize + 2))?;
        let r = kernel_residuals(&kernel, a.trials, rng.random())?;
        for (name, v) in [
            ("hermiticity", r.hermiticity),
            ("normalization", r.normalization),
            ("reproducing", r.reproducing),
            ("trace_duality", r.trace_duality),
            ("covariance", r.covariance),
        ] {
            table.push(vec![two_j.to_string(), name.into(), String::new(), num(v)]);
        }
        axioms = axioms.max(r.max());

        let f = random_symbol(two_j as usize, &mut rng);
        let sym_trip = kernel.dequantize(&kernel.quantize(&f)).sub(&f).max_coeff();
        let op = random_operator(kernel.dim(), &mut rng);
        let op_trip = max_abs(&(kernel.quantize(&kernel.dequantize(&op)) - &op));
        let above = projected_out(&kernel);
        for (name, v) in [
            ("symbol_round_trip", sym_trip),
            ("operator_round_trip", op_trip),
            ("projected_out", above),
        ] {
            table.push(vec![two_j.to_string(), name.into(), String::new(), num(v)]);
        }
        round_trip = round_trip.max(sym_trip).max(op_trip);
        projects = projects.max(above);
        per_kernel.push(json!({ "two_j": two_j, "residuals": r, "symbol_round_trip": sym_trip,
            "operator_round_trip": op_trip, "projected_out": above }));
    }

    let (mut weyl, mut lower) = (0.0f64, 0.0f64);
    for &two_j in &a.symbol_two_j {
        let kernel = SwKernel::spectral(two_j);
        for &lambda in &a.lambdas {
            let p = ModelParams::new(two_j, a.two_s, lambda)?;
            let h = build_hamiltonian(&p);
            let w = kernel.dequantize(&h).sub(&exact_symbol(&p)).max_coeff();
            let l = lower_symbol(&h, two_j).sub(&exact_lower_symbol(&p)).max_coeff();
            table.push(vec![two_j.to_string(), "exact_symbol".into(), num(lambda), num(w)]);
            table.push(vec![two_j.to_string(), "lower_symbol".into(), num(lambda), num(l)]);
            weyl = weyl.max(w);
            lower = lower.max(l);
        }
    }

    let mut checks = vec![
        Check::below("kernel_axioms", axioms, PROPERTY_TOLERANCE),
        Check::below("round_trips", round_trip, 1e-10),
        Check::equals("projects_out_above_2j", projects, 0.0, 0.0),
    ];
    if !a.symbol_two_j.is_empty() && !a.lambdas.is_empty() {
        checks.push(Check::below("exact_symbol", weyl, 1e-10));
        checks.push(Check::below("exact_lower_symbol", lower, 1e-10));
    }
    Ok(Outcome {
        checks,
        table,
        results: json!({ "kernels": per_kernel, "exact_symbol_residual": weyl, "lower_symbol_residual": lower }),
    })
}
