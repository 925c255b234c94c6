use serde_json::json;
use sphere_sapt::berry::band_chern;
use sphere_sapt::model::{gap_profile, spectral_distance, Band, ModelParams};
use sphere_sapt::sapt::exact_band_projection;

use super::{check_lambda, nonempty};
use crate::args::{ChernArgs, GapArgs, ObstructionArgs};
use crate::report::{num, Check, Outcome, Table};
use crate::CliError;

pub fn gap(a: &GapArgs) -> Result<Outcome, CliError> {
    for &l in &a.lambdas {
        check_lambda(l)?;
    }
    let mut table = Table::new(&["lambda", "theta", "distance"]);
    let mut checks = Vec::new();
    if a.thetas == 0 || a.lambdas.is_empty() {
        return Ok(Outcome {
            checks,
            table,
            results: json!({ "profiles": [] }),
        });
    }
    let mut profiles = Vec::new();
    let mut worst_pi = 0.0f64;
    for &lambda in &a.lambdas {
        let p = gap_profile(lambda, a.thetas);
        for (t, v) in p.thetas.iter().zip(&p.values) {
            table.push(vec![num(lambda), num(*t), num(*v)]);
        }
        worst_pi = worst_pi.max((spectral_distance(std::f64::consts::PI, lambda) - (1.0 - 2.0 * lambda).abs()).abs());
        if lambda == 0.5 {
            let min = p.values.iter().copied().fold(f64::INFINITY, f64::min);
            checks.push(Check::below("minimum_at_half", min, 1e-12));
        }
        profiles.push(json!({ "lambda": lambda, "minimum": p.minimum, "argmin": p.argmin }));
    }
    checks.insert(0, Check::below("distance_at_south_pole", worst_pi, 1e-12));
    Ok(Outcome {
        checks,
        table,
        results: json!({ "profiles": profiles }),
    })
}

/// `0` below the transition, `-2m` above it.
fn expected_chern(lambda: f64, band: Band) -> i64 {
    if lambda > 0.5 {
        -band.two_m as i64
    } else {
        0
    }
}

pub fn chern(a: &ChernArgs) -> Result<Outcome, CliError> {
    nonempty("grid", &a.grid)?;
    let mut table = Table::new(&["two_s", "band", "lambda", "grid", "chern", "raw"]);
    let mut results = Vec::new();
    let (mut exact, mut stable) = (true, true);
    for &two_s in &a.two_s {
        for &lambda in &a.lambdas {
            check_lambda(lambda)?;
            let mut sum = 0i64;
            for band in Band::all(two_s) {
                let mut first = None;
                for &n in &a.grid {
                    let r = band_chern(lambda, band, n)?;
                    table.push(vec![
                        two_s.to_string(),
                        band.label(),
                        num(lambda),
                        n.to_string(),
                        r.chern.to_string(),
                        num(r.raw),
                    ]);
                    exact &= r.chern == expected_chern(lambda, band);
                    stable &= first.is_none_or(|c| c == r.chern);
                    first.get_or_insert(r.chern);
                }
                let c = first.expect("at least one grid");
                sum += c;
                results.push(
                    json!({ "two_s": two_s, "band": band.label(), "lambda": lambda, "chern": c,
                    "expected": expected_chern(lambda, band) }),
                );
            }
            exact &= sum == 0;
        }
    }
    let mut checks = vec![Check::flag("chern_integers", exact, "0 below 1/2, -2m above")];
    if a.grid.len() > 1 {
        checks.push(Check::flag("stable_under_refinement", stable, "equal on every grid"));
    }
    Ok(Outcome {
        checks,
        table,
        results: json!({ "bands": results }),
    })
}

pub fn obstruction(a: &ObstructionArgs) -> Result<Outcome, CliError> {
    let mut table = Table::new(&["lambda", "two_j", "band", "rank", "reference_rank", "expected_rank"]);
    let mut results = Vec::new();
    let (mut ranks_ok, mut mismatch_ok) = (true, true);
    for &lambda in &a.lambdas {
        check_lambda(lambda)?;
        for &two_j in &a.two_j {
            let p = ModelParams::new(two_j, a.two_s, lambda)?;
            let bands = exact_band_projection(&p)?;
            let d = p.dj() as i64;
            for c in &bands.clusters {
                let expected = d - expected_chern(lambda, c.band);
                let rank = c.rank as i64;
                table.push(vec![
                    num(lambda),
                    two_j.to_string(),
                    c.band.label(),
                    rank.to_string(),
                    d.to_string(),
                    expected.to_string(),
                ]);
                ranks_ok &= rank == expected;
                // the rank differs from the reference rank exactly for the nontrivial bundles
                mismatch_ok &= (rank != d) == (expected_chern(lambda, c.band) != 0);
                results.push(
                    json!({ "lambda": lambda, "two_j": two_j, "band": c.band.label(), "rank": rank,
                    "reference_rank": d, "gap_ratio": bands.gap_ratio }),
                );
            }
        }
    }
    Ok(Outcome {
        checks: vec![
            Check::flag("exact_ranks", ranks_ok, "d_j - C"),
            Check::flag("reference_mismatch", mismatch_ok, "rank != d_j iff C != 0"),
        ],
        table,
        results: json!({ "clusters": results }),
    })
}
