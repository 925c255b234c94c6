mod geometry;
mod kernel;
mod sapt;
mod star;

use serde::Serialize;
use serde_json::json;
use sphere_sapt::model::Band;

use crate::args::{Cli, Command, Common};
use crate::report::Outcome;
use crate::CliError;

pub fn dispatch(cli: &Cli) -> Result<(Outcome, serde_json::Value), CliError> {
    let common = &cli.common;
    match &cli.command {
        Command::KernelCheck(a) => Ok((kernel::kernel_check(common, a)?, echo(common, a)?)),
        Command::StarSlopes(a) => Ok((star::star_slopes(common, a)?, echo(common, a)?)),
        Command::Calibrate(a) => Ok((star::calibrate(common, a)?, echo(common, a)?)),
        Command::Gap(a) => Ok((geometry::gap(a)?, echo(common, a)?)),
        Command::Chern(a) => Ok((geometry::chern(a)?, echo(common, a)?)),
        Command::Obstruction(a) => Ok((geometry::obstruction(a)?, echo(common, a)?)),
        Command::InvarianceSlopes(a) => Ok((sapt::invariance_slopes(common, a)?, echo(common, a)?)),
        Command::Bands(a) => Ok((sapt::bands(common, a)?, echo(common, a)?)),
        Command::Egorov(a) => Ok((sapt::egorov(common, a)?, echo(common, a)?)),
    }
}

fn echo(common: &Common, args: &impl Serialize) -> Result<serde_json::Value, CliError> {
    Ok(json!({
        "out": common.out,
        "seed": common.seed,
        "coefficient_set": common.coefficient_set,
        "args": serde_json::to_value(args)?,
    }))
}

fn nonempty<T>(name: &str, v: &[T]) -> Result<(), CliError> {
    if v.is_empty() {
        return Err(CliError::Usage(format!("--{name} needs at least one value")));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(CliError::Usage(format!("lambda = {lambda} is outside [0, 1]")));
    }
    Ok(())
}

/// Bands selected by `2m`, all of them when the list is empty.
fn select_bands(two_s: u32, two_m: &[i32]) -> Result<Vec<Band>, CliError> {
    if two_m.is_empty() {
        return Ok(Band::all(two_s));
    }
    Ok(two_m.iter().map(|&m| Band::new(two_s, m)).collect::<Result<_, _>>()?)
}
