//! Named single-value calculators: direct command-line access to the
//! equation-level operations.

use dude_core::d2d::{excess_area_m2, zone_radius_m, InterferenceZone};
use dude_core::geometry::{dl_constant_k, Point};
use dude_core::linkbudget::{path_loss_db, FormulaMode, PowerControlConfig};
use dude_core::powersave::{power_ratio, power_saved_mw};

use crate::CliError;

#[derive(Debug)]
pub struct CalcOutput {
    pub value: f64,
    pub unit: &'static str,
}

pub const CALCULATORS: &[(&str, &str)] = &[
    (
        "path-loss",
        "path-loss <d_m>                      path loss in dB at a distance in meters",
    ),
    (
        "k",
        "k <macro_dbm> <small_dbm>           downlink distance-ratio constant",
    ),
    (
        "zone-radius",
        "zone-radius <tx_dbm> <lambda_dbm>   interference-zone radius in meters",
    ),
    (
        "power-ratio",
        "power-ratio <d_s> <d_m> <alpha> [p0_dbm]   small/Macro transmit power ratio",
    ),
    (
        "power-saved",
        "power-saved <d_m> <d_s> [alpha] [p0_dbm] [pmax_dbm]   saved power in mW (K = 1)",
    ),
    (
        "excess-area",
        "excess-area <a_m> <b_m>             freed D2D area in m^2",
    ),
];

fn expect_args(name: &str, args: &[f64], min: usize, max: usize) -> Result<(), CliError> {
    if args.len() < min || args.len() > max {
        let want = if min == max {
            format!("{min}")
        } else {
            format!("{min} to {max}")
        };
        return Err(CliError::Config(format!(
            "calculator '{name}' takes {want} arguments, got {}",
            args.len()
        )));
    }
    Ok(())
}

/// Evaluates one named calculator. `power-ratio` and `power-saved` honor
/// the formula mode; the rest are mode-independent.
pub fn run_calc(name: &str, args: &[f64], mode: FormulaMode) -> Result<CalcOutput, CliError> {
    match name {
        "path-loss" => {
            expect_args(name, args, 1, 1)?;
            Ok(CalcOutput {
                value: path_loss_db(args[0])?,
                unit: " dB",
            })
        }
        "k" => {
            expect_args(name, args, 2, 2)?;
            Ok(CalcOutput {
                value: dl_constant_k(args[0], args[1])?,
                unit: "",
            })
        }
        "zone-radius" => {
            expect_args(name, args, 2, 2)?;
            Ok(CalcOutput {
                value: zone_radius_m(args[0], args[1])?,
                unit: " m",
            })
        }
        "power-ratio" => {
            expect_args(name, args, 3, 4)?;
            let p0 = args.get(3).copied().unwrap_or(-80.0);
            let cfg = PowerControlConfig::new(p0, args[2], 23.0, 1, -102.0, mode)?;
            Ok(CalcOutput {
                value: power_ratio(args[0], args[1], &cfg)?,
                unit: "",
            })
        }
        "power-saved" => {
            expect_args(name, args, 2, 5)?;
            let alpha = args.get(2).copied().unwrap_or(0.7);
            let p0 = args.get(3).copied().unwrap_or(-80.0);
            let pmax = args.get(4).copied().unwrap_or(23.0);
            let cfg = PowerControlConfig::new(p0, alpha, pmax, 1, -102.0, mode)?;
            Ok(CalcOutput {
                value: power_saved_mw(args[0], args[1], &cfg)?,
                unit: " mW",
            })
        }
        "excess-area" => {
            expect_args(name, args, 2, 2)?;
            let zone = InterferenceZone::new(Point::new(0.0, 0.0), args[0], args[1])?;
            Ok(CalcOutput {
                value: excess_area_m2(&zone),
                unit: " m^2",
            })
        }
        other => Err(CliError::Config(format!(
            "unknown calculator '{other}'; available: {}",
            CALCULATORS
                .iter()
                .map(|(n, _)| *n)
                .collect::<Vec<_>>()
                .join(", ")
        ))),
    }
}
