//! Decoupling-time, interference-zone, region-geometry, and formula-mode
//! comparison campaigns.

use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use rayon::prelude::*;

use crate::d2d::{extra_pairs, zone_radius_m};
use crate::error::{Error, Result};
use crate::geometry::{apollonius_circle, classify, region_area_mc, NetworkLayout, Point};
use crate::linkbudget::{
    path_loss_db, uplink_tx_power_dbm, CellRadioConfig, FormulaMode, PowerControlConfig,
};
use crate::mobility::{
    decoupling_time_refined_s, decoupling_time_s, empirical_cdf, simulate_trajectory,
};
use crate::powersave::power_saved_mw;
use crate::scenario::config::ScenarioConfig;
use crate::scenario::result::ScenarioResult;
use crate::scenario::transit::{assoc_code, speed_label};

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn median_of_sorted(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Decoupling-time CDFs per speed class.
///
/// Device `i` uses RNG stream `i` of the master seed in every class, so
/// classes walk identical paths and differ only in the per-step speed
/// draws; trajectories are simulated in parallel without affecting the
/// result.
pub fn run_decoupling_time_campaign(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    cfg.validate()?;
    let layout = &cfg.layout;
    let k = layout.dl_ratio_constant()?;
    let params = &cfg.mobility;
    let devices = params.devices_per_class;

    let mut metadata = cfg.echo();
    metadata.insert("campaign".into(), "decoupling_time".into());
    metadata.insert("dl_ratio_constant".into(), k.to_string());

    let mut class_stats = Vec::new();
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    let mut pooled = Vec::new();

    for &speed_mps in &params.speed_classes_mps {
        let outcomes: Vec<(f64, bool, u32)> = (0..devices)
            .into_par_iter()
            .map(|device| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(u64::from(device));
                let start = params.start_band.sample(layout, &mut rng);
                let traj = simulate_trajectory(
                    start,
                    layout,
                    k,
                    params,
                    speed_mps,
                    params.max_time_s,
                    &mut rng,
                );
                let time = if params.refine_crossings {
                    decoupling_time_refined_s(&traj, layout, k)
                } else {
                    decoupling_time_s(&traj)
                };
                (time, traj.timed_out, traj.double_crossings)
            })
            .collect();

        let times: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
        let timed_out = outcomes.iter().filter(|o| o.1).count();
        let double_crossings: u32 = outcomes.iter().map(|o| o.2).sum();
        pooled.extend_from_slice(&times);
        let mut sorted = times.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
        let median = median_of_sorted(&sorted);

        let cdf = empirical_cdf(&times)?;
        // CDF validity: monotone into (0, 1], closing at 1.
        for w in cdf.windows(2) {
            if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) {
                return Err(Error::AssertionFailed(
                    "CDF must be strictly increasing".into(),
                ));
            }
        }
        if cdf.last().map(|p| p.1) != Some(1.0) {
            return Err(Error::AssertionFailed(
                "CDF must close at probability 1".into(),
            ));
        }

        let label = speed_label(speed_mps * 3.6);
        let (mut t_col, mut p_col): (Vec<f64>, Vec<f64>) = cdf.into_iter().unzip();
        // Tied times collapse CDF steps; repeat the final point so every
        // class column keeps devices_per_class rows.
        while t_col.len() < devices as usize {
            t_col.push(*t_col.last().expect("non-empty CDF"));
            p_col.push(1.0);
        }
        columns.push((format!("time_s_{label}"), t_col));
        columns.push((format!("cdf_{label}"), p_col));
        class_stats.push((
            speed_mps,
            mean(&times),
            median,
            timed_out,
            double_crossings,
            label,
        ));
    }

    // Faster classes must spend less time decoupled on average.
    let mut by_speed = class_stats.clone();
    by_speed.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite speeds"));
    for pair in by_speed.windows(2) {
        if pair[0].0 < pair[1].0 && !(pair[0].1 > pair[1].1) {
            return Err(Error::AssertionFailed(format!(
                "mean decoupling time must fall as speed rises: {} m/s -> {} s, {} m/s -> {} s",
                pair[0].0, pair[0].1, pair[1].0, pair[1].1
            )));
        }
    }

    for (speed_mps, mean_s, median_s, timed_out, crossings, label) in &class_stats {
        metadata.insert(format!("class.{label}.speed_mps"), speed_mps.to_string());
        metadata.insert(format!("class.{label}.mean_time_s"), mean_s.to_string());
        metadata.insert(format!("class.{label}.median_time_s"), median_s.to_string());
        metadata.insert(format!("class.{label}.timed_out"), timed_out.to_string());
        metadata.insert(
            format!("class.{label}.double_crossings"),
            crossings.to_string(),
        );
    }
    pooled.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
    metadata.insert(
        "pooled_median_time_s".into(),
        median_of_sorted(&pooled).to_string(),
    );

    let mut result = ScenarioResult::new("decoupling_time_cdf", metadata);
    for (name, values) in columns {
        result.push_column(name, values);
    }
    result.validate()?;
    Ok(result)
}

/// Interference-zone table over (device distance, threshold) pairs.
///
/// Each device is its own scenario: the coupled radius comes from its
/// Macro-directed uplink power, the decoupled radius from its
/// small-cell-directed power. Devices are classified for transparency but
/// not required to be decoupled, since the stock geometry places one
/// device inside the small cell's downlink-dominance disc.
pub fn run_zone_campaign(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    cfg.validate()?;
    let z = &cfg.zones;
    let layout = NetworkLayout::new(
        Point::new(0.0, 0.0),
        CellRadioConfig::new(cfg.layout.macro_radio.dl_tx_power_dbm, z.macro_radius_m)?,
        Point::new(z.small_cell_distance_m, 0.0),
        CellRadioConfig::new(
            cfg.layout.small_radio.dl_tx_power_dbm,
            cfg.layout.small_radio.coverage_radius_m,
        )?,
    )?;
    let k = layout.dl_ratio_constant()?;

    let mut metadata = cfg.echo();
    metadata.insert("campaign".into(), "zones".into());
    metadata.insert("dl_ratio_constant".into(), k.to_string());

    let n = z.device_distances_m.len() * z.thresholds_dbm.len();
    let mut d_macro = Vec::with_capacity(n);
    let mut d_small = Vec::with_capacity(n);
    let mut lambda_col = Vec::with_capacity(n);
    let mut assoc_col = Vec::with_capacity(n);
    let mut a_col = Vec::with_capacity(n);
    let mut b_col = Vec::with_capacity(n);
    let mut area_col = Vec::with_capacity(n);
    let mut pairs_col = Vec::with_capacity(n);

    for &d in &z.device_distances_m {
        let pos = Point::new(d, 0.0);
        let d_m = pos.dist(layout.macro_pos);
        let d_s = pos.dist(layout.small_pos);
        let assoc = classify(pos, &layout, k)?;
        metadata.insert(format!("device.{d}.association"), format!("{assoc:?}"));
        let p_tm = uplink_tx_power_dbm(&cfg.pc, path_loss_db(d_m)?);
        let p_ts = uplink_tx_power_dbm(&cfg.pc, path_loss_db(d_s)?);
        for &lambda in &z.thresholds_dbm {
            let a = zone_radius_m(p_tm, lambda)?;
            let b = zone_radius_m(p_ts, lambda)?;
            if !(b < a) {
                return Err(Error::AssertionFailed(format!(
                    "decoupled zone must shrink: device at {d} m, lambda {lambda} dBm gives a = {a}, b = {b}"
                )));
            }
            let excess = std::f64::consts::PI * (a * a - b * b);
            d_macro.push(d_m);
            d_small.push(d_s);
            lambda_col.push(lambda);
            assoc_col.push(assoc_code(assoc));
            a_col.push(a);
            b_col.push(b);
            area_col.push(excess);
            pairs_col.push(extra_pairs(excess, &cfg.d2d));
        }
    }

    // Nearer the small cell, smaller the decoupled zone (per threshold).
    for li in 0..z.thresholds_dbm.len() {
        let picks: Vec<(f64, f64)> = (0..z.device_distances_m.len())
            .map(|di| {
                let row = di * z.thresholds_dbm.len() + li;
                (d_small[row], b_col[row])
            })
            .collect();
        for i in 0..picks.len() {
            for j in 0..picks.len() {
                if picks[i].0 < picks[j].0 && !(picks[i].1 < picks[j].1) {
                    return Err(Error::AssertionFailed(format!(
                        "device at d_s = {} m must have a smaller decoupled zone than at d_s = {} m",
                        picks[i].0, picks[j].0
                    )));
                }
            }
        }
    }
    // Stricter thresholds strictly grow both zones (per device).
    for di in 0..z.device_distances_m.len() {
        for li in 0..z.thresholds_dbm.len() {
            for lj in 0..z.thresholds_dbm.len() {
                let (ri, rj) = (
                    di * z.thresholds_dbm.len() + li,
                    di * z.thresholds_dbm.len() + lj,
                );
                if lambda_col[ri] < lambda_col[rj]
                    && !(a_col[ri] > a_col[rj] && b_col[ri] > b_col[rj])
                {
                    return Err(Error::AssertionFailed(format!(
                        "zones at lambda {} dBm must contain zones at {} dBm",
                        lambda_col[ri], lambda_col[rj]
                    )));
                }
            }
        }
    }

    let mut result = ScenarioResult::new("interference_zones", metadata);
    result.push_column("d_macro_m", d_macro);
    result.push_column("d_small_m", d_small);
    result.push_column("lambda_dbm", lambda_col);
    result.push_column("assoc", assoc_col);
    result.push_column("a_m", a_col);
    result.push_column("b_m", b_col);
    result.push_column("excess_area_m2", area_col);
    result.push_column("extra_pairs", pairs_col);
    result.validate()?;
    Ok(result)
}

/// Region-geometry summary: ratio constant, Apollonius circle, Monte Carlo
/// region area, and the segment-minus-disc closed form when the disc lies
/// inside both the uplink half-plane and the Macro disc.
pub fn run_region_campaign(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    cfg.validate()?;
    let layout = &cfg.layout;
    let k = layout.dl_ratio_constant()?;
    let circle = apollonius_circle(layout, k);
    let estimate = region_area_mc(layout, k, cfg.region.n_samples, cfg.seed)?;

    let half_gap = 0.5 * layout.macro_pos.dist(layout.small_pos);
    let r_cov = layout.macro_radio.coverage_radius_m;
    // Distance from the Macro to the disc center, along the M->S axis by
    // construction.
    let center_offset = circle.center.dist(layout.macro_pos);
    let analytic_valid =
        center_offset - circle.radius_m > half_gap && center_offset + circle.radius_m < r_cov;
    let analytic = if analytic_valid {
        let segment = r_cov * r_cov * (half_gap / r_cov).acos()
            - half_gap * (r_cov * r_cov - half_gap * half_gap).sqrt();
        segment - std::f64::consts::PI * circle.radius_m * circle.radius_m
    } else {
        f64::NAN
    };

    let mut metadata = cfg.echo();
    metadata.insert("campaign".into(), "region".into());
    metadata.insert("analytic_area_valid".into(), analytic_valid.to_string());

    let mut result = ScenarioResult::new("region_geometry", metadata);
    result.push_column("dl_ratio_constant", vec![k]);
    result.push_column("apollonius_center_x_m", vec![circle.center.x]);
    result.push_column("apollonius_center_y_m", vec![circle.center.y]);
    result.push_column("apollonius_radius_m", vec![circle.radius_m]);
    result.push_column("area_mc_m2", vec![estimate.area_m2]);
    result.push_column("area_std_error_m2", vec![estimate.std_error_m2]);
    result.push_column("area_analytic_m2", vec![analytic]);
    result.validate()?;
    Ok(result)
}

/// Formula-mode comparison over a (d_m, d_s/d_m, alpha, P0, K) grid: the
/// dB-consistent and literal readings of the uplink power, received power,
/// power ratio, saved power, and decoupled zone radius, side by side.
/// Report only; no assertions beyond table shape.
pub fn run_formula_comparison(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    cfg.validate()?;
    let grid = &cfg.compare;
    let lambda = grid.lambda_dbm;

    let n = grid.d_m_m.len()
        * grid.ds_over_dm.len()
        * grid.alphas.len()
        * grid.p0_dbm.len()
        * grid.num_rbs.len();
    let mut cols: Vec<Vec<f64>> = (0..17).map(|_| Vec::with_capacity(n)).collect();

    for &d_m in &grid.d_m_m {
        for &ratio in &grid.ds_over_dm {
            for &alpha in &grid.alphas {
                for &p0 in &grid.p0_dbm {
                    for &num_rbs in &grid.num_rbs {
                        let d_s = ratio * d_m;
                        let consistent = PowerControlConfig::new(
                            p0,
                            alpha,
                            cfg.pc.pmax_dbm,
                            num_rbs,
                            cfg.pc.noise_dbm,
                            FormulaMode::DbConsistent,
                        )?;
                        let literal = PowerControlConfig {
                            mode: FormulaMode::Literal,
                            ..consistent
                        };

                        let pl_m = path_loss_db(d_m)?;
                        let ul_c = uplink_tx_power_dbm(&consistent, pl_m);
                        let ul_l = uplink_tx_power_dbm(&literal, pl_m);

                        // Received power at the Macro: dB reading vs the
                        // literal exponent form, which yields a linear
                        // number with P0/10 multiplied into the exponent.
                        let rx_c = p0 + (alpha - 1.0) * pl_m;
                        let rx_l = 10.0_f64.powf(p0 / 10.0 * (alpha - 1.0) * pl_m);

                        let ratio_c = (d_s / d_m).powf(3.0 * alpha);
                        let ratio_l = (d_s / d_m).powf(3.0 * alpha * p0);

                        let saved_c = power_saved_mw(d_m, d_s, &consistent)?;
                        let saved_l = power_saved_mw(d_m, d_s, &literal)?;

                        let zone_a = zone_radius_m(ul_c, lambda).unwrap_or(f64::NAN);
                        let zone_b_c = zone_radius_m(
                            uplink_tx_power_dbm(&consistent, path_loss_db(d_s)?),
                            lambda,
                        )
                        .unwrap_or(f64::NAN);
                        // Literal closed form for b, fed with the same a.
                        let zone_b_l = (zone_a.powi(30)
                            - 10.0_f64.powf(35.0 * alpha - 1.0)
                                * (d_m.powf(30.0 * alpha) - d_s.powf(30.0 * alpha)))
                        .powf(1.0 / 30.0);

                        for (slot, v) in [
                            d_m,
                            d_s,
                            alpha,
                            p0,
                            f64::from(num_rbs),
                            pl_m,
                            ul_c,
                            ul_l,
                            rx_c,
                            rx_l,
                            ratio_c,
                            ratio_l,
                            saved_c,
                            saved_l,
                            zone_a,
                            zone_b_c,
                            zone_b_l,
                        ]
                        .into_iter()
                        .enumerate()
                        {
                            cols[slot].push(v);
                        }
                    }
                }
            }
        }
    }

    let mut metadata = cfg.echo();
    metadata.insert("campaign".into(), "compare".into());
    metadata.insert("grid_rows".into(), n.to_string());
    metadata.insert(
        "note.ul_half_plane_polynomial".into(),
        "the printed half-plane inequality is orientation-inverted relative to the d_M > d_S expansion; membership uses raw distances".into(),
    );
    metadata.insert(
        "note.dl_boundary_polynomial".into(),
        "the printed boundary quadratic drops an X_M^2 term; the Apollonius closed form is used instead".into(),
    );
    metadata.insert(
        "note.zone_b_literal".into(),
        "the literal decoupled-radius closed form retains its printed 10^(35*alpha - 1) constant and may go undefined (NaN)".into(),
    );

    let names = [
        "d_m_m",
        "d_s_m",
        "alpha",
        "p0_dbm",
        "num_rbs",
        "pl_macro_db",
        "ul_tx_dbm_consistent",
        "ul_tx_dbm_literal",
        "rx_dbm_consistent",
        "rx_linear_literal",
        "ratio_consistent",
        "ratio_literal",
        "saved_mw_consistent",
        "saved_mw_literal",
        "zone_a_m",
        "zone_b_m_consistent",
        "zone_b_m_literal",
    ];
    let mut result = ScenarioResult::new("formula_comparison", metadata);
    for (name, values) in names.into_iter().zip(cols) {
        result.push_column(name, values);
    }
    result.validate()?;
    Ok(result)
}
