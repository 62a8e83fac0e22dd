//! Linear-transit campaign: a device rides the Macro-to-small-cell line
//! and its uplink SINR, spectral efficiency, and target-SINR transmit
//! power are traced under the coupled and decoupled association policies.
//!
//! The landmarks are computed from geometry, never hard-coded: B is the
//! first point on the line that classifies as decoupled, C the first that
//! classifies as coupled-small; both are refined by bisection to 1 mm.

use crate::error::{Error, Result};
use crate::geometry::{classify, dl_prefers_macro, Association, NetworkLayout, Point};
use crate::linkbudget::{
    path_loss_db, received_power_dbm, sinr_db, spectral_efficiency, tx_power_for_target_sinr_dbm,
    uplink_tx_power_dbm, PowerControlConfig,
};
use crate::scenario::config::ScenarioConfig;
use crate::scenario::result::ScenarioResult;

/// Association code emitted in the `assoc` column.
pub(crate) fn assoc_code(a: Association) -> f64 {
    match a {
        Association::CoupledMacro => 0.0,
        Association::Decoupled => 1.0,
        Association::CoupledSmall => 2.0,
    }
}

/// A point on the transit line at distance `x_m` from the Macro.
fn line_point(layout: &NetworkLayout, x_m: f64) -> Point {
    let len = layout.macro_pos.dist(layout.small_pos);
    let ux = (layout.small_pos.x - layout.macro_pos.x) / len;
    let uy = (layout.small_pos.y - layout.macro_pos.y) / len;
    Point::new(layout.macro_pos.x + x_m * ux, layout.macro_pos.y + x_m * uy)
}

/// Bisect for the boundary where `pred` flips from false (at `lo`) to
/// true (at `hi`), to 1 mm.
fn bisect_boundary(mut lo: f64, mut hi: f64, mut pred: impl FnMut(f64) -> bool) -> f64 {
    debug_assert!(!pred(lo) && pred(hi));
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

struct LinkTrace {
    sinr_db: f64,
    se_bpshz: f64,
    tx_for_target_dbm: f64,
}

/// Uplink metrics toward a serving cell at distance `d_serving`.
fn uplink_trace(
    cfg: &PowerControlConfig,
    d_serving_m: f64,
    interferers_dbm: &[f64],
    target_sinr_db: f64,
) -> Result<LinkTrace> {
    let pl = path_loss_db(d_serving_m)?;
    let tx = uplink_tx_power_dbm(cfg, pl);
    let rx = received_power_dbm(tx, pl);
    let sinr = sinr_db(rx, interferers_dbm, cfg.noise_dbm)?;
    // Interference-plus-noise level seen by the serving cell: recovered
    // from the same denominator the SINR used.
    let ipn_dbm = rx - sinr;
    let (tx_for_target, _capped) =
        tx_power_for_target_sinr_dbm(target_sinr_db, pl, ipn_dbm, cfg.pmax_dbm);
    Ok(LinkTrace {
        sinr_db: sinr,
        se_bpshz: spectral_efficiency(sinr),
        tx_for_target_dbm: tx_for_target,
    })
}

/// Received interference at the serving cell from one uplink interferer
/// that is power-controlled toward its own serving cell.
fn interference_dbm(
    cfg: &PowerControlConfig,
    interferer_pos: Point,
    own_cell: Point,
    victim_cell: Point,
) -> Result<f64> {
    let tx = uplink_tx_power_dbm(cfg, path_loss_db(interferer_pos.dist(own_cell))?);
    Ok(received_power_dbm(
        tx,
        path_loss_db(interferer_pos.dist(victim_cell))?,
    ))
}

pub fn run_transit_campaign(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    cfg.validate()?;
    let layout = &cfg.layout;
    let k = layout.dl_ratio_constant()?;
    let t = &cfg.transit;
    let line_len = layout.macro_pos.dist(layout.small_pos);

    // Sample positions, inclusive of the end point.
    let mut xs = Vec::new();
    let mut x = t.start_m;
    while x <= t.end_m + 1e-9 {
        xs.push(x.min(t.end_m));
        x += t.spacing_m;
    }
    if xs.iter().any(|&x| (x - line_len).abs() < 1e-12) {
        return Err(Error::InvalidConfig(
            "transit samples must not coincide with the small cell".into(),
        ));
    }

    let classify_at = |x: f64| classify(line_point(layout, x), layout, k);

    // Landmarks B (region entry) and C (small-cell region entry) from the
    // classification transitions along the sample walk.
    let assocs: Vec<Association> = xs.iter().map(|&x| classify_at(x)).collect::<Result<_>>()?;
    let first_decoupled = assocs
        .iter()
        .position(|&a| a == Association::Decoupled)
        .ok_or_else(|| {
            Error::AssertionFailed(
                "transit line never enters the decoupling region; widen [start, end]".into(),
            )
        })?;
    let first_small = assocs
        .iter()
        .position(|&a| a == Association::CoupledSmall)
        .ok_or_else(|| {
            Error::AssertionFailed(
                "transit line never reaches the small-cell region; extend end".into(),
            )
        })?;
    if first_small < first_decoupled {
        return Err(Error::AssertionFailed(
            "transit enters the small-cell region before the decoupling region".into(),
        ));
    }

    let x_b = if first_decoupled == 0 {
        xs[0]
    } else {
        bisect_boundary(xs[first_decoupled - 1], xs[first_decoupled], |x| {
            matches!(classify_at(x), Ok(Association::Decoupled))
        })
    };
    let x_c = bisect_boundary(xs[first_small - 1], xs[first_small], |x| {
        matches!(classify_at(x), Ok(Association::CoupledSmall))
    });

    // Optional single interferer per serving cell.
    let macro_interference: Vec<f64> = if t.with_interference {
        vec![interference_dbm(
            &cfg.pc,
            line_point(layout, t.interferer_for_macro_m),
            layout.small_pos,
            layout.macro_pos,
        )?]
    } else {
        Vec::new()
    };
    let small_interference: Vec<f64> = if t.with_interference {
        vec![interference_dbm(
            &cfg.pc,
            line_point(layout, t.interferer_for_small_m),
            layout.macro_pos,
            layout.small_pos,
        )?]
    } else {
        Vec::new()
    };

    let n = xs.len();
    let mut d_macro = Vec::with_capacity(n);
    let mut d_small = Vec::with_capacity(n);
    let mut assoc_col = Vec::with_capacity(n);
    let mut sinr_coupled = Vec::with_capacity(n);
    let mut sinr_decoupled = Vec::with_capacity(n);
    let mut se_coupled = Vec::with_capacity(n);
    let mut se_decoupled = Vec::with_capacity(n);
    let mut tx_coupled = Vec::with_capacity(n);
    let mut tx_decoupled = Vec::with_capacity(n);

    for (&x, &assoc) in xs.iter().zip(&assocs) {
        let p = line_point(layout, x);
        let dm = p.dist(layout.macro_pos);
        let ds = p.dist(layout.small_pos);

        // Coupled policy: both links follow the downlink-preferred cell.
        // Decoupled policy: the uplink moves to the small cell inside the
        // decoupling region and matches the coupled policy elsewhere.
        let coupled_serves_macro = dl_prefers_macro(p, layout, k);
        let decoupled_serves_macro = coupled_serves_macro && assoc != Association::Decoupled;

        let trace_for = |serves_macro: bool| -> Result<LinkTrace> {
            if serves_macro {
                uplink_trace(&cfg.pc, dm, &macro_interference, t.target_sinr_db)
            } else {
                uplink_trace(&cfg.pc, ds, &small_interference, t.target_sinr_db)
            }
        };
        let coupled = trace_for(coupled_serves_macro)?;
        let decoupled = if decoupled_serves_macro == coupled_serves_macro {
            // Same serving cell, identical metrics by construction.
            trace_for(coupled_serves_macro)?
        } else {
            trace_for(false)?
        };

        d_macro.push(dm);
        d_small.push(ds);
        assoc_col.push(assoc_code(assoc));
        sinr_coupled.push(coupled.sinr_db);
        sinr_decoupled.push(decoupled.sinr_db);
        se_coupled.push(coupled.se_bpshz);
        se_decoupled.push(decoupled.se_bpshz);
        tx_coupled.push(coupled.tx_for_target_dbm);
        tx_decoupled.push(decoupled.tx_for_target_dbm);
    }

    // Campaign postconditions (the noise-only model guarantees them; a
    // configured interferer breaks the symmetry they rely on).
    if !t.with_interference {
        for i in 0..n {
            if assocs[i] == Association::Decoupled {
                if !(se_decoupled[i] > se_coupled[i]) {
                    return Err(Error::AssertionFailed(format!(
                        "decoupled SE must exceed coupled SE inside the region: x = {} m",
                        xs[i]
                    )));
                }
                if !(tx_decoupled[i] < tx_coupled[i]) {
                    return Err(Error::AssertionFailed(format!(
                        "decoupled target power must undercut coupled inside the region: x = {} m",
                        xs[i]
                    )));
                }
            } else {
                if se_decoupled[i] != se_coupled[i] || tx_decoupled[i] != tx_coupled[i] {
                    return Err(Error::AssertionFailed(format!(
                        "policies must coincide outside the region: x = {} m",
                        xs[i]
                    )));
                }
            }
        }
        // Monotonicity across the decoupled stretch.
        for i in 1..n {
            if assocs[i] == Association::Decoupled && assocs[i - 1] == Association::Decoupled {
                if se_decoupled[i] < se_decoupled[i - 1] {
                    return Err(Error::AssertionFailed(format!(
                        "decoupled SE must be non-decreasing on [B, C]: x = {} m",
                        xs[i]
                    )));
                }
                if se_coupled[i] > se_coupled[i - 1] {
                    return Err(Error::AssertionFailed(format!(
                        "coupled SE must be non-increasing on [B, C]: x = {} m",
                        xs[i]
                    )));
                }
            }
        }
    }

    let mut metadata = cfg.echo();
    metadata.insert("campaign".into(), "transit".into());
    metadata.insert("landmark.x_a_m".into(), t.start_m.to_string());
    metadata.insert("landmark.x_b_m".into(), x_b.to_string());
    metadata.insert("landmark.x_c_m".into(), x_c.to_string());
    metadata.insert("landmark.x_d_m".into(), t.end_m.to_string());
    metadata.insert("dl_ratio_constant".into(), k.to_string());

    let mut result = ScenarioResult::new("transit", metadata);
    result.push_column("x_m", xs.clone());
    result.push_column("d_macro_m", d_macro);
    result.push_column("d_small_m", d_small);
    result.push_column("assoc", assoc_col);
    result.push_column("sinr_coupled_db", sinr_coupled);
    result.push_column("sinr_decoupled_db", sinr_decoupled);
    result.push_column("se_coupled_bpshz", se_coupled);
    result.push_column("se_decoupled_bpshz", se_decoupled);
    result.push_column("txpower_coupled_dbm", tx_coupled);
    result.push_column("txpower_decoupled_dbm", tx_decoupled);
    for &speed in &t.speeds_kmph {
        let mps = speed / 3.6;
        result.push_column(
            format!("time_s_{}", speed_label(speed)),
            xs.iter().map(|&x| (x - t.start_m) / mps).collect(),
        );
    }
    result.validate()?;
    Ok(result)
}

/// "20kmph"-style label; integral speeds drop the decimals.
pub(crate) fn speed_label(kmph: f64) -> String {
    if (kmph - kmph.round()).abs() < 1e-9 {
        format!("{}kmph", kmph.round() as i64)
    } else {
        format!("{kmph}kmph")
    }
}
