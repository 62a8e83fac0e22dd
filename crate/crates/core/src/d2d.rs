//! Interference zones of a decoupling device and the excess area in which
//! device-to-device pairs become enabled once the device hands its uplink
//! to the small cell.
//!
//! A zone is the disc around a transmitter inside which a prospective D2D
//! receiver would see interference at or above the threshold. Received
//! interference falls with path loss, so the zone radius solves
//! `lambda = tx - PL(r)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{classify, Association, NetworkLayout, Point};
use crate::linkbudget::{
    dbm_to_mw, mw_to_dbm, path_loss_db, received_power_dbm, uplink_tx_power_dbm,
    PowerControlConfig, PL_REF_DB, PL_SLOPE_DB,
};
use crate::pairwise_sum;

/// D2D enablement parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct D2DConfig {
    /// Interference threshold lambda (dBm); a receiver seeing this much or
    /// more cannot be part of an enabled pair.
    pub lambda_dbm: f64,
    /// Average number of enable-able D2D pairs per square meter.
    pub pair_density_per_m2: f64,
}

impl D2DConfig {
    pub fn new(lambda_dbm: f64, pair_density_per_m2: f64) -> Result<Self> {
        if !lambda_dbm.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "lambda_dbm must be finite, got {lambda_dbm}"
            )));
        }
        if !(pair_density_per_m2 >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "pair density must be non-negative, got {pair_density_per_m2}"
            )));
        }
        Ok(Self {
            lambda_dbm,
            pair_density_per_m2,
        })
    }
}

/// Coupled and decoupled interference zones of one device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterferenceZone {
    /// Decoupling device position.
    pub center: Point,
    /// Zone radius while uplinked to the Macro (m).
    pub radius_coupled_m: f64,
    /// Zone radius while uplinked to the small cell (m).
    pub radius_decoupled_m: f64,
}

impl InterferenceZone {
    pub fn new(center: Point, radius_coupled_m: f64, radius_decoupled_m: f64) -> Result<Self> {
        if !(radius_coupled_m > 0.0) || !(radius_decoupled_m > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "zone radii must be positive, got a = {radius_coupled_m}, b = {radius_decoupled_m}"
            )));
        }
        if radius_decoupled_m > radius_coupled_m {
            return Err(Error::InvalidConfig(format!(
                "decoupled radius b = {radius_decoupled_m} must not exceed coupled radius a = {radius_coupled_m}"
            )));
        }
        Ok(Self {
            center,
            radius_coupled_m,
            radius_decoupled_m,
        })
    }
}

/// Radius at which interference from a `tx_dbm` transmitter falls to the
/// threshold: r = 10^((tx - lambda - 35)/30).
///
/// Requires `tx_dbm - lambda_dbm > 35` so the radius exceeds the model's
/// 1 m reference distance.
pub fn zone_radius_m(tx_dbm: f64, lambda_dbm: f64) -> Result<f64> {
    if !(tx_dbm - lambda_dbm > PL_REF_DB) {
        return Err(Error::DegenerateZone { tx_dbm, lambda_dbm });
    }
    Ok(10.0_f64.powf((tx_dbm - lambda_dbm - PL_REF_DB) / PL_SLOPE_DB))
}

/// Interference-zone pair of a decoupling device.
///
/// The coupled radius comes from the Macro-directed uplink power at d_M,
/// the decoupled radius from the small-cell-directed power at d_S. Errors
/// unless the device classifies as [`Association::Decoupled`]. In the
/// uncapped dB-consistent regime b = a*(d_S/d_M)^alpha; when both powers
/// cap at Pmax the radii coincide and the excess area is zero.
pub fn zone_pair(
    device_pos: Point,
    layout: &NetworkLayout,
    cfg: &PowerControlConfig,
    d2d: &D2DConfig,
) -> Result<InterferenceZone> {
    let k = layout.dl_ratio_constant()?;
    if classify(device_pos, layout, k)? != Association::Decoupled {
        return Err(Error::NotDecoupled {
            x: device_pos.x,
            y: device_pos.y,
        });
    }
    let d_m = device_pos.dist(layout.macro_pos);
    let d_s = device_pos.dist(layout.small_pos);
    let p_tm = uplink_tx_power_dbm(cfg, path_loss_db(d_m)?);
    let p_ts = uplink_tx_power_dbm(cfg, path_loss_db(d_s)?);
    let a = zone_radius_m(p_tm, d2d.lambda_dbm)?;
    let b = zone_radius_m(p_ts, d2d.lambda_dbm)?;
    InterferenceZone::new(device_pos, a, b)
}

/// Excess D2D-enabling area of one device: pi*(a^2 - b^2).
pub fn excess_area_m2(zone: &InterferenceZone) -> f64 {
    std::f64::consts::PI
        * (zone.radius_coupled_m * zone.radius_coupled_m
            - zone.radius_decoupled_m * zone.radius_decoupled_m)
}

/// Total excess area over a set of devices whose coupled zones must be
/// pairwise disjoint; the sum would double-count overlapping annuli.
pub fn total_excess_area_m2(zones: &[InterferenceZone]) -> Result<f64> {
    for i in 0..zones.len() {
        for j in (i + 1)..zones.len() {
            let gap = zones[i].center.dist(zones[j].center);
            if gap < zones[i].radius_coupled_m + zones[j].radius_coupled_m {
                return Err(Error::OverlappingZones {
                    first: i,
                    second: j,
                });
            }
        }
    }
    let areas: Vec<f64> = zones.par_iter().map(excess_area_m2).collect();
    Ok(pairwise_sum(&areas))
}

/// Expected number of extra D2D pairs enabled over an excess area.
pub fn extra_pairs(total_excess_m2: f64, d2d: &D2DConfig) -> f64 {
    d2d.pair_density_per_m2 * total_excess_m2
}

/// Whether a receiver at `rx_pos` can join an enabled D2D pair: every
/// interferer's received power must be strictly below the threshold.
///
/// This is the per-interferer test matching the single-dominant-interferer
/// model; [`pair_enabled_aggregate`] sums interference instead. A receiver
/// co-located with an interferer is always blocked.
pub fn pair_enabled(rx_pos: Point, interferers: &[(Point, f64)], lambda_dbm: f64) -> bool {
    interferers.iter().all(|&(pos, tx_dbm)| {
        let d = rx_pos.dist(pos);
        if d <= 0.0 {
            return false;
        }
        let pl = PL_REF_DB + PL_SLOPE_DB * d.log10();
        received_power_dbm(tx_dbm, pl) < lambda_dbm
    })
}

/// Aggregate-interference variant of [`pair_enabled`]: the linear sum of
/// all received interference powers must stay strictly below the threshold.
pub fn pair_enabled_aggregate(
    rx_pos: Point,
    interferers: &[(Point, f64)],
    lambda_dbm: f64,
) -> bool {
    let mut sum_mw = 0.0;
    for &(pos, tx_dbm) in interferers {
        let d = rx_pos.dist(pos);
        if d <= 0.0 {
            return false;
        }
        let pl = PL_REF_DB + PL_SLOPE_DB * d.log10();
        sum_mw += dbm_to_mw(received_power_dbm(tx_dbm, pl));
    }
    mw_to_dbm(sum_mw) < lambda_dbm
}
