//! Uplink power saved by decoupling: the per-transmission saving, the sum
//! over a mobile device's transit, and static-population aggregates.
//!
//! Savings are always accumulated in linear milliwatts; dBm values are
//! converted before any subtraction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkbudget::{
    dbm_to_mw, path_loss_db, uplink_tx_power_dbm, FormulaMode, PowerControlConfig,
};
use crate::pairwise_sum;

/// A device transiting the decoupling region on the Macro/small-cell line,
/// transmitting every `interval_s` seconds. The first transmission happens
/// at the decoupling point (d_m0, d_s0); each later one is `v*t` farther
/// from the Macro and nearer the small cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobileTransitSpec {
    /// Macro distance at the first transmission (m).
    pub d_m0: f64,
    /// Small-cell distance at the first transmission (m).
    pub d_s0: f64,
    /// Constant speed (m/s).
    pub velocity_mps: f64,
    /// Seconds between transmissions.
    pub interval_s: f64,
    /// Number of transmissions.
    pub n_tx: u32,
}

impl MobileTransitSpec {
    pub fn new(
        d_m0: f64,
        d_s0: f64,
        velocity_mps: f64,
        interval_s: f64,
        n_tx: u32,
    ) -> Result<Self> {
        if !(d_m0 > 0.0) {
            return Err(Error::NonPositiveDistance(d_m0));
        }
        if !(d_s0 > 0.0) {
            return Err(Error::NonPositiveDistance(d_s0));
        }
        if !(velocity_mps >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "velocity must be non-negative, got {velocity_mps}"
            )));
        }
        if !(interval_s > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "transmission interval must be positive, got {interval_s}"
            )));
        }
        if n_tx < 1 {
            return Err(Error::InvalidConfig("n_tx must be >= 1".into()));
        }
        let last_ds = d_s0 - f64::from(n_tx - 1) * velocity_mps * interval_s;
        if !(last_ds > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "device passes the small cell before transmission {n_tx} (final d_s = {last_ds} m)"
            )));
        }
        Ok(Self {
            d_m0,
            d_s0,
            velocity_mps,
            interval_s,
            n_tx,
        })
    }
}

/// A stationary device in the uplink half of the decoupling region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticDevice {
    pub d_m: f64,
    pub d_s: f64,
}

impl StaticDevice {
    pub fn new(d_m: f64, d_s: f64) -> Result<Self> {
        if !(d_m > 0.0) {
            return Err(Error::NonPositiveDistance(d_m));
        }
        if !(d_s > 0.0) {
            return Err(Error::NonPositiveDistance(d_s));
        }
        if d_s >= d_m {
            return Err(Error::NotInUplinkHalf { d_m, d_s });
        }
        Ok(Self { d_m, d_s })
    }
}

/// Linear ratio of small-cell to Macro uplink transmit power.
///
/// `DbConsistent`: (d_s/d_m)^(3*alpha), the linear form of the 30-dB/decade
/// transmit-power gap. `Literal`: (d_s/d_m)^(3*alpha*P0) as the closed form
/// prints it.
pub fn power_ratio(d_s: f64, d_m: f64, cfg: &PowerControlConfig) -> Result<f64> {
    if !(d_s > 0.0) {
        return Err(Error::NonPositiveDistance(d_s));
    }
    if !(d_m > 0.0) {
        return Err(Error::NonPositiveDistance(d_m));
    }
    let exponent = match cfg.mode {
        FormulaMode::DbConsistent => 3.0 * cfg.alpha,
        FormulaMode::Literal => 3.0 * cfg.alpha * cfg.p0_dbm,
    };
    Ok((d_s / d_m).powf(exponent))
}

/// Power saved (mW) by one uplink transmission at (d_m, d_s).
///
/// In the uncapped regime this is the closed form P_TM_mw * (1 - ratio);
/// when either transmit power hits Pmax it degrades to the difference of
/// the actual capped powers, so savings vanish once both sides are capped.
/// Errors when d_s > d_m (outside the region's uplink half).
pub fn power_saved_mw(d_m: f64, d_s: f64, cfg: &PowerControlConfig) -> Result<f64> {
    let pl_m = path_loss_db(d_m)?;
    let pl_s = path_loss_db(d_s)?;
    if d_s > d_m {
        return Err(Error::NotInUplinkHalf { d_m, d_s });
    }
    let p_tm_dbm = uplink_tx_power_dbm(cfg, pl_m);
    let p_ts_dbm = uplink_tx_power_dbm(cfg, pl_s);
    if p_tm_dbm < cfg.pmax_dbm && p_ts_dbm < cfg.pmax_dbm {
        Ok(dbm_to_mw(p_tm_dbm) * (1.0 - power_ratio(d_s, d_m, cfg)?))
    } else {
        Ok(dbm_to_mw(p_tm_dbm) - dbm_to_mw(p_ts_dbm))
    }
}

/// Total saved power over a mobile transit, with a count of transmissions
/// made outside the decoupling region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MobileSavings {
    pub total_mw: f64,
    /// Transmissions whose (d_m, d_s) fall outside d_s < d_m < k*d_s.
    /// Only the uplink-half condition is checked when no ratio constant is
    /// supplied.
    pub steps_outside_region: u32,
}

/// Sum of per-transmission savings over a transit.
///
/// Transmission i (1-based) happens at (d_m0 + (i-1)vt, d_s0 - (i-1)vt).
/// The formula is evaluated wherever the distances stay positive; `k`
/// (when given) is only used to count transmissions outside the region.
pub fn mobile_total_saved_mw(
    spec: &MobileTransitSpec,
    cfg: &PowerControlConfig,
    k: Option<f64>,
) -> Result<MobileSavings> {
    let outside = |d_m: f64, d_s: f64| match k {
        Some(k) => !(d_s < d_m && d_m < k * d_s),
        None => d_s >= d_m,
    };

    // Stationary device: every term is identical, so the total is exactly
    // n times the single-point value.
    if spec.velocity_mps == 0.0 {
        let point = power_saved_mw(spec.d_m0, spec.d_s0, cfg)?;
        let n = f64::from(spec.n_tx);
        let steps_outside = if outside(spec.d_m0, spec.d_s0) {
            spec.n_tx
        } else {
            0
        };
        return Ok(MobileSavings {
            total_mw: n * point,
            steps_outside_region: steps_outside,
        });
    }

    let mut total = 0.0;
    let mut steps_outside = 0;
    for i in 0..spec.n_tx {
        let travelled = f64::from(i) * spec.velocity_mps * spec.interval_s;
        let d_m = spec.d_m0 + travelled;
        let d_s = spec.d_s0 - travelled;
        if !(d_s > 0.0) {
            return Err(Error::PassedSmallCell {
                step: i as usize + 1,
            });
        }
        total += power_saved_mw(d_m, d_s, cfg)?;
        if outside(d_m, d_s) {
            steps_outside += 1;
        }
    }
    Ok(MobileSavings {
        total_mw: total,
        steps_outside_region: steps_outside,
    })
}

/// Total saved power over a static population, one transmission each.
///
/// Per-device savings are computed in parallel and reduced with a fixed
/// pairwise tree, so the result does not depend on thread scheduling.
pub fn static_total_saved_mw(devices: &[StaticDevice], cfg: &PowerControlConfig) -> Result<f64> {
    let per_device: Vec<f64> = devices
        .par_iter()
        .map(|d| power_saved_mw(d.d_m, d.d_s, cfg))
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&per_device))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkbudget::mw_to_dbm;

    fn cfg_k1() -> PowerControlConfig {
        PowerControlConfig::new(-80.0, 0.7, 23.0, 1, -102.0, FormulaMode::DbConsistent).unwrap()
    }

    #[test]
    fn ratio_is_one_at_equal_distances_in_both_modes() {
        let mut cfg = cfg_k1();
        assert_eq!(power_ratio(120.0, 120.0, &cfg).unwrap(), 1.0);
        cfg.mode = FormulaMode::Literal;
        assert_eq!(power_ratio(120.0, 120.0, &cfg).unwrap(), 1.0);
    }

    #[test]
    fn ratio_hand_exponentiation() {
        let r = power_ratio(50.0, 200.0, &cfg_k1()).unwrap();
        // 0.25^2.1, cross-checked via 30*0.7*log10(0.25) = -12.643 dB
        assert!((r - 0.05440941020600775).abs() < 1e-15, "got {r}");
        let db = 30.0 * 0.7 * (50.0_f64 / 200.0).log10();
        let via_db = 10.0_f64.powf(db / 10.0);
        assert!((r - via_db).abs() / r < 1e-12);
    }

    #[test]
    fn ratio_full_compensation_is_cube() {
        let cfg = PowerControlConfig::new(-80.0, 1.0, 23.0, 1, -102.0, FormulaMode::DbConsistent)
            .unwrap();
        let r = power_ratio(50.0, 200.0, &cfg).unwrap();
        assert!((r - 0.015625).abs() < 1e-15);
    }

    #[test]
    fn ratio_literal_mode_uses_p0_in_exponent() {
        let cfg =
            PowerControlConfig::new(-80.0, 0.7, 23.0, 1, -102.0, FormulaMode::Literal).unwrap();
        let r = power_ratio(50.0, 200.0, &cfg).unwrap();
        let expected = 0.25_f64.powf(3.0 * 0.7 * -80.0);
        assert_eq!(r, expected);
    }

    #[test]
    fn ratio_rejects_non_positive_distances() {
        assert!(power_ratio(0.0, 100.0, &cfg_k1()).is_err());
        assert!(power_ratio(100.0, -1.0, &cfg_k1()).is_err());
    }

    #[test]
    fn saved_power_zero_at_equal_distances() {
        assert_eq!(power_saved_mw(150.0, 150.0, &cfg_k1()).unwrap(), 0.0);
    }

    #[test]
    fn saved_power_chained_hand_arithmetic() {
        // P_TM = -80 + 0.7*(35 + 30*log10(200)) = -7.17837 dBm = 0.191497 mW
        // saved = 0.191497*(1 - 0.25^2.1) = 0.181078 mW
        let saved = power_saved_mw(200.0, 50.0, &cfg_k1()).unwrap();
        assert!((saved - 0.18107818488073937).abs() < 1e-14, "got {saved}");
    }

    #[test]
    fn saved_power_matches_independent_difference_oracle() {
        let cfg = cfg_k1();
        for &(d_m, d_s) in &[(200.0, 50.0), (600.0, 300.0), (990.0, 214.0), (75.0, 74.0)] {
            let saved = power_saved_mw(d_m, d_s, &cfg).unwrap();
            // Independent route: both transmit powers through the link
            // budget, subtracted in mW.
            let p_tm = uplink_tx_power_dbm(&cfg, path_loss_db(d_m).unwrap());
            let p_ts = uplink_tx_power_dbm(&cfg, path_loss_db(d_s).unwrap());
            let oracle = dbm_to_mw(p_tm) - dbm_to_mw(p_ts);
            assert!(
                (saved - oracle).abs() <= 1e-12 * oracle.abs().max(1e-300),
                "(d_m={d_m}, d_s={d_s}): {saved} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn saved_power_rejects_wrong_half() {
        assert!(matches!(
            power_saved_mw(50.0, 200.0, &cfg_k1()),
            Err(Error::NotInUplinkHalf { .. })
        ));
    }

    #[test]
    fn saved_power_is_zero_when_both_sides_cap() {
        // Distances large enough that both powers pin at Pmax.
        let cfg = PowerControlConfig::new(-80.0, 1.0, -10.0, 1, -102.0, FormulaMode::DbConsistent)
            .unwrap();
        let p_tm = uplink_tx_power_dbm(&cfg, path_loss_db(900.0).unwrap());
        let p_ts = uplink_tx_power_dbm(&cfg, path_loss_db(400.0).unwrap());
        assert_eq!(p_tm, -10.0);
        assert_eq!(p_ts, -10.0);
        assert_eq!(power_saved_mw(900.0, 400.0, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn saved_power_monotone_in_small_cell_distance() {
        let cfg = cfg_k1();
        let mut prev = f64::INFINITY;
        for ds in [50.0, 100.0, 200.0, 350.0, 500.0] {
            let s = power_saved_mw(600.0, ds, &cfg).unwrap();
            assert!(s < prev, "saving should grow as d_s shrinks");
            prev = s;
        }
    }

    #[test]
    fn mobile_single_transmission_equals_point_value() {
        let spec = MobileTransitSpec::new(600.0, 300.0, 10.0, 5.0, 1).unwrap();
        let total = mobile_total_saved_mw(&spec, &cfg_k1(), None).unwrap();
        let point = power_saved_mw(600.0, 300.0, &cfg_k1()).unwrap();
        assert_eq!(total.total_mw, point);
        assert_eq!(total.steps_outside_region, 0);
    }

    #[test]
    fn mobile_stationary_is_exactly_n_times_point() {
        let spec = MobileTransitSpec::new(600.0, 300.0, 0.0, 5.0, 3).unwrap();
        let total = mobile_total_saved_mw(&spec, &cfg_k1(), None).unwrap();
        let point = power_saved_mw(600.0, 300.0, &cfg_k1()).unwrap();
        assert_eq!(total.total_mw, 3.0 * point);
    }

    #[test]
    fn mobile_sum_matches_term_by_term_oracle() {
        // Four transmissions at (600,300), (650,250), (700,200), (750,150),
        // each term computed independently before summation.
        let spec = MobileTransitSpec::new(600.0, 300.0, 10.0, 5.0, 4).unwrap();
        let cfg = cfg_k1();
        let mut oracle = 0.0;
        for i in 0..4u32 {
            let step = f64::from(i) * 50.0;
            oracle += power_saved_mw(600.0 + step, 300.0 - step, &cfg).unwrap();
        }
        let total = mobile_total_saved_mw(&spec, &cfg, None).unwrap();
        assert!(
            (total.total_mw - oracle).abs() < 1e-15,
            "got {}",
            total.total_mw
        );
        assert!((total.total_mw - 8.880894841784766).abs() < 1e-12);
    }

    #[test]
    fn mobile_counts_out_of_region_steps() {
        // K = 4.6416: step 4 at (750, 150) has d_m > k*d_s (750 > 696.2),
        // so it has left the region even though the formula still applies.
        let spec = MobileTransitSpec::new(600.0, 300.0, 10.0, 5.0, 4).unwrap();
        let k = 10.0_f64.powf(2.0 / 3.0);
        let total = mobile_total_saved_mw(&spec, &cfg_k1(), Some(k)).unwrap();
        assert_eq!(total.steps_outside_region, 1);
    }

    #[test]
    fn transit_spec_rejects_passing_the_small_cell() {
        assert!(MobileTransitSpec::new(600.0, 300.0, 10.0, 5.0, 7).is_err());
        assert!(MobileTransitSpec::new(600.0, 300.0, 10.0, 5.0, 6).is_ok());
    }

    #[test]
    fn static_population_sums_independently() {
        let cfg = cfg_k1();
        let devices = vec![
            StaticDevice::new(600.0, 300.0).unwrap(),
            StaticDevice::new(400.0, 120.0).unwrap(),
        ];
        let total = static_total_saved_mw(&devices, &cfg).unwrap();
        let a = power_saved_mw(600.0, 300.0, &cfg).unwrap();
        let b = power_saved_mw(400.0, 120.0, &cfg).unwrap();
        assert!((total - (a + b)).abs() < 1e-15);
        assert_eq!(static_total_saved_mw(&[], &cfg).unwrap(), 0.0);
        let single = static_total_saved_mw(&devices[..1], &cfg).unwrap();
        assert_eq!(single, a);
    }

    #[test]
    fn static_device_invariants() {
        assert!(StaticDevice::new(100.0, 100.0).is_err());
        assert!(StaticDevice::new(100.0, 150.0).is_err());
        assert!(StaticDevice::new(0.0, 50.0).is_err());
    }

    #[test]
    fn saved_power_in_dbm_terms_cross_check() {
        // The dB gap between the two transmit powers should match
        // 30*alpha*log10(d_s/d_m) in the uncapped regime.
        let cfg = cfg_k1();
        let p_tm = uplink_tx_power_dbm(&cfg, path_loss_db(200.0).unwrap());
        let p_ts = uplink_tx_power_dbm(&cfg, path_loss_db(50.0).unwrap());
        let gap_db = p_ts - p_tm;
        let expected = 30.0 * 0.7 * (50.0_f64 / 200.0).log10();
        assert!((gap_db - expected).abs() < 1e-12);
        // And the ratio in mW matches power_ratio.
        let ratio = dbm_to_mw(p_ts) / dbm_to_mw(p_tm);
        assert!((mw_to_dbm(ratio) - expected).abs() < 1e-12);
    }
}
