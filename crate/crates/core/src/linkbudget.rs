//! dB-domain radio arithmetic shared by every other module: path loss,
//! fractional uplink power control, received power, SINR, and spectral
//! efficiency.
//!
//! All power *mixing* (SINR denominators, power differences) happens in
//! linear milliwatts; dBm/dB are treated as presentation and transport
//! domains only. Distances are meters throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Path-loss model intercept: PL(1 m) = 35 dB.
pub const PL_REF_DB: f64 = 35.0;
/// Path-loss slope in dB per decade of distance.
pub const PL_SLOPE_DB: f64 = 30.0;

/// Convert a dBm power to milliwatts.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10.0_f64.powf(dbm / 10.0)
}

/// Convert a milliwatt power to dBm.
pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Selects between the two readings of the closed-form link equations.
///
/// `DbConsistent` is the dimensionally sound dB-domain algebra and the
/// default everywhere. `Literal` evaluates the source closed forms exactly
/// as printed (P0/10 inside exponents, `P0*log10(K)` as the bandwidth
/// term) so the two can be tabulated side by side in comparison reports.
/// The modes coincide when K = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaMode {
    #[default]
    DbConsistent,
    Literal,
}

impl std::fmt::Display for FormulaMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormulaMode::DbConsistent => write!(f, "db-consistent"),
            FormulaMode::Literal => write!(f, "literal"),
        }
    }
}

/// Open-loop fractional power-control parameters, shared by both cells
/// (the model assumes equal compensation factors for Macro and small cell).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerControlConfig {
    /// Target received power P0 (dBm).
    pub p0_dbm: f64,
    /// Fractional path-loss compensation factor, 0 < alpha <= 1.
    pub alpha: f64,
    /// Maximum UE transmit power (dBm).
    pub pmax_dbm: f64,
    /// Number of assigned resource blocks K, >= 1.
    pub num_rbs: u32,
    /// Noise floor N0 over the assigned bandwidth (dBm).
    pub noise_dbm: f64,
    /// Formula mode used by every downstream operation.
    pub mode: FormulaMode,
}

impl PowerControlConfig {
    pub fn new(
        p0_dbm: f64,
        alpha: f64,
        pmax_dbm: f64,
        num_rbs: u32,
        noise_dbm: f64,
        mode: FormulaMode,
    ) -> Result<Self> {
        let cfg = Self {
            p0_dbm,
            alpha,
            pmax_dbm,
            num_rbs,
            noise_dbm,
            mode,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be in (0, 1], got {}",
                self.alpha
            )));
        }
        if self.num_rbs < 1 {
            return Err(Error::InvalidConfig("num_rbs must be >= 1".into()));
        }
        if !self.pmax_dbm.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "pmax_dbm must be finite, got {}",
                self.pmax_dbm
            )));
        }
        if !self.p0_dbm.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "p0_dbm must be finite, got {}",
                self.p0_dbm
            )));
        }
        Ok(())
    }
}

impl Default for PowerControlConfig {
    /// Defaults: P0 = -80 dBm, alpha = 0.7, Pmax = 23 dBm, K = 10,
    /// N0 = -102 dBm, dB-consistent mode.
    fn default() -> Self {
        Self {
            p0_dbm: -80.0,
            alpha: 0.7,
            pmax_dbm: 23.0,
            num_rbs: 10,
            noise_dbm: -102.0,
            mode: FormulaMode::DbConsistent,
        }
    }
}

/// Downlink transmit power and coverage radius of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellRadioConfig {
    /// Downlink transmit power (dBm).
    pub dl_tx_power_dbm: f64,
    /// Coverage radius (m).
    pub coverage_radius_m: f64,
}

impl CellRadioConfig {
    pub fn new(dl_tx_power_dbm: f64, coverage_radius_m: f64) -> Result<Self> {
        if !dl_tx_power_dbm.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "dl_tx_power_dbm must be finite, got {dl_tx_power_dbm}"
            )));
        }
        if !(coverage_radius_m > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "coverage_radius_m must be positive, got {coverage_radius_m}"
            )));
        }
        Ok(Self {
            dl_tx_power_dbm,
            coverage_radius_m,
        })
    }
}

/// Distance-based path loss PL(d) = 35 + 30*log10(d), d in meters.
pub fn path_loss_db(d_m: f64) -> Result<f64> {
    if !(d_m > 0.0) {
        return Err(Error::NonPositiveDistance(d_m));
    }
    Ok(PL_REF_DB + PL_SLOPE_DB * d_m.log10())
}

/// Open-loop uplink transmit power for a given path loss, capped at Pmax.
///
/// Requires `pl_db >= 0`. In `DbConsistent` mode the bandwidth term is the
/// standard `10*log10(K)`; in `Literal` mode it is `P0*log10(K)`, as the
/// closed form prints it. The modes agree bitwise for K = 1.
pub fn uplink_tx_power_dbm(cfg: &PowerControlConfig, pl_db: f64) -> f64 {
    let log_k = f64::from(cfg.num_rbs).log10();
    let raw = match cfg.mode {
        FormulaMode::DbConsistent => cfg.p0_dbm + 10.0 * log_k + cfg.alpha * pl_db,
        FormulaMode::Literal => cfg.p0_dbm * log_k + cfg.p0_dbm + cfg.alpha * pl_db,
    };
    raw.min(cfg.pmax_dbm)
}

/// Received power: transmit power minus path loss.
///
/// When the transmit power came uncapped from [`uplink_tx_power_dbm`] with
/// K = 1, this equals `p0 + (alpha - 1)*pl_db`.
pub fn received_power_dbm(tx_dbm: f64, pl_db: f64) -> f64 {
    tx_dbm - pl_db
}

/// SINR in dB: signal over the linear-domain sum of interferers and noise.
///
/// The denominator is accumulated in milliwatts anchored at its largest
/// term, so an empty interferer list reduces exactly to
/// `signal_dbm - noise_dbm`. Errors only when the denominator is zero
/// (noise at -inf dBm and no interferers).
pub fn sinr_db(signal_dbm: f64, interferers_dbm: &[f64], noise_dbm: f64) -> Result<f64> {
    let anchor = interferers_dbm.iter().fold(noise_dbm, |acc, &i| acc.max(i));
    if anchor == f64::NEG_INFINITY {
        return Err(Error::ZeroSinrDenominator);
    }
    let mut sum = 10.0_f64.powf((noise_dbm - anchor) / 10.0);
    for &i in interferers_dbm {
        sum += 10.0_f64.powf((i - anchor) / 10.0);
    }
    let denominator_dbm = anchor + 10.0 * sum.log10();
    Ok(signal_dbm - denominator_dbm)
}

/// Shannon spectral efficiency log2(1 + SINR_linear) in bps/Hz.
pub fn spectral_efficiency(sinr_db: f64) -> f64 {
    (1.0 + 10.0_f64.powf(sinr_db / 10.0)).log2()
}

/// Transmit power needed to hit a target SINR against a known
/// interference-plus-noise level, capped at `pmax_dbm`.
///
/// Returns the power and a flag that is true when the cap made the target
/// unreachable.
pub fn tx_power_for_target_sinr_dbm(
    target_sinr_db: f64,
    pl_db: f64,
    interference_plus_noise_dbm: f64,
    pmax_dbm: f64,
) -> (f64, bool) {
    let required = target_sinr_db + interference_plus_noise_dbm + pl_db;
    (required.min(pmax_dbm), required > pmax_dbm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_k1(p0: f64, alpha: f64, pmax: f64, mode: FormulaMode) -> PowerControlConfig {
        PowerControlConfig::new(p0, alpha, pmax, 1, -102.0, mode).unwrap()
    }

    #[test]
    fn path_loss_at_reference_distance() {
        assert_eq!(path_loss_db(1.0).unwrap(), 35.0);
    }

    #[test]
    fn path_loss_hand_evaluated() {
        assert!((path_loss_db(100.0).unwrap() - 95.0).abs() < 1e-12);
        assert!((path_loss_db(1000.0).unwrap() - 125.0).abs() < 1e-12);
    }

    #[test]
    fn path_loss_rejects_non_positive_distance() {
        assert_eq!(path_loss_db(0.0), Err(Error::NonPositiveDistance(0.0)));
        assert_eq!(path_loss_db(-5.0), Err(Error::NonPositiveDistance(-5.0)));
    }

    #[test]
    fn uplink_power_uncapped() {
        let cfg = cfg_k1(-80.0, 0.7, 23.0, FormulaMode::DbConsistent);
        let p = uplink_tx_power_dbm(&cfg, 95.0);
        assert!((p - (-13.5)).abs() < 1e-12, "got {p}");
    }

    #[test]
    fn uplink_power_capped_at_pmax() {
        let cfg = cfg_k1(-80.0, 0.7, 23.0, FormulaMode::DbConsistent);
        // -80 + 0.7*160 = 32 dBm > 23 dBm cap
        assert_eq!(uplink_tx_power_dbm(&cfg, 160.0), 23.0);
    }

    #[test]
    fn modes_agree_bitwise_for_single_rb() {
        for pl in [0.0, 35.0, 95.0, 123.456, 160.0] {
            let a = uplink_tx_power_dbm(&cfg_k1(-80.0, 0.7, 23.0, FormulaMode::DbConsistent), pl);
            let b = uplink_tx_power_dbm(&cfg_k1(-80.0, 0.7, 23.0, FormulaMode::Literal), pl);
            assert_eq!(a.to_bits(), b.to_bits(), "modes diverged at PL = {pl}");
        }
    }

    #[test]
    fn modes_diverge_for_multiple_rbs() {
        let consistent =
            PowerControlConfig::new(-80.0, 0.7, 230.0, 10, -102.0, FormulaMode::DbConsistent)
                .unwrap();
        let literal =
            PowerControlConfig::new(-80.0, 0.7, 230.0, 10, -102.0, FormulaMode::Literal).unwrap();
        // 10*log10(10) = +10 dB vs P0*log10(10) = -80 dB
        let a = uplink_tx_power_dbm(&consistent, 100.0);
        let b = uplink_tx_power_dbm(&literal, 100.0);
        assert!((a - 0.0).abs() < 1e-12, "got {a}");
        assert!((b - (-90.0)).abs() < 1e-12, "got {b}");
    }

    #[test]
    fn received_power_is_tx_minus_pl() {
        assert_eq!(received_power_dbm(23.0, 95.0), -72.0);
        assert_eq!(received_power_dbm(-13.25, 0.0), -13.25);
    }

    #[test]
    fn received_power_matches_open_loop_identity() {
        // Uncapped chain: rx = p0 + (alpha - 1) * PL
        let cfg = cfg_k1(-80.0, 0.7, 23.0, FormulaMode::DbConsistent);
        let rx = received_power_dbm(uplink_tx_power_dbm(&cfg, 100.0), 100.0);
        assert!((rx - (-110.0)).abs() < 1e-12, "got {rx}");
    }

    #[test]
    fn sinr_noise_only_is_exact_subtraction() {
        let s = sinr_db(-72.0, &[], -102.0).unwrap();
        assert_eq!(s, 30.0);
        let s = sinr_db(-63.7, &[], -63.7).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn sinr_interferer_equal_to_noise_doubles_denominator() {
        let s = sinr_db(-72.0, &[-102.0], -102.0).unwrap();
        let expected = 30.0 - 10.0 * 2.0_f64.log10(); // 26.98970004336019
        assert!((s - expected).abs() < 1e-12, "got {s}");
    }

    #[test]
    fn sinr_brute_force_linear_oracle() {
        // Independent route: straight mW arithmetic without anchoring.
        let signal = -71.3;
        let interferers = [-95.0, -101.5, -88.2];
        let noise = -102.0;
        let denom_mw: f64 =
            interferers.iter().map(|&i| dbm_to_mw(i)).sum::<f64>() + dbm_to_mw(noise);
        let expected = signal - mw_to_dbm(denom_mw);
        let got = sinr_db(signal, &interferers, noise).unwrap();
        assert!((got - expected).abs() < 1e-12, "got {got}, want {expected}");
    }

    #[test]
    fn sinr_zero_denominator_is_an_error() {
        assert_eq!(
            sinr_db(-72.0, &[], f64::NEG_INFINITY),
            Err(Error::ZeroSinrDenominator)
        );
        // An interferer rescues an infinite-noise denominator.
        let s = sinr_db(-72.0, &[-102.0], f64::NEG_INFINITY).unwrap();
        assert!((s - 30.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_efficiency_reference_points() {
        assert!((spectral_efficiency(0.0) - 1.0).abs() < 1e-15);
        assert_eq!(spectral_efficiency(f64::NEG_INFINITY), 0.0);
        let se = spectral_efficiency(30.0);
        assert!((se - 9.967226258835993).abs() < 1e-12, "got {se}");
    }

    #[test]
    fn target_power_uncapped_and_capped() {
        let (p, capped) = tx_power_for_target_sinr_dbm(0.0, 95.0, -102.0, 23.0);
        assert!((p - (-7.0)).abs() < 1e-12);
        assert!(!capped);

        let (p, capped) = tx_power_for_target_sinr_dbm(0.0, 130.0, -102.0, 23.0);
        assert_eq!(p, 23.0);
        assert!(capped);

        let (p, capped) = tx_power_for_target_sinr_dbm(4.5, 0.0, -96.25, f64::INFINITY);
        assert!((p - (-91.75)).abs() < 1e-12);
        assert!(!capped);
    }

    #[test]
    fn config_invariants_are_enforced() {
        assert!(
            PowerControlConfig::new(-80.0, 1.5, 23.0, 1, -102.0, FormulaMode::DbConsistent)
                .is_err()
        );
        assert!(
            PowerControlConfig::new(-80.0, 0.0, 23.0, 1, -102.0, FormulaMode::DbConsistent)
                .is_err()
        );
        assert!(
            PowerControlConfig::new(-80.0, 0.7, 23.0, 0, -102.0, FormulaMode::DbConsistent)
                .is_err()
        );
        assert!(PowerControlConfig::new(
            -80.0,
            0.7,
            f64::INFINITY,
            1,
            -102.0,
            FormulaMode::DbConsistent
        )
        .is_err());
        assert!(CellRadioConfig::new(40.0, 0.0).is_err());
        assert!(CellRadioConfig::new(f64::NAN, 100.0).is_err());
    }

    #[test]
    fn dbm_mw_round_trip() {
        assert!((dbm_to_mw(0.0) - 1.0).abs() < 1e-15);
        assert!((dbm_to_mw(23.0) - 199.52623149688787).abs() < 1e-10);
        let x = -17.25;
        assert!((mw_to_dbm(dbm_to_mw(x)) - x).abs() < 1e-12);
    }
}
