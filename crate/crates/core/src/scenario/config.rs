//! Campaign configuration: one struct whose defaults reproduce the model's
//! parameter tables, plus per-campaign knobs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::d2d::D2DConfig;
use crate::error::{Error, Result};
use crate::geometry::{NetworkLayout, Point};
use crate::linkbudget::{CellRadioConfig, PowerControlConfig};
use crate::mobility::MobilityParams;

/// Knobs for the linear-transit campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitConfig {
    /// Device speeds; they affect only the position-vs-time axis.
    pub speeds_kmph: Vec<f64>,
    /// Transit start, distance from the Macro along the Macro-to-small
    /// line (m).
    pub start_m: f64,
    /// Transit end (m); must not coincide with the small cell.
    pub end_m: f64,
    /// Sample spacing along the line (m).
    pub spacing_m: f64,
    /// Uplink SINR target for the transmit-power trace (dB).
    pub target_sinr_db: f64,
    /// Model one uplink interferer per serving cell instead of the
    /// default noise-only links.
    pub with_interference: bool,
    /// Interferer served by the small cell (affects the Macro uplink);
    /// distance from the Macro along the transit line (m).
    pub interferer_for_macro_m: f64,
    /// Interferer served by the Macro (affects the small-cell uplink);
    /// distance from the Macro along the transit line (m).
    pub interferer_for_small_m: f64,
}

impl Default for TransitConfig {
    fn default() -> Self {
        Self {
            speeds_kmph: vec![30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0],
            start_m: 100.0,
            end_m: 740.0,
            spacing_m: 1.0,
            target_sinr_db: 0.0,
            with_interference: false,
            interferer_for_macro_m: 760.0,
            interferer_for_small_m: 200.0,
        }
    }
}

/// Knobs for the interference-zone campaign, which runs on its own
/// layout geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZonesConfig {
    /// Macro coverage radius for this campaign (m).
    pub macro_radius_m: f64,
    /// Small-cell distance from the Macro (m).
    pub small_cell_distance_m: f64,
    /// Decoupling-device distances from the Macro along the
    /// Macro-to-small line (m).
    pub device_distances_m: Vec<f64>,
    /// Interference thresholds to sweep (dBm).
    pub thresholds_dbm: Vec<f64>,
}

impl Default for ZonesConfig {
    fn default() -> Self {
        Self {
            macro_radius_m: 800.0,
            small_cell_distance_m: 800.0,
            device_distances_m: vec![600.0, 730.0],
            thresholds_dbm: vec![-90.0, -95.0],
        }
    }
}

/// Knobs for the region-geometry campaign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionConfig {
    /// Monte Carlo sample count for the area estimate.
    pub n_samples: u64,
}

impl Default for RegionConfig {
    fn default() -> Self {
        Self {
            n_samples: 1_000_000,
        }
    }
}

/// Grid for the formula-mode comparison report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    /// Macro distances (m).
    pub d_m_m: Vec<f64>,
    /// Small-cell distance as a fraction of the Macro distance.
    pub ds_over_dm: Vec<f64>,
    /// Compensation factors.
    pub alphas: Vec<f64>,
    /// Target received powers (dBm).
    pub p0_dbm: Vec<f64>,
    /// Resource-block counts.
    pub num_rbs: Vec<u32>,
    /// Threshold for the zone-radius columns (dBm).
    pub lambda_dbm: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            d_m_m: vec![200.0, 600.0, 1000.0],
            ds_over_dm: vec![0.25, 0.5, 1.0],
            alphas: vec![0.5, 0.7, 1.0],
            p0_dbm: vec![-90.0, -80.0, -70.0],
            num_rbs: vec![1, 10],
            lambda_dbm: -90.0,
        }
    }
}

/// Full configuration for every campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub layout: NetworkLayout,
    pub pc: PowerControlConfig,
    pub d2d: D2DConfig,
    pub mobility: MobilityParams,
    pub seed: u64,
    pub transit: TransitConfig,
    pub zones: ZonesConfig,
    pub region: RegionConfig,
    pub compare: CompareConfig,
    /// Where each value came from (config file line or named default),
    /// echoed into result metadata. Filled by the config parser.
    #[serde(default)]
    pub provenance: BTreeMap<String, String>,
}

impl Default for ScenarioConfig {
    /// Macro at the origin (40 dBm, 1 km radius), small cell 750 m away
    /// (20 dBm, 35 m radius). The 750 m placement keeps the whole
    /// decoupling region inside Macro coverage.
    fn default() -> Self {
        let layout = NetworkLayout::new(
            Point::new(0.0, 0.0),
            CellRadioConfig::new(40.0, 1000.0).expect("static default"),
            Point::new(750.0, 0.0),
            CellRadioConfig::new(20.0, 35.0).expect("static default"),
        )
        .expect("static default layout");
        Self {
            layout,
            pc: PowerControlConfig::default(),
            d2d: D2DConfig::new(-90.0, 1e-4).expect("static default"),
            mobility: MobilityParams::default(),
            seed: 42,
            transit: TransitConfig::default(),
            zones: ZonesConfig::default(),
            region: RegionConfig::default(),
            compare: CompareConfig::default(),
            provenance: BTreeMap::new(),
        }
    }
}

impl ScenarioConfig {
    /// Revalidates every invariant. Useful after field-level mutation.
    pub fn validate(&self) -> Result<()> {
        self.pc.validate()?;
        self.mobility.validate()?;
        // Rebuild checks the layout invariants.
        NetworkLayout::new(
            self.layout.macro_pos,
            self.layout.macro_radio,
            self.layout.small_pos,
            self.layout.small_radio,
        )?;
        D2DConfig::new(self.d2d.lambda_dbm, self.d2d.pair_density_per_m2)?;

        let t = &self.transit;
        if !(t.start_m > 0.0 && t.start_m < t.end_m) {
            return Err(Error::InvalidConfig(format!(
                "transit must satisfy 0 < start < end, got start = {} m, end = {} m",
                t.start_m, t.end_m
            )));
        }
        if !(t.spacing_m > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "transit spacing must be positive, got {} m",
                t.spacing_m
            )));
        }
        if t.speeds_kmph.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidConfig(
                "transit speeds must be positive".into(),
            ));
        }

        let z = &self.zones;
        if !(z.macro_radius_m > 0.0) || !(z.small_cell_distance_m > 0.0) {
            return Err(Error::InvalidConfig(
                "zone campaign geometry must be positive".into(),
            ));
        }
        if z.small_cell_distance_m > z.macro_radius_m {
            return Err(Error::InvalidConfig(format!(
                "zone campaign small cell at {} m lies outside its Macro radius {} m",
                z.small_cell_distance_m, z.macro_radius_m
            )));
        }
        if z.device_distances_m.is_empty() || z.thresholds_dbm.is_empty() {
            return Err(Error::InvalidConfig(
                "zone campaign needs at least one device distance and one threshold".into(),
            ));
        }
        if z.device_distances_m
            .iter()
            .any(|d| !(*d > 0.0) || *d > z.macro_radius_m || *d == z.small_cell_distance_m)
        {
            return Err(Error::InvalidConfig(
                "zone device distances must be positive, inside coverage, and distinct from the small cell".into(),
            ));
        }

        if self.region.n_samples < 1000 {
            return Err(Error::InvalidConfig(
                "region campaign needs at least 1000 samples".into(),
            ));
        }

        let c = &self.compare;
        if c.d_m_m.is_empty()
            || c.ds_over_dm.is_empty()
            || c.alphas.is_empty()
            || c.p0_dbm.is_empty()
            || c.num_rbs.is_empty()
        {
            return Err(Error::InvalidConfig(
                "comparison grid axes must be non-empty".into(),
            ));
        }
        if c.d_m_m.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::InvalidConfig(
                "comparison distances must be positive".into(),
            ));
        }
        if c.ds_over_dm.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
            return Err(Error::InvalidConfig(
                "comparison distance ratios must be in (0, 1]".into(),
            ));
        }
        if c.alphas.iter().any(|a| !(*a > 0.0 && *a <= 1.0)) {
            return Err(Error::InvalidConfig(
                "comparison alphas must be in (0, 1]".into(),
            ));
        }
        if c.num_rbs.iter().any(|k| *k < 1) {
            return Err(Error::InvalidConfig(
                "comparison RB counts must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Canonical key/value echo of every effective parameter, in SI units.
    /// Together with the seed this is enough to re-run a campaign
    /// bit-identically.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(format!("config.{k}"), v);
        };
        let list = |xs: &[f64]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };

        put(
            "layout.macro_pos_m",
            format!("{},{}", self.layout.macro_pos.x, self.layout.macro_pos.y),
        );
        put(
            "layout.macro_dl_dbm",
            self.layout.macro_radio.dl_tx_power_dbm.to_string(),
        );
        put(
            "layout.macro_radius_m",
            self.layout.macro_radio.coverage_radius_m.to_string(),
        );
        put(
            "layout.small_pos_m",
            format!("{},{}", self.layout.small_pos.x, self.layout.small_pos.y),
        );
        put(
            "layout.small_dl_dbm",
            self.layout.small_radio.dl_tx_power_dbm.to_string(),
        );
        put(
            "layout.small_radius_m",
            self.layout.small_radio.coverage_radius_m.to_string(),
        );

        put("pc.p0_dbm", self.pc.p0_dbm.to_string());
        put("pc.alpha", self.pc.alpha.to_string());
        put("pc.pmax_dbm", self.pc.pmax_dbm.to_string());
        put("pc.num_rbs", self.pc.num_rbs.to_string());
        put("pc.noise_dbm", self.pc.noise_dbm.to_string());
        put("pc.mode", self.pc.mode.to_string());

        put("d2d.lambda_dbm", self.d2d.lambda_dbm.to_string());
        put(
            "d2d.pair_density_per_m2",
            self.d2d.pair_density_per_m2.to_string(),
        );

        put(
            "mobility.step_mean_m",
            self.mobility.step_mean_m.to_string(),
        );
        put(
            "mobility.speed_classes_mps",
            list(&self.mobility.speed_classes_mps),
        );
        put(
            "mobility.heading_halfwidth_rad",
            self.mobility.heading_halfwidth_rad.to_string(),
        );
        put(
            "mobility.devices_per_class",
            self.mobility.devices_per_class.to_string(),
        );
        put("mobility.max_time_s", self.mobility.max_time_s.to_string());
        put(
            "mobility.start_inner_frac",
            self.mobility.start_band.inner_frac.to_string(),
        );
        put(
            "mobility.start_outer_frac",
            self.mobility.start_band.outer_frac.to_string(),
        );
        put(
            "mobility.start_half_angle_rad",
            self.mobility.start_band.half_angle_rad.to_string(),
        );
        put(
            "mobility.refine_crossings",
            self.mobility.refine_crossings.to_string(),
        );

        put("transit.speeds_kmph", list(&self.transit.speeds_kmph));
        put("transit.start_m", self.transit.start_m.to_string());
        put("transit.end_m", self.transit.end_m.to_string());
        put("transit.spacing_m", self.transit.spacing_m.to_string());
        put(
            "transit.target_sinr_db",
            self.transit.target_sinr_db.to_string(),
        );
        put(
            "transit.with_interference",
            self.transit.with_interference.to_string(),
        );
        put(
            "transit.interferer_for_macro_m",
            self.transit.interferer_for_macro_m.to_string(),
        );
        put(
            "transit.interferer_for_small_m",
            self.transit.interferer_for_small_m.to_string(),
        );

        put(
            "zones.macro_radius_m",
            self.zones.macro_radius_m.to_string(),
        );
        put(
            "zones.small_cell_distance_m",
            self.zones.small_cell_distance_m.to_string(),
        );
        put(
            "zones.device_distances_m",
            list(&self.zones.device_distances_m),
        );
        put("zones.thresholds_dbm", list(&self.zones.thresholds_dbm));

        put("region.n_samples", self.region.n_samples.to_string());

        put("compare.d_m_m", list(&self.compare.d_m_m));
        put("compare.ds_over_dm", list(&self.compare.ds_over_dm));
        put("compare.alphas", list(&self.compare.alphas));
        put("compare.p0_dbm", list(&self.compare.p0_dbm));
        put(
            "compare.num_rbs",
            self.compare
                .num_rbs
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        put("compare.lambda_dbm", self.compare.lambda_dbm.to_string());

        put("seed", self.seed.to_string());

        for (k, v) in &self.provenance {
            m.insert(format!("provenance.{k}"), v.clone());
        }
        m
    }
}
