//! Planar geometry of the decoupling region: association predicates, the
//! Apollonius boundary of downlink dominance, and Monte Carlo area
//! estimation over the Macro coverage disc.
//!
//! Membership is always decided from raw distance inequalities. The
//! expanded polynomial forms of the boundaries exist only as re-derivations
//! and are exercised in tests, never used for classification.

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkbudget::{CellRadioConfig, PL_SLOPE_DB};

/// A point in the plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(&self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// One Macro and one small cell with their radio parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkLayout {
    pub macro_pos: Point,
    pub macro_radio: CellRadioConfig,
    pub small_pos: Point,
    pub small_radio: CellRadioConfig,
}

impl NetworkLayout {
    /// Validates that the cells are distinct and the small cell sits inside
    /// (or on) the Macro coverage disc.
    pub fn new(
        macro_pos: Point,
        macro_radio: CellRadioConfig,
        small_pos: Point,
        small_radio: CellRadioConfig,
    ) -> Result<Self> {
        if macro_pos == small_pos {
            return Err(Error::InvalidConfig(
                "macro and small cell positions must differ".into(),
            ));
        }
        if macro_pos.dist(small_pos) > macro_radio.coverage_radius_m {
            return Err(Error::InvalidConfig(format!(
                "small cell at distance {} m lies outside Macro coverage radius {} m",
                macro_pos.dist(small_pos),
                macro_radio.coverage_radius_m
            )));
        }
        Ok(Self {
            macro_pos,
            macro_radio,
            small_pos,
            small_radio,
        })
    }

    /// Ratio constant for this layout's downlink powers.
    pub fn dl_ratio_constant(&self) -> Result<f64> {
        dl_constant_k(
            self.macro_radio.dl_tx_power_dbm,
            self.small_radio.dl_tx_power_dbm,
        )
    }
}

/// Uplink/downlink association of a device at one position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Association {
    /// Uplink and downlink both served by the Macro.
    CoupledMacro,
    /// Downlink from the Macro, uplink to the small cell.
    Decoupled,
    /// Uplink and downlink both served by the small cell.
    CoupledSmall,
}

/// A circle in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius_m: f64,
}

/// Distance-ratio constant K of the downlink-dominance boundary.
///
/// Equating downlink received powers under PL(d) = 35 + 30*log10(d) with a
/// zero noise floor gives d_M/d_S = 10^((P_M - P_S)/30). K > 1 whenever the
/// Macro transmits with more power.
pub fn dl_constant_k(macro_dl_dbm: f64, small_dl_dbm: f64) -> Result<f64> {
    if macro_dl_dbm <= small_dl_dbm {
        return Err(Error::NoDlDominance {
            macro_dbm: macro_dl_dbm,
            small_dbm: small_dl_dbm,
        });
    }
    Ok(10.0_f64.powf((macro_dl_dbm - small_dl_dbm) / PL_SLOPE_DB))
}

/// True when the uplink is better toward the small cell: d_M > d_S.
pub fn ul_prefers_small(p: Point, layout: &NetworkLayout) -> bool {
    p.dist(layout.macro_pos) > p.dist(layout.small_pos)
}

/// True when the downlink is better from the Macro: d_M < K*d_S.
///
/// Requires `k > 1`. Points inside the Apollonius disc around the small
/// cell (d_M >= K*d_S) are the small cell's downlink-dominance region.
pub fn dl_prefers_macro(p: Point, layout: &NetworkLayout, k: f64) -> bool {
    p.dist(layout.macro_pos) < k * p.dist(layout.small_pos)
}

/// Classifies an in-coverage point into exactly one [`Association`].
///
/// The decoupling region is the annular set d_S < d_M < K*d_S: a
/// neighborhood of the small cell excluding the small cell's own
/// downlink-dominance disc. Boundary points (equalities) are excluded by
/// the strict inequalities.
pub fn classify(p: Point, layout: &NetworkLayout, k: f64) -> Result<Association> {
    if p.dist(layout.macro_pos) > layout.macro_radio.coverage_radius_m {
        return Err(Error::OutOfCoverage { x: p.x, y: p.y });
    }
    Ok(if ul_prefers_small(p, layout) {
        if dl_prefers_macro(p, layout, k) {
            Association::Decoupled
        } else {
            Association::CoupledSmall
        }
    } else {
        Association::CoupledMacro
    })
}

/// The d_M = K*d_S locus: center (K^2*S - M)/(K^2 - 1), radius
/// K*|MS|/(K^2 - 1). Requires `k > 1`.
pub fn apollonius_circle(layout: &NetworkLayout, k: f64) -> Circle {
    assert!(k > 1.0, "distance-ratio constant must exceed 1, got {k}");
    let k2 = k * k;
    let m = layout.macro_pos;
    let s = layout.small_pos;
    let denom = k2 - 1.0;
    Circle {
        center: Point::new((k2 * s.x - m.x) / denom, (k2 * s.y - m.y) / denom),
        radius_m: k * m.dist(s) / denom,
    }
}

/// Monte Carlo estimate of a planar area with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaEstimate {
    pub area_m2: f64,
    pub std_error_m2: f64,
}

/// Samples per RNG stream in [`region_area_mc`]. Each batch owns one
/// ChaCha stream, so the estimate is identical however rayon schedules the
/// batches.
const MC_BATCH_SIZE: u64 = 16_384;

/// Monte Carlo area of the decoupling region.
///
/// Draws `n_samples` points uniformly over the Macro coverage disc by
/// rejection from its bounding square and counts the fraction classified
/// [`Association::Decoupled`]. Deterministic for a fixed seed. Requires
/// `n_samples >= 1000`.
pub fn region_area_mc(
    layout: &NetworkLayout,
    k: f64,
    n_samples: u64,
    seed: u64,
) -> Result<AreaEstimate> {
    if n_samples < 1000 {
        return Err(Error::InvalidConfig(format!(
            "area estimation needs at least 1000 samples, got {n_samples}"
        )));
    }
    let radius = layout.macro_radio.coverage_radius_m;
    let center = layout.macro_pos;
    let n_batches = n_samples.div_ceil(MC_BATCH_SIZE);

    let hits: u64 = (0..n_batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch);
            let batch_samples = MC_BATCH_SIZE.min(n_samples - batch * MC_BATCH_SIZE);
            let mut hits = 0u64;
            for _ in 0..batch_samples {
                let p = sample_in_disc(center, radius, &mut rng);
                // In coverage by construction.
                if classify(p, layout, k).expect("sample inside coverage disc")
                    == Association::Decoupled
                {
                    hits += 1;
                }
            }
            hits
        })
        .sum();

    let disc_area = std::f64::consts::PI * radius * radius;
    let p_hat = hits as f64 / n_samples as f64;
    Ok(AreaEstimate {
        area_m2: disc_area * p_hat,
        std_error_m2: disc_area * (p_hat * (1.0 - p_hat) / n_samples as f64).sqrt(),
    })
}

fn sample_in_disc(center: Point, radius: f64, rng: &mut ChaCha8Rng) -> Point {
    loop {
        let x: f64 = rng.random_range(-radius..=radius);
        let y: f64 = rng.random_range(-radius..=radius);
        if x * x + y * y <= radius * radius {
            return Point::new(center.x + x, center.y + y);
        }
    }
}
