//! End-to-end campaigns: decoupling-time CDFs over the random-walk
//! ensemble, the linear-transit spectral-efficiency/power comparison, the
//! interference-zone tables, the decoupling-region geometry summary, and
//! the formula-mode comparison report.
//!
//! Every campaign is a pure function of a [`ScenarioConfig`]; identical
//! config and seed reproduce every output bit for bit. Campaign
//! postconditions are asserted before a result is returned, so a failed
//! assertion aborts emission with a diagnostic.

mod campaigns;
mod config;
mod result;
mod transit;

pub use campaigns::{
    run_decoupling_time_campaign, run_formula_comparison, run_region_campaign, run_zone_campaign,
};
pub use config::{CompareConfig, RegionConfig, ScenarioConfig, TransitConfig, ZonesConfig};
pub use result::{Column, ScenarioResult};
pub use transit::run_transit_campaign;
