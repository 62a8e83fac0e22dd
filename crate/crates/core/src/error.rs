//! Shared error type for the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Path loss and distance-ratio formulas are undefined at or below zero.
    #[error("distance must be positive, got {0} m")]
    NonPositiveDistance(f64),

    /// SINR denominator is empty: no interferers and a zero noise floor.
    #[error("SINR denominator is zero (no interference and no noise power)")]
    ZeroSinrDenominator,

    /// The downlink ratio constant only exists when the Macro transmits
    /// with more power than the small cell.
    #[error("macro DL power ({macro_dbm} dBm) must exceed small-cell DL power ({small_dbm} dBm)")]
    NoDlDominance { macro_dbm: f64, small_dbm: f64 },

    /// Point lies outside the Macro coverage disc.
    #[error("point ({x}, {y}) is outside Macro coverage")]
    OutOfCoverage { x: f64, y: f64 },

    /// Operation requires a device inside the decoupling region.
    #[error("device at ({x}, {y}) is not in the decoupling region")]
    NotDecoupled { x: f64, y: f64 },

    /// Power-saving formulas require d_s <= d_m.
    #[error("device (d_m = {d_m} m, d_s = {d_s} m) is not in the decoupling region's uplink half")]
    NotInUplinkHalf { d_m: f64, d_s: f64 },

    /// Interference-zone radius would fall below the 1 m model reference.
    #[error(
        "degenerate interference zone: tx {tx_dbm} dBm minus threshold {lambda_dbm} dBm must exceed 35 dB"
    )]
    DegenerateZone { tx_dbm: f64, lambda_dbm: f64 },

    /// The total-excess-area formula assumes disjoint coupled zones.
    #[error(
        "interference zones {first} and {second} overlap; the excess-area sum would double-count"
    )]
    OverlappingZones { first: usize, second: usize },

    /// A mobile transit stepped past the small cell (d_s <= 0).
    #[error("transmission {step} passed the small cell (d_s term is non-positive)")]
    PassedSmallCell { step: usize },

    /// Empty input where at least one element is required.
    #[error("input list is empty")]
    EmptyInput,

    /// A configuration value violates a type invariant.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A campaign postcondition failed; emission is aborted.
    #[error("campaign assertion failed: {0}")]
    AssertionFailed(String),
}
