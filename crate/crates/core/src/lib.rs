//! Simulation and analysis library for downlink/uplink-decoupled (DUDe)
//! LTE heterogeneous networks.
//!
//! A device in a DUDe network may receive its downlink from the Macro cell
//! while transmitting its uplink to a nearby small cell. This crate models
//! the planar region where that split pays off, the transmit power a device
//! saves while it is decoupled, and the shrinking interference zone that
//! lets additional device-to-device pairs be enabled around it.
//!
//! Modules:
//! - [`linkbudget`]: dB-domain radio arithmetic (path loss, fractional
//!   uplink power control, SINR, spectral efficiency).
//! - [`geometry`]: decoupling-region predicates, the Apollonius boundary,
//!   and Monte Carlo area estimation.
//! - [`powersave`]: per-transmission and aggregate uplink power savings.
//! - [`d2d`]: interference zones and the excess D2D-enabling area.
//! - [`mobility`]: seeded random-walk trajectories and decoupling times.
//! - [`scenario`]: end-to-end campaigns producing labeled numeric series.

// Validations use `!(x > 0.0)` so NaN fails them; `x <= 0.0` would let
// NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod d2d;
pub mod error;
pub mod geometry;
pub mod linkbudget;
pub mod mobility;
pub mod powersave;
pub mod scenario;

pub use error::{Error, Result};

/// Deterministic pairwise summation.
///
/// The reduction tree depends only on the slice length, so the result is
/// identical no matter how the inputs were produced (sequentially or by a
/// parallel map), and the error growth is O(log n) instead of O(n).
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::pairwise_sum;

    #[test]
    fn pairwise_sum_matches_sequential_on_small_inputs() {
        let xs = [1.5, 2.25, -0.75, 4.0];
        assert_eq!(pairwise_sum(&xs), 7.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[3.25]), 3.25);
    }

    #[test]
    fn pairwise_sum_is_deterministic_on_large_inputs() {
        let xs: Vec<f64> = (0..10_000).map(|i| (i as f64).sin()).collect();
        let a = pairwise_sum(&xs);
        let b = pairwise_sum(&xs);
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
