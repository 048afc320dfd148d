//! Test support for `adapted-geom`.
//!
//! Everything here recomputes a library quantity along a different route:
//! finite differences instead of jets, coordinate brackets of full vector
//! fields instead of frame formulas, full-dimensional chain rule instead of
//! admissible blocks. Random generators are seeded and reproducible.

// Index loops mirror the component formulas they implement.
#![allow(clippy::needless_range_loop)]

pub mod brackets;
pub mod charts;
pub mod deform;
pub mod fd;
pub mod random;
pub mod residuals;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic generator for a named test stream.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
