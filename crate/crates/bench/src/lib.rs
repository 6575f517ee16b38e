//! Shared fixtures for the criterion benches.

use xscale_core::{synthetic, AggregationConfig, Image, SyntheticScheme};

/// Seeded `size`x`size` ground truth and its x2 reduction.
pub fn fixture(size: usize) -> (Image, Image) {
    let pair = synthetic::generate(0, size, 2, SyntheticScheme::TiledMultiscale)
        .expect("size is a multiple of 4");
    (pair.hr, pair.lr)
}

/// Default x2 configuration.
pub fn config() -> AggregationConfig {
    AggregationConfig::with_scale(2)
}
