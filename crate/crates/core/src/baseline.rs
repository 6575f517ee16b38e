//! Reference methods: plain bicubic upsampling and same-scale k-NN aggregation.

use crate::aggregate::aggregate_graph;
use crate::config::{AggregationConfig, Weighting};
use crate::error::Result;
use crate::graph::build_graph;
use crate::image::{BoundaryPolicy, Image};
use crate::resample::bicubic_resample;

/// Bicubic upsampling by an integer factor.
pub fn bicubic_baseline(lr: &Image, scale: usize, boundary: BoundaryPolicy) -> Result<Image> {
    bicubic_resample(lr, scale as f64, boundary)
}

/// Same-scale non-local aggregation over the k nearest patches.
///
/// Each `l`x`l` query is replaced by the Gaussian-weighted mean of its k
/// nearest patches in a `d`x`d` window of the same image (the query itself
/// included), and overlaps are averaged. The output has the input's size.
/// `cfg.scale`, `cfg.weighting` and `cfg.adapn` are ignored.
pub fn same_scale_knn(img: &Image, cfg: &AggregationConfig) -> Result<Image> {
    let cfg = AggregationConfig {
        scale: 1,
        weighting: Weighting::Gaussian,
        adapn: false,
        ..cfg.clone()
    };
    let graph = build_graph(img, img, &cfg)?;
    aggregate_graph(img, &graph, &cfg)
}
