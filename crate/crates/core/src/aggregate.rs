//! Patch aggregation: Gaussian edge weights, adaptive patch normalization,
//! weighted fusion of HR neighbor patches and overlap-averaged reconstruction.

use rayon::prelude::*;

use crate::config::{AggregationConfig, Weighting};
use crate::error::{Error, Result};
use crate::graph::{build_graph, CrossScaleGraph, GraphEdge};
use crate::image::Image;
use crate::patch::{extract_patch, Patch, PatchCoord, ScaleTag};
use crate::resample::bicubic_resample;

/// Unnormalized aggregation weight `exp(-|label|^2 / h)`.
pub fn gaussian_edge_weight(edge_label: &[f64], h: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidInput(format!(
            "bandwidth must be positive, got {h}"
        )));
    }
    if edge_label.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite edge label".into()));
    }
    let sq: f64 = edge_label.iter().map(|v| v * v).sum();
    Ok((-sq / h).exp())
}

/// Re-normalizes `neighbor` so each channel has the mean and population
/// standard deviation of the same channel of `query`.
///
/// The two patches may differ in extent; only per-channel moments are used.
/// A flat neighbor channel (`sigma < eps`) collapses to the query mean.
pub fn adapn(neighbor: &Patch, query: &Patch, eps: f64) -> Result<Patch> {
    if neighbor.channels() != query.channels() {
        return Err(Error::ChannelMismatch {
            expected: query.channels(),
            actual: neighbor.channels(),
        });
    }
    if neighbor
        .data()
        .iter()
        .chain(query.data())
        .any(|v| !v.is_finite())
    {
        return Err(Error::InvalidInput("non-finite patch sample".into()));
    }
    let ch = neighbor.channels();
    let affine: Vec<(f64, f64, f64)> = (0..ch)
        .map(|c| {
            let gain = query.std(c) / neighbor.std(c).max(eps);
            (neighbor.mean(c), gain, query.mean(c))
        })
        .collect();
    let data = neighbor
        .data()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let (mu_n, gain, mu_q) = affine[i % ch];
            gain * (v - mu_n) + mu_q
        })
        .collect();
    Patch::new(neighbor.coord, neighbor.side(), ch, data)
}

/// The k HR neighbor patches of one query and their normalized weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedQuery {
    pub query: PatchCoord,
    pub patches: Vec<Patch>,
    pub weights: Vec<f64>,
}

impl WeightedQuery {
    /// Weighted sum of the neighbor patches, placed at `scale` times the query position.
    pub fn fuse(&self, scale: usize) -> Result<Patch> {
        let first = self
            .patches
            .first()
            .ok_or_else(|| Error::InvalidInput("query without neighbors".into()))?;
        let mut acc = vec![0.0; first.data().len()];
        for (p, &w) in self.patches.iter().zip(&self.weights) {
            for (a, &v) in acc.iter_mut().zip(p.data()) {
                *a += w * v;
            }
        }
        Patch::new(
            PatchCoord::new(self.query.row * scale, self.query.col * scale, ScaleTag::Hr),
            first.side(),
            first.channels(),
            acc,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPatchSet {
    pub queries: Vec<WeightedQuery>,
}

/// Normalized weights for one query's edges.
fn edge_weights(edges: &[GraphEdge], cfg: &AggregationConfig) -> Result<Vec<f64>> {
    let k = edges.len();
    match cfg.weighting {
        Weighting::Average => Ok(vec![1.0 / k as f64; k]),
        Weighting::Gaussian => {
            let sq: Vec<f64> = edges
                .iter()
                .map(|e| e.edge_label.iter().map(|v| v * v).sum())
                .collect();
            // Shifting by the smallest exponent leaves the normalized weights
            // unchanged and keeps the nearest neighbor at exp(0) = 1.
            let min = sq.iter().copied().fold(f64::INFINITY, f64::min);
            let raw: Vec<f64> = edges
                .iter()
                .zip(&sq)
                .map(|(e, &d2)| {
                    // Validates the label and bandwidth.
                    gaussian_edge_weight(&e.edge_label, cfg.bandwidth)?;
                    Ok((-(d2 - min) / cfg.bandwidth).exp())
                })
                .collect::<Result<_>>()?;
            let delta: f64 = raw.iter().sum();
            Ok(raw.into_iter().map(|w| w / delta).collect())
        }
    }
}

fn weigh_query(
    lr: &Image,
    query: PatchCoord,
    edges: &[GraphEdge],
    scale: usize,
    l: usize,
    cfg: &AggregationConfig,
) -> Result<WeightedQuery> {
    let weights = edge_weights(edges, cfg)?;
    let query_patch = if cfg.adapn {
        Some(extract_patch(lr, query, l)?)
    } else {
        None
    };
    let patches = edges
        .iter()
        .map(|e| {
            let hr = extract_patch(lr, e.neighbor_hr, l * scale)?;
            match &query_patch {
                Some(q) => adapn(&hr, q, cfg.adapn_eps),
                None => Ok(hr),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightedQuery {
        query,
        patches,
        weights,
    })
}

/// Fetches every query's HR neighbor patches from `lr` (AdaPN-normalized when
/// enabled) and assigns normalized weights.
pub fn compute_weights(
    graph: &CrossScaleGraph,
    lr: &Image,
    cfg: &AggregationConfig,
) -> Result<WeightedPatchSet> {
    let queries = graph
        .queries
        .par_iter()
        .zip(&graph.edges)
        .map(|(&q, edges)| weigh_query(lr, q, edges, graph.scale, graph.patch, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightedPatchSet { queries })
}

/// Per-pixel mean of all patch samples covering it, without clamping.
fn overlap_average(
    patches: &[Patch],
    width: usize,
    height: usize,
    channels: usize,
) -> Result<Vec<f64>> {
    let mut sum = vec![0.0; width * height * channels];
    let mut count = vec![0u32; width * height];
    for p in patches {
        if p.channels() != channels {
            return Err(Error::ChannelMismatch {
                expected: channels,
                actual: p.channels(),
            });
        }
        let (r0, c0, side) = (p.coord.row, p.coord.col, p.side());
        if r0 + side > height || c0 + side > width {
            return Err(Error::OutOfBounds {
                row: r0,
                col: c0,
                side,
                width,
                height,
            });
        }
        for i in 0..side {
            let dst = ((r0 + i) * width + c0) * channels;
            let src = &p.data()[i * side * channels..(i + 1) * side * channels];
            for (s, &v) in sum[dst..dst + side * channels].iter_mut().zip(src) {
                *s += v;
            }
            for n in &mut count[(r0 + i) * width + c0..(r0 + i) * width + c0 + side] {
                *n += 1;
            }
        }
    }
    if let Some(idx) = count.iter().position(|&n| n == 0) {
        return Err(Error::Coverage {
            row: idx / width,
            col: idx % width,
        });
    }
    for (i, s) in sum.iter_mut().enumerate() {
        *s /= f64::from(count[i / channels]);
    }
    Ok(sum)
}

/// Reassembles an image from overlapping patches by uniform averaging.
pub fn patch2img(patches: &[Patch], width: usize, height: usize, channels: usize) -> Result<Image> {
    let data = overlap_average(patches, width, height, channels)?;
    Image::new(width, height, channels, data)
}

/// Fuses every query of `graph` and reconstructs the `scale`x larger image.
pub(crate) fn aggregate_graph(
    lr: &Image,
    graph: &CrossScaleGraph,
    cfg: &AggregationConfig,
) -> Result<Image> {
    let fused = graph
        .queries
        .par_iter()
        .zip(&graph.edges)
        .map(|(&q, edges)| {
            weigh_query(lr, q, edges, graph.scale, graph.patch, cfg)?.fuse(graph.scale)
        })
        .collect::<Result<Vec<_>>>()?;
    // Sequential accumulation in query order keeps the sum independent of
    // the thread count.
    patch2img(
        &fused,
        lr.width() * graph.scale,
        lr.height() * graph.scale,
        lr.channels(),
    )
}

/// Super-resolves `lr` by `cfg.scale` with cross-scale patch aggregation.
pub fn super_resolve(lr: &Image, cfg: &AggregationConfig) -> Result<Image> {
    cfg.validate()?;
    let s = cfg.scale;
    if !lr.width().is_multiple_of(s) || !lr.height().is_multiple_of(s) {
        return Err(Error::InvalidDimension(format!(
            "{}x{} is not divisible by scale {s}",
            lr.width(),
            lr.height()
        )));
    }
    let down = bicubic_resample(lr, 1.0 / s as f64, cfg.boundary)?;
    let graph = build_graph(lr, &down, cfg)?;
    aggregate_graph(lr, &graph, cfg)
}
