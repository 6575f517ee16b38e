use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::BoundaryPolicy;

/// How the k neighbor patches of a query are weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// Uniform `1/k`.
    Average,
    /// `exp(-|D|^2 / h)` on the edge label, normalized per query.
    #[default]
    Gaussian,
}

/// Hyperparameters of the cross-scale pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationConfig {
    /// Downsampling ratio used for the neighbor search, and the upscale of one pass.
    pub scale: usize,
    /// Neighbors per query.
    pub k: usize,
    /// Query patch side `l`.
    pub patch: usize,
    /// Search window side `d`, in downsampled pixels.
    pub window: usize,
    /// Query grid stride in LR pixels.
    pub stride: usize,
    /// Gaussian bandwidth `h`.
    pub bandwidth: f64,
    pub weighting: Weighting,
    /// Adaptive patch normalization of neighbors against the query.
    pub adapn: bool,
    pub adapn_eps: f64,
    pub boundary: BoundaryPolicy,
    /// Match patches on luminance only.
    pub y_only: bool,
}

impl Default for AggregationConfig {
    fn default() -> Self {
        Self {
            scale: 2,
            k: 5,
            patch: 3,
            window: 30,
            stride: 1,
            bandwidth: 10.0,
            weighting: Weighting::Gaussian,
            adapn: true,
            adapn_eps: 1e-5,
            boundary: BoundaryPolicy::Reflect,
            y_only: false,
        }
    }
}

impl AggregationConfig {
    pub fn with_scale(scale: usize) -> Self {
        Self {
            scale,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.scale < 1 {
            return fail(format!("scale must be >= 1, got {}", self.scale));
        }
        if self.k < 1 {
            return fail(format!("k must be >= 1, got {}", self.k));
        }
        // l >= 2 keeps every HR pixel covered by the s-strided placements.
        if self.patch < 2 {
            return fail(format!("patch side must be >= 2, got {}", self.patch));
        }
        if self.window < self.patch {
            return fail(format!(
                "window {} is smaller than patch side {}",
                self.window, self.patch
            ));
        }
        if self.stride < 1 || self.stride > self.patch {
            return fail(format!(
                "stride must lie in 1..={}, got {}",
                self.patch, self.stride
            ));
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return fail(format!(
                "bandwidth must be positive, got {}",
                self.bandwidth
            ));
        }
        if !(self.adapn_eps.is_finite() && self.adapn_eps > 0.0) {
            return fail(format!(
                "adapn eps must be positive, got {}",
                self.adapn_eps
            ));
        }
        Ok(())
    }
}
