//! Single-image super-resolution from cross-scale internal patch recurrence.
//!
//! For every small query patch of the low-resolution input, the k most similar
//! patches are searched in the input downsampled by the target scale. Each match
//! is mapped back to the larger region of the input it came from, giving an
//! exemplar at the target resolution. Exemplars are normalized to the query's
//! per-channel moments, blended with Gaussian or uniform weights and averaged
//! where they overlap.
//!
//! ```
//! use xscale_core::{super_resolve, AggregationConfig, Image};
//!
//! let lr = Image::filled(16, 16, 3, 0.5).unwrap();
//! let sr = super_resolve(&lr, &AggregationConfig::with_scale(2)).unwrap();
//! assert_eq!((sr.width(), sr.height()), (32, 32));
//! ```

pub mod aggregate;
pub mod baseline;
pub mod color;
pub mod config;
pub mod error;
pub mod graph;
pub mod image;
pub mod io;
pub mod metrics;
pub mod patch;
pub mod resample;
pub mod synthetic;

pub use aggregate::{
    adapn, compute_weights, gaussian_edge_weight, patch2img, super_resolve, WeightedPatchSet,
    WeightedQuery,
};
pub use baseline::{bicubic_baseline, same_scale_knn};
pub use color::rgb_to_y;
pub use config::{AggregationConfig, Weighting};
pub use error::{Error, Result};
pub use graph::{build_graph, knn_search, CrossScaleGraph, GraphEdge};
pub use image::{BoundaryPolicy, Image};
pub use io::{load_image, save_image};
pub use metrics::{psnr_y, ssim_y, QualityReport};
pub use patch::{extract_patch, Patch, PatchCoord, ScaleTag};
pub use resample::bicubic_resample;
pub use synthetic::{SyntheticPair, SyntheticScheme};
