use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use xscale_core::{AggregationConfig, BoundaryPolicy, SyntheticScheme, Weighting};

#[derive(Debug, Parser)]
#[command(
    name = "xscale",
    version,
    about = "Cross-scale patch-recurrence super-resolution"
)]
pub struct Cli {
    /// Worker threads for the library (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Super-resolve an image.
    Sr(SrArgs),
    /// Y-channel PSNR/SSIM of an estimate against ground truth.
    Eval(EvalArgs),
    /// Sweep one configuration axis and tabulate quality.
    Ablate(AblateArgs),
    /// Write a seeded synthetic HR/LR pair.
    GenSynthetic(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    Average,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Clamp,
    Reflect,
}

/// Pipeline flags shared by `sr` and `ablate`.
#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    /// Total upscaling factor.
    #[arg(long, default_value_t = 2)]
    pub scale: usize,
    /// Downsampling ratio of the neighbor search; the upscale is done in
    /// passes of this factor. Defaults to 2 for scale 4, else to the scale.
    #[arg(long)]
    pub search_scale: Option<usize>,
    /// Search directly at the full scale in one pass.
    #[arg(long, conflicts_with = "search_scale")]
    pub single_stage: bool,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Search window side in downsampled pixels.
    #[arg(long, default_value_t = 30)]
    pub d: usize,
    /// Query patch side.
    #[arg(long, default_value_t = 3)]
    pub l: usize,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    #[arg(long, default_value_t = 10.0)]
    pub bandwidth: f64,
    #[arg(long, value_enum, default_value_t = WeightingArg::Gaussian)]
    pub weighting: WeightingArg,
    #[arg(long, value_enum, default_value_t = OnOff::On)]
    pub adapn: OnOff,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Reflect)]
    pub boundary: BoundaryArg,
    /// Match patches on luminance only.
    #[arg(long)]
    pub y_only: bool,
    /// Recorded in the manifest; the pipeline itself is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl PipelineArgs {
    /// Ratio used per pass.
    pub fn pass_scale(&self) -> usize {
        if self.single_stage {
            self.scale
        } else {
            match self.search_scale {
                Some(s) => s,
                None if self.scale == 4 => 2,
                None => self.scale,
            }
        }
    }

    /// Config of a single pass.
    pub fn config(&self) -> AggregationConfig {
        AggregationConfig {
            scale: self.pass_scale(),
            k: self.k,
            patch: self.l,
            window: self.d,
            stride: self.stride,
            bandwidth: self.bandwidth,
            weighting: match self.weighting {
                WeightingArg::Average => Weighting::Average,
                WeightingArg::Gaussian => Weighting::Gaussian,
            },
            adapn: self.adapn == OnOff::On,
            boundary: match self.boundary {
                BoundaryArg::Clamp => BoundaryPolicy::Clamp,
                BoundaryArg::Reflect => BoundaryPolicy::Reflect,
            },
            y_only: self.y_only,
            ..AggregationConfig::default()
        }
    }

    /// Number of chained passes, when `scale` is an exact power of the pass scale.
    pub fn passes(&self) -> Option<u32> {
        let (total, step) = (self.scale, self.pass_scale());
        if step == 0 || total == 0 {
            return None;
        }
        if step == 1 {
            return (total == 1).then_some(1);
        }
        let mut acc = 1usize;
        let mut n = 0;
        while acc < total {
            acc = acc.checked_mul(step)?;
            n += 1;
        }
        (acc == total).then_some(n.max(1))
    }
}

#[derive(Debug, Args)]
pub struct SrArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Also write the first pass's graph as text.
    #[arg(long)]
    pub dump_graph: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub sr: PathBuf,
    pub gt: PathBuf,
    /// Border pixels excluded on each side.
    #[arg(long, default_value_t = 2)]
    pub crop: usize,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    /// Low-resolution input.
    #[arg(long)]
    pub input: PathBuf,
    /// Ground truth at the output resolution.
    #[arg(long)]
    pub gt: PathBuf,
    /// One of k, d, weighting, adapn, baseline.
    #[arg(long)]
    pub axis: String,
    /// Comma-separated values for the axis (ignored for `baseline`).
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<String>,
    /// Border crop; defaults to the total scale.
    #[arg(long)]
    pub crop: Option<usize>,
    /// Write the table here (plus `<out>.manifest.jsonl`) instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Side of the square HR image.
    #[arg(long, default_value_t = 256)]
    pub size: usize,
    #[arg(long, default_value_t = 2)]
    pub scale: usize,
    #[arg(long, default_value = "tiled-multiscale")]
    pub scheme: SyntheticScheme,
    /// HR output path.
    #[arg(long)]
    pub hr: PathBuf,
    /// LR output path.
    #[arg(long)]
    pub lr: PathBuf,
}
