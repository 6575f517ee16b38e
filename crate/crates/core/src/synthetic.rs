//! Seeded synthetic HR/LR pairs with guaranteed cross-scale patch recurrence.
//!
//! `tiled-multiscale` repeats one random texture at two scales. Coarse
//! squares of side `16 s^2`, one centered in every `32 s^2` cell, hold the
//! texture magnified by `s` (period `4 s^2`). Everything else holds its bicubic
//! `1/s` reduction. Once the LR image is formed, the coarse squares of the LR
//! image contain exactly the fine HR texture, so fine-region queries find exact
//! cross-scale matches whose mapped LR regions equal the ground truth. Cells are
//! sized so a 30-pixel search window around any fine query reaches a square.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{BoundaryPolicy, Image};
use crate::resample::bicubic_resample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticScheme {
    #[default]
    TiledMultiscale,
}

impl FromStr for SyntheticScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tiled-multiscale" => Ok(Self::TiledMultiscale),
            other => Err(Error::Config(format!("unknown synthetic scheme `{other}`"))),
        }
    }
}

impl fmt::Display for SyntheticScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TiledMultiscale => f.write_str("tiled-multiscale"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticPair {
    pub hr: Image,
    pub lr: Image,
}

/// Repeats `tile` (square, side `n`) `reps` times in each direction.
fn tile(tile: &Image, reps: usize) -> Result<Image> {
    let n = tile.width();
    Image::from_fn(n * reps, n * reps, tile.channels(), |r, c, ch| {
        tile.get(r % n, c % n, ch)
    })
}

/// Generates a `size`x`size` RGB ground truth and its `1/scale` reduction.
pub fn generate(
    seed: u64,
    size: usize,
    scale: usize,
    scheme: SyntheticScheme,
) -> Result<SyntheticPair> {
    if scale < 1 {
        return Err(Error::InvalidDimension(format!(
            "scale must be >= 1, got {scale}"
        )));
    }
    if size == 0 || !size.is_multiple_of(2 * scale) {
        return Err(Error::InvalidDimension(format!(
            "size {size} is not a positive multiple of {}",
            2 * scale
        )));
    }
    match scheme {
        SyntheticScheme::TiledMultiscale => tiled_multiscale(seed, size, scale),
    }
}

fn tiled_multiscale(seed: u64, size: usize, s: usize) -> Result<SyntheticPair> {
    let period = 4 * s * s;
    let cell = 32 * s * s;
    let boundary = BoundaryPolicy::Reflect;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Random base tile, magnified by `s` into the coarse texture.
    let base_period = period / s;
    let base = Image::from_fn(base_period, base_period, 3, |_, _, _| rng.gen::<f64>())?;
    let coarse = bicubic_resample(&tile(&base, 3)?, s as f64, boundary)?
        .crop(period, period, period, period)?;

    // One period of the reduced texture, cut from the middle of a 3x3 tiling
    // so the reduction sees the periodic continuation on every side.
    let fine_period = period / s;
    let fine = bicubic_resample(&tile(&coarse, 3)?, 1.0 / s as f64, boundary)?.crop(
        fine_period,
        fine_period,
        fine_period,
        fine_period,
    )?;

    let inside = |v: usize| (8 * s * s..24 * s * s).contains(&(v % cell));
    let hr = Image::from_fn(size, size, 3, |r, c, ch| {
        if inside(r) && inside(c) {
            coarse.get(r % period, c % period, ch)
        } else {
            fine.get(r % fine_period, c % fine_period, ch)
        }
    })?;
    let lr = bicubic_resample(&hr, 1.0 / s as f64, boundary)?;
    Ok(SyntheticPair { hr, lr })
}
