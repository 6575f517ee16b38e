use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;

/// Which raster a patch coordinate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleTag {
    /// The low-resolution input.
    Lr,
    /// The input downsampled by the search scale.
    LrDown,
    /// The super-resolved output grid.
    Hr,
}

/// Top-left corner of a patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PatchCoord {
    pub row: usize,
    pub col: usize,
    pub scale_tag: ScaleTag,
}

impl PatchCoord {
    pub fn new(row: usize, col: usize, scale_tag: ScaleTag) -> Self {
        Self {
            row,
            col,
            scale_tag,
        }
    }
}

/// A square block of samples together with where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub coord: PatchCoord,
    side: usize,
    channels: usize,
    data: Vec<f64>,
}

impl Patch {
    pub fn new(coord: PatchCoord, side: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if side == 0 || channels == 0 || data.len() != side * side * channels {
            return Err(Error::InvalidDimension(format!(
                "patch side {side} x {channels} channel(s) cannot hold {} samples",
                data.len()
            )));
        }
        Ok(Self {
            coord,
            side,
            channels,
            data,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize, ch: usize) -> f64 {
        self.data[(row * self.side + col) * self.channels + ch]
    }

    fn channel_values(&self, ch: usize) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().skip(ch).step_by(self.channels).copied()
    }

    /// Mean of channel `ch` over the spatial extent.
    pub fn mean(&self, ch: usize) -> f64 {
        self.channel_values(ch).sum::<f64>() / (self.side * self.side) as f64
    }

    /// Population (divide-by-N) standard deviation of channel `ch`.
    pub fn std(&self, ch: usize) -> f64 {
        let mu = self.mean(ch);
        let var = self
            .channel_values(ch)
            .map(|v| (v - mu) * (v - mu))
            .sum::<f64>()
            / (self.side * self.side) as f64;
        var.sqrt()
    }
}

/// Copies the `side`x`side` block of `img` whose top-left corner is `coord`.
pub fn extract_patch(img: &Image, coord: PatchCoord, side: usize) -> Result<Patch> {
    if side == 0 || coord.row + side > img.height() || coord.col + side > img.width() {
        return Err(Error::OutOfBounds {
            row: coord.row,
            col: coord.col,
            side,
            width: img.width(),
            height: img.height(),
        });
    }
    let ch = img.channels();
    let mut data = Vec::with_capacity(side * side * ch);
    for r in coord.row..coord.row + side {
        let start = img.index(r, coord.col, 0);
        data.extend_from_slice(&img.data()[start..start + side * ch]);
    }
    Patch::new(coord, side, ch, data)
}

/// Every patch of `img` on a dense stride-1 grid.
pub fn extract_dense(img: &Image, side: usize, tag: ScaleTag) -> Result<Vec<Patch>> {
    if side > img.width() || side > img.height() {
        return Err(Error::OutOfBounds {
            row: 0,
            col: 0,
            side,
            width: img.width(),
            height: img.height(),
        });
    }
    let mut out = Vec::with_capacity((img.height() - side + 1) * (img.width() - side + 1));
    for r in 0..=img.height() - side {
        for c in 0..=img.width() - side {
            out.push(extract_patch(img, PatchCoord::new(r, c, tag), side)?);
        }
    }
    Ok(out)
}
