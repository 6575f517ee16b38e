use crate::error::{Error, Result};
use crate::image::Image;

/// BT.601 studio-swing luma for `[0, 1]` RGB, scaled back to `[0, 1]`.
#[inline]
pub fn luma(r: f64, g: f64, b: f64) -> f64 {
    (16.0 + 65.481 * r + 128.553 * g + 24.966 * b) / 255.0
}

/// Converts a 3-channel RGB image to its single-channel Y plane.
pub fn rgb_to_y(img: &Image) -> Result<Image> {
    if img.channels() != 3 {
        return Err(Error::ChannelMismatch {
            expected: 3,
            actual: img.channels(),
        });
    }
    let data = img
        .data()
        .chunks_exact(3)
        .map(|p| luma(p[0], p[1], p[2]))
        .collect();
    Image::new(img.width(), img.height(), 1, data)
}

/// Y plane of `img`; single-channel images are taken as already luminance.
pub fn luminance(img: &Image) -> Result<Image> {
    match img.channels() {
        1 => Ok(img.clone()),
        _ => rgb_to_y(img),
    }
}
