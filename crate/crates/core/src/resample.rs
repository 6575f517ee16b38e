//! Separable bicubic resampling.
//!
//! The kernel is the Keys cubic with `a = -0.5` (Catmull-Rom). When shrinking,
//! the kernel is stretched by the inverse scale so every input sample
//! contributes, the same antialiasing rule MATLAB's `imresize` applies.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{BoundaryPolicy, Image};

/// Cubic kernel parameter.
pub const CUBIC_A: f64 = -0.5;

/// Keys cubic convolution kernel with `a = -0.5`.
#[inline]
pub fn cubic_kernel(x: f64) -> f64 {
    let a = CUBIC_A;
    let x = x.abs();
    if x <= 1.0 {
        ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a
    } else {
        0.0
    }
}

/// Taps and normalized weights for one output sample along one axis.
#[derive(Debug, Clone)]
struct Contribution {
    indices: Vec<usize>,
    weights: Vec<f64>,
}

fn contributions(
    in_len: usize,
    out_len: usize,
    scale: f64,
    boundary: BoundaryPolicy,
) -> Vec<Contribution> {
    // Stretch the kernel when shrinking.
    let (support, stretch) = if scale < 1.0 {
        (4.0 / scale, scale)
    } else {
        (4.0, 1.0)
    };
    let taps = support.ceil() as isize + 2;

    (0..out_len)
        .map(|i| {
            let center = (i as f64 + 0.5) / scale - 0.5;
            let left = (center - support / 2.0).floor() as isize;
            let mut indices = Vec::with_capacity(taps as usize);
            let mut weights = Vec::with_capacity(taps as usize);
            for j in left..left + taps {
                let w = stretch * cubic_kernel(stretch * (center - j as f64));
                if w != 0.0 {
                    indices.push(boundary.resolve(j, in_len));
                    weights.push(w);
                }
            }
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            Contribution { indices, weights }
        })
        .collect()
}

/// Resamples `img` by `scale` with the a = -0.5 bicubic kernel.
///
/// Output dimensions are `round(input * scale)`. Rows are filtered first, then
/// columns. The result is clamped to `[0, 1]`.
pub fn bicubic_resample(img: &Image, scale: f64, boundary: BoundaryPolicy) -> Result<Image> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidInput(format!(
            "resample scale must be positive, got {scale}"
        )));
    }
    let out_w = (img.width() as f64 * scale).round() as usize;
    let out_h = (img.height() as f64 * scale).round() as usize;
    if out_w == 0 || out_h == 0 {
        return Err(Error::InvalidDimension(format!(
            "resampling {}x{} by {} yields {}x{}",
            img.width(),
            img.height(),
            scale,
            out_w,
            out_h
        )));
    }
    if scale == 1.0 {
        return Ok(img.clone());
    }

    let ch = img.channels();
    let in_w = img.width();
    let in_h = img.height();
    let horiz = contributions(in_w, out_w, scale, boundary);
    let vert = contributions(in_h, out_h, scale, boundary);

    // Horizontal pass: in_h rows of out_w samples.
    let mut tmp = vec![0.0; in_h * out_w * ch];
    tmp.par_chunks_mut(out_w * ch)
        .enumerate()
        .for_each(|(r, out_row)| {
            let src = img.row(r);
            for (x, contrib) in horiz.iter().enumerate() {
                for c in 0..ch {
                    let mut acc = 0.0;
                    for (&j, &w) in contrib.indices.iter().zip(&contrib.weights) {
                        acc += w * src[j * ch + c];
                    }
                    out_row[x * ch + c] = acc;
                }
            }
        });

    // Vertical pass.
    let row_len = out_w * ch;
    let mut out = vec![0.0; out_h * row_len];
    out.par_chunks_mut(row_len)
        .enumerate()
        .for_each(|(y, out_row)| {
            let contrib = &vert[y];
            for (&j, &w) in contrib.indices.iter().zip(&contrib.weights) {
                let src = &tmp[j * row_len..(j + 1) * row_len];
                for (o, &s) in out_row.iter_mut().zip(src) {
                    *o += w * s;
                }
            }
        });

    Image::new(out_w, out_h, ch, out)
}
