//! PSNR and SSIM on the luminance channel.

use std::fmt;

use serde::ser::Serializer;
use serde::Serialize;

use crate::color::luminance;
use crate::error::{Error, Result};
use crate::image::Image;

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

fn cropped_luma(a: &Image, b: &Image, crop: usize) -> Result<(Image, Image)> {
    if !a.same_shape(b) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{}x{} vs {}x{}x{}",
            a.width(),
            a.height(),
            a.channels(),
            b.width(),
            b.height(),
            b.channels()
        )));
    }
    if 2 * crop >= a.width().min(a.height()) {
        return Err(Error::InvalidInput(format!(
            "border crop {crop} leaves nothing of a {}x{} image",
            a.width(),
            a.height()
        )));
    }
    let (w, h) = (a.width() - 2 * crop, a.height() - 2 * crop);
    Ok((
        luminance(a)?.crop(crop, crop, w, h)?,
        luminance(b)?.crop(crop, crop, w, h)?,
    ))
}

/// Mean squared error between two same-shaped images.
pub fn mse(a: &Image, b: &Image) -> Result<f64> {
    if !a.same_shape(b) {
        return Err(Error::DimensionMismatch(
            "mse operands differ in shape".into(),
        ));
    }
    let n = a.data().len() as f64;
    Ok(a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / n)
}

/// PSNR in dB of the Y channels after removing `crop` pixels from each border.
///
/// Peak signal is 1. Identical inputs give `f64::INFINITY`.
pub fn psnr_y(a: &Image, b: &Image, crop: usize) -> Result<f64> {
    let (ya, yb) = cropped_luma(a, b, crop)?;
    let err = mse(&ya, &yb)?;
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (1.0 / err).log10())
}

fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let mut w = [0.0; SSIM_WINDOW];
    let half = (SSIM_WINDOW / 2) as f64;
    for (i, v) in w.iter_mut().enumerate() {
        let x = i as f64 - half;
        *v = (-x * x / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Valid-region separable filtering of a single plane.
fn filter_valid(plane: &[f64], width: usize, height: usize, win: &[f64]) -> Vec<f64> {
    let n = win.len();
    let (ow, oh) = (width + 1 - n, height + 1 - n);
    let mut tmp = vec![0.0; height * ow];
    for r in 0..height {
        let row = &plane[r * width..(r + 1) * width];
        for c in 0..ow {
            tmp[r * ow + c] = win.iter().zip(&row[c..c + n]).map(|(w, v)| w * v).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for r in 0..oh {
        for (j, w) in win.iter().enumerate() {
            let src = &tmp[(r + j) * ow..(r + j + 1) * ow];
            for (o, v) in out[r * ow..(r + 1) * ow].iter_mut().zip(src) {
                *o += w * v;
            }
        }
    }
    out
}

/// Mean SSIM of the Y channels with an 11x11 Gaussian window (sigma 1.5),
/// `K1 = 0.01`, `K2 = 0.03`, dynamic range 1, over the valid region only.
pub fn ssim_y(a: &Image, b: &Image, crop: usize) -> Result<f64> {
    let (ya, yb) = cropped_luma(a, b, crop)?;
    let (w, h) = (ya.width(), ya.height());
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::ImageTooSmall(format!(
            "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} after cropping, got {w}x{h}"
        )));
    }
    let win = gaussian_window();
    let x = ya.data();
    let y = yb.data();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(p, q)| p * q).collect();

    let mu_x = filter_valid(x, w, h, &win);
    let mu_y = filter_valid(y, w, h, &win);
    let e_xx = filter_valid(&xx, w, h, &win);
    let e_yy = filter_valid(&yy, w, h, &win);
    let e_xy = filter_valid(&xy, w, h, &win);

    let c1 = (SSIM_K1 * 1.0).powi(2);
    let c2 = (SSIM_K2 * 1.0).powi(2);
    let mut total = 0.0;
    for i in 0..mu_x.len() {
        let (mx, my) = (mu_x[i], mu_y[i]);
        let sx = e_xx[i] - mx * mx;
        let sy = e_yy[i] - my * my;
        let sxy = e_xy[i] - mx * my;
        let num = (2.0 * mx * my + c1) * (2.0 * sxy + c2);
        let den = (mx * mx + my * my + c1) * (sx + sy + c2);
        total += num / den;
    }
    Ok(total / mu_x.len() as f64)
}

/// PSNR/SSIM pair for one evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualityReport {
    #[serde(serialize_with = "serialize_psnr")]
    pub psnr_db: f64,
    pub ssim: f64,
    pub crop_border: usize,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

fn serialize_psnr<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

impl QualityReport {
    /// Evaluates `estimate` against `reference`.
    pub fn evaluate(estimate: &Image, reference: &Image, crop: usize) -> Result<Self> {
        Ok(Self {
            psnr_db: psnr_y(estimate, reference, crop)?,
            ssim: ssim_y(estimate, reference, crop)?,
            crop_border: crop,
            notes: String::new(),
        })
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

impl fmt::Display for QualityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}
