//! PNG and binary PNM (PPM/PGM) input and output, 8 bits per sample.

use std::fs::File;
use std::io::{BufWriter, Cursor};
use std::path::Path;

use image::codecs::png::PngEncoder;
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageError, ImageFormat, ImageReader};

use crate::error::{Error, Result};
use crate::image::Image;

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn map_decode_error(path: &Path, err: ImageError) -> Error {
    match err {
        ImageError::Unsupported(e) => Error::UnsupportedFormat(e.to_string()),
        ImageError::IoError(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => {
            Error::CorruptFile {
                path: path.to_path_buf(),
                reason: e.to_string(),
            }
        }
        ImageError::IoError(e) => io_err(path, e),
        other => Error::CorruptFile {
            path: path.to_path_buf(),
            reason: other.to_string(),
        },
    }
}

/// Loads an 8-bit gray or RGB PNG/PPM/PGM image.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    // Detect by content only; a misnamed file is not trusted by extension.
    match image::guess_format(&bytes) {
        Ok(ImageFormat::Png) | Ok(ImageFormat::Pnm) => {}
        Ok(other) => {
            return Err(Error::UnsupportedFormat(format!(
                "{}: {:?}",
                path.display(),
                other
            )))
        }
        Err(_) => {
            return Err(Error::UnsupportedFormat(format!(
                "{}: unrecognized content",
                path.display()
            )))
        }
    }
    let reader = ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| io_err(path, e))?;
    let decoded = reader.decode().map_err(|e| map_decode_error(path, e))?;
    let (width, height, channels, bytes) = match decoded {
        DynamicImage::ImageLuma8(buf) => (buf.width(), buf.height(), 1, buf.into_raw()),
        DynamicImage::ImageRgb8(buf) => (buf.width(), buf.height(), 3, buf.into_raw()),
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "{}: pixel layout {:?} (only 8-bit gray or RGB)",
                path.display(),
                other.color()
            )))
        }
    };
    Image::new(
        width as usize,
        height as usize,
        channels,
        bytes.into_iter().map(|b| f64::from(b) / 255.0).collect(),
    )
}

/// Quantizes samples to 8 bits, rounding to nearest.
pub fn to_bytes(img: &Image) -> Vec<u8> {
    img.data()
        .iter()
        .map(|v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect()
}

/// Writes `img` as PNG or binary PPM/PGM, chosen by the file extension.
pub fn save_image(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let format = match ext.as_str() {
        "png" => ImageFormat::Png,
        "ppm" | "pgm" | "pnm" => ImageFormat::Pnm,
        _ => {
            return Err(Error::UnsupportedFormat(format!(
                "{}: unknown extension",
                path.display()
            )))
        }
    };
    let bytes = to_bytes(img);
    let color = if img.channels() == 1 {
        ExtendedColorType::L8
    } else {
        ExtendedColorType::Rgb8
    };
    let (w, h) = (img.width() as u32, img.height() as u32);

    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let writer = BufWriter::new(file);
    let result = match format {
        ImageFormat::Png => PngEncoder::new(writer).write_image(&bytes, w, h, color),
        _ => {
            let subtype = if img.channels() == 1 {
                PnmSubtype::Graymap(SampleEncoding::Binary)
            } else {
                PnmSubtype::Pixmap(SampleEncoding::Binary)
            };
            PnmEncoder::new(writer)
                .with_subtype(subtype)
                .write_image(&bytes, w, h, color)
        }
    };
    result.map_err(|e| match e {
        ImageError::IoError(source) => io_err(path, source),
        other => Error::UnsupportedFormat(other.to_string()),
    })
}
