use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use super::GrayImage;
use crate::error::{Error, Result};

// Fixed encoder settings: identical pixels always produce identical bytes.
const COMPRESSION: png::Compression = png::Compression::Fast;
const FILTER: png::Filter = png::Filter::Adaptive;

/// Encodes as an 8-bit grayscale, non-interlaced PNG.
pub fn encode_png<W: Write>(img: &GrayImage, out: W) -> Result<(), png::EncodingError> {
    let mut enc = png::Encoder::new(out, img.width() as u32, img.height() as u32);
    enc.set_color(png::ColorType::Grayscale);
    enc.set_depth(png::BitDepth::Eight);
    enc.set_compression(COMPRESSION);
    enc.set_filter(FILTER);
    let mut writer = enc.write_header()?;
    writer.write_image_data(img.pixels())?;
    writer.finish()
}

pub fn write_png(img: &GrayImage, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    encode_png(img, &mut out).map_err(|e| Error::Png {
        path: path.to_owned(),
        message: e.to_string(),
    })?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads an 8-bit grayscale PNG; any other color type or depth is rejected.
pub fn read_png(path: &Path) -> Result<GrayImage> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let png_err = |e: png::DecodingError| Error::Png {
        path: path.to_owned(),
        message: e.to_string(),
    };
    let mut decoder = png::Decoder::new(BufReader::new(file));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(png_err)?;
    let (color, depth) = {
        let info = reader.info();
        (info.color_type, info.bit_depth)
    };
    if color != png::ColorType::Grayscale || depth != png::BitDepth::Eight {
        return Err(Error::InvalidImage(format!(
            "{}: expected 8-bit grayscale, found {color:?} at {depth:?}",
            path.display()
        )));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::InvalidImage(format!("{}: image too large", path.display())))?;
    let mut buf = vec![0; size];
    let frame = reader.next_frame(&mut buf).map_err(png_err)?;
    buf.truncate(frame.buffer_size());
    GrayImage::new(frame.width as usize, frame.height as usize, buf)
}
