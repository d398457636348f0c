//! Grayscale input: binary PGM through the `image` crate, or a raw 16-bit
//! format with a fixed 16-byte header.

use std::fs;
use std::io::BufWriter;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageReader};

/// Magic of the raw format. It is followed by the height and width as
/// little-endian `u32`, then `height * width` little-endian `u16` pixels in
/// raster order.
pub const RAW16_MAGIC: &[u8; 8] = b"BPHRAW16";
const RAW16_HEADER: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub height: usize,
    pub width: usize,
    pub pixels: Vec<u16>,
}

impl Raster {
    pub fn load(path: &Path) -> Result<Raster> {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        if bytes.starts_with(RAW16_MAGIC) {
            return Self::parse_raw16(&bytes).with_context(|| format!("bad raw image {}", path.display()));
        }
        let img = ImageReader::new(std::io::Cursor::new(bytes))
            .with_guessed_format()?
            .decode()
            .with_context(|| format!("cannot decode {}", path.display()))?;
        let (width, height) = (img.width() as usize, img.height() as usize);
        let pixels = match img {
            DynamicImage::ImageLuma8(buf) => buf.into_raw().into_iter().map(u16::from).collect(),
            DynamicImage::ImageLuma16(buf) => buf.into_raw(),
            other => bail!("{} is not grayscale ({:?})", path.display(), other.color()),
        };
        Ok(Raster { height, width, pixels })
    }

    pub fn parse_raw16(bytes: &[u8]) -> Result<Raster> {
        ensure!(
            bytes.len() >= RAW16_HEADER && bytes.starts_with(RAW16_MAGIC),
            "missing raw header"
        );
        let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let width = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
        let body = &bytes[RAW16_HEADER..];
        let expected = height.checked_mul(width).and_then(|n| n.checked_mul(2));
        ensure!(
            expected == Some(body.len()),
            "{height}x{width} image but {} pixel bytes",
            body.len()
        );
        let pixels = body.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect();
        Ok(Raster { height, width, pixels })
    }

    pub fn to_raw16(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(RAW16_HEADER + 2 * self.pixels.len());
        out.extend_from_slice(RAW16_MAGIC);
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        for p in &self.pixels {
            out.extend_from_slice(&p.to_le_bytes());
        }
        out
    }
}

/// Writes an 8-bit binary PGM.
pub fn write_pgm(path: &Path, height: usize, width: usize, pixels: &[u8]) -> Result<()> {
    ensure!(
        pixels.len() == height * width,
        "{height}x{width} image but {} pixels",
        pixels.len()
    );
    let file = fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    PnmEncoder::new(BufWriter::new(file))
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(pixels, width as u32, height as u32, ExtendedColorType::L8)?;
    Ok(())
}
