use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder};

use crate::error::{Error, Result};

/// 8-bit grayscale raster, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    samples: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        if samples.len() != width * height {
            return Err(Error::mismatch(width * height, samples.len()));
        }
        Ok(GrayImage {
            width,
            height,
            samples,
        })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> u8) -> Self {
        let samples = (0..width * height)
            .map(|k| f(k % width, k / width))
            .collect();
        GrayImage {
            width,
            height,
            samples,
        }
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        GrayImage {
            width,
            height,
            samples: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.samples[y * self.width + x]
    }

    /// Reads any grayscale-convertible PGM/PNM or PNG file.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let img = image::open(path)
            .map_err(|source| Error::Image {
                path: path.to_path_buf(),
                source,
            })?
            .into_luma8();
        let (w, h) = img.dimensions();
        GrayImage::new(w as usize, h as usize, img.into_raw())
    }

    /// Writes binary PGM (P5) or PNG depending on the extension.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let wrap = |source| Error::Image {
            path: path.to_path_buf(),
            source,
        };
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        if matches!(ext.as_deref(), Some("pgm" | "pnm")) {
            let file = std::io::BufWriter::new(std::fs::File::create(path)?);
            let subtype = PnmSubtype::Graymap(SampleEncoding::Binary);
            return PnmEncoder::new(file)
                .with_subtype(subtype)
                .write_image(
                    &self.samples,
                    self.width as u32,
                    self.height as u32,
                    ExtendedColorType::L8,
                )
                .map_err(wrap);
        }
        let buf =
            image::GrayImage::from_raw(self.width as u32, self.height as u32, self.samples.clone())
                .expect("buffer length matches dimensions");
        buf.save(path).map_err(wrap)
    }

    /// Extends right and bottom edges by replication to multiples of `n`.
    pub fn pad_to_multiple(&self, n: usize) -> GrayImage {
        let w = self.width.div_ceil(n) * n;
        let h = self.height.div_ceil(n) * n;
        GrayImage::from_fn(w, h, |x, y| {
            self.get(x.min(self.width - 1), y.min(self.height - 1))
        })
    }

    pub fn crop(&self, width: usize, height: usize) -> GrayImage {
        GrayImage::from_fn(width, height, |x, y| self.get(x, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let img = GrayImage::from_fn(13, 7, |x, y| (x * 17 + y * 31) as u8);
        let pgm = dir.path().join("a.pgm");
        img.write(&pgm).unwrap();
        let bytes = std::fs::read(&pgm).unwrap();
        assert!(bytes.starts_with(b"P5"));
        assert_eq!(GrayImage::read(&pgm).unwrap(), img);
        let png = dir.path().join("a.png");
        img.write(&png).unwrap();
        assert_eq!(GrayImage::read(&png).unwrap(), img);
    }

    #[test]
    fn reads_hand_written_p5() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.pgm");
        let mut data = b"P5\n# comment\n3 2\n255\n".to_vec();
        data.extend_from_slice(&[0, 1, 2, 253, 254, 255]);
        std::fs::write(&path, data).unwrap();
        let img = GrayImage::read(&path).unwrap();
        assert_eq!((img.width(), img.height()), (3, 2));
        assert_eq!(img.samples(), &[0, 1, 2, 253, 254, 255]);
    }

    #[test]
    fn unreadable_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.pgm");
        std::fs::write(&path, b"not an image").unwrap();
        assert!(matches!(GrayImage::read(&path), Err(Error::Image { .. })));
        assert!(GrayImage::read(dir.path().join("missing.pgm")).is_err());
    }

    #[test]
    fn padding_replicates_edges() {
        let img = GrayImage::from_fn(5, 3, |x, y| (10 * y + x) as u8);
        let p = img.pad_to_multiple(4);
        assert_eq!((p.width(), p.height()), (8, 4));
        assert_eq!(p.get(7, 3), img.get(4, 2));
        assert_eq!(p.crop(5, 3), img);
    }
}
