//! Reader for the IDX image container (`0x00000803`): big-endian u32 magic,
//! image count, rows and cols, then row-major unsigned bytes.

use std::fs;
use std::path::Path;

use ndarray::Array1;
use otx_core::Histogram;

use crate::error::{BenchError, Result};

pub const IDX_IMAGE_MAGIC: u32 = 0x0000_0803;

/// Added to every pixel before normalization so all bins are positive.
pub const PIXEL_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pixels: Vec<u8>,
}

impl IdxImages {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let word = |i: usize| -> Result<u32> {
            let chunk = bytes.get(4 * i..4 * i + 4).ok_or(BenchError::TruncatedFile {
                expected: 16,
                found: bytes.len(),
            })?;
            Ok(u32::from_be_bytes(chunk.try_into().expect("4-byte slice")))
        };
        let magic = word(0)?;
        if magic != IDX_IMAGE_MAGIC {
            return Err(BenchError::BadMagic(magic));
        }
        let (count, rows, cols) = (word(1)? as usize, word(2)? as usize, word(3)? as usize);
        let expected = 16 + count * rows * cols;
        if bytes.len() < expected {
            return Err(BenchError::TruncatedFile {
                expected,
                found: bytes.len(),
            });
        }
        Ok(Self {
            count,
            rows,
            cols,
            pixels: bytes[16..expected].to_vec(),
        })
    }

    pub fn image(&self, index: usize) -> Result<&[u8]> {
        if index >= self.count {
            return Err(BenchError::IndexOutOfRange {
                index,
                count: self.count,
            });
        }
        let size = self.rows * self.cols;
        Ok(&self.pixels[index * size..(index + 1) * size])
    }

    /// Image `index` as a histogram, optionally resampled to `side × side`
    /// by nearest neighbor before the floor is applied.
    pub fn histogram(&self, index: usize, resize: Option<usize>) -> Result<Histogram> {
        let img = self.image(index)?;
        let values: Vec<f64> = match resize {
            None => img.iter().map(|&p| f64::from(p)).collect(),
            Some(side) => {
                if side == 0 {
                    return Err(BenchError::InvalidParameter("resize side must be positive".into()));
                }
                let mut out = Vec::with_capacity(side * side);
                for r in 0..side {
                    let src_r = ((r as f64 + 0.5) * self.rows as f64 / side as f64) as usize;
                    for c in 0..side {
                        let src_c = ((c as f64 + 0.5) * self.cols as f64 / side as f64) as usize;
                        out.push(f64::from(img[src_r.min(self.rows - 1) * self.cols + src_c.min(self.cols - 1)]));
                    }
                }
                out
            }
        };
        Ok(Histogram::new(Array1::from(values) + PIXEL_FLOOR)?)
    }
}

/// Loads the selected images from an IDX file.
pub fn load_idx_images(
    path: impl AsRef<Path>,
    indices: &[usize],
    resize: Option<usize>,
) -> Result<Vec<Histogram>> {
    let images = IdxImages::parse(&fs::read(path)?)?;
    indices.iter().map(|&i| images.histogram(i, resize)).collect()
}

/// Serializes images in the IDX layout; the inverse of [`IdxImages::parse`].
pub fn encode_idx(rows: usize, cols: usize, images: &[Vec<u8>]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + images.len() * rows * cols);
    for word in [IDX_IMAGE_MAGIC, images.len() as u32, rows as u32, cols as u32] {
        out.extend_from_slice(&word.to_be_bytes());
    }
    for img in images {
        out.extend_from_slice(img);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_and_normalize() {
        let bytes = encode_idx(2, 2, &[vec![0, 0, 0, 255]]);
        let h = IdxImages::parse(&bytes).unwrap().histogram(0, None).unwrap();
        let total = 255.0 + 4.0 * PIXEL_FLOOR;
        for i in 0..3 {
            assert!((h.as_slice()[i] - PIXEL_FLOOR / total).abs() < 1e-20);
        }
        assert!((h.as_slice()[3] - (255.0 + PIXEL_FLOOR) / total).abs() < 1e-15);
    }

    #[test]
    fn zero_image_is_uniform() {
        let bytes = encode_idx(3, 3, &[vec![0; 9]]);
        let h = IdxImages::parse(&bytes).unwrap().histogram(0, None).unwrap();
        assert!(h.as_slice().iter().all(|v| (v - 1.0 / 9.0).abs() < 1e-15));
    }

    #[test]
    fn format_errors() {
        let mut bytes = encode_idx(2, 2, &[vec![1, 2, 3, 4]]);
        assert!(matches!(
            IdxImages::parse(&bytes[..18]),
            Err(BenchError::TruncatedFile { expected: 20, found: 18 })
        ));
        assert!(matches!(IdxImages::parse(&bytes[..7]), Err(BenchError::TruncatedFile { .. })));
        let images = IdxImages::parse(&bytes).unwrap();
        assert!(matches!(
            images.histogram(1, None),
            Err(BenchError::IndexOutOfRange { index: 1, count: 1 })
        ));
        bytes[3] = 0x01;
        assert!(matches!(IdxImages::parse(&bytes), Err(BenchError::BadMagic(0x801))));
    }

    #[test]
    fn nearest_neighbor_resize() {
        let img: Vec<u8> = (0..16).collect();
        let images = IdxImages::parse(&encode_idx(4, 4, &[img])).unwrap();
        let h = images.histogram(0, Some(2)).unwrap();
        // Samples pixels (1,1), (1,3), (3,1), (3,3).
        let raw = [5.0, 7.0, 13.0, 15.0].map(|v: f64| v + PIXEL_FLOOR);
        let total: f64 = raw.iter().sum();
        for (got, want) in h.as_slice().iter().zip(raw) {
            assert!((got - want / total).abs() < 1e-15);
        }
    }
}
