//! Blockwise forward transform, zig-zag truncation and inverse.

use rayon::prelude::*;

use crate::codec::GrayImage;
use crate::error::{Error, Result};
use crate::kernel::TransformKernel;
use crate::linalg::{dct_matrix, RealMatrix};

/// The 2-D block transform used by the codec.
#[derive(Clone, Debug)]
pub enum BlockTransform {
    /// Exact orthonormal DCT-II of the given size.
    Exact { label: String, matrix: RealMatrix },
    /// Orthonormal approximation applied through its low-complexity matrix.
    Approx(TransformKernel),
}

impl BlockTransform {
    pub fn exact_dct(n: usize) -> Result<Self> {
        Ok(BlockTransform::Exact {
            label: "dct".into(),
            matrix: dct_matrix(n)?,
        })
    }

    pub fn size(&self) -> usize {
        match self {
            BlockTransform::Exact { matrix, .. } => matrix.rows(),
            BlockTransform::Approx(k) => k.size(),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            BlockTransform::Exact { label, .. } => label,
            BlockTransform::Approx(k) => k.label(),
        }
    }

    /// Additions per 1-D transform, when the transform is low-complexity.
    pub fn adds(&self) -> Option<u32> {
        match self {
            BlockTransform::Exact { .. } => None,
            BlockTransform::Approx(k) => Some(k.adds()),
        }
    }

    fn check(&self, block: &[f64]) -> Result<usize> {
        let n = self.size();
        if block.len() != n * n {
            return Err(Error::mismatch(
                format!("{n}x{n} block"),
                format!("{} samples", block.len()),
            ));
        }
        Ok(n)
    }
}

/// Reusable buffers for repeated 2-D transforms of one size.
struct Engine<'a> {
    transform: &'a BlockTransform,
    n: usize,
    /// Exact DCT entries (row-major) or the approximation's diagonal scale.
    coeffs: Vec<f64>,
    line: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a> Engine<'a> {
    fn new(transform: &'a BlockTransform) -> Self {
        let n = transform.size();
        let (coeffs, scratch) = match transform {
            BlockTransform::Exact { matrix, .. } => (
                (0..n * n).map(|k| matrix.get(k / n, k % n)).collect(),
                vec![0.0; n],
            ),
            BlockTransform::Approx(k) => (k.scale(), vec![0.0; k.scratch_len()]),
        };
        Engine {
            transform,
            n,
            coeffs,
            line: vec![0.0; n],
            scratch,
        }
    }

    fn apply_line(&mut self, transpose: bool) {
        let n = self.n;
        match self.transform {
            BlockTransform::Exact { .. } => {
                for i in 0..n {
                    self.scratch[i] = (0..n)
                        .map(|j| {
                            let c = if transpose {
                                self.coeffs[j * n + i]
                            } else {
                                self.coeffs[i * n + j]
                            };
                            c * self.line[j]
                        })
                        .sum();
                }
                self.line.copy_from_slice(&self.scratch[..n]);
            }
            BlockTransform::Approx(k) if transpose => {
                k.apply_low_transpose_in_place(&mut self.line, &mut self.scratch)
            }
            BlockTransform::Approx(k) => k.apply_low_in_place(&mut self.line, &mut self.scratch),
        }
    }

    fn separable(&mut self, block: &mut [f64], transpose: bool) {
        let n = self.n;
        for j in 0..n {
            for i in 0..n {
                self.line[i] = block[i * n + j];
            }
            self.apply_line(transpose);
            for i in 0..n {
                block[i * n + j] = self.line[i];
            }
        }
        for row in block.chunks_mut(n) {
            self.line.copy_from_slice(row);
            self.apply_line(transpose);
            row.copy_from_slice(&self.line);
        }
    }

    fn scale(&self, block: &mut [f64]) {
        if let BlockTransform::Approx(_) = self.transform {
            let n = self.n;
            for i in 0..n {
                for j in 0..n {
                    block[i * n + j] *= self.coeffs[i] * self.coeffs[j];
                }
            }
        }
    }

    fn forward(&mut self, block: &mut [f64]) {
        self.separable(block, false);
        self.scale(block);
    }

    fn inverse(&mut self, block: &mut [f64]) {
        self.scale(block);
        self.separable(block, true);
    }
}

/// `B = C̃·A·C̃ᵀ` on a row-major `N×N` block. Approximations run the
/// low-complexity matrix first and apply the diagonal scale afterwards.
pub fn forward_block(t: &BlockTransform, block: &[f64]) -> Result<Vec<f64>> {
    t.check(block)?;
    let mut b = block.to_vec();
    Engine::new(t).forward(&mut b);
    Ok(b)
}

/// `Ã = C̃ᵀ·B̃·C̃`.
pub fn inverse_block(t: &BlockTransform, coeffs: &[f64]) -> Result<Vec<f64>> {
    t.check(coeffs)?;
    let mut a = coeffs.to_vec();
    Engine::new(t).inverse(&mut a);
    Ok(a)
}

/// JPEG zig-zag scan generalized to `N×N`: anti-diagonals `d = i + j` in
/// order, odd `d` walked with the row index increasing, even `d` with it
/// decreasing.
pub fn zigzag_order(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n);
    if n == 0 {
        return out;
    }
    for d in 0..=2 * (n - 1) {
        let lo = d.saturating_sub(n - 1);
        let hi = d.min(n - 1);
        if d % 2 == 1 {
            out.extend((lo..=hi).map(|i| (i, d - i)));
        } else {
            out.extend((lo..=hi).rev().map(|i| (i, d - i)));
        }
    }
    out
}

/// Zeroes every coefficient at zig-zag position `>= r`.
pub fn truncate(coeffs: &[f64], n: usize, r: usize) -> Result<Vec<f64>> {
    if coeffs.len() != n * n {
        return Err(Error::mismatch(n * n, coeffs.len()));
    }
    if r == 0 || r > n * n {
        return Err(Error::OutOfRange(format!(
            "r = {r} must be in 1..={}",
            n * n
        )));
    }
    let mut out = vec![0.0; n * n];
    for &(i, j) in zigzag_order(n).iter().take(r) {
        out[i * n + j] = coeffs[i * n + j];
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct CompressionConfig {
    pub transform: BlockTransform,
    /// Retained coefficients per block.
    pub r: usize,
    /// Replicate edges when dimensions are not block multiples instead of
    /// failing.
    pub pad: bool,
}

impl CompressionConfig {
    pub fn new(transform: BlockTransform, r: usize) -> Result<Self> {
        let n = transform.size();
        if !matches!(n, 8 | 16 | 32) {
            return Err(Error::InvalidSize {
                size: n,
                reason: "block size must be 8, 16 or 32",
            });
        }
        if r == 0 || r > n * n {
            return Err(Error::OutOfRange(format!(
                "r = {r} must be in 1..={}",
                n * n
            )));
        }
        Ok(CompressionConfig {
            transform,
            r,
            pad: false,
        })
    }

    pub fn with_padding(mut self, pad: bool) -> Self {
        self.pad = pad;
        self
    }

    pub fn block_size(&self) -> usize {
        self.transform.size()
    }

    /// Fraction of coefficients kept, `r/N²`.
    pub fn rate(&self) -> f64 {
        self.r as f64 / (self.block_size() * self.block_size()) as f64
    }
}

/// Per-block forward transform, truncation and inverse. Samples are
/// centred on 128 during the transform and rounded (half away from zero)
/// and clamped to `[0, 255]` only at reassembly.
pub fn compress_image(img: &GrayImage, cfg: &CompressionConfig) -> Result<GrayImage> {
    let n = cfg.block_size();
    let fits = img.width().is_multiple_of(n) && img.height().is_multiple_of(n);
    if !fits && !cfg.pad {
        return Err(Error::InvalidSize {
            size: if !img.width().is_multiple_of(n) {
                img.width()
            } else {
                img.height()
            },
            reason: "image dimensions must be multiples of the block size (or enable padding)",
        });
    }
    if img.width() == 0 || img.height() == 0 {
        return Err(Error::InvalidSize {
            size: 0,
            reason: "empty image",
        });
    }
    let work = if fits {
        img.clone()
    } else {
        img.pad_to_multiple(n)
    };
    let (w, h) = (work.width(), work.height());
    let blocks_x = w / n;

    let order: Vec<usize> = zigzag_order(n)
        .iter()
        .skip(cfg.r)
        .map(|&(i, j)| i * n + j)
        .collect();
    let strips: Vec<Vec<u8>> = (0..h / n)
        .into_par_iter()
        .map(|by| {
            let mut engine = Engine::new(&cfg.transform);
            let mut block = vec![0.0; n * n];
            let mut strip = vec![0u8; n * w];
            for bx in 0..blocks_x {
                for i in 0..n {
                    for j in 0..n {
                        block[i * n + j] = work.get(bx * n + j, by * n + i) as f64 - 128.0;
                    }
                }
                engine.forward(&mut block);
                for &k in &order {
                    block[k] = 0.0;
                }
                engine.inverse(&mut block);
                for i in 0..n {
                    for j in 0..n {
                        let v = (block[i * n + j] + 128.0).round().clamp(0.0, 255.0);
                        strip[i * w + bx * n + j] = v as u8;
                    }
                }
            }
            strip
        })
        .collect();

    let out = GrayImage::new(w, h, strips.concat())?;
    Ok(if fits {
        out
    } else {
        out.crop(img.width(), img.height())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::OPTIMA;
    use crate::class::orthonormalize;

    fn j(index: usize) -> BlockTransform {
        BlockTransform::Approx(orthonormalize(&OPTIMA[index - 1].params()).unwrap())
    }

    #[test]
    fn zigzag_examples() {
        let z = zigzag_order(8);
        assert_eq!(&z[..6], &[(0, 0), (0, 1), (1, 0), (2, 0), (1, 1), (0, 2)]);
        assert_eq!(zigzag_order(1), vec![(0, 0)]);
        assert_eq!(z[63], (7, 7));
    }

    #[test]
    fn zigzag_matches_jpeg_table() {
        // Natural-order index of each zig-zag position, from the JPEG standard.
        const JPEG: [usize; 64] = [
            0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5, 12, 19, 26, 33, 40, 48, 41, 34,
            27, 20, 13, 6, 7, 14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37,
            44, 51, 58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
        ];
        let z: Vec<usize> = zigzag_order(8).iter().map(|&(i, j)| i * 8 + j).collect();
        assert_eq!(z, JPEG.to_vec());
    }

    #[test]
    fn zigzag_is_a_permutation() {
        for n in 1..=33 {
            let mut cells = zigzag_order(n);
            assert_eq!(cells.len(), n * n);
            cells.sort();
            cells.dedup();
            assert_eq!(cells.len(), n * n);
        }
    }

    #[test]
    fn truncate_examples() {
        let b: Vec<f64> = (0..64).map(|v| v as f64 + 0.25).collect();
        assert_eq!(truncate(&b, 8, 64).unwrap(), b);
        let dc = truncate(&b, 8, 1).unwrap();
        assert_eq!(dc[0], b[0]);
        assert!(dc[1..].iter().all(|&v| v == 0.0));
        let ten = truncate(&b, 8, 10).unwrap();
        let kept: Vec<usize> = (0..64).filter(|&k| ten[k] != 0.0).collect();
        let mut want: Vec<usize> = zigzag_order(8)[..10]
            .iter()
            .map(|&(i, j)| i * 8 + j)
            .collect();
        want.sort();
        assert_eq!(kept, want);
        assert!(truncate(&b, 8, 0).is_err());
        assert!(truncate(&b, 8, 65).is_err());
    }

    #[test]
    fn constant_block_under_exact_dct() {
        let t = BlockTransform::exact_dct(8).unwrap();
        let b = forward_block(&t, &[5.0; 64]).unwrap();
        assert!((b[0] - 40.0).abs() < 1e-12);
        assert!(b[1..].iter().all(|v| v.abs() < 1e-12));
        assert!(forward_block(&t, &[0.0; 64])
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
        let mut dc = vec![0.0; 64];
        dc[0] = 16.0;
        let rec = inverse_block(&t, &dc).unwrap();
        assert!(rec.iter().all(|v| (v - 2.0).abs() < 1e-12));
    }

    fn pseudo_block(n: usize, seed: usize) -> Vec<f64> {
        (0..n * n)
            .map(|k| (((k + seed) * 7919 % 509) as f64) / 2.0 - 127.0)
            .collect()
    }

    #[test]
    fn forward_matches_dense_triple_product() {
        let t = j(6);
        let BlockTransform::Approx(k) = &t else {
            unreachable!()
        };
        let c = k.approx();
        let a = pseudo_block(8, 3);
        let b = forward_block(&t, &a).unwrap();
        let am = RealMatrix::from_row_slice(8, 8, &a).unwrap();
        let dense = c.matmul(&am).unwrap().matmul(&c.transpose()).unwrap();
        for i in 0..8 {
            for jj in 0..8 {
                assert!((b[i * 8 + jj] - dense.get(i, jj)).abs() < 1e-10);
            }
        }
        assert!(inverse_block(&t, &[0.0; 64])
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn truncation_energy_is_reconstruction_error() {
        for (t, n) in [
            (j(7), 8),
            (
                BlockTransform::Approx(
                    crate::scaling::jam_scale_to(&orthonormalize(&OPTIMA[3].params()).unwrap(), 16)
                        .unwrap(),
                ),
                16,
            ),
            (BlockTransform::exact_dct(32).unwrap(), 32),
        ] {
            let a = pseudo_block(n, n);
            let b = forward_block(&t, &a).unwrap();
            for r in [1, 5, n * n / 2, n * n] {
                let kept = truncate(&b, n, r).unwrap();
                let dropped: f64 = b.iter().zip(&kept).map(|(x, y)| (x - y) * (x - y)).sum();
                let rec = inverse_block(&t, &kept).unwrap();
                let err: f64 = a.iter().zip(&rec).map(|(x, y)| (x - y) * (x - y)).sum();
                assert!(
                    (err - dropped).abs() < 1e-9 * (1.0 + dropped),
                    "{} r={r}",
                    t.label()
                );
            }
        }
    }

    #[test]
    fn lossless_setting_is_idempotent() {
        let img = GrayImage::from_fn(32, 32, |x, y| ((x * 37 + y * y * 11) % 256) as u8);
        for t in [j(1), j(5), j(7), BlockTransform::exact_dct(8).unwrap()] {
            let cfg = CompressionConfig::new(t, 64).unwrap();
            let once = compress_image(&img, &cfg).unwrap();
            assert_eq!(compress_image(&once, &cfg).unwrap(), once);
        }
    }

    #[test]
    fn size_mismatch() {
        let t = j(6);
        assert!(forward_block(&t, &[0.0; 63]).is_err());
        assert!(inverse_block(&t, &[0.0; 256]).is_err());
    }

    #[test]
    fn round_trip_every_transform() {
        let block: Vec<f64> = (0..64).map(|k| ((k * 29 % 255) as f64) - 128.0).collect();
        for t in [j(1), j(4), j(7), BlockTransform::exact_dct(8).unwrap()] {
            let rec = inverse_block(&t, &forward_block(&t, &block).unwrap()).unwrap();
            for (a, b) in rec.iter().zip(&block) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(CompressionConfig::new(j(1), 0).is_err());
        assert!(CompressionConfig::new(j(1), 65).is_err());
        let k4 = crate::kernel::TransformKernel::from_text(
            "size 4\nadds 8\nshifts 0\nentry_exp 0\nmatrix\n1 1 1 1\n1 1 -1 -1\n1 -1 -1 1\n1 -1 1 -1\n",
        )
        .unwrap();
        assert!(CompressionConfig::new(BlockTransform::Approx(k4), 4).is_err());
        assert!((CompressionConfig::new(j(1), 16).unwrap().rate() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_multiple_dimensions_unless_padded() {
        let img = GrayImage::from_fn(20, 16, |x, y| (x * 7 + y * 3) as u8);
        let cfg = CompressionConfig::new(j(6), 64).unwrap();
        assert!(compress_image(&img, &cfg).is_err());
        let out = compress_image(&img, &cfg.with_padding(true)).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn dc_only_keeps_constant_image() {
        let img = GrayImage::filled(32, 32, 77);
        for t in [j(1), j(7), BlockTransform::exact_dct(8).unwrap()] {
            let cfg = CompressionConfig::new(t, 1).unwrap();
            assert_eq!(compress_image(&img, &cfg).unwrap(), img);
        }
    }
}
