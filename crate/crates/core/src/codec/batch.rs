use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::codec::{compress_image, psnr, ssim, BlockTransform, CompressionConfig, GrayImage};
use crate::error::{Error, Result};

pub const BATCH_CSV_HEADER: &str = "kernel,N,r,rate,psnr_db,ssim,psnr_per_add,ssim_per_add";

/// Corpus-averaged quality for one transform at one retention level.
#[derive(Clone, Debug, Serialize)]
pub struct BatchRow {
    pub kernel: String,
    pub n: usize,
    pub r: usize,
    pub rate: f64,
    pub psnr_db: f64,
    pub ssim: f64,
    pub psnr_per_add: Option<f64>,
    pub ssim_per_add: Option<f64>,
}

impl BatchRow {
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|v| format!("{v:.8}")).unwrap_or_default();
        format!(
            "{},{},{},{:.6},{:.6},{:.6},{},{}",
            self.kernel,
            self.n,
            self.r,
            self.rate,
            self.psnr_db,
            self.ssim,
            opt(self.psnr_per_add),
            opt(self.ssim_per_add)
        )
    }
}

/// Every PGM/PNM/PNG file directly inside `dir`, sorted by file name.
pub fn load_corpus(dir: impl AsRef<Path>) -> Result<Vec<(PathBuf, GrayImage)>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir.as_ref())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "pgm" | "pnm" | "png"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    paths
        .into_iter()
        .map(|p| GrayImage::read(&p).map(|img| (p, img)))
        .collect()
}

/// Mean PSNR and SSIM over the corpus for every transform and every `r`.
/// Identical reconstructions contribute `+∞` PSNR, which then dominates the
/// mean; callers sweeping to `r = N²` should expect that.
pub fn batch_run(
    corpus: &[GrayImage],
    transforms: &[BlockTransform],
    rs: &[usize],
    pad: bool,
) -> Result<Vec<BatchRow>> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let jobs: Vec<(&BlockTransform, usize)> = transforms
        .iter()
        .flat_map(|t| rs.iter().map(move |&r| (t, r)))
        .collect();
    jobs.into_par_iter()
        .map(|(t, r)| {
            let cfg = CompressionConfig::new(t.clone(), r)?.with_padding(pad);
            let mut p = 0.0;
            let mut s = 0.0;
            for img in corpus {
                let out = compress_image(img, &cfg)?;
                p += psnr(img, &out)?;
                s += ssim(img, &out)?;
            }
            let count = corpus.len() as f64;
            let (psnr_db, ssim) = (p / count, s / count);
            let adds = t.adds().map(f64::from);
            Ok(BatchRow {
                kernel: t.label().to_string(),
                n: t.size(),
                r,
                rate: cfg.rate(),
                psnr_db,
                ssim,
                psnr_per_add: adds.map(|a| psnr_db / a),
                ssim_per_add: adds.map(|a| ssim / a),
            })
        })
        .collect()
}

pub fn batch_csv(rows: &[BatchRow]) -> String {
    let mut out = String::from(BATCH_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_row());
        out.push('\n');
    }
    out
}
