//! Full-reference quality scores.

use crate::codec::GrayImage;
use crate::error::{Error, Result};

fn same_shape(a: &GrayImage, b: &GrayImage) -> Result<()> {
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(Error::mismatch(
            format!("{}x{}", a.width(), a.height()),
            format!("{}x{}", b.width(), b.height()),
        ));
    }
    Ok(())
}

/// Peak signal-to-noise ratio in dB for 8-bit samples; `+∞` for identical
/// images.
pub fn psnr(reference: &GrayImage, test: &GrayImage) -> Result<f64> {
    same_shape(reference, test)?;
    let sse: u64 = reference
        .samples()
        .iter()
        .zip(test.samples())
        .map(|(&a, &b)| {
            let d = a as i64 - b as i64;
            (d * d) as u64
        })
        .sum();
    if sse == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = sse as f64 / reference.samples().len() as f64;
    Ok(10.0 * (255.0 * 255.0 / mse).log10())
}

const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
const C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

fn gaussian_window() -> [f64; WINDOW] {
    let c = (WINDOW / 2) as f64;
    let mut w = [0.0; WINDOW];
    for (i, v) in w.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = (-d * d / (2.0 * SIGMA * SIGMA)).exp();
    }
    let s: f64 = w.iter().sum();
    w.map(|v| v / s)
}

/// Separable Gaussian filter over the positions where the window fits.
fn filter_valid(src: &[f64], w: usize, h: usize, win: &[f64; WINDOW]) -> Vec<f64> {
    let ow = w - WINDOW + 1;
    let oh = h - WINDOW + 1;
    let mut horiz = vec![0.0; ow * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..ow {
            horiz[y * ow + x] = win
                .iter()
                .zip(&row[x..x + WINDOW])
                .map(|(a, b)| a * b)
                .sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = (0..WINDOW).map(|k| win[k] * horiz[(y + k) * ow + x]).sum();
        }
    }
    out
}

/// Mean structural similarity with an 11×11 Gaussian window (σ = 1.5),
/// `K₁ = 0.01`, `K₂ = 0.03`, over windows lying fully inside the image.
pub fn ssim(reference: &GrayImage, test: &GrayImage) -> Result<f64> {
    same_shape(reference, test)?;
    let (w, h) = (reference.width(), reference.height());
    if w < WINDOW || h < WINDOW {
        return Err(Error::InvalidSize {
            size: w.min(h),
            reason: "SSIM needs at least 11x11 pixels",
        });
    }
    let x: Vec<f64> = reference.samples().iter().map(|&v| v as f64).collect();
    let y: Vec<f64> = test.samples().iter().map(|&v| v as f64).collect();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a * b).collect();

    let win = gaussian_window();
    let mx = filter_valid(&x, w, h, &win);
    let my = filter_valid(&y, w, h, &win);
    let sxx = filter_valid(&xx, w, h, &win);
    let syy = filter_valid(&yy, w, h, &win);
    let sxy = filter_valid(&xy, w, h, &win);

    let total: f64 = (0..mx.len())
        .map(|k| {
            let (a, b) = (mx[k], my[k]);
            let va = sxx[k] - a * a;
            let vb = syy[k] - b * b;
            let cov = sxy[k] - a * b;
            ((2.0 * a * b + C1) * (2.0 * cov + C2)) / ((a * a + b * b + C1) * (va + vb + C2))
        })
        .sum();
    Ok(total / mx.len() as f64)
}
