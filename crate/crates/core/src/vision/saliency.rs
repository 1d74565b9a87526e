use std::path::PathBuf;

use image::RgbImage;
use serde::{Deserialize, Serialize};

use super::filter::{convolve_separable, SymmetricKernel};
use crate::error::Result;
use crate::raster::{load_graymap_sized, GrayMap};

/// Where the saliency map comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SaliencySource {
    /// Frequency-tuned saliency computed from the image.
    BuiltinFt,
    /// A precomputed 8-bit map, e.g. from a deep saliency model.
    File { path: PathBuf },
}

const LAB_EPSILON: f64 = 1e-9;

/// sRGB (8-bit, D65) to CIE L*a*b*.
pub fn srgb_to_lab(rgb: [u8; 3]) -> [f64; 3] {
    fn linear(c: u8) -> f64 {
        let c = f64::from(c) / 255.0;
        if c <= 0.04045 {
            c / 12.92
        } else {
            ((c + 0.055) / 1.055).powf(2.4)
        }
    }
    fn f(t: f64) -> f64 {
        const DELTA: f64 = 6.0 / 29.0;
        if t > DELTA * DELTA * DELTA {
            t.cbrt()
        } else {
            t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
        }
    }
    let (r, g, b) = (linear(rgb[0]), linear(rgb[1]), linear(rgb[2]));
    let x = 0.412_456_4 * r + 0.357_576_1 * g + 0.180_437_5 * b;
    let y = 0.212_672_9 * r + 0.715_152_2 * g + 0.072_175_0 * b;
    let z = 0.019_333_9 * r + 0.119_192_0 * g + 0.950_304_1 * b;
    let (fx, fy, fz) = (f(x / 0.950_47), f(y), f(z / 1.088_83));
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

/// Frequency-tuned saliency: distance in Lab between the image mean and a
/// 5x5 binomial blur of each pixel, normalized to a maximum of 1.
pub fn saliency_ft(image: &RgbImage) -> GrayMap {
    let (w, h) = (image.width() as usize, image.height() as usize);
    let n = w * h;
    let mut planes = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for (i, px) in image.pixels().enumerate() {
        let lab = srgb_to_lab(px.0);
        for c in 0..3 {
            planes[c][i] = lab[c];
        }
    }
    let mean: Vec<f64> = planes.iter().map(|p| p.iter().sum::<f64>() / n.max(1) as f64).collect();
    let kernel = SymmetricKernel::binomial5();
    let blurred: Vec<Vec<f64>> = planes.iter().map(|p| convolve_separable(p, w, h, &kernel)).collect();

    let data = (0..n)
        .map(|i| {
            let d0 = blurred[0][i] - mean[0];
            let d1 = blurred[1][i] - mean[1];
            let d2 = blurred[2][i] - mean[2];
            let d = (d0 * d0 + d1 * d1 + d2 * d2).sqrt();
            // Blur round-off on flat regions; distinct 8-bit colors are far apart in Lab.
            if d < LAB_EPSILON {
                0.0
            } else {
                d
            }
        })
        .collect();
    GrayMap::new(w, h, data)
        .expect("distances are finite and non-negative")
        .normalized()
}

/// Produces a normalized saliency map for `image` from `source`.
///
/// File maps must match the image dimensions and are rescaled to a maximum of
/// 1; an all-zero file stays all zero.
pub fn resolve_saliency(source: &SaliencySource, image: &RgbImage) -> Result<GrayMap> {
    match source {
        SaliencySource::BuiltinFt => Ok(saliency_ft(image)),
        SaliencySource::File { path } => {
            let dims = (image.width() as usize, image.height() as usize);
            Ok(load_graymap_sized(path, dims)?.normalized())
        }
    }
}
