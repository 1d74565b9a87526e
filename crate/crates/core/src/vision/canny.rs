use image::RgbImage;
use serde::{Deserialize, Serialize};

use super::filter::{at, convolve_separable, SymmetricKernel};
use crate::error::{Error, Result};
use crate::raster::GrayMap;

/// Canny parameters. Thresholds are fractions of the maximum gradient magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeParams {
    pub sigma: f64,
    pub low: f64,
    pub high: f64,
}

impl Default for EdgeParams {
    fn default() -> Self {
        Self {
            sigma: 1.4,
            low: 0.1,
            high: 0.3,
        }
    }
}

impl EdgeParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.sigma > 0.0 && self.low > 0.0 && self.high < 1.0 && self.low < self.high;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "edge parameters need sigma > 0 and 0 < low < high < 1, got {self:?}"
            )))
        }
    }
}

/// Rec. 601 luma in [0, 1].
pub fn grayscale(image: &RgbImage) -> Vec<f64> {
    image
        .pixels()
        .map(|p| (0.299 * f64::from(p[0]) + 0.587 * f64::from(p[1]) + 0.114 * f64::from(p[2])) / 255.0)
        .collect()
}

/// Binary Canny edge map (values 0 or 1).
pub fn canny(image: &RgbImage, params: &EdgeParams) -> Result<GrayMap> {
    params.validate()?;
    let (w, h) = (image.width() as usize, image.height() as usize);
    if w == 0 || h == 0 {
        return Ok(GrayMap::zeros(w, h));
    }
    let smooth = convolve_separable(&grayscale(image), w, h, &SymmetricKernel::gaussian(params.sigma));

    // Sobel with edge replication.
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    let mut mag = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let p = |dx, dy| at(&smooth, w, h, x, y, dx, dy);
            let sx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            let sy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
            let i = y * w + x;
            gx[i] = sx;
            gy[i] = sy;
            mag[i] = sx.hypot(sy);
        }
    }
    let max = mag.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(GrayMap::zeros(w, h));
    }

    let thin = non_maximum_suppression(&mag, &gx, &gy, w, h);
    let edges = hysteresis(&thin, w, h, params.low * max, params.high * max);
    Ok(GrayMap::new(w, h, edges.into_iter().map(|e| if e { 1.0 } else { 0.0 }).collect()).expect("binary values"))
}

/// Keeps pixels that are maximal along the quantized gradient direction.
///
/// Ties are resolved toward the pixel on the positive side, so a symmetric
/// ramp thins to a single pixel instead of two.
fn non_maximum_suppression(mag: &[f64], gx: &[f64], gy: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let m = mag[i];
            if m == 0.0 {
                continue;
            }
            let mut angle = gy[i].atan2(gx[i]).to_degrees();
            if angle < 0.0 {
                angle += 180.0;
            }
            let (dx, dy) = if !(22.5..157.5).contains(&angle) {
                (1, 0)
            } else if angle < 67.5 {
                (1, 1)
            } else if angle < 112.5 {
                (0, 1)
            } else {
                (-1, 1)
            };
            let before = at(mag, w, h, x, y, -dx, -dy);
            let after = at(mag, w, h, x, y, dx, dy);
            if m >= before && m > after {
                out[i] = m;
            }
        }
    }
    out
}

fn hysteresis(thin: &[f64], w: usize, h: usize, low: f64, high: f64) -> Vec<bool> {
    let mut edge = vec![false; w * h];
    let mut stack: Vec<usize> = Vec::new();
    for (i, &m) in thin.iter().enumerate() {
        if m >= high && m > 0.0 {
            edge[i] = true;
            stack.push(i);
        }
    }
    while let Some(i) = stack.pop() {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !edge[j] && thin[j] >= low && thin[j] > 0.0 {
                    edge[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    edge
}
