//! Separable convolution with edge-replicate padding.
//!
//! Kernels are symmetric; the taps at `-i` and `+i` are summed before being
//! weighted so a horizontally mirrored input yields an exactly mirrored output.

/// Odd-length symmetric kernel stored as `[center, tap1, tap2, ...]`.
#[derive(Debug, Clone)]
pub(crate) struct SymmetricKernel {
    half: Vec<f64>,
}

impl SymmetricKernel {
    pub(crate) fn binomial5() -> Self {
        Self {
            half: vec![6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0],
        }
    }

    pub(crate) fn gaussian(sigma: f64) -> Self {
        let radius = (3.0 * sigma).ceil().max(1.0) as usize;
        let raw: Vec<f64> = (0..=radius).map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp()).collect();
        let total = raw[0] + 2.0 * raw[1..].iter().sum::<f64>();
        Self {
            half: raw.into_iter().map(|v| v / total).collect(),
        }
    }

    pub(crate) fn radius(&self) -> usize {
        self.half.len() - 1
    }

    #[cfg(test)]
    pub(crate) fn full(&self) -> Vec<f64> {
        let r = self.radius();
        (0..=2 * r).map(|i| self.half[(i as isize - r as isize).unsigned_abs()]).collect()
    }
}

#[inline]
fn clamp_index(i: isize, n: usize) -> usize {
    i.clamp(0, n as isize - 1) as usize
}

/// Convolves a `width x height` plane along rows then columns.
pub(crate) fn convolve_separable(plane: &[f64], width: usize, height: usize, kernel: &SymmetricKernel) -> Vec<f64> {
    let r = kernel.radius() as isize;
    let mut tmp = vec![0.0; plane.len()];
    for y in 0..height {
        let row = &plane[y * width..(y + 1) * width];
        for x in 0..width {
            let xi = x as isize;
            let mut acc = kernel.half[0] * row[x];
            for i in 1..=r {
                let pair = row[clamp_index(xi - i, width)] + row[clamp_index(xi + i, width)];
                acc += kernel.half[i as usize] * pair;
            }
            tmp[y * width + x] = acc;
        }
    }
    let mut out = vec![0.0; plane.len()];
    for y in 0..height {
        let yi = y as isize;
        for x in 0..width {
            let mut acc = kernel.half[0] * tmp[y * width + x];
            for i in 1..=r {
                let pair = tmp[clamp_index(yi - i, height) * width + x] + tmp[clamp_index(yi + i, height) * width + x];
                acc += kernel.half[i as usize] * pair;
            }
            out[y * width + x] = acc;
        }
    }
    out
}

/// Value at `(x + dx, y + dy)` with edge replication.
#[inline]
pub(crate) fn at(plane: &[f64], width: usize, height: usize, x: usize, y: usize, dx: isize, dy: isize) -> f64 {
    let xx = clamp_index(x as isize + dx, width);
    let yy = clamp_index(y as isize + dy, height);
    plane[yy * width + xx]
}
