use crate::error::{Error, Result};

/// Dense row-major scalar field: saliency, edges, guidance, or a binary mask.
///
/// Values are finite and non-negative. A *normalized* map additionally has a
/// maximum of exactly 1, unless it is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayMap {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidMap(format!(
                "data length {} does not match {width}x{height}",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidMap(format!("value {v} is not finite and non-negative")));
        }
        Ok(Self { width, height, data })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(value.is_finite() && value >= 0.0, "fill value must be finite and non-negative");
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    /// Builds a map by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Panics on negative or non-finite values.
    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        assert!(value.is_finite() && value >= 0.0);
        self.data[y * self.width + x] = value;
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// Number of strictly positive pixels.
    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|&&v| v > 0.0).count()
    }

    /// Rescales so the maximum is 1. Identically zero maps are returned unchanged.
    pub fn normalized(&self) -> GrayMap {
        let max = self.max();
        if max == 0.0 {
            return self.clone();
        }
        GrayMap {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| v / max).collect(),
        }
    }

    /// Pointwise product. Overlap of two binary masks is `a.product(b).sum()`.
    pub fn product(&self, other: &GrayMap) -> Result<GrayMap> {
        if self.dims() != other.dims() {
            return Err(Error::dims("map product", self.dims(), other.dims()));
        }
        Ok(GrayMap {
            width: self.width,
            height: self.height,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect(),
        })
    }

    pub fn map_values(&self, mut f: impl FnMut(f64) -> f64) -> Result<GrayMap> {
        GrayMap::new(self.width, self.height, self.data.iter().map(|&v| f(v)).collect())
    }

    /// Quantizes to 8 bits with `round(clamp(v, 0, 1) * 255)`.
    pub fn to_u8(&self) -> Vec<u8> {
        self.data.iter().map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8).collect()
    }

    pub fn from_u8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        Self::new(width, height, bytes.iter().map(|&b| f64::from(b) / 255.0).collect())
    }
}

/// Category id reserved for pixels outside every known category.
pub const UNKNOWN_CATEGORY: u8 = 255;

/// Dense per-pixel category ids.
///
/// The category table is kept separately; see
/// [`CategoryTable::check_map`](crate::semantics::CategoryTable::check_map).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticMap {
    width: usize,
    height: usize,
    ids: Vec<u8>,
}

impl SemanticMap {
    pub fn new(width: usize, height: usize, ids: Vec<u8>) -> Result<Self> {
        if ids.len() != width * height {
            return Err(Error::InvalidMap(format!(
                "semantic map has {} ids for {width}x{height}",
                ids.len()
            )));
        }
        Ok(Self { width, height, ids })
    }

    pub fn filled(width: usize, height: usize, id: u8) -> Self {
        Self {
            width,
            height,
            ids: vec![id; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut ids = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                ids.push(f(x, y));
            }
        }
        Self { width, height, ids }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn ids(&self) -> &[u8] {
        &self.ids
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.ids[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, id: u8) {
        self.ids[y * self.width + x] = id;
    }

    /// Per-id pixel counts, indexed by id.
    pub fn histogram(&self) -> [usize; 256] {
        let mut hist = [0usize; 256];
        for &id in &self.ids {
            hist[id as usize] += 1;
        }
        hist
    }

    /// Rewrites every id through `table` (index = old id).
    pub fn remapped(&self, table: &[u8; 256]) -> SemanticMap {
        SemanticMap {
            width: self.width,
            height: self.height,
            ids: self.ids.iter().map(|&id| table[id as usize]).collect(),
        }
    }
}
