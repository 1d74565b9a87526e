//! Label rectangles, leader-line segments, and their pixel rasterization.
//!
//! Coordinates are continuous with x to the right and y down; pixel `(i, j)`
//! covers `[i, i+1) x [j, j+1)` and its center is `(i + 0.5, j + 0.5)`.

use serde::{Deserialize, Serialize};

use super::map::GrayMap;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Index of the pixel containing this point.
    pub fn pixel(self) -> (i64, i64) {
        (self.x.floor() as i64, self.y.floor() as i64)
    }

    pub fn offset(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

/// Label extent in pixels. The default is 120 wide by 30 tall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSize {
    pub width: u32,
    pub height: u32,
}

impl Default for LabelSize {
    fn default() -> Self {
        Self { width: 120, height: 30 }
    }
}

impl LabelSize {
    pub const fn new(width: u32, height: u32) -> Self {
        Self { width, height }
    }

    pub fn area(self) -> f64 {
        f64::from(self.width) * f64::from(self.height)
    }

    pub fn half_width(self) -> f64 {
        f64::from(self.width) / 2.0
    }

    pub fn half_height(self) -> f64 {
        f64::from(self.height) / 2.0
    }
}

/// Half-open integer pixel box `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelBox {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl PixelBox {
    pub fn is_empty(&self) -> bool {
        self.x1 <= self.x0 || self.y1 <= self.y0
    }

    pub fn area(&self) -> u64 {
        if self.is_empty() {
            0
        } else {
            ((self.x1 - self.x0) * (self.y1 - self.y0)) as u64
        }
    }

    pub fn intersect(&self, other: &PixelBox) -> PixelBox {
        PixelBox {
            x0: self.x0.max(other.x0),
            y0: self.y0.max(other.y0),
            x1: self.x1.min(other.x1),
            y1: self.y1.min(other.y1),
        }
    }

    pub fn intersection_area(&self, other: &PixelBox) -> u64 {
        self.intersect(other).area()
    }

    pub fn clip(&self, width: usize, height: usize) -> PixelBox {
        self.intersect(&PixelBox {
            x0: 0,
            y0: 0,
            x1: width as i64,
            y1: height as i64,
        })
    }

    #[inline]
    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }

    pub fn is_within(&self, width: usize, height: usize) -> bool {
        self.x0 >= 0 && self.y0 >= 0 && self.x1 <= width as i64 && self.y1 <= height as i64
    }
}

/// A label body: rectangle of `size` centered on `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelRect {
    pub center: Point,
    pub size: LabelSize,
}

impl LabelRect {
    pub const fn new(center: Point, size: LabelSize) -> Self {
        Self { center, size }
    }

    /// Pixels whose centers fall in `[cx - w/2, cx + w/2) x [cy - h/2, cy + h/2)`.
    pub fn pixel_box(&self) -> PixelBox {
        let x0 = (self.center.x - self.size.half_width() - 0.5).ceil() as i64;
        let y0 = (self.center.y - self.size.half_height() - 0.5).ceil() as i64;
        PixelBox {
            x0,
            y0,
            x1: x0 + i64::from(self.size.width),
            y1: y0 + i64::from(self.size.height),
        }
    }

    pub fn is_within(&self, width: usize, height: usize) -> bool {
        self.pixel_box().is_within(width, height)
    }

    pub fn overlap_area(&self, other: &LabelRect) -> u64 {
        self.pixel_box().intersection_area(&other.pixel_box())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub from: Point,
    pub to: Point,
}

impl Segment {
    pub const fn new(from: Point, to: Point) -> Self {
        Self { from, to }
    }

    pub fn length(&self) -> f64 {
        self.from.distance(self.to)
    }
}

/// Binary mask of a label body clipped to the image.
pub fn rasterize_rect(rect: &LabelRect, width: usize, height: usize) -> Result<GrayMap> {
    if rect.size.width == 0 || rect.size.height == 0 {
        return Err(Error::DegenerateRect);
    }
    let mut mask = GrayMap::zeros(width, height);
    let b = rect.pixel_box().clip(width, height);
    for y in b.y0..b.y1 {
        for x in b.x0..b.x1 {
            mask.set(x as usize, y as usize, 1.0);
        }
    }
    Ok(mask)
}

/// Integer line trace between two pixels, inclusive of both ends.
///
/// The trace always runs along the major axis in ascending order and rounds
/// half-way minor offsets up, so the pixel set does not depend on endpoint
/// order. Identical endpoints give an empty trace.
pub fn line_trace(a: (i64, i64), b: (i64, i64)) -> Vec<(i64, i64)> {
    let mut out = Vec::with_capacity(((b.0 - a.0).abs().max((b.1 - a.1).abs()) + 1) as usize);
    for_each_trace_pixel(a, b, |x, y| out.push((x, y)));
    out
}

/// Visits the pixels of [`line_trace`] in trace order without allocating.
#[inline]
pub fn for_each_trace_pixel(a: (i64, i64), b: (i64, i64), mut f: impl FnMut(i64, i64)) {
    if a == b {
        return;
    }
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let x_major = dx.abs() >= dy.abs();
    // Work in (major, minor) coordinates.
    let (mut s, mut e) = if x_major { (a, b) } else { ((a.1, a.0), (b.1, b.0)) };
    if e.0 < s.0 {
        std::mem::swap(&mut s, &mut e);
    }
    let major = e.0 - s.0;
    let minor = (e.1 - s.1).abs();
    let step = (e.1 - s.1).signum();

    let mut err = 2 * minor - major;
    let mut m = s.1;
    for t in s.0..=e.0 {
        if x_major {
            f(t, m)
        } else {
            f(m, t)
        }
        if err >= 0 {
            m += step;
            err -= 2 * major;
        }
        err += 2 * minor;
    }
}

/// Visits in-image pixels of a segment trace that lie outside `exclude`.
#[inline]
pub fn for_each_segment_pixel(seg: &Segment, exclude: Option<&PixelBox>, width: usize, height: usize, mut f: impl FnMut(usize, usize)) {
    let (w, h) = (width as i64, height as i64);
    for_each_trace_pixel(seg.from.pixel(), seg.to.pixel(), |x, y| {
        if x >= 0 && y >= 0 && x < w && y < h && exclude.map_or(true, |b| !b.contains(x, y)) {
            f(x as usize, y as usize)
        }
    });
}

/// In-image pixels of a segment trace, minus those inside `exclude`.
pub fn segment_pixels(seg: &Segment, exclude: Option<&PixelBox>, width: usize, height: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for_each_segment_pixel(seg, exclude, width, height, |x, y| out.push((x, y)));
    out
}

/// Binary mask of a leader line with the label body removed.
pub fn rasterize_segment(seg: &Segment, exclude: Option<&LabelRect>, width: usize, height: usize) -> GrayMap {
    let mut mask = GrayMap::zeros(width, height);
    let exclude = exclude.map(LabelRect::pixel_box);
    for (x, y) in segment_pixels(seg, exclude.as_ref(), width, height) {
        mask.set(x, y, 1.0);
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rect(cx: f64, cy: f64, w: u32, h: u32) -> LabelRect {
        LabelRect::new(Point::new(cx, cy), LabelSize::new(w, h))
    }

    /// Pixel-center point-in-rect test, one pixel at a time.
    fn brute_force_popcount(r: &LabelRect, width: usize, height: usize) -> usize {
        let (hw, hh) = (f64::from(r.size.width) / 2.0, f64::from(r.size.height) / 2.0);
        let mut n = 0;
        for j in 0..height {
            for i in 0..width {
                let (px, py) = (i as f64 + 0.5, j as f64 + 0.5);
                if px >= r.center.x - hw && px < r.center.x + hw && py >= r.center.y - hh && py < r.center.y + hh {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn rect_exact_cover() {
        let m = rasterize_rect(&rect(2.0, 2.0, 2, 2), 4, 4).unwrap();
        assert_eq!(m.count_nonzero(), 4);
        assert_eq!(m.get(1, 1), 1.0);
        assert_eq!(m.get(2, 2), 1.0);
        assert_eq!(m.get(0, 0), 0.0);
    }

    #[test]
    fn rect_outside_image() {
        let m = rasterize_rect(&rect(-20.0, -20.0, 4, 4), 4, 4).unwrap();
        assert!(m.is_zero());
    }

    #[test]
    fn rect_partially_clipped() {
        let r = rect(1.0, 1.0, 3, 3);
        let m = rasterize_rect(&r, 4, 4).unwrap();
        assert_eq!(m.count_nonzero(), brute_force_popcount(&r, 4, 4));
    }

    #[test]
    fn rect_degenerate() {
        assert!(matches!(rasterize_rect(&rect(2.0, 2.0, 0, 3), 4, 4), Err(Error::DegenerateRect)));
    }

    #[test]
    fn segment_horizontal_run() {
        let s = Segment::new(Point::new(0.0, 0.0), Point::new(3.0, 0.0));
        assert_eq!(rasterize_segment(&s, None, 8, 8).count_nonzero(), 4);
    }

    #[test]
    fn segment_zero_length() {
        let s = Segment::new(Point::new(0.0, 0.0), Point::new(0.0, 0.0));
        assert!(rasterize_segment(&s, None, 8, 8).is_zero());
    }

    #[test]
    fn segment_excludes_label_body() {
        let r = rect(10.0, 2.0, 4, 4);
        let s = Segment::new(Point::new(0.5, 2.5), r.center);
        let m = rasterize_segment(&s, Some(&r), 16, 8);
        // columns 8..12 lie inside the label
        assert_eq!(m.count_nonzero(), 8);
        assert_eq!(m.get(8, 2), 0.0);
    }

    /// Floating-point DDA walk: one sample per major-axis step.
    fn dda_count(a: (i64, i64), b: (i64, i64)) -> usize {
        if a == b {
            return 0;
        }
        let steps = (b.0 - a.0).abs().max((b.1 - a.1).abs());
        let mut seen = std::collections::HashSet::new();
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            let x = a.0 as f64 + t * (b.0 - a.0) as f64;
            let y = a.1 as f64 + t * (b.1 - a.1) as f64;
            seen.insert((x.round() as i64, y.round() as i64));
        }
        seen.len()
    }

    proptest! {
        #[test]
        fn segment_count_matches_dda(ax in 0i64..16, ay in 0i64..16, bx in 0i64..16, by in 0i64..16) {
            let s = Segment::new(Point::new(ax as f64, ay as f64), Point::new(bx as f64, by as f64));
            let m = rasterize_segment(&s, None, 16, 16);
            prop_assert_eq!(m.count_nonzero(), dda_count((ax, ay), (bx, by)));
        }

        #[test]
        fn trace_is_eight_connected_and_symmetric(ax in -40i64..40, ay in -40i64..40, bx in -40i64..40, by in -40i64..40) {
            let t = line_trace((ax, ay), (bx, by));
            for w in t.windows(2) {
                prop_assert!((w[0].0 - w[1].0).abs() <= 1 && (w[0].1 - w[1].1).abs() <= 1);
                prop_assert!(w[0] != w[1]);
            }
            if (ax, ay) != (bx, by) {
                prop_assert!(t.contains(&(ax, ay)) && t.contains(&(bx, by)));
            }
            let mut fwd = t.clone();
            let mut back = line_trace((bx, by), (ax, ay));
            fwd.sort_unstable();
            back.sort_unstable();
            prop_assert_eq!(fwd, back);
        }

        #[test]
        fn rect_popcount_bound(cx in -10.0f64..40.0, cy in -10.0f64..40.0, w in 1u32..12, h in 1u32..12) {
            let r = rect(cx, cy, w, h);
            let m = rasterize_rect(&r, 24, 24).unwrap();
            let n = m.count_nonzero();
            prop_assert_eq!(n, brute_force_popcount(&r, 24, 24));
            prop_assert!(n as u64 <= u64::from(w) * u64::from(h));
            prop_assert_eq!(n as u64 == u64::from(w) * u64::from(h), r.is_within(24, 24));
        }

        #[test]
        fn mask_product_is_set_intersection(ax in 0.0f64..20.0, ay in 0.0f64..20.0, bx in 0.0f64..20.0, by in 0.0f64..20.0) {
            let a = rect(ax, ay, 7, 3);
            let b = rect(bx, by, 5, 6);
            let ma = rasterize_rect(&a, 20, 20).unwrap();
            let mb = rasterize_rect(&b, 20, 20).unwrap();
            let prod = ma.product(&mb).unwrap().sum() as u64;
            let inter = a.pixel_box().clip(20, 20).intersection_area(&b.pixel_box().clip(20, 20));
            prop_assert_eq!(prod, inter);
        }
    }
}
