//! Layout energy: label terms (guidance overlap, edge overlap, label-label
//! overlap) and leader-line terms (guidance overlap, crossings, length,
//! orientation), combined linearly with [`EnergyWeights`].
//!
//! Map sums are accumulated in 64.64 fixed point, so box sums from the
//! summed-area table equal per-pixel sums regardless of order and a region
//! of zero guidance sums to exactly zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guidance::GuidanceBundle;
use crate::raster::{for_each_segment_pixel, segment_pixels, GrayMap, LabelRect, PixelBox, Point, Segment};
use crate::scene::{Layout, Scene};

const FIXED_ONE: f64 = 18_446_744_073_709_551_616.0; // 2^64

#[inline]
fn to_fixed(v: f64) -> u128 {
    (v * FIXED_ONE).round() as u128
}

#[inline]
fn from_fixed(v: u128) -> f64 {
    v as f64 / FIXED_ONE
}

/// How leader-line direction is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrientationMode {
    /// `|cos phi|` with `phi` the angle to the vertical axis: vertical lines cost most.
    AsWritten,
    /// `1 - |cos phi|`: vertical lines cost nothing.
    #[default]
    PreferVertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct EnergyWeights {
    pub label_guidance: f64,
    pub label_edge: f64,
    pub label_overlap: f64,
    pub line_guidance: f64,
    pub line_crossing: f64,
    pub line_length: f64,
    pub line_orientation: f64,
    #[serde(default)]
    pub orientation: OrientationMode,
}

impl Default for EnergyWeights {
    fn default() -> Self {
        Self::paper()
    }
}

impl EnergyWeights {
    pub const COUNT: usize = 7;
    pub const NAMES: [&'static str; 7] = [
        "label-guidance",
        "label-edge",
        "label-overlap",
        "line-guidance",
        "line-crossing",
        "line-length",
        "line-orientation",
    ];

    /// Coefficients learned on the original manual-placement training split.
    pub const fn paper() -> Self {
        Self {
            label_guidance: 0.3514,
            label_edge: 0.0675,
            label_overlap: 0.0839,
            line_guidance: 0.0371,
            line_crossing: 0.1078,
            line_length: 0.2302,
            line_orientation: 0.1221,
            orientation: OrientationMode::PreferVertical,
        }
    }

    /// Starting point for weight learning with leader length measured in pixels.
    pub const fn balanced() -> Self {
        Self::from_array([1.0, 0.1, 1.0, 0.1, 0.01, 0.001, 0.05], OrientationMode::PreferVertical)
    }

    pub const fn zero() -> Self {
        Self::from_array([0.0; 7], OrientationMode::PreferVertical)
    }

    pub const fn from_array(w: [f64; 7], orientation: OrientationMode) -> Self {
        Self {
            label_guidance: w[0],
            label_edge: w[1],
            label_overlap: w[2],
            line_guidance: w[3],
            line_crossing: w[4],
            line_length: w[5],
            line_orientation: w[6],
            orientation,
        }
    }

    pub fn to_array(&self) -> [f64; 7] {
        [
            self.label_guidance,
            self.label_edge,
            self.label_overlap,
            self.line_guidance,
            self.line_crossing,
            self.line_length,
            self.line_orientation,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        match self.to_array().iter().zip(Self::NAMES).find(|(w, _)| !w.is_finite() || **w < 0.0) {
            Some((w, name)) => Err(Error::InvalidConfig(format!("weight {name} = {w} must be finite and >= 0"))),
            None => Ok(()),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_array(self.to_array().map(|w| w * factor), self.orientation)
    }
}

/// Unweighted terms of one layout plus the weighted total.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct EnergyBreakdown {
    pub label_guidance: f64,
    pub label_edge: f64,
    pub label_overlap: f64,
    pub line_guidance: f64,
    pub line_crossing: f64,
    pub line_length: f64,
    pub line_orientation: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn terms(&self) -> [f64; 7] {
        [
            self.label_guidance,
            self.label_edge,
            self.label_overlap,
            self.line_guidance,
            self.line_crossing,
            self.line_length,
            self.line_orientation,
        ]
    }

    /// Label energy plus leader-line energy.
    pub fn weighted(&self, w: &EnergyWeights) -> f64 {
        let label = w.label_guidance * self.label_guidance + w.label_edge * self.label_edge + w.label_overlap * self.label_overlap;
        let line = w.line_guidance * self.line_guidance
            + w.line_crossing * self.line_crossing
            + w.line_length * self.line_length
            + w.line_orientation * self.line_orientation;
        label + line
    }

    fn with_total(mut self, w: &EnergyWeights) -> Self {
        self.total = self.weighted(w);
        self
    }
}

/// Inclusive prefix sums of a map in fixed point, `(w+1) x (h+1)`.
#[derive(Debug, Clone)]
struct SummedArea {
    width: usize,
    height: usize,
    table: Vec<u128>,
}

impl SummedArea {
    fn new(map: &GrayMap) -> Self {
        let (w, h) = map.dims();
        let stride = w + 1;
        let mut table = vec![0u128; stride * (h + 1)];
        for y in 0..h {
            let mut row = 0u128;
            for x in 0..w {
                row += to_fixed(map.get(x, y));
                table[(y + 1) * stride + x + 1] = table[y * stride + x + 1] + row;
            }
        }
        Self {
            width: w,
            height: h,
            table,
        }
    }

    fn box_sum(&self, b: &PixelBox) -> u128 {
        let b = b.clip(self.width, self.height);
        if b.is_empty() {
            return 0;
        }
        let stride = self.width + 1;
        let at = |x: i64, y: i64| self.table[y as usize * stride + x as usize];
        (at(b.x1, b.y1) + at(b.x0, b.y0)) - (at(b.x0, b.y1) + at(b.x1, b.y0))
    }
}

/// Guidance and edge maps prepared for repeated energy queries.
#[derive(Debug, Clone)]
pub struct EnergyMaps {
    guidance: GrayMap,
    guidance_sat: SummedArea,
    edge_sat: SummedArea,
}

/// Terms of a single label that do not depend on other labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnaryTerms {
    pub poi: Point,
    pub center: Point,
    pub rect: PixelBox,
    guidance_fixed: u128,
    edge_fixed: u128,
    line_guidance_fixed: u128,
    pub length: f64,
    pub orientation: f64,
}

impl UnaryTerms {
    fn leader(&self) -> Segment {
        Segment::new(self.poi, self.center)
    }

    /// Bounding box of the leader trace before clipping and exclusion.
    fn trace_bounds(&self) -> PixelBox {
        let (a, b) = (self.poi.pixel(), self.center.pixel());
        PixelBox {
            x0: a.0.min(b.0),
            y0: a.1.min(b.1),
            x1: a.0.max(b.0) + 1,
            y1: a.1.max(b.1) + 1,
        }
    }
}

impl EnergyMaps {
    pub fn new(bundle: &GuidanceBundle) -> Result<Self> {
        Self::from_maps(&bundle.guidance, &bundle.edges)
    }

    pub fn from_maps(guidance: &GrayMap, edges: &GrayMap) -> Result<Self> {
        if guidance.dims() != edges.dims() {
            return Err(Error::dims("edge map", guidance.dims(), edges.dims()));
        }
        Ok(Self {
            guidance: guidance.clone(),
            guidance_sat: SummedArea::new(guidance),
            edge_sat: SummedArea::new(edges),
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.guidance.dims()
    }

    pub(crate) fn check_scene(&self, scene: &Scene) -> Result<()> {
        if self.dims() != scene.dims() {
            return Err(Error::dims(format!("guidance for scene {}", scene.id), scene.dims(), self.dims()));
        }
        Ok(())
    }

    /// Unary terms of label `k` with its center at `pos`.
    pub fn unary(&self, scene: &Scene, k: usize, pos: Point, orientation: OrientationMode) -> UnaryTerms {
        let (w, h) = self.dims();
        let rect = LabelRect::new(pos, scene.label_size).pixel_box();
        let poi = scene.pois[k];
        let mut line_guidance_fixed = 0u128;
        for_each_segment_pixel(&Segment::new(poi, pos), Some(&rect), w, h, |x, y| {
            line_guidance_fixed += to_fixed(self.guidance.get(x, y));
        });
        UnaryTerms {
            poi,
            center: pos,
            rect,
            guidance_fixed: self.guidance_sat.box_sum(&rect),
            edge_fixed: self.edge_sat.box_sum(&rect),
            line_guidance_fixed,
            length: poi.distance(pos),
            orientation: orientation_term(poi, pos, orientation),
        }
    }

    /// All seven terms of a complete layout and the weighted total.
    pub fn breakdown(&self, scene: &Scene, layout: &Layout, weights: &EnergyWeights) -> Result<EnergyBreakdown> {
        self.check_scene(scene)?;
        if layout.len() != scene.label_count() {
            return Err(Error::InvalidConfig(format!(
                "layout has {} labels, scene {} has {}",
                layout.len(),
                scene.id,
                scene.label_count()
            )));
        }
        let mut state = PlacementState::new(self, scene);
        let mut acc = Accumulator::default();
        for (k, &pos) in layout.positions.iter().enumerate() {
            let u = self.unary(scene, k, pos, weights.orientation);
            acc.add_unary(&u);
            let (overlap, crossings) = state.pair_terms(&u);
            acc.overlap_px += overlap;
            acc.crossings += crossings;
            state.commit(&u);
        }
        Ok(acc.finish(scene).with_total(weights))
    }
}

/// Incremental view of a partially placed layout, for greedy placement.
pub struct PlacementState<'a> {
    maps: &'a EnergyMaps,
    scene: &'a Scene,
    boxes: Vec<PixelBox>,
    occupancy: Vec<u16>,
    /// Bounding box of every committed line pixel.
    line_bounds: Option<PixelBox>,
}

impl<'a> PlacementState<'a> {
    pub fn new(maps: &'a EnergyMaps, scene: &'a Scene) -> Self {
        let (w, h) = maps.dims();
        Self {
            maps,
            scene,
            boxes: Vec::new(),
            occupancy: vec![0; w * h],
            line_bounds: None,
        }
    }

    /// Overlap pixels with committed labels and shared pixels with committed lines.
    fn pair_terms(&self, u: &UnaryTerms) -> (u64, u64) {
        let (w, h) = self.maps.dims();
        let rect = u.rect.clip(w, h);
        let overlap = self.boxes.iter().map(|b| b.intersection_area(&rect)).sum();
        let mut crossings = 0u64;
        if let Some(bounds) = self.line_bounds {
            if !bounds.intersect(&u.trace_bounds()).is_empty() {
                for_each_segment_pixel(&u.leader(), Some(&u.rect), w, h, |x, y| {
                    crossings += u64::from(self.occupancy[y * w + x]);
                });
            }
        }
        (overlap, crossings)
    }

    /// Energy of adding a label with the given unary terms, counting only
    /// pairs with already committed labels.
    pub fn candidate(&self, u: &UnaryTerms, weights: &EnergyWeights) -> EnergyBreakdown {
        let mut acc = Accumulator::default();
        acc.add_unary(u);
        let (overlap, crossings) = self.pair_terms(u);
        acc.overlap_px = overlap;
        acc.crossings = crossings;
        acc.finish(self.scene).with_total(weights)
    }

    pub fn commit(&mut self, u: &UnaryTerms) {
        let (w, h) = self.maps.dims();
        self.boxes.push(u.rect.clip(w, h));
        let mut bounds = self.line_bounds;
        let occupancy = &mut self.occupancy;
        for_each_segment_pixel(&u.leader(), Some(&u.rect), w, h, |x, y| {
            occupancy[y * w + x] += 1;
            let (x, y) = (x as i64, y as i64);
            bounds = Some(match bounds {
                None => PixelBox {
                    x0: x,
                    y0: y,
                    x1: x + 1,
                    y1: y + 1,
                },
                Some(b) => PixelBox {
                    x0: b.x0.min(x),
                    y0: b.y0.min(y),
                    x1: b.x1.max(x + 1),
                    y1: b.y1.max(y + 1),
                },
            });
        });
        self.line_bounds = bounds;
    }

    pub fn placed(&self) -> usize {
        self.boxes.len()
    }
}

#[derive(Debug, Default)]
struct Accumulator {
    guidance_fixed: u128,
    edge_fixed: u128,
    overlap_px: u64,
    line_guidance_fixed: u128,
    crossings: u64,
    length: f64,
    orientation: f64,
}

impl Accumulator {
    fn add_unary(&mut self, u: &UnaryTerms) {
        self.guidance_fixed += u.guidance_fixed;
        self.edge_fixed += u.edge_fixed;
        self.line_guidance_fixed += u.line_guidance_fixed;
        self.length += u.length;
        self.orientation += u.orientation;
    }

    fn finish(&self, scene: &Scene) -> EnergyBreakdown {
        let area = scene.label_size.area();
        EnergyBreakdown {
            label_guidance: from_fixed(self.guidance_fixed) / area,
            label_edge: from_fixed(self.edge_fixed) / area,
            label_overlap: self.overlap_px as f64 / area,
            line_guidance: from_fixed(self.line_guidance_fixed) / area,
            line_crossing: self.crossings as f64,
            line_length: self.length,
            line_orientation: self.orientation,
            total: 0.0,
        }
    }
}

fn orientation_term(poi: Point, pos: Point, mode: OrientationMode) -> f64 {
    let (dx, dy) = (pos.x - poi.x, pos.y - poi.y);
    let len = dx.hypot(dy);
    if len == 0.0 {
        return 0.0;
    }
    let cos = dy.abs() / len;
    match mode {
        OrientationMode::AsWritten => cos,
        OrientationMode::PreferVertical => 1.0 - cos,
    }
}

/// Complete energy of `layout` against `bundle`.
pub fn total_energy(scene: &Scene, layout: &Layout, bundle: &GuidanceBundle, weights: &EnergyWeights) -> Result<EnergyBreakdown> {
    EnergyMaps::new(bundle)?.breakdown(scene, layout, weights)
}

fn single_map_breakdown(scene: &Scene, layout: &Layout, guidance: &GrayMap, edges: &GrayMap) -> Result<EnergyBreakdown> {
    EnergyMaps::from_maps(guidance, edges)?.breakdown(scene, layout, &EnergyWeights::zero())
}

/// Guidance mass under the labels, normalized by label area.
pub fn e_label_guidance(scene: &Scene, layout: &Layout, guidance: &GrayMap) -> Result<f64> {
    let zeros = GrayMap::zeros(guidance.width(), guidance.height());
    Ok(single_map_breakdown(scene, layout, guidance, &zeros)?.label_guidance)
}

/// Edge pixels under the labels, normalized by label area.
pub fn e_label_edge(scene: &Scene, layout: &Layout, edges: &GrayMap) -> Result<f64> {
    let zeros = GrayMap::zeros(edges.width(), edges.height());
    Ok(single_map_breakdown(scene, layout, &zeros, edges)?.label_edge)
}

/// Pairwise label overlap over unordered pairs, normalized by label area.
pub fn e_label_intersection(scene: &Scene, layout: &Layout) -> f64 {
    let (w, h) = scene.dims();
    let boxes: Vec<PixelBox> = layout.rects(scene).map(|r| r.pixel_box().clip(w, h)).collect();
    let mut px = 0u64;
    for i in 0..boxes.len() {
        for j in 0..i {
            px += boxes[i].intersection_area(&boxes[j]);
        }
    }
    px as f64 / scene.label_size.area()
}

/// Guidance mass under the leader lines, normalized by label area.
pub fn e_line_guidance(scene: &Scene, layout: &Layout, guidance: &GrayMap) -> Result<f64> {
    let zeros = GrayMap::zeros(guidance.width(), guidance.height());
    Ok(single_map_breakdown(scene, layout, guidance, &zeros)?.line_guidance)
}

/// Pixels shared by leader lines, over unordered pairs.
pub fn e_line_intersection(scene: &Scene, layout: &Layout) -> f64 {
    let (w, h) = scene.dims();
    let mut occupancy = vec![0u16; w * h];
    let mut shared = 0u64;
    for k in 0..layout.len() {
        let rect = layout.rect(scene, k).pixel_box();
        for (x, y) in segment_pixels(&layout.leader(scene, k), Some(&rect), w, h) {
            shared += u64::from(occupancy[y * w + x]);
            occupancy[y * w + x] += 1;
        }
    }
    shared as f64
}

/// Summed Euclidean leader length.
pub fn e_line_length(scene: &Scene, layout: &Layout) -> f64 {
    layout.positions.iter().zip(&scene.pois).map(|(p, m)| m.distance(*p)).sum()
}

pub fn e_line_orientation(scene: &Scene, layout: &Layout, mode: OrientationMode) -> f64 {
    layout
        .positions
        .iter()
        .zip(&scene.pois)
        .map(|(p, m)| orientation_term(*m, *p, mode))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::LabelSize;

    fn scene(w: usize, h: usize, pois: Vec<Point>, size: LabelSize) -> Scene {
        Scene::new("e", w, h, pois, size).unwrap()
    }

    #[test]
    fn full_guidance_under_one_label() {
        let s = scene(20, 20, vec![Point::new(10.0, 10.0)], LabelSize::new(6, 4));
        let l = Layout::new(vec![Point::new(10.0, 10.0)]);
        assert_eq!(e_label_guidance(&s, &l, &GrayMap::filled(20, 20, 1.0)).unwrap(), 1.0);
        assert_eq!(e_label_guidance(&s, &l, &GrayMap::zeros(20, 20)).unwrap(), 0.0);
    }

    #[test]
    fn edge_run_under_label() {
        let s = scene(20, 20, vec![Point::new(10.0, 10.0)], LabelSize::new(6, 4));
        let l = Layout::new(vec![Point::new(10.0, 10.0)]);
        let e = GrayMap::from_fn(20, 20, |x, y| if y == 9 && (5..15).contains(&x) { 1.0 } else { 0.0 }).unwrap();
        // label spans x 7..13, so 6 of the 10 edge pixels are covered
        assert_eq!(e_label_edge(&s, &l, &e).unwrap(), 6.0 / 24.0);
    }

    #[test]
    fn coincident_and_disjoint_labels() {
        let size = LabelSize::new(6, 4);
        let s = scene(40, 20, vec![Point::new(10.0, 10.0), Point::new(30.0, 10.0)], size);
        assert_eq!(e_label_intersection(&s, &Layout::new(vec![Point::new(10.0, 10.0); 2])), 1.0);
        assert_eq!(e_label_intersection(&s, &Layout::new(s.pois.clone())), 0.0);
    }

    #[test]
    fn line_length_and_orientation() {
        let s = scene(40, 40, vec![Point::new(10.0, 10.0)], LabelSize::new(2, 2));
        assert_eq!(e_line_length(&s, &Layout::new(vec![Point::new(13.0, 14.0)])), 5.0);
        assert_eq!(e_line_length(&s, &Layout::new(vec![Point::new(10.0, 10.0)])), 0.0);

        let vertical = Layout::new(vec![Point::new(10.0, 30.0)]);
        let horizontal = Layout::new(vec![Point::new(30.0, 10.0)]);
        assert_eq!(e_line_orientation(&s, &vertical, OrientationMode::AsWritten), 1.0);
        assert_eq!(e_line_orientation(&s, &horizontal, OrientationMode::AsWritten), 0.0);
        assert_eq!(e_line_orientation(&s, &vertical, OrientationMode::PreferVertical), 0.0);
        assert_eq!(e_line_orientation(&s, &horizontal, OrientationMode::PreferVertical), 1.0);
        let zero = Layout::new(vec![Point::new(10.0, 10.0)]);
        assert_eq!(e_line_orientation(&s, &zero, OrientationMode::AsWritten), 0.0);
        assert_eq!(e_line_orientation(&s, &zero, OrientationMode::PreferVertical), 0.0);
    }

    #[test]
    fn crossing_lines_share_one_pixel() {
        let size = LabelSize::new(1, 1);
        let s = scene(21, 21, vec![Point::new(0.5, 10.5), Point::new(10.5, 0.5)], size);
        let l = Layout::new(vec![Point::new(20.5, 10.5), Point::new(10.5, 20.5)]);
        assert_eq!(e_line_intersection(&s, &l), 1.0);
        let parallel = scene(21, 21, vec![Point::new(0.5, 2.5), Point::new(0.5, 8.5)], size);
        let pl = Layout::new(vec![Point::new(20.5, 2.5), Point::new(20.5, 8.5)]);
        assert_eq!(e_line_intersection(&parallel, &pl), 0.0);
    }

    #[test]
    fn weights_are_linear() {
        let s = scene(30, 30, vec![Point::new(5.0, 5.0), Point::new(20.0, 20.0)], LabelSize::new(6, 4));
        let g = GrayMap::from_fn(30, 30, |x, y| ((x * 7 + y * 3) % 11) as f64 / 10.0).unwrap();
        let e = GrayMap::from_fn(30, 30, |x, _| if x % 5 == 0 { 1.0 } else { 0.0 }).unwrap();
        let b = GuidanceBundle::new(g, e).unwrap();
        let l = Layout::new(vec![Point::new(12.0, 9.0), Point::new(14.0, 11.0)]);
        let w = EnergyWeights::paper();
        let one = total_energy(&s, &l, &b, &w).unwrap();
        let two = total_energy(&s, &l, &b, &w.scaled(2.0)).unwrap();
        assert!((two.total - 2.0 * one.total).abs() < 1e-12);
        assert_eq!(total_energy(&s, &l, &b, &EnergyWeights::zero()).unwrap().total, 0.0);
        assert!((one.total - one.weighted(&w)).abs() == 0.0);
    }

    #[test]
    fn weights_validation() {
        assert!(EnergyWeights::paper().validate().is_ok());
        let mut w = EnergyWeights::paper();
        w.line_length = -1.0;
        assert!(w.validate().is_err());
    }
}
