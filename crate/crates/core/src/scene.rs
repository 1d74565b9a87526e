//! Scenes (image extent, points of interest, label size) and layouts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{LabelRect, LabelSize, Point, Segment};

/// Default number of labels per view.
pub const DEFAULT_LABELS_PER_SCENE: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Scene {
    pub id: String,
    pub width: usize,
    pub height: usize,
    /// Points of interest, one per label.
    pub pois: Vec<Point>,
    #[serde(default)]
    pub label_size: LabelSize,
    #[serde(default)]
    pub label_texts: Vec<String>,
}

impl Scene {
    pub fn new(id: impl Into<String>, width: usize, height: usize, pois: Vec<Point>, label_size: LabelSize) -> Result<Self> {
        let scene = Self {
            id: id.into(),
            width,
            height,
            pois,
            label_size,
            label_texts: Vec::new(),
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pois.is_empty() {
            return Err(Error::InvalidConfig(format!("scene {} has no points of interest", self.id)));
        }
        if self.label_size.width == 0 || self.label_size.height == 0 {
            return Err(Error::DegenerateRect);
        }
        if let Some((k, p)) = self.pois.iter().enumerate().find(|(_, p)| !self.contains(**p)) {
            return Err(Error::InvalidConfig(format!(
                "scene {}: point of interest {k} at ({}, {}) is outside {}x{}",
                self.id, p.x, p.y, self.width, self.height
            )));
        }
        Ok(())
    }

    pub fn label_count(&self) -> usize {
        self.pois.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// True when `p` lies in `[0, width) x [0, height)`.
    pub fn contains(&self, p: Point) -> bool {
        p.x.is_finite() && p.y.is_finite() && p.x >= 0.0 && p.y >= 0.0 && p.x < self.width as f64 && p.y < self.height as f64
    }

    pub fn label_text(&self, k: usize) -> String {
        self.label_texts.get(k).cloned().unwrap_or_else(|| format!("POI {}", k + 1))
    }

    /// Moves a label center so the whole label stays inside the image.
    pub fn clamp_center(&self, p: Point) -> Point {
        let (hw, hh) = (self.label_size.half_width(), self.label_size.half_height());
        let x_max = (self.width as f64 - hw).max(hw);
        let y_max = (self.height as f64 - hh).max(hh);
        Point::new(p.x.clamp(hw, x_max), p.y.clamp(hh, y_max))
    }

    pub fn fits_label(&self) -> bool {
        self.width >= self.label_size.width as usize && self.height >= self.label_size.height as usize
    }
}

/// Label centers, one per point of interest of the scene.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Layout {
    pub positions: Vec<Point>,
}

impl Layout {
    pub fn new(positions: Vec<Point>) -> Self {
        Self { positions }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn rect(&self, scene: &Scene, k: usize) -> LabelRect {
        LabelRect::new(self.positions[k], scene.label_size)
    }

    pub fn rects<'a>(&'a self, scene: &'a Scene) -> impl Iterator<Item = LabelRect> + 'a {
        self.positions.iter().map(move |&p| LabelRect::new(p, scene.label_size))
    }

    /// Leader line from the point of interest to the label center.
    pub fn leader(&self, scene: &Scene, k: usize) -> Segment {
        Segment::new(scene.pois[k], self.positions[k])
    }

    /// Checks the label count and that every label lies inside the image.
    pub fn check_feasible(&self, scene: &Scene) -> Result<()> {
        if self.positions.len() != scene.label_count() {
            return Err(Error::InvalidConfig(format!(
                "layout has {} labels, scene {} has {}",
                self.positions.len(),
                scene.id,
                scene.label_count()
            )));
        }
        for (k, r) in self.rects(scene).enumerate() {
            if !r.is_within(scene.width, scene.height) {
                return Err(Error::InvalidConfig(format!(
                    "label {k} of scene {} at ({}, {}) leaves the image",
                    scene.id, r.center.x, r.center.y
                )));
            }
        }
        Ok(())
    }
}
