use std::fmt;

use serde::Serialize;

use super::manifest::DatasetManifest;
use crate::raster::{load_graymap, load_image, load_semantic_map, UNKNOWN_CATEGORY};
use crate::semantics::CategoryTable;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Violation {
    pub scene_id: String,
    pub field: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pixel_count: Option<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.scene_id, self.field, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn dims_mismatch(found: (usize, usize), expected: (usize, usize)) -> Option<String> {
    (found != expected).then(|| format!("size {}x{} differs from declared {}x{}", found.0, found.1, expected.0, expected.1))
}

/// Opens every referenced map and checks its dimensions and, for semantic
/// maps, that every id is in `table` (255 marks unlabeled pixels and is allowed).
pub fn validate_against_maps(manifest: &DatasetManifest, table: &CategoryTable) -> ValidationReport {
    let mut report = ValidationReport::default();
    for entry in &manifest.scenes {
        let expected = (entry.width, entry.height);
        let mut push = |field: &str, message: String, pixel_count: Option<usize>| {
            report.violations.push(Violation {
                scene_id: entry.scene_id.clone(),
                field: field.to_string(),
                message,
                pixel_count,
            })
        };

        match load_image(manifest.resolve(&entry.image_path)) {
            Ok(img) => {
                if let Some(m) = dims_mismatch((img.width() as usize, img.height() as usize), expected) {
                    push("image-path", m, None);
                }
            }
            Err(e) => push("image-path", e.to_string(), None),
        }
        let semantic_fields = [
            ("semantic-map-path", Some(entry.semantic_map_path.as_path())),
            ("predicted-semantic-map-path", entry.predicted_semantic_map_path.as_deref()),
        ];
        for (field, path) in semantic_fields {
            let Some(path) = path else { continue };
            match load_semantic_map(manifest.resolve(path)) {
                Ok(map) => {
                    if let Some(m) = dims_mismatch(map.dims(), expected) {
                        push(field, m, None);
                    }
                    for (id, &n) in map.histogram().iter().enumerate() {
                        let id = id as u8;
                        if n > 0 && id != UNKNOWN_CATEGORY && !table.contains(id) {
                            push(field, format!("unknown category id {id} on {n} pixels"), Some(n));
                        }
                    }
                }
                Err(e) => push(field, e.to_string(), None),
            }
        }
        if let Some(path) = entry.saliency_map_path.as_deref() {
            match load_graymap(manifest.resolve(path)) {
                Ok(map) => {
                    if let Some(m) = dims_mismatch(map.dims(), expected) {
                        push("saliency-map-path", m, None);
                    }
                }
                Err(e) => push("saliency-map-path", e.to_string(), None),
            }
        }
    }
    report
}
