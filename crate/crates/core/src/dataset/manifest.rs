use std::collections::HashSet;
use std::path::{Path, PathBuf};

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{load_graymap_sized, load_image_sized, load_semantic_map_sized, GrayMap, LabelSize, Point, SemanticMap};
use crate::scene::{Layout, Scene};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Participant {
    pub participant_id: String,
    /// Label centers, one per POI.
    pub positions: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SceneEntry {
    pub scene_id: String,
    pub image_path: PathBuf,
    pub semantic_map_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saliency_map_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_semantic_map_path: Option<PathBuf>,
    pub width: usize,
    pub height: usize,
    pub pois: Vec<Point>,
    #[serde(default)]
    pub label_size: LabelSize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub label_texts: Vec<String>,
    #[serde(default)]
    pub participants: Vec<Participant>,
}

impl SceneEntry {
    pub fn scene(&self) -> Scene {
        Scene {
            id: self.scene_id.clone(),
            width: self.width,
            height: self.height,
            pois: self.pois.clone(),
            label_size: self.label_size,
            label_texts: self.label_texts.clone(),
        }
    }

    pub fn participant_layouts(&self) -> Vec<Layout> {
        self.participants.iter().map(|p| Layout::new(p.positions.clone())).collect()
    }

    fn validate(&self, at: &str) -> Result<()> {
        let field = |f: &str| format!("{at}.{f}");
        if self.scene_id.trim().is_empty() {
            return Err(Error::manifest(field("scene-id"), "must not be empty"));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::manifest(field("width"), "image dimensions must be positive"));
        }
        if self.label_size.width == 0 || self.label_size.height == 0 {
            return Err(Error::manifest(field("label-size"), "label dimensions must be positive"));
        }
        if self.pois.is_empty() {
            return Err(Error::manifest(field("pois"), "at least one point of interest is required"));
        }
        let scene = self.scene();
        let in_bounds = |p: &Point| scene.contains(*p);
        if let Some(k) = self.pois.iter().position(|p| !in_bounds(p)) {
            return Err(Error::manifest(
                field(&format!("pois[{k}]")),
                format!("outside the {}x{} image", self.width, self.height),
            ));
        }
        if !self.label_texts.is_empty() && self.label_texts.len() != self.pois.len() {
            return Err(Error::manifest(
                field("label-texts"),
                format!("{} texts for {} points of interest", self.label_texts.len(), self.pois.len()),
            ));
        }
        let mut ids = HashSet::new();
        for (u, p) in self.participants.iter().enumerate() {
            let pf = format!("participants[{u}]");
            if !ids.insert(p.participant_id.as_str()) {
                return Err(Error::manifest(
                    field(&format!("{pf}.participant-id")),
                    format!("duplicate id `{}`", p.participant_id),
                ));
            }
            if p.positions.len() != self.pois.len() {
                return Err(Error::manifest(
                    field(&format!("{pf}.positions")),
                    format!("{} positions for {} points of interest", p.positions.len(), self.pois.len()),
                ));
            }
            if let Some(k) = p.positions.iter().position(|q| !in_bounds(q)) {
                return Err(Error::manifest(
                    field(&format!("{pf}.positions[{k}]")),
                    format!("outside the {}x{} image", self.width, self.height),
                ));
            }
        }
        Ok(())
    }
}

/// A dataset split: scenes, map file references, and manual placements.
///
/// Relative paths resolve against `base_dir`, the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DatasetManifest {
    pub split: Split,
    pub scenes: Vec<SceneEntry>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl DatasetManifest {
    pub fn validate(&self) -> Result<()> {
        let mut ids = HashSet::new();
        for (i, s) in self.scenes.iter().enumerate() {
            let at = format!("scenes[{i}]");
            s.validate(&at)?;
            if !ids.insert(s.scene_id.as_str()) {
                return Err(Error::manifest(format!("{at}.scene-id"), format!("duplicate id `{}`", s.scene_id)));
            }
        }
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn scene(&self, id: &str) -> Option<&SceneEntry> {
        self.scenes.iter().find(|s| s.scene_id == id)
    }

    pub fn load_scene(&self, entry: &SceneEntry) -> Result<SceneData> {
        let dims = (entry.width, entry.height);
        let opt_gray = |p: &Option<PathBuf>| p.as_ref().map(|p| load_graymap_sized(self.resolve(p), dims)).transpose();
        let opt_sem = |p: &Option<PathBuf>| p.as_ref().map(|p| load_semantic_map_sized(self.resolve(p), dims)).transpose();
        Ok(SceneData {
            scene: entry.scene(),
            image: load_image_sized(self.resolve(&entry.image_path), dims)?,
            semantic: load_semantic_map_sized(self.resolve(&entry.semantic_map_path), dims)?,
            saliency: opt_gray(&entry.saliency_map_path)?,
            predicted_semantic: opt_sem(&entry.predicted_semantic_map_path)?,
            participants: entry.participant_layouts(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifests always serialize")
    }
}

/// Everything needed to process one scene, loaded into memory.
#[derive(Debug, Clone)]
pub struct SceneData {
    pub scene: Scene,
    pub image: RgbImage,
    pub semantic: SemanticMap,
    pub saliency: Option<GrayMap>,
    pub predicted_semantic: Option<SemanticMap>,
    pub participants: Vec<Layout>,
}

pub fn parse_manifest(text: &str, base_dir: impl Into<PathBuf>, origin: &Path) -> Result<DatasetManifest> {
    let mut m: DatasetManifest = serde_json::from_str(text).map_err(|source| Error::Json {
        path: origin.to_path_buf(),
        source,
    })?;
    m.base_dir = base_dir.into();
    m.validate()?;
    Ok(m)
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_manifest(&text, base, path)
}

pub fn save_manifest(manifest: &DatasetManifest, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, manifest.to_json() + "\n").map_err(|e| Error::io(path, e))
}
