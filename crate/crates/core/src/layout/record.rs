use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Method, SolverConfig};
use crate::energy::EnergyWeights;
use crate::error::{Error, Result};
use crate::guidance::AblationMode;
use crate::raster::Point;
use crate::scene::Layout;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionEntry {
    pub k: usize,
    pub x: f64,
    pub y: f64,
}

/// A solved layout as written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct LayoutRecord {
    pub scene_id: String,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<AblationMode>,
    pub positions: Vec<PositionEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<EnergyWeights>,
    pub config: SolverConfig,
}

impl LayoutRecord {
    pub fn new(scene_id: impl Into<String>, layout: &Layout, config: &SolverConfig) -> Self {
        Self {
            scene_id: scene_id.into(),
            method: config.method,
            mode: None,
            positions: layout
                .positions
                .iter()
                .enumerate()
                .map(|(k, p)| PositionEntry { k, x: p.x, y: p.y })
                .collect(),
            weights: None,
            config: *config,
        }
    }

    pub fn with_mode(mut self, mode: AblationMode) -> Self {
        self.mode = Some(mode);
        self
    }

    pub fn with_weights(mut self, weights: EnergyWeights) -> Self {
        self.weights = Some(weights);
        self
    }

    /// Positions ordered by `k`; every index from 0 must appear once.
    pub fn layout(&self) -> Result<Layout> {
        let mut positions = vec![None; self.positions.len()];
        for e in &self.positions {
            match positions.get_mut(e.k) {
                Some(slot @ None) => *slot = Some(Point::new(e.x, e.y)),
                _ => {
                    return Err(Error::manifest(
                        format!("positions[k={}]", e.k),
                        format!("layout for scene {} has a missing or duplicate label index", self.scene_id),
                    ))
                }
            }
        }
        Ok(Layout::new(positions.into_iter().map(|p| p.expect("all slots filled")).collect()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout records always serialize")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}
