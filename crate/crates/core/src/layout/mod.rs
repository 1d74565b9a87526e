//! Label placement: the greedy energy solver, three comparison baselines,
//! overlay rendering, and the layout JSON record.

mod baselines;
mod greedy;
mod record;
mod render;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use baselines::{planar_candidates, solve_height_separation, solve_naive, solve_planar_separation};
pub use greedy::{processing_order, solve_greedy, CandidateGrid, GreedyResult, GreedySolver};
pub use record::{LayoutRecord, PositionEntry};
pub use render::render_overlay;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Proposed,
    Naive,
    HeightSep,
    PlanarSep,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Naive, Method::HeightSep, Method::PlanarSep, Method::Proposed];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::Naive => "naive",
            Method::HeightSep => "height-sep",
            Method::PlanarSep => "planar-sep",
        }
    }

    /// Whether the method reads the guidance bundle.
    pub fn uses_guidance(&self) -> bool {
        matches!(self, Method::Proposed)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method `{s}` (expected naive, height-sep, planar-sep or proposed)")))
    }
}

/// Order in which the greedy solver commits labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelOrder {
    /// POI x ascending, then distance to the bottom-center of the image ascending.
    #[default]
    LeftToRightNearFirst,
    /// Scene order.
    Index,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SolverConfig {
    pub grid_stride: u32,
    pub method: Method,
    pub planar_radius: f64,
    pub order: LabelOrder,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid_stride: 8,
            method: Method::Proposed,
            planar_radius: 60.0,
            order: LabelOrder::default(),
        }
    }
}

impl SolverConfig {
    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_stride == 0 {
            return Err(Error::InvalidConfig("grid stride must be at least 1".into()));
        }
        if !self.planar_radius.is_finite() || self.planar_radius < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "planar radius {} must be finite and >= 0",
                self.planar_radius
            )));
        }
        Ok(())
    }
}
