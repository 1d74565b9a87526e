//! Semantic-aware label placement for street-view imagery.
//!
//! The pipeline fuses a saliency map, a semantic segmentation and a learned
//! per-category importance prior into a guidance map, then places labels
//! with leader lines by greedy energy minimization. Baseline placers, the
//! prior and weight learning steps, and layout metrics are included.

pub mod dataset;
pub mod energy;
pub mod error;
pub mod evaluation;
pub mod guidance;
pub mod layout;
pub mod pipeline;
pub mod raster;
pub mod scene;
pub mod semantics;
pub mod vision;

pub use error::{Error, Result};
