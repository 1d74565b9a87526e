//! Dataset manifests, map validation, and the synthetic scene generator.

mod manifest;
mod synthetic;
mod validate;

pub use manifest::{load_manifest, parse_manifest, save_manifest, DatasetManifest, Participant, SceneData, SceneEntry, Split};
pub use synthetic::{generate_scene, generate_synthetic, SyntheticDataset, SyntheticScene, SyntheticSpec};
pub use validate::{validate_against_maps, ValidationReport, Violation};
