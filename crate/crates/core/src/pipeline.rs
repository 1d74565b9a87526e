//! Glue between datasets and the placement/evaluation steps.

use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetManifest, SceneData};
use crate::energy::EnergyWeights;
use crate::error::{Error, Result};
use crate::guidance::{build_bundle, AblationMode, GuidanceBundle, SaliencyKind, SemanticKind};
use crate::layout::{solve_greedy, solve_height_separation, solve_naive, solve_planar_separation, Method, SolverConfig};
use crate::scene::Layout;
use crate::semantics::{compute_prior, compute_tendency, CategoryTable, PriorWeights, PriorsDocument, TendencySample, TendencyStats};
use crate::vision::{saliency_ft, EdgeParams};

/// Loads every scene of a manifest in order, using up to `jobs` threads.
pub fn load_scenes(manifest: &DatasetManifest, jobs: usize) -> Result<Vec<SceneData>> {
    map_scenes(&manifest.scenes, jobs, |e| manifest.load_scene(e)).into_iter().collect()
}

/// Applies `f` to each item, preserving order. `jobs <= 1` runs inline.
pub fn map_scenes<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if jobs > 1 {
        use rayon::prelude::*;
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            return pool.install(|| items.par_iter().map(&f).collect());
        }
    }
    let _ = jobs;
    items.iter().map(f).collect()
}

/// Guidance inputs for one scene under an ablation mode.
pub fn scene_bundle(data: &SceneData, mode: AblationMode, priors: &PriorWeights, edges: &EdgeParams) -> Result<GuidanceBundle> {
    let id = &data.scene.id;
    let saliency = match mode.saliency {
        SaliencyKind::Ft => saliency_ft(&data.image),
        SaliencyKind::File => data
            .saliency
            .clone()
            .ok_or_else(|| Error::InvalidMap(format!("scene {id} has no saliency map file for mode `{mode}`")))?,
    };
    let semantic = match mode.semantic {
        SemanticKind::Off => None,
        SemanticKind::Gt => Some(&data.semantic),
        SemanticKind::Pred => Some(
            data.predicted_semantic
                .as_ref()
                .ok_or_else(|| Error::InvalidMap(format!("scene {id} has no predicted semantic map for mode `{mode}`")))?,
        ),
    };
    let uniform = PriorWeights::uniform();
    let priors = if mode.uses_prior() { priors } else { &uniform };
    build_bundle(&data.image, &saliency, semantic, priors, edges)
}

/// Settings shared by placement and evaluation runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct RunSettings {
    pub weights: EnergyWeights,
    pub solver: SolverConfig,
    pub edges: EdgeParams,
    pub gamma: f64,
    /// Mode whose guidance map scores label coverage in the overlap metric.
    pub reference_mode: AblationMode,
    pub jobs: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            weights: EnergyWeights::paper(),
            solver: SolverConfig::default(),
            edges: EdgeParams::default(),
            gamma: 10.0,
            reference_mode: AblationMode::full(SaliencyKind::File),
            jobs: 1,
        }
    }
}

/// Places the labels of one scene with `method`; guidance is built only when needed.
pub fn place_scene(data: &SceneData, method: Method, mode: AblationMode, priors: &PriorWeights, settings: &RunSettings) -> Result<Layout> {
    let config = settings.solver.with_method(method);
    match method {
        Method::Naive => Ok(solve_naive(&data.scene)),
        Method::HeightSep => Ok(solve_height_separation(&data.scene)),
        Method::PlanarSep => solve_planar_separation(&data.scene, &config),
        Method::Proposed => {
            let bundle = scene_bundle(data, mode, priors, &settings.edges)?;
            Ok(solve_greedy(&data.scene, &bundle, &settings.weights, &config)?.layout)
        }
    }
}

/// Tendency statistics and prior weights from the participants of a training split.
pub fn learn_priors(scenes: &[SceneData], table: &CategoryTable) -> Result<(TendencyStats, PriorWeights)> {
    if scenes.is_empty() {
        return Err(Error::EmptyDataset("training split has no scenes".into()));
    }
    let samples = scenes.iter().map(|d| TendencySample {
        scene: &d.scene,
        semantic: &d.semantic,
        participants: &d.participants,
    });
    let stats = compute_tendency(samples, table)?;
    let priors = compute_prior(&stats, table)?;
    Ok((stats, priors))
}

pub fn priors_document(scenes: &[SceneData], table: &CategoryTable) -> Result<PriorsDocument> {
    let (stats, priors) = learn_priors(scenes, table)?;
    Ok(PriorsDocument::build(table, &stats, &priors))
}
