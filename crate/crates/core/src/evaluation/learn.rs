use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::metrics::mu_centroid;
use crate::energy::{EnergyMaps, EnergyWeights};
use crate::error::{Error, Result};
use crate::layout::{GreedySolver, SolverConfig};
use crate::scene::{Layout, Scene};

/// Smallest value a weight is raised to from zero.
const REVIVE: f64 = 1e-3;
/// Weights shrunk below this become zero.
const FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct LearnConfig {
    pub initial: EnergyWeights,
    pub lower: [f64; 7],
    pub upper: [f64; 7],
    /// Maximum number of objective evaluations, the initial one included.
    pub budget: usize,
    pub seed: u64,
    /// First multiplicative step; halved in log space after a sweep without progress.
    pub initial_step: f64,
    pub min_step: f64,
    pub solver: SolverConfig,
}

impl Default for LearnConfig {
    fn default() -> Self {
        Self {
            initial: EnergyWeights::balanced(),
            lower: [0.0; 7],
            upper: [100.0; 7],
            budget: 500,
            seed: 1,
            initial_step: 8.0,
            min_step: 1.05,
            solver: SolverConfig::default(),
        }
    }
}

/// A training scene: geometry, energy maps under the training mode, and the
/// consensus layout the solver should reproduce.
pub struct TrainingScene {
    pub scene: Scene,
    pub maps: EnergyMaps,
    pub consensus: Layout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct LearnResult {
    pub weights: EnergyWeights,
    pub objective: f64,
    pub initial_objective: f64,
    pub evaluations: usize,
    /// Objective after each accepted move.
    pub trace: Vec<f64>,
}

/// Coordinate descent with multiplicative steps minimizing the mean
/// distance between greedy layouts and consensus layouts.
pub fn learn_weights(scenes: &[TrainingScene], config: &LearnConfig) -> Result<LearnResult> {
    if scenes.is_empty() {
        return Err(Error::EmptyDataset("weight learning needs at least one training scene".into()));
    }
    config.initial.validate()?;
    if config.budget == 0 || !(config.initial_step > 1.0) || !(config.min_step > 1.0) {
        return Err(Error::InvalidConfig("learning needs budget >= 1 and steps > 1".into()));
    }
    for i in 0..7 {
        if !(config.lower[i] >= 0.0 && config.lower[i] <= config.upper[i]) {
            return Err(Error::InvalidConfig(format!(
                "bounds for {} are inconsistent",
                EnergyWeights::NAMES[i]
            )));
        }
    }
    let mode = config.initial.orientation;
    let solvers = scenes
        .iter()
        .map(|t| Ok(GreedySolver::new(&t.scene, &t.maps, &config.solver)?.with_unary_cache(mode)))
        .collect::<Result<Vec<_>>>()?;
    let objective = |w: &[f64; 7]| -> Result<f64> {
        let weights = EnergyWeights::from_array(*w, mode);
        let layouts = solvers.iter().map(|s| Ok(s.solve(&weights)?.layout)).collect::<Result<Vec<_>>>()?;
        let pairs: Vec<_> = layouts.iter().zip(scenes).map(|(l, t)| (l, &t.consensus)).collect();
        mu_centroid(&pairs)
    };

    let clamp = |i: usize, v: f64| v.clamp(config.lower[i], config.upper[i]);
    let mut best: [f64; 7] = std::array::from_fn(|i| clamp(i, config.initial.to_array()[i]));
    let mut best_f = objective(&best)?;
    let initial_objective = best_f;
    let mut evaluations = 1;
    let mut trace = vec![best_f];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut step = config.initial_step;
    let mut coords: Vec<usize> = (0..7).collect();

    'search: while step >= config.min_step {
        coords.shuffle(&mut rng);
        let mut improved = false;
        for &i in &coords {
            let up = if best[i] == 0.0 { REVIVE } else { best[i] * step };
            let down = if best[i] / step < FLOOR { 0.0 } else { best[i] / step };
            let mut moved = false;
            for v in [up, down] {
                if moved {
                    break;
                }
                let mut v = clamp(i, v);
                let grow = v > best[i];
                // Keep moving the same way while it pays off.
                while v != best[i] {
                    if evaluations >= config.budget {
                        break 'search;
                    }
                    let mut trial = best;
                    trial[i] = v;
                    let f = objective(&trial)?;
                    evaluations += 1;
                    log::debug!("eval {evaluations}: {} = {v:.6} -> {f:.4}", EnergyWeights::NAMES[i]);
                    if f >= best_f {
                        break;
                    }
                    best = trial;
                    best_f = f;
                    trace.push(f);
                    improved = true;
                    moved = true;
                    v = match (grow, best[i]) {
                        (true, w) => clamp(i, w * step),
                        (false, w) if w / step < FLOOR => clamp(i, 0.0),
                        (false, w) => clamp(i, w / step),
                    };
                }
            }
        }
        if !improved {
            step = step.sqrt();
        }
    }
    log::info!("weight learning: {initial_objective:.3} -> {best_f:.3} after {evaluations} evaluations");
    Ok(LearnResult {
        weights: EnergyWeights::from_array(best, mode),
        objective: best_f,
        initial_objective,
        evaluations,
        trace,
    })
}
