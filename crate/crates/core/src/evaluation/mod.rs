//! Layout metrics, consensus extraction, comparison reports, and energy-weight learning.

mod learn;
mod metrics;
mod report;

pub use learn::{learn_weights, LearnConfig, LearnResult, TrainingScene};
pub use metrics::{consensus, consensus_point, mu_centroid, mu_int, mu_len, mu_over, ConsensusPlacement, Crossings};
pub use report::{place_all, run_comparison, EvaluationContext, MetricReport, MetricRow, Placements};
