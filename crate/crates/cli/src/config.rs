//! Run configuration: an optional JSON file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use streetlabel::dataset::{Split, SyntheticSpec};
use streetlabel::energy::EnergyWeights;
use streetlabel::evaluation::{LearnConfig, LearnResult};
use streetlabel::guidance::AblationMode;
use streetlabel::layout::Method;
use streetlabel::pipeline::RunSettings;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<String> {
        match self {
            OneOrMany::One(s) => vec![s],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub manifest: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub priors: Option<PathBuf>,
    pub categories: Option<PathBuf>,
    pub layouts: Option<PathBuf>,
    pub method: Option<OneOrMany>,
    pub mode: Option<OneOrMany>,
    pub weights: Option<String>,
    pub gamma: Option<f64>,
    pub stride: Option<u32>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub budget: Option<usize>,
    pub settings: Option<RunSettings>,
    pub learn: Option<LearnConfig>,
    pub synthetic: Option<SyntheticSpec>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: FileConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.manifest,
            &mut cfg.out,
            &mut cfg.priors,
            &mut cfg.categories,
            &mut cfg.layouts,
        ] {
            if let Some(p) = p {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        if let Some(w) = &mut cfg.weights {
            if !matches!(w.as_str(), "paper" | "balanced") && Path::new(w.as_str()).is_relative() {
                *w = base.join(&*w).to_string_lossy().into_owned();
            }
        }
        Ok(cfg)
    }
}

/// Flags shared by every command. Anything set here wins over the config file.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct Flags {
    /// JSON run configuration; flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dataset manifest
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Priors file written by learn-priors
    #[arg(long)]
    pub priors: Option<PathBuf>,
    /// Placement method(s): naive, height-sep, planar-sep, proposed
    #[arg(long, value_delimiter = ',')]
    pub method: Vec<String>,
    /// Ablation mode(s), e.g. ft, file, file+gt, file+pred, file+gt+noprior
    #[arg(long, value_delimiter = ',')]
    pub mode: Vec<String>,
    /// Energy weights: `paper`, `balanced`, or a JSON file
    #[arg(long)]
    pub weights: Option<String>,
    /// Target leader length for the length metric
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Candidate grid stride in pixels
    #[arg(long)]
    pub stride: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for per-scene work
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// Fully resolved options for one command.
#[derive(Debug)]
pub struct Options {
    pub manifest: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub priors: Option<PathBuf>,
    pub categories: Option<PathBuf>,
    pub layouts: Option<PathBuf>,
    pub methods: Vec<Method>,
    pub modes: Vec<AblationMode>,
    pub settings: RunSettings,
    pub learn: LearnConfig,
    pub synthetic: SyntheticSpec,
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

/// Reads a weights file holding either bare weights or a learning result.
pub fn load_weights(source: &str) -> Result<EnergyWeights, CliError> {
    match source {
        "paper" => return Ok(EnergyWeights::paper()),
        "balanced" => return Ok(EnergyWeights::balanced()),
        _ => {}
    }
    let text = std::fs::read_to_string(source).map_err(|e| CliError::Usage(format!("cannot read weights {source}: {e}")))?;
    let weights = serde_json::from_str::<LearnResult>(&text)
        .map(|r| r.weights)
        .or_else(|_| serde_json::from_str::<EnergyWeights>(&text))
        .map_err(|e| CliError::Usage(format!("{source} holds neither weights nor a learning result: {e}")))?;
    weights.validate().map_err(usage)?;
    Ok(weights)
}

impl Options {
    pub fn resolve(
        flags: Flags,
        extra_categories: Option<PathBuf>,
        extra_layouts: Option<PathBuf>,
        extra_budget: Option<usize>,
    ) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let pick = |flag: Vec<String>, file: Option<OneOrMany>| {
            if flag.is_empty() {
                file.map(OneOrMany::into_vec).unwrap_or_default()
            } else {
                flag
            }
        };
        let methods = pick(flags.method, file.method)
            .iter()
            .map(|m| m.parse::<Method>().map_err(usage))
            .collect::<Result<Vec<_>, _>>()?;
        let modes = pick(flags.mode, file.mode)
            .iter()
            .map(|m| m.parse::<AblationMode>().map_err(usage))
            .collect::<Result<Vec<_>, _>>()?;

        let mut settings = file.settings.unwrap_or_default();
        if let Some(w) = flags.weights.or(file.weights) {
            settings.weights = load_weights(&w)?;
        }
        if let Some(g) = flags.gamma.or(file.gamma) {
            if !g.is_finite() || g < 0.0 {
                return Err(CliError::Usage(format!("--gamma must be finite and >= 0, got {g}")));
            }
            settings.gamma = g;
        }
        let stride = flags.stride.or(file.stride);
        if let Some(s) = stride {
            if s == 0 {
                return Err(CliError::Usage("--stride must be at least 1".into()));
            }
            settings.solver.grid_stride = s;
        }
        if let Some(j) = flags.jobs.or(file.jobs) {
            settings.jobs = j.max(1);
        }
        let seed = flags.seed.or(file.seed);
        let budget = extra_budget.or(file.budget);

        let mut learn = file.learn.unwrap_or_default();
        learn.solver = settings.solver.clone();
        if let Some(s) = seed {
            learn.seed = s;
        }
        if let Some(b) = budget {
            learn.budget = b;
        }
        let mut synthetic = file.synthetic.unwrap_or_default();
        if let Some(s) = seed {
            synthetic.seed = s;
        }

        Ok(Self {
            manifest: flags.manifest.or(file.manifest),
            out: flags.out.or(file.out),
            priors: flags.priors.or(file.priors),
            categories: extra_categories.or(file.categories),
            layouts: extra_layouts.or(file.layouts),
            methods,
            modes,
            settings,
            learn,
            synthetic,
        })
    }

    pub fn require<'a>(value: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, CliError> {
        value.as_deref().ok_or_else(|| CliError::Usage(format!("--{flag} is required")))
    }

    pub fn single_method(&self, default: Method) -> Result<Method, CliError> {
        match self.methods.as_slice() {
            [] => Ok(default),
            [m] => Ok(*m),
            _ => Err(CliError::Usage("this command takes a single --method".into())),
        }
    }

    pub fn single_mode(&self) -> Result<AblationMode, CliError> {
        match self.modes.as_slice() {
            [] => Ok(self.settings.reference_mode),
            [m] => Ok(*m),
            _ => Err(CliError::Usage("this command takes a single --mode".into())),
        }
    }
}

pub fn parse_split(s: &str) -> Result<Split, String> {
    match s {
        "train" => Ok(Split::Train),
        "test" => Ok(Split::Test),
        _ => Err(format!("unknown split `{s}` (expected train or test)")),
    }
}
