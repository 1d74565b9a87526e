//! Category tables, fractional label-to-category counting, placement
//! tendencies and the task-specific importance prior.
//!
//! A category's tendency factor is the share of label mass annotators put on
//! it out of the mass they could have put on it:
//! `lambda = N_actual / N_potential`, where `N_potential` counts
//! `K * U` labels for every image containing the category and `N_actual`
//! attributes each label fractionally by the categories of its pixels.
//! The prior is `c = 1 - lambda / max(lambda)`, then per-category overrides
//! from the table replace computed values.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{SemanticMap, UNKNOWN_CATEGORY};
use crate::scene::{Layout, Scene};

const DEFAULT_TABLE: &str = include_str!("../data/categories.json");
const CITYSCAPES_REMAP: &str = include_str!("../data/cityscapes_remap.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Category {
    pub id: u8,
    pub name: String,
    /// Fixed prior weight that replaces the learned one.
    #[serde(rename = "override", default, skip_serializing_if = "Option::is_none")]
    pub override_c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryTable {
    pub categories: Vec<Category>,
}

impl Default for CategoryTable {
    /// The fifteen street-scene categories, with Traffic Sign and Traffic
    /// Light pinned to `c = 1`.
    fn default() -> Self {
        Self::from_json(DEFAULT_TABLE).expect("bundled category table is valid")
    }
}

impl CategoryTable {
    pub fn new(categories: Vec<Category>) -> Result<Self> {
        let table = Self { categories };
        table.validate()?;
        Ok(table)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: CategoryTable = serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("category table: {e}")))?;
        table.validate()?;
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    fn validate(&self) -> Result<()> {
        let mut ids = std::collections::BTreeSet::new();
        let mut names = std::collections::BTreeSet::new();
        for c in &self.categories {
            if c.id == UNKNOWN_CATEGORY {
                return Err(Error::InvalidConfig(format!("category id {UNKNOWN_CATEGORY} is reserved")));
            }
            if !ids.insert(c.id) {
                return Err(Error::InvalidConfig(format!("duplicate category id {}", c.id)));
            }
            if !names.insert(c.name.as_str()) {
                return Err(Error::InvalidConfig(format!("duplicate category name {}", c.name)));
            }
            if let Some(v) = c.override_c {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidConfig(format!("override for {} outside [0, 1]", c.name)));
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, id: u8) -> Option<&Category> {
        self.categories.iter().find(|c| c.id == id)
    }

    pub fn by_name(&self, name: &str) -> Option<&Category> {
        self.categories.iter().find(|c| c.name.eq_ignore_ascii_case(name))
    }

    pub fn id_of(&self, name: &str) -> Option<u8> {
        self.by_name(name).map(|c| c.id)
    }

    pub fn name(&self, id: u8) -> String {
        match self.get(id) {
            Some(c) => c.name.clone(),
            None if id == UNKNOWN_CATEGORY => "unknown".to_string(),
            None => format!("#{id}"),
        }
    }

    pub fn contains(&self, id: u8) -> bool {
        self.get(id).is_some()
    }

    /// Ids that are neither in the table nor the reserved unknown id, with pixel counts.
    pub fn check_map(&self, map: &SemanticMap) -> Vec<(u8, usize)> {
        map.histogram()
            .iter()
            .enumerate()
            .filter(|&(id, &n)| n > 0 && id as u8 != UNKNOWN_CATEGORY && !self.contains(id as u8))
            .map(|(id, &n)| (id as u8, n))
            .collect()
    }
}

/// Lookup table from Cityscapes `labelIds` to the default category ids.
/// Unmapped classes go to the unknown id.
pub fn cityscapes_remap() -> [u8; 256] {
    #[derive(Deserialize)]
    struct Entry {
        from: u8,
        to: u8,
    }
    #[derive(Deserialize)]
    struct Remap {
        unmapped: u8,
        map: Vec<Entry>,
    }
    let remap: Remap = serde_json::from_str(CITYSCAPES_REMAP).expect("bundled remap is valid");
    let mut table = [remap.unmapped; 256];
    for e in remap.map {
        table[e.from as usize] = e.to;
    }
    table
}

/// Per-category label mass for one layout.
///
/// Each label contributes a unit mass split across categories in proportion
/// to its in-image pixels, so a layout of `K` in-image labels sums to `K`.
pub fn count_fractional(scene: &Scene, layout: &Layout, semantic: &SemanticMap) -> Result<[f64; 256]> {
    if semantic.dims() != scene.dims() {
        return Err(Error::dims(
            format!("semantic map of scene {}", scene.id),
            scene.dims(),
            semantic.dims(),
        ));
    }
    let mut mass = [0.0; 256];
    let mut counts = [0u64; 256];
    for rect in layout.rects(scene) {
        let b = rect.pixel_box().clip(scene.width, scene.height);
        let area = b.area();
        if area == 0 {
            continue;
        }
        counts.fill(0);
        for y in b.y0..b.y1 {
            for x in b.x0..b.x1 {
                counts[semantic.get(x as usize, y as usize) as usize] += 1;
            }
        }
        for (m, &n) in mass.iter_mut().zip(counts.iter()) {
            if n > 0 {
                *m += n as f64 / area as f64;
            }
        }
    }
    Ok(mass)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TendencyEntry {
    pub id: u8,
    /// Absent when the statistics were built from tendency factors alone.
    pub n_potential: Option<f64>,
    pub n_actual: Option<f64>,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TendencyStats {
    pub entries: Vec<TendencyEntry>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl TendencyStats {
    pub fn from_counts(counts: impl IntoIterator<Item = (u8, f64, f64)>) -> Self {
        let entries = counts
            .into_iter()
            .map(|(id, potential, actual)| TendencyEntry {
                id,
                n_potential: Some(potential),
                n_actual: Some(actual),
                lambda: if potential > 0.0 { actual / potential } else { 0.0 },
            })
            .collect();
        Self {
            entries,
            notes: Vec::new(),
        }
    }

    pub fn from_lambdas(lambdas: impl IntoIterator<Item = (u8, f64)>) -> Self {
        let entries = lambdas
            .into_iter()
            .map(|(id, lambda)| TendencyEntry {
                id,
                n_potential: None,
                n_actual: None,
                lambda,
            })
            .collect();
        Self {
            entries,
            notes: Vec::new(),
        }
    }

    pub fn get(&self, id: u8) -> Option<&TendencyEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn lambda(&self, id: u8) -> Option<f64> {
        self.get(id).map(|e| e.lambda)
    }

    pub fn max_lambda(&self) -> f64 {
        self.entries.iter().map(|e| e.lambda).fold(0.0, f64::max)
    }
}

/// One training scene: its semantic map and every participant's layout.
#[derive(Debug, Clone, Copy)]
pub struct TendencySample<'a> {
    pub scene: &'a Scene,
    pub semantic: &'a SemanticMap,
    pub participants: &'a [Layout],
}

/// Tendency factors over a training split.
pub fn compute_tendency<'a>(samples: impl IntoIterator<Item = TendencySample<'a>>, table: &CategoryTable) -> Result<TendencyStats> {
    let mut potential = [0.0f64; 256];
    let mut actual = [0.0f64; 256];
    let mut scenes = 0usize;
    let mut notes = Vec::new();
    let mut foreign = [false; 256];

    for s in samples {
        scenes += 1;
        let k = s.scene.label_count();
        let u = s.participants.len();
        if let Some(bad) = s.participants.iter().position(|l| l.len() != k) {
            return Err(Error::InvalidConfig(format!(
                "scene {}: participant {bad} placed {} labels, expected {k}",
                s.scene.id,
                s.participants[bad].len()
            )));
        }
        let hist = s.semantic.histogram();
        for (id, &n) in hist.iter().enumerate() {
            if n > 0 {
                potential[id] += (k * u) as f64;
                if id as u8 != UNKNOWN_CATEGORY && !table.contains(id as u8) {
                    foreign[id] = true;
                }
            }
        }
        for layout in s.participants {
            let mass = count_fractional(s.scene, layout, s.semantic)?;
            for (a, m) in actual.iter_mut().zip(mass.iter()) {
                *a += m;
            }
        }
    }
    if scenes == 0 {
        return Err(Error::EmptyDataset("no training scenes for tendency statistics".into()));
    }

    let mut counts = Vec::new();
    for c in &table.categories {
        let id = c.id as usize;
        if potential[id] == 0.0 {
            notes.push(format!("category {} does not appear in any training image; lambda = 0", c.name));
        }
        counts.push((c.id, potential[id], actual[id]));
    }
    for (id, _) in foreign.iter().enumerate().filter(|(_, f)| **f) {
        notes.push(format!(
            "category id {id} appears in semantic maps but not in the category table; ignored"
        ));
    }
    let mut stats = TendencyStats::from_counts(counts);
    stats.notes = notes;
    Ok(stats)
}

/// Per-category importance prior `c` in `[0, 1]`. Categories without a
/// learned weight, including the unknown id, get `c = 1`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PriorWeights {
    weights: BTreeMap<u8, f64>,
}

impl PriorWeights {
    /// No learned weights: every category maps to 1, leaving saliency untouched.
    pub fn uniform() -> Self {
        Self::default()
    }

    pub fn from_map(weights: BTreeMap<u8, f64>) -> Result<Self> {
        if let Some((id, c)) = weights.iter().find(|(_, c)| !(0.0..=1.0).contains(*c)) {
            return Err(Error::InvalidConfig(format!("prior weight {c} for category {id} outside [0, 1]")));
        }
        Ok(Self { weights })
    }

    #[inline]
    pub fn c(&self, id: u8) -> f64 {
        self.weights.get(&id).copied().unwrap_or(1.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u8, f64)> + '_ {
        self.weights.iter().map(|(&id, &c)| (id, c))
    }

    /// Dense lookup table indexed by category id.
    pub fn lookup(&self) -> [f64; 256] {
        let mut table = [1.0; 256];
        for (id, c) in self.iter() {
            table[id as usize] = c;
        }
        table
    }
}

pub fn compute_prior(stats: &TendencyStats, table: &CategoryTable) -> Result<PriorWeights> {
    let max = stats.max_lambda();
    if !(max > 0.0) {
        return Err(Error::DegeneratePrior);
    }
    let mut weights = BTreeMap::new();
    for e in &stats.entries {
        weights.insert(e.id, (1.0 - e.lambda / max).clamp(0.0, 1.0));
    }
    for c in &table.categories {
        if let Some(v) = c.override_c {
            weights.insert(c.id, v);
        }
    }
    PriorWeights::from_map(weights)
}

/// Serialized category table with learned tendencies and priors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorsDocument {
    pub categories: Vec<PriorsRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PriorsRow {
    pub id: u8,
    pub name: String,
    pub lambda: f64,
    pub c: f64,
    #[serde(rename = "override")]
    pub override_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_potential: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_actual: Option<f64>,
}

impl PriorsDocument {
    pub fn build(table: &CategoryTable, stats: &TendencyStats, priors: &PriorWeights) -> Self {
        let categories = table
            .categories
            .iter()
            .map(|cat| {
                let entry = stats.get(cat.id);
                PriorsRow {
                    id: cat.id,
                    name: cat.name.clone(),
                    lambda: entry.map_or(0.0, |e| e.lambda),
                    c: priors.c(cat.id),
                    override_c: cat.override_c,
                    n_potential: entry.and_then(|e| e.n_potential),
                    n_actual: entry.and_then(|e| e.n_actual),
                }
            })
            .collect();
        Self {
            categories,
            notes: stats.notes.clone(),
        }
    }

    pub fn priors(&self) -> Result<PriorWeights> {
        PriorWeights::from_map(self.categories.iter().map(|r| (r.id, r.c)).collect())
    }

    pub fn table(&self) -> Result<CategoryTable> {
        CategoryTable::new(
            self.categories
                .iter()
                .map(|r| Category {
                    id: r.id,
                    name: r.name.clone(),
                    override_c: r.override_c,
                })
                .collect(),
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("priors serialize") + "\n"
    }

    /// Rows sorted by decreasing lambda, as a fixed-width text table.
    pub fn summary(&self) -> String {
        let mut rows: Vec<&PriorsRow> = self.categories.iter().collect();
        rows.sort_by(|a, b| b.lambda.total_cmp(&a.lambda).then(a.id.cmp(&b.id)));
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<16} {:>12} {:>12} {:>9} {:>8}",
            "category", "N_potential", "N_actual", "lambda", "c"
        );
        for r in rows {
            let fmt_opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
            let _ = writeln!(
                out,
                "{:<16} {:>12} {:>12} {:>8.2}% {:>8.4}{}",
                r.name,
                fmt_opt(r.n_potential),
                fmt_opt(r.n_actual),
                r.lambda * 100.0,
                r.c,
                if r.override_c.is_some() { " *" } else { "" }
            );
        }
        out
    }
}
