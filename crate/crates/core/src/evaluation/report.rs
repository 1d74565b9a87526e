use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::metrics::{consensus, mu_centroid, mu_int, mu_len, mu_over};
use crate::dataset::SceneData;
use crate::error::{Error, Result};
use crate::guidance::AblationMode;
use crate::layout::Method;
use crate::pipeline::{map_scenes, place_scene, scene_bundle, RunSettings};
use crate::raster::GrayMap;
use crate::scene::Layout;
use crate::semantics::PriorWeights;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct MetricRow {
    pub method: Method,
    pub mode: AblationMode,
    pub scenes: usize,
    pub labels: usize,
    pub mu_centroid: f64,
    pub mu_over: f64,
    /// Shared leader-line pixels per image.
    pub mu_int: f64,
    pub mu_int_total: f64,
    pub mu_len: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct MetricReport {
    pub gamma: f64,
    pub reference_mode: AblationMode,
    pub rows: Vec<MetricRow>,
}

impl MetricReport {
    pub fn row(&self, method: Method, mode: AblationMode) -> Option<&MetricRow> {
        self.rows.iter().find(|r| r.method == method && r.mode == mode)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn to_text(&self) -> String {
        let header = [
            "method",
            "mode",
            "scenes",
            "mu_centroid",
            "mu_over",
            "mu_int",
            "mu_int_total",
            "mu_len",
        ];
        let cells: Vec<[String; 8]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.method.to_string(),
                    r.mode.to_string(),
                    r.scenes.to_string(),
                    format!("{:.2}", r.mu_centroid),
                    format!("{:.4}", r.mu_over),
                    format!("{:.2}", r.mu_int),
                    format!("{:.0}", r.mu_int_total),
                    format!("{:.2}", r.mu_len),
                ]
            })
            .collect();
        let widths: Vec<usize> = (0..8)
            .map(|c| cells.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        let line = |out: &mut String, row: &[&str]| {
            for (c, v) in row.iter().enumerate() {
                if c < 2 {
                    let _ = write!(out, "{v:<w$}  ", w = widths[c]);
                } else {
                    let _ = write!(out, "{v:>w$}  ", w = widths[c]);
                }
            }
            out.truncate(out.trim_end().len());
            out.push('\n');
        };
        line(&mut out, &header);
        for r in &cells {
            line(&mut out, &r.iter().map(String::as_str).collect::<Vec<_>>());
        }
        for r in self.rows.iter().filter(|r| !r.failures.is_empty()) {
            let _ = writeln!(out, "{} {}: {} scene(s) failed", r.method, r.mode, r.failures.len());
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "method",
            "mode",
            "scenes",
            "labels",
            "mu_centroid",
            "mu_over",
            "mu_int",
            "mu_int_total",
            "mu_len",
        ])
        .expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.method.to_string(),
                r.mode.to_string(),
                r.scenes.to_string(),
                r.labels.to_string(),
                r.mu_centroid.to_string(),
                r.mu_over.to_string(),
                r.mu_int.to_string(),
                r.mu_int_total.to_string(),
                r.mu_len.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }
}

/// Per-scene data every metric row needs: consensus and reference guidance.
pub struct EvaluationContext<'a> {
    pub scenes: &'a [SceneData],
    pub consensus: Vec<Layout>,
    pub reference: Vec<GrayMap>,
    pub settings: RunSettings,
}

impl<'a> EvaluationContext<'a> {
    pub fn new(scenes: &'a [SceneData], priors: &PriorWeights, settings: &RunSettings) -> Result<Self> {
        if scenes.is_empty() {
            return Err(Error::EmptyDataset("evaluation split has no scenes".into()));
        }
        let consensus = scenes
            .iter()
            .map(|d| {
                consensus(&d.participants)
                    .map(|c| c.layout)
                    .map_err(|e| Error::InvalidConfig(format!("scene {}: {e}", d.scene.id)))
            })
            .collect::<Result<Vec<_>>>()?;
        let reference = map_scenes(scenes, settings.jobs, |d| {
            scene_bundle(d, settings.reference_mode, priors, &settings.edges).map(|b| b.guidance)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            scenes,
            consensus,
            reference,
            settings: settings.clone(),
        })
    }

    /// Metrics of one method/mode from per-scene layouts; failed scenes are
    /// listed and left out.
    pub fn row(&self, method: Method, mode: AblationMode, layouts: &[Result<Layout>]) -> Result<MetricRow> {
        let mut failures = Vec::new();
        let mut ok = Vec::new();
        for (i, l) in layouts.iter().enumerate() {
            let id = &self.scenes[i].scene.id;
            match l {
                Ok(l) => match l.check_feasible(&self.scenes[i].scene) {
                    Ok(()) => ok.push((i, l)),
                    Err(e) => failures.push(format!("{id}: {e}")),
                },
                Err(e) => failures.push(format!("{id}: {e}")),
            }
        }
        let pairs: Vec<_> = ok.iter().map(|&(i, l)| (l, &self.consensus[i])).collect();
        let over: Vec<_> = ok.iter().map(|&(i, l)| (&self.scenes[i].scene, l, &self.reference[i])).collect();
        let geo: Vec<_> = ok.iter().map(|&(i, l)| (&self.scenes[i].scene, l)).collect();
        let crossings = mu_int(&geo);
        Ok(MetricRow {
            method,
            mode,
            scenes: ok.len(),
            labels: ok.iter().map(|(_, l)| l.len()).sum(),
            mu_centroid: mu_centroid(&pairs)?,
            mu_over: mu_over(&over)?,
            mu_int: crossings.mean,
            mu_int_total: crossings.total,
            mu_len: mu_len(&geo, self.settings.gamma),
            failures,
        })
    }

    pub fn report(&self, rows: Vec<MetricRow>) -> MetricReport {
        MetricReport {
            gamma: self.settings.gamma,
            reference_mode: self.settings.reference_mode,
            rows,
        }
    }
}

/// Layouts of every requested method and mode, in scene order.
pub type Placements = BTreeMap<(Method, AblationMode), Vec<Result<Layout>>>;

/// Runs every method under every mode. Baselines ignore the mode, so they are
/// solved once and repeated across modes.
pub fn place_all(
    scenes: &[SceneData],
    priors: &PriorWeights,
    methods: &[Method],
    modes: &[AblationMode],
    settings: &RunSettings,
) -> Placements {
    let mut out = Placements::new();
    for &method in methods {
        let mut shared: Option<Vec<Result<Layout>>> = None;
        for &mode in modes {
            let layouts = match (&shared, method.uses_guidance()) {
                (Some(s), false) => s.iter().map(clone_result).collect(),
                _ => map_scenes(scenes, settings.jobs, |d| place_scene(d, method, mode, priors, settings)),
            };
            if !method.uses_guidance() && shared.is_none() {
                shared = Some(layouts.iter().map(clone_result).collect());
            }
            out.insert((method, mode), layouts);
        }
    }
    out
}

fn clone_result(r: &Result<Layout>) -> Result<Layout> {
    match r {
        Ok(l) => Ok(l.clone()),
        Err(e) => Err(Error::InvalidConfig(e.to_string())),
    }
}

/// One row per method and mode, in the order given.
pub fn run_comparison(
    scenes: &[SceneData],
    priors: &PriorWeights,
    methods: &[Method],
    modes: &[AblationMode],
    settings: &RunSettings,
) -> Result<MetricReport> {
    let ctx = EvaluationContext::new(scenes, priors, settings)?;
    let placements = place_all(scenes, priors, methods, modes, settings);
    let mut rows = Vec::new();
    for &method in methods {
        for &mode in modes {
            rows.push(ctx.row(method, mode, &placements[&(method, mode)])?);
        }
    }
    Ok(ctx.report(rows))
}
