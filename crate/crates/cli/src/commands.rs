use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use streetlabel::dataset::{generate_synthetic as generate, load_manifest, DatasetManifest};
use streetlabel::energy::EnergyMaps;
use streetlabel::evaluation::{consensus, learn_weights as learn, run_comparison, EvaluationContext, TrainingScene};
use streetlabel::guidance::AblationMode;
use streetlabel::layout::{render_overlay, LayoutRecord, Method};
use streetlabel::pipeline::{load_scenes, map_scenes, place_scene, priors_document, scene_bundle};
use streetlabel::raster::{save_graymap, save_image};
use streetlabel::scene::Layout;
use streetlabel::semantics::{CategoryTable, PriorWeights, PriorsDocument};
use streetlabel::Error;

use crate::config::Options;
use crate::CliError;

fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Data(Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| io_err(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn manifest(o: &Options) -> Result<DatasetManifest, CliError> {
    Ok(load_manifest(Options::require(&o.manifest, "manifest")?)?)
}

fn out_dir(o: &Options) -> Result<PathBuf, CliError> {
    let out = Options::require(&o.out, "out")?.to_path_buf();
    create_dir(&out)?;
    Ok(out)
}

/// Priors from `--priors` when `needed`, otherwise the uniform prior.
fn priors(o: &Options, needed: bool) -> Result<PriorWeights, CliError> {
    match (&o.priors, needed) {
        (Some(p), _) => Ok(PriorsDocument::load(p)?.priors()?),
        (None, false) => Ok(PriorWeights::uniform()),
        (None, true) => Err(CliError::Usage("--priors is required for modes that use the semantic prior".into())),
    }
}

pub fn generate_synthetic(o: Options) -> Result<(), CliError> {
    let out = out_dir(&o)?;
    o.synthetic.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let path = generate(&o.synthetic)?.write(&out, "manifest.json")?;
    println!("wrote {} scenes to {}", o.synthetic.image_count, path.display());
    Ok(())
}

pub fn learn_priors(o: Options) -> Result<(), CliError> {
    let m = manifest(&o)?;
    let out = out_dir(&o)?;
    let table = match &o.categories {
        Some(p) => CategoryTable::load(p)?,
        None => CategoryTable::default(),
    };
    let scenes = load_scenes(&m, o.settings.jobs)?;
    let doc = priors_document(&scenes, &table)?;
    let path = out.join("priors.json");
    write(&path, &doc.to_json())?;
    print!("{}", doc.summary());
    println!("wrote {}", path.display());
    Ok(())
}

pub fn learn_weights(o: Options) -> Result<(), CliError> {
    let m = manifest(&o)?;
    let out = out_dir(&o)?;
    let mode = o.single_mode()?;
    let priors = priors(&o, mode.uses_prior())?;
    let scenes = load_scenes(&m, o.settings.jobs)?;
    let training = map_scenes(&scenes, o.settings.jobs, |d| -> Result<TrainingScene, Error> {
        let bundle = scene_bundle(d, mode, &priors, &o.settings.edges)?;
        Ok(TrainingScene {
            scene: d.scene.clone(),
            maps: EnergyMaps::new(&bundle)?,
            consensus: consensus(&d.participants)?.layout,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let result = learn(&training, &o.learn)?;
    let path = out.join("weights.json");
    write(
        &path,
        &(serde_json::to_string_pretty(&result).expect("learning results serialize") + "\n"),
    )?;
    println!(
        "mean centroid distance {:.3} -> {:.3} after {} evaluations",
        result.initial_objective, result.objective, result.evaluations
    );
    for (name, w) in streetlabel::energy::EnergyWeights::NAMES.iter().zip(result.weights.to_array()) {
        println!("  {name:<17} {w:.6}");
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn layout_dir(out: &Path, method: Method, mode: AblationMode) -> PathBuf {
    out.join(method.as_str()).join(mode.to_string())
}

pub fn place(o: Options) -> Result<(), CliError> {
    let m = manifest(&o)?;
    let out = out_dir(&o)?;
    let method = o.single_method(Method::Proposed)?;
    let mode = o.single_mode()?;
    let priors = priors(&o, method.uses_guidance() && mode.uses_prior())?;
    let scenes = load_scenes(&m, o.settings.jobs)?;
    let results = map_scenes(&scenes, o.settings.jobs, |d| place_scene(d, method, mode, &priors, &o.settings));
    let dir = layout_dir(&out, method, mode);
    create_dir(&dir)?;
    let config = o.settings.solver.with_method(method);
    let mut failures = Vec::new();
    for (d, r) in scenes.iter().zip(results) {
        match r {
            Ok(layout) => {
                let mut record = LayoutRecord::new(&d.scene.id, &layout, &config).with_mode(mode);
                if method.uses_guidance() {
                    record = record.with_weights(o.settings.weights);
                }
                record.save(dir.join(format!("{}.json", d.scene.id)))?;
                save_image(
                    &render_overlay(&d.scene, &layout, &d.image),
                    dir.join(format!("{}.png", d.scene.id)),
                )?;
            }
            Err(e) => {
                log::warn!("scene {}: {e}", d.scene.id);
                failures.push(format!("{}: {e}", d.scene.id));
            }
        }
    }
    let placed = scenes.len() - failures.len();
    println!(
        "placed {placed}/{} scenes with {method} ({mode}) in {}",
        scenes.len(),
        dir.display()
    );
    if !failures.is_empty() {
        write(
            &dir.join("failures.json"),
            &(serde_json::to_string_pretty(&failures).expect("strings serialize") + "\n"),
        )?;
    }
    if placed == 0 && !scenes.is_empty() {
        return Err(CliError::Data(Error::InvalidConfig(format!(
            "no scene could be placed; first failure: {}",
            failures[0]
        ))));
    }
    Ok(())
}

fn collect_records(dir: &Path, out: &mut Vec<(PathBuf, LayoutRecord)>) -> Result<(), CliError> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| io_err(dir, err)))
        .collect::<Result<_, _>>()?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            collect_records(&p, out)?;
        } else if p.extension().is_some_and(|e| e == "json") && p.file_name().is_some_and(|n| n != "failures.json") {
            out.push((p.clone(), LayoutRecord::load(&p)?));
        }
    }
    Ok(())
}

pub fn evaluate(o: Options) -> Result<(), CliError> {
    let m = manifest(&o)?;
    let out = out_dir(&o)?;
    let priors = priors(&o, true)?;
    let scenes = load_scenes(&m, o.settings.jobs)?;
    let report = match &o.layouts {
        None => {
            let methods = if o.methods.is_empty() {
                Method::ALL.to_vec()
            } else {
                o.methods.clone()
            };
            let modes = if o.modes.is_empty() {
                vec![o.settings.reference_mode]
            } else {
                o.modes.clone()
            };
            run_comparison(&scenes, &priors, &methods, &modes, &o.settings)?
        }
        Some(dir) => {
            let mut records = Vec::new();
            collect_records(dir, &mut records)?;
            let index: BTreeMap<&str, usize> = scenes.iter().enumerate().map(|(i, d)| (d.scene.id.as_str(), i)).collect();
            let mut groups: BTreeMap<(Method, String), (AblationMode, Vec<Option<Layout>>)> = BTreeMap::new();
            for (path, r) in &records {
                let Some(&i) = index.get(r.scene_id.as_str()) else {
                    log::warn!("{}: scene {} is not in the manifest", path.display(), r.scene_id);
                    continue;
                };
                let mode = r.mode.unwrap_or(o.settings.reference_mode);
                let slot = groups
                    .entry((r.method, mode.to_string()))
                    .or_insert_with(|| (mode, vec![None; scenes.len()]));
                slot.1[i] = Some(r.layout()?);
            }
            let ctx = EvaluationContext::new(&scenes, &priors, &o.settings)?;
            let method_order = if o.methods.is_empty() {
                Method::ALL.to_vec()
            } else {
                o.methods.clone()
            };
            let mut rows = Vec::new();
            for method in method_order {
                for ((gm, _), (mode, layouts)) in &groups {
                    if *gm != method || (!o.modes.is_empty() && !o.modes.contains(mode)) {
                        continue;
                    }
                    let layouts: Vec<_> = layouts
                        .iter()
                        .map(|l| {
                            l.clone()
                                .ok_or_else(|| Error::InvalidConfig("no layout file for this scene".into()))
                        })
                        .collect();
                    rows.push(ctx.row(method, *mode, &layouts)?);
                }
            }
            if rows.is_empty() {
                return Err(CliError::Data(Error::EmptyDataset(format!(
                    "no matching layout files under {}",
                    dir.display()
                ))));
            }
            ctx.report(rows)
        }
    };
    write(&out.join("report.json"), &(report.to_json() + "\n"))?;
    write(&out.join("report.csv"), &report.to_csv())?;
    let text = report.to_text();
    write(&out.join("report.txt"), &text)?;
    print!("{text}");
    Ok(())
}

pub fn export_maps(o: Options) -> Result<(), CliError> {
    let m = manifest(&o)?;
    let out = out_dir(&o)?;
    let mode = o.single_mode()?;
    let priors = priors(&o, mode.uses_prior())?;
    let scenes = load_scenes(&m, o.settings.jobs)?;
    let bundles = map_scenes(&scenes, o.settings.jobs, |d| scene_bundle(d, mode, &priors, &o.settings.edges));
    let mut failed = 0;
    for (d, b) in scenes.iter().zip(bundles) {
        match b {
            Ok(b) => {
                let dir = out.join(&d.scene.id);
                create_dir(&dir)?;
                save_graymap(&b.saliency, dir.join("saliency.pgm"))?;
                save_graymap(&b.edges, dir.join("edges.pgm"))?;
                save_graymap(&b.guidance, dir.join("guidance.pgm"))?;
            }
            Err(e) => {
                failed += 1;
                log::warn!("scene {}: {e}", d.scene.id);
            }
        }
    }
    println!(
        "exported maps for {}/{} scenes ({mode}) to {}",
        scenes.len() - failed,
        scenes.len(),
        out.display()
    );
    if failed > 0 && failed == scenes.len() {
        return Err(CliError::Data(Error::InvalidMap(format!("no maps could be built in mode {mode}"))));
    }
    Ok(())
}
