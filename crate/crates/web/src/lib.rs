//! WebAssembly bindings behind the single-page demo in `www/`.

use streetlabel::dataset::SceneData;
use streetlabel::dataset::{generate_scene, Split, SyntheticSpec};
use streetlabel::evaluation::{consensus, mu_centroid};
use streetlabel::guidance::AblationMode;
use streetlabel::layout::{render_overlay, Method};
use streetlabel::pipeline::{learn_priors, place_scene, scene_bundle, RunSettings};
use streetlabel::raster::{GrayMap, RgbImage};
use streetlabel::semantics::{CategoryTable, PriorWeights};
use wasm_bindgen::prelude::*;

const TRAINING_SCENES: usize = 4;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn rgba_from_rgb(img: &RgbImage) -> Vec<u8> {
    img.pixels().flat_map(|p| [p[0], p[1], p[2], 255]).collect()
}

fn rgba_from_gray(map: &GrayMap) -> Vec<u8> {
    map.normalized().to_u8().into_iter().flat_map(|v| [v, v, v, 255]).collect()
}

/// One synthetic street scene with priors learned from a few training scenes.
#[wasm_bindgen]
pub struct Demo {
    scene: SceneData,
    priors: PriorWeights,
    settings: RunSettings,
    summary: String,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32) -> Result<Demo, JsError> {
        let base = SyntheticSpec {
            seed: seed as u64,
            ..SyntheticSpec::default()
        };
        let train_spec = SyntheticSpec {
            split: Split::Train,
            ..base.clone()
        };
        let train: Vec<SceneData> = (0..TRAINING_SCENES).map(|i| generate_scene(&train_spec, i).data()).collect();
        let (_, priors) = learn_priors(&train, &CategoryTable::default()).map_err(js_err)?;
        Ok(Demo {
            scene: generate_scene(&base, 0).data(),
            priors,
            settings: RunSettings::default(),
            summary: String::new(),
        })
    }

    pub fn width(&self) -> u32 {
        self.scene.scene.width as u32
    }

    pub fn height(&self) -> u32 {
        self.scene.scene.height as u32
    }

    /// The photo-like scene image as RGBA bytes.
    pub fn image(&self) -> Vec<u8> {
        rgba_from_rgb(&self.scene.image)
    }

    /// `layer` is `saliency`, `edges` or `guidance`.
    pub fn map(&self, layer: &str, mode: &str) -> Result<Vec<u8>, JsError> {
        let mode: AblationMode = mode.parse().map_err(js_err)?;
        let b = scene_bundle(&self.scene, mode, &self.priors, &self.settings.edges).map_err(js_err)?;
        match layer {
            "saliency" => Ok(rgba_from_gray(&b.saliency)),
            "edges" => Ok(rgba_from_gray(&b.edges)),
            "guidance" => Ok(rgba_from_gray(&b.guidance)),
            _ => Err(JsError::new(&format!("unknown layer `{layer}`"))),
        }
    }

    /// Places labels and returns the rendered overlay as RGBA bytes.
    pub fn place(&mut self, method: &str, mode: &str) -> Result<Vec<u8>, JsError> {
        let method: Method = method.parse().map_err(js_err)?;
        let mode: AblationMode = mode.parse().map_err(js_err)?;
        let layout = place_scene(&self.scene, method, mode, &self.priors, &self.settings).map_err(js_err)?;
        let reference = consensus(&self.scene.participants).map_err(js_err)?.layout;
        let dist = mu_centroid(&[(&layout, &reference)]).map_err(js_err)?;
        self.summary = format!("{method} ({mode}): mean distance to participant consensus {dist:.1} px");
        Ok(rgba_from_rgb(&render_overlay(&self.scene.scene, &layout, &self.scene.image)))
    }

    /// Text describing the last placement.
    pub fn summary(&self) -> String {
        self.summary.clone()
    }
}
