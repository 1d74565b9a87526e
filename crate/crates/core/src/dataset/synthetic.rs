//! Deterministic street-like scenes with simulated manual placements.

use std::path::{Path, PathBuf};

use image::{Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::manifest::{save_manifest, DatasetManifest, Participant, SceneData, SceneEntry, Split};
use crate::error::{Error, Result};
use crate::raster::{save_graymap, save_image, save_semantic_map, GrayMap, LabelSize, PixelBox, Point, SemanticMap};

const ROAD: u8 = 0;
const SIDEWALK: u8 = 1;
const BUILDING: u8 = 2;
const POLE: u8 = 4;
const LIGHT: u8 = 5;
const SIGN: u8 = 6;
const FOLIAGE: u8 = 7;
const SKY: u8 = 8;
const PERSON: u8 = 9;
const CAR: u8 = 11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SyntheticSpec {
    pub image_count: usize,
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    pub participant_count: usize,
    /// Standard deviation of participant jitter, pixels.
    pub noise_scale: f64,
    pub labels_per_scene: usize,
    pub label_size: LabelSize,
    pub split: Split,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            image_count: 30,
            width: 640,
            height: 320,
            seed: 7,
            participant_count: 20,
            noise_scale: 6.0,
            labels_per_scene: 8,
            label_size: LabelSize::default(),
            split: Split::Test,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("synthetic spec: {m}")));
        if self.image_count == 0 || self.participant_count == 0 || self.labels_per_scene == 0 {
            return bad("image, participant and label counts must be at least 1");
        }
        if !self.noise_scale.is_finite() || self.noise_scale < 0.0 {
            return bad("noise scale must be finite and >= 0");
        }
        let (lw, lh) = (self.label_size.width as usize, self.label_size.height as usize);
        if lw == 0 || lh == 0 || self.width < 2 * lw || self.height < 4 * lh {
            return bad("image must be at least two labels wide and four labels tall");
        }
        Ok(())
    }
}

/// One generated scene with its maps.
#[derive(Debug, Clone)]
pub struct SyntheticScene {
    pub entry: SceneEntry,
    pub image: RgbImage,
    pub semantic: SemanticMap,
    pub predicted_semantic: SemanticMap,
    /// Quantized to 8-bit levels, exactly as written to disk.
    pub saliency: GrayMap,
}

impl SyntheticScene {
    /// The scene as it would load from disk.
    pub fn data(&self) -> SceneData {
        SceneData {
            scene: self.entry.scene(),
            image: self.image.clone(),
            semantic: self.semantic.clone(),
            saliency: Some(self.saliency.clone()),
            predicted_semantic: Some(self.predicted_semantic.clone()),
            participants: self.entry.participant_layouts(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub spec: SyntheticSpec,
    pub manifest: DatasetManifest,
    pub scenes: Vec<SyntheticScene>,
}

/// Hidden cost a simulated participant pays per label fraction on a category.
fn preference(id: u8) -> f64 {
    match id {
        SKY => 0.0,
        FOLIAGE => 0.12,
        BUILDING => 0.45,
        SIGN | LIGHT => 3.0,
        _ => 1.0,
    }
}

/// Saliency a strong learned detector might assign to a category.
fn base_saliency(id: u8) -> f64 {
    match id {
        SKY => 0.45,
        BUILDING => 0.3,
        FOLIAGE => 0.25,
        ROAD => 0.1,
        SIDEWALK => 0.15,
        POLE => 0.3,
        SIGN | LIGHT => 1.0,
        CAR => 0.6,
        PERSON => 0.75,
        _ => 0.2,
    }
}

#[derive(Debug, Clone, Copy)]
struct Object {
    kind: u8,
    rect: PixelBox,
}

impl Object {
    fn centroid(&self) -> Point {
        Point::new(
            (self.rect.x0 + self.rect.x1) as f64 / 2.0,
            (self.rect.y0 + self.rect.y1) as f64 / 2.0,
        )
    }
}

fn fill(sem: &mut SemanticMap, b: PixelBox, id: u8) {
    let b = b.clip(sem.width(), sem.height());
    for y in b.y0..b.y1 {
        for x in b.x0..b.x1 {
            sem.set(x as usize, y as usize, id);
        }
    }
}

fn rect(x0: f64, y0: f64, w: f64, h: f64) -> PixelBox {
    let (x0, y0) = (x0.round() as i64, y0.round() as i64);
    PixelBox {
        x0,
        y0,
        x1: x0 + w.round().max(1.0) as i64,
        y1: y0 + h.round().max(1.0) as i64,
    }
}

struct Layers {
    semantic: SemanticMap,
    objects: Vec<Object>,
    blocks: Vec<(u8, PixelBox, [u8; 3])>,
    car_colors: Vec<[u8; 3]>,
}

fn build_layers(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Layers {
    let (w, h) = (spec.width, spec.height);
    let (wf, hf) = (w as f64, h as f64);
    let s = hf / 320.0;
    let hw = spec.label_size.half_width();
    let mut sem = SemanticMap::filled(w, h, SKY);
    let sky_bottom = (hf * rng.random_range(0.28..0.38)).round();
    let road_top = (hf * rng.random_range(0.64..0.70)).round();
    let walk_bottom = road_top + (hf * 0.05).round();

    fill(&mut sem, rect(0.0, walk_bottom, wf, hf), ROAD);
    fill(&mut sem, rect(0.0, road_top, wf, walk_bottom - road_top), SIDEWALK);

    let mut blocks = Vec::new();
    let mut x = 0.0;
    while x < wf {
        let bw = (rng.random_range(60.0..160.0) * s).min(wf - x).max(1.0);
        let (kind, rise, color) = if rng.random_bool(0.6) {
            let c = [rng.random_range(110..170), rng.random_range(80..120), rng.random_range(60..100)];
            (BUILDING, rng.random_range(0.0..40.0) * s, c)
        } else {
            (FOLIAGE, rng.random_range(0.0..20.0) * s, [50, rng.random_range(100..140), 45])
        };
        let top = sky_bottom - rise;
        let b = rect(x, top, bw, road_top - top);
        fill(&mut sem, b, kind);
        blocks.push((kind, b, color));
        x += bw;
    }

    let mut objects = Vec::new();
    let poi_x = |rng: &mut ChaCha8Rng| rng.random_range(hw..(wf - hw));
    for _ in 0..rng.random_range(1..=2) {
        let side = rng.random_range(16.0..24.0) * s;
        let cx = poi_x(rng);
        let cy = sky_bottom + rng.random_range(-10.0..40.0) * s;
        let sign = rect(cx - side / 2.0, cy - side / 2.0, side, side);
        let pole = rect(cx - 1.5 * s, sign.y1 as f64, 3.0 * s, road_top - sign.y1 as f64);
        fill(&mut sem, pole, POLE);
        fill(&mut sem, sign, SIGN);
        objects.push(Object { kind: SIGN, rect: sign });
    }
    if rng.random_bool(0.6) {
        let (lw, lh) = (10.0 * s, 24.0 * s);
        let cx = poi_x(rng);
        let cy = sky_bottom + rng.random_range(0.0..30.0) * s;
        let light = rect(cx - lw / 2.0, cy - lh / 2.0, lw, lh);
        let pole = rect(cx - 1.5 * s, light.y1 as f64, 3.0 * s, road_top - light.y1 as f64);
        fill(&mut sem, pole, POLE);
        fill(&mut sem, light, LIGHT);
        objects.push(Object { kind: LIGHT, rect: light });
    }
    let mut car_colors = Vec::new();
    for _ in 0..rng.random_range(2..=3) {
        let (cw, ch) = (rng.random_range(60.0..90.0) * s, rng.random_range(28.0..36.0) * s);
        let cx = poi_x(rng);
        let cy = rng.random_range((walk_bottom + ch / 2.0)..(hf - ch / 2.0 - 2.0));
        let car = rect(cx - cw / 2.0, cy - ch / 2.0, cw, ch);
        fill(&mut sem, car, CAR);
        objects.push(Object { kind: CAR, rect: car });
        car_colors.push([rng.random_range(20..230), rng.random_range(20..230), rng.random_range(20..230)]);
    }
    for _ in 0..rng.random_range(1..=2) {
        let (pw, ph) = (10.0 * s, 26.0 * s);
        let cx = poi_x(rng);
        let person = rect(cx - pw / 2.0, walk_bottom - ph, pw, ph);
        fill(&mut sem, person, PERSON);
        objects.push(Object {
            kind: PERSON,
            rect: person,
        });
    }
    Layers {
        semantic: sem,
        objects,
        blocks,
        car_colors,
    }
}

fn render_image(spec: &SyntheticSpec, layers: &Layers, rng: &mut ChaCha8Rng) -> RgbImage {
    let (w, h) = (spec.width, spec.height);
    let sem = &layers.semantic;
    let block_at = |x: usize| layers.blocks.iter().find(|(_, b, _)| (x as i64) < b.x1).map(|(_, b, c)| (*b, *c));
    let car_color = |x: usize, y: usize| {
        let mut cars = layers.objects.iter().filter(|o| o.kind == CAR).zip(&layers.car_colors);
        cars.find(|(o, _)| o.rect.contains(x as i64, y as i64)).map(|(_, c)| *c)
    };
    let noise: Vec<i16> = (0..w * h).map(|_| rng.random_range(-12..=12)).collect();
    let mut img = RgbImage::new(w as u32, h as u32);
    for y in 0..h {
        for x in 0..w {
            let t = y as f64 / h as f64;
            let n = noise[y * w + x];
            let c: [u8; 3] = match sem.get(x, y) {
                SKY => [(120.0 + 120.0 * t) as u8, (170.0 + 80.0 * t) as u8, 235],
                BUILDING => {
                    let (b, base) = block_at(x).unwrap_or((
                        PixelBox {
                            x0: 0,
                            y0: 0,
                            x1: 1,
                            y1: 1,
                        },
                        [130, 100, 80],
                    ));
                    let (lx, ly) = (x as i64 - b.x0, y as i64 - b.y0);
                    if lx % 18 >= 6 && lx % 18 < 14 && ly % 22 >= 6 && ly % 22 < 16 {
                        [40, 50, 70]
                    } else {
                        base
                    }
                }
                FOLIAGE => [50, (120 + n * 2).clamp(60, 200) as u8, 45],
                ROAD => [90, 90, 95],
                SIDEWALK => [170, 165, 160],
                POLE => [100, 100, 100],
                SIGN => [220, 30, 30],
                LIGHT => [30, 30, 30],
                CAR => car_color(x, y).unwrap_or([200, 40, 40]),
                PERSON => [60, 40, 90],
                _ => [0, 0, 0],
            };
            img.put_pixel(x as u32, y as u32, Rgb(c));
        }
    }
    img
}

fn render_saliency(layers: &Layers) -> GrayMap {
    let sem = &layers.semantic;
    let (w, h) = sem.dims();
    let halo_sigma = 12.0 * h as f64 / 320.0;
    let salient: Vec<PixelBox> = layers
        .objects
        .iter()
        .filter(|o| matches!(o.kind, SIGN | LIGHT))
        .map(|o| o.rect)
        .collect();
    let raw = GrayMap::from_fn(w, h, |x, y| {
        let base = base_saliency(sem.get(x, y));
        let halo = salient
            .iter()
            .map(|b| {
                let dx = (b.x0 - x as i64).max(x as i64 - (b.x1 - 1)).max(0) as f64;
                let dy = (b.y0 - y as i64).max(y as i64 - (b.y1 - 1)).max(0) as f64;
                0.9 * (-(dx * dx + dy * dy) / (2.0 * halo_sigma * halo_sigma)).exp()
            })
            .fold(0.0, f64::max);
        base.max(halo)
    })
    .expect("saliency values are finite");
    GrayMap::from_u8(w, h, &raw.to_u8()).expect("quantized map has matching size")
}

/// Ground truth warped by a few pixels along region boundaries.
fn predict_semantic(sem: &SemanticMap, rng: &mut ChaCha8Rng) -> SemanticMap {
    let (w, h) = sem.dims();
    let (phx, phy): (f64, f64) = (rng.random_range(0.0..6.28), rng.random_range(0.0..6.28));
    SemanticMap::from_fn(w, h, |x, y| {
        let ox = (3.0 * (y as f64 / 7.0 + phx).sin()).round() as i64;
        let oy = (3.0 * (x as f64 / 11.0 + phy).sin()).round() as i64;
        let sx = (x as i64 + ox).clamp(0, w as i64 - 1) as usize;
        let sy = (y as i64 + oy).clamp(0, h as i64 - 1) as usize;
        sem.get(sx, sy)
    })
}

fn choose_pois(spec: &SyntheticSpec, layers: &Layers, rng: &mut ChaCha8Rng) -> (Vec<Point>, Vec<String>) {
    let (hw, hh) = (spec.label_size.half_width(), spec.label_size.half_height());
    let (wf, hf) = (spec.width as f64, spec.height as f64);
    let clamp = |p: Point| Point::new(p.x.clamp(hw, wf - hw), p.y.clamp(hh, hf - hh));
    let name = |kind: u8| match kind {
        SIGN => "Sign",
        LIGHT => "Signal",
        CAR => "Car",
        PERSON => "Pedestrian",
        BUILDING => "Shop",
        _ => "Park",
    };
    let mut found: Vec<(u8, Point)> = layers.objects.iter().map(|o| (o.kind, o.centroid())).collect();
    let blocks: Vec<_> = layers.blocks.iter().filter(|(_, b, _)| b.x1 - b.x0 >= 8).collect();
    while found.len() < spec.labels_per_scene {
        let (kind, b, _) = blocks[rng.random_range(0..blocks.len())];
        let p = Point::new(
            rng.random_range(b.x0 as f64..b.x1 as f64),
            rng.random_range(b.y0 as f64 + 0.4 * (b.y1 - b.y0) as f64..b.y1 as f64 - 4.0),
        );
        found.push((*kind, p));
    }
    found.truncate(spec.labels_per_scene);
    let mut counts = [0usize; 256];
    found
        .into_iter()
        .map(|(kind, p)| {
            counts[kind as usize] += 1;
            (clamp(p), format!("{} {}", name(kind), counts[kind as usize]))
        })
        .unzip()
}

/// Greedy placement by a simulated participant: hidden category cost plus
/// overlap with their own earlier labels plus distance to the POI.
fn participant_layout(spec: &SyntheticSpec, sem: &SemanticMap, pois: &[Point]) -> Vec<Point> {
    let (w, h) = sem.dims();
    let size = spec.label_size;
    let (lw, lh) = (size.width as usize, size.height as usize);
    let area = size.area();
    let stride = 4 * w.div_ceil(640).max(1);
    let mut sat = vec![0.0f64; (w + 1) * (h + 1)];
    for y in 0..h {
        let mut row = 0.0;
        for x in 0..w {
            row += preference(sem.get(x, y));
            sat[(y + 1) * (w + 1) + x + 1] = sat[y * (w + 1) + x + 1] + row;
        }
    }
    let box_cost = |x0: usize, y0: usize| {
        let at = |x: usize, y: usize| sat[y * (w + 1) + x];
        (at(x0 + lw, y0 + lh) + at(x0, y0) - at(x0, y0 + lh) - at(x0 + lw, y0)) / area
    };
    let mut placed: Vec<PixelBox> = Vec::new();
    let mut out = Vec::with_capacity(pois.len());
    for &m in pois {
        let mut best = (
            f64::INFINITY,
            Point::default(),
            PixelBox {
                x0: 0,
                y0: 0,
                x1: 0,
                y1: 0,
            },
        );
        for y0 in (0..=h - lh).step_by(stride) {
            for x0 in (0..=w - lw).step_by(stride) {
                let b = PixelBox {
                    x0: x0 as i64,
                    y0: y0 as i64,
                    x1: (x0 + lw) as i64,
                    y1: (y0 + lh) as i64,
                };
                let c = Point::new(x0 as f64 + size.half_width(), y0 as f64 + size.half_height());
                let overlap: u64 = placed.iter().map(|p| p.intersection_area(&b)).sum();
                let cost = box_cost(x0, y0) + 4.0 * overlap as f64 / area + 0.0035 * c.distance(m) * 640.0 / w as f64;
                if cost < best.0 {
                    best = (cost, c, b);
                }
            }
        }
        placed.push(best.2);
        out.push(best.1);
    }
    out
}

fn scene_rng(spec: &SyntheticSpec, index: usize, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let split = match spec.split {
        Split::Train => 0u64,
        Split::Test => 1u64,
    };
    rng.set_stream((split << 62) | (purpose << 48) | index as u64);
    rng
}

fn scene_id(spec: &SyntheticSpec, index: usize) -> String {
    let prefix = match spec.split {
        Split::Train => "train",
        Split::Test => "test",
    };
    format!("{prefix}-{index:04}")
}

pub fn generate_scene(spec: &SyntheticSpec, index: usize) -> SyntheticScene {
    let mut rng = scene_rng(spec, index, 0);
    let layers = build_layers(spec, &mut rng);
    let image = render_image(spec, &layers, &mut scene_rng(spec, index, 1));
    let saliency = render_saliency(&layers);
    let predicted_semantic = predict_semantic(&layers.semantic, &mut scene_rng(spec, index, 2));
    let (pois, label_texts) = choose_pois(spec, &layers, &mut rng);

    let clean = participant_layout(spec, &layers.semantic, &pois);
    let (hw, hh) = (spec.label_size.half_width(), spec.label_size.half_height());
    let (wf, hf) = (spec.width as f64, spec.height as f64);
    let jitter = Normal::new(0.0, spec.noise_scale).expect("noise scale is finite and >= 0");
    let mut jrng = scene_rng(spec, index, 3);
    let participants = (0..spec.participant_count)
        .map(|u| Participant {
            participant_id: format!("p{:02}", u + 1),
            positions: clean
                .iter()
                .map(|c| {
                    let (dx, dy) = if spec.noise_scale > 0.0 {
                        (jitter.sample(&mut jrng), jitter.sample(&mut jrng))
                    } else {
                        (0.0, 0.0)
                    };
                    Point::new((c.x + dx).clamp(hw, wf - hw), (c.y + dy).clamp(hh, hf - hh))
                })
                .collect(),
        })
        .collect();

    let id = scene_id(spec, index);
    let entry = SceneEntry {
        image_path: PathBuf::from(format!("images/{id}.png")),
        semantic_map_path: PathBuf::from(format!("semantic/{id}.png")),
        saliency_map_path: Some(PathBuf::from(format!("saliency/{id}.pgm"))),
        predicted_semantic_map_path: Some(PathBuf::from(format!("predicted/{id}.png"))),
        scene_id: id,
        width: spec.width,
        height: spec.height,
        pois,
        label_size: spec.label_size,
        label_texts,
        participants,
    };
    SyntheticScene {
        entry,
        image,
        semantic: layers.semantic,
        predicted_semantic,
        saliency,
    }
}

/// Generates a full split. A pure function of `spec`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticDataset> {
    spec.validate()?;
    let scenes: Vec<SyntheticScene> = (0..spec.image_count).map(|i| generate_scene(spec, i)).collect();
    let manifest = DatasetManifest {
        split: spec.split,
        scenes: scenes.iter().map(|s| s.entry.clone()).collect(),
        base_dir: PathBuf::new(),
    };
    manifest.validate()?;
    Ok(SyntheticDataset {
        spec: spec.clone(),
        manifest,
        scenes,
    })
}

impl SyntheticDataset {
    /// Writes map files under `dir` and the manifest to `dir/manifest_name`.
    pub fn write(&self, dir: impl AsRef<Path>, manifest_name: &str) -> Result<PathBuf> {
        let dir = dir.as_ref();
        for sub in ["images", "semantic", "saliency", "predicted"] {
            let p = dir.join(sub);
            std::fs::create_dir_all(&p).map_err(|e| Error::io(&p, e))?;
        }
        for s in &self.scenes {
            let e = &s.entry;
            save_image(&s.image, dir.join(&e.image_path))?;
            save_semantic_map(&s.semantic, dir.join(&e.semantic_map_path))?;
            if let Some(p) = &e.saliency_map_path {
                save_graymap(&s.saliency, dir.join(p))?;
            }
            if let Some(p) = &e.predicted_semantic_map_path {
                save_semantic_map(&s.predicted_semantic, dir.join(p))?;
            }
        }
        let path = dir.join(manifest_name);
        let mut manifest = self.manifest.clone();
        manifest.base_dir = dir.to_path_buf();
        save_manifest(&manifest, &path)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SyntheticSpec {
        SyntheticSpec {
            image_count: 2,
            width: 320,
            height: 160,
            participant_count: 4,
            label_size: LabelSize::new(60, 15),
            ..SyntheticSpec::default()
        }
    }

    #[test]
    fn same_seed_same_manifest() {
        let a = generate_synthetic(&small()).unwrap();
        let b = generate_synthetic(&small()).unwrap();
        assert_eq!(a.manifest.to_json(), b.manifest.to_json());
        assert_eq!(a.scenes[1].image, b.scenes[1].image);
        let other = generate_synthetic(&SyntheticSpec { seed: 8, ..small() }).unwrap();
        assert_ne!(a.manifest.to_json(), other.manifest.to_json());
    }

    #[test]
    fn zero_noise_participants_agree() {
        let d = generate_synthetic(&SyntheticSpec {
            noise_scale: 0.0,
            ..small()
        })
        .unwrap();
        for s in &d.manifest.scenes {
            for p in &s.participants {
                assert_eq!(p.positions, s.participants[0].positions);
            }
        }
    }

    #[test]
    fn pois_leave_room_for_labels() {
        let spec = small();
        let d = generate_synthetic(&spec).unwrap();
        for s in &d.manifest.scenes {
            assert_eq!(s.pois.len(), spec.labels_per_scene);
            for p in &s.pois {
                assert!(p.x >= 30.0 && p.x <= 290.0 && p.y >= 7.5 && p.y <= 152.5);
            }
        }
    }

    #[test]
    fn rejects_tiny_images() {
        assert!(generate_synthetic(&SyntheticSpec { width: 100, ..small() }).is_err());
    }
}
