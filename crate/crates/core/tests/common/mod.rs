#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use streetlabel::energy::{EnergyWeights, OrientationMode};
use streetlabel::raster::{GrayMap, LabelSize, Point};
use streetlabel::scene::{Layout, Scene};

pub struct Fixture {
    pub scene: Scene,
    pub layout: Layout,
    pub guidance: GrayMap,
    pub edges: GrayMap,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Guidance on a 1/256 lattice so plain f64 sums are exact.
pub fn dyadic_map(rng: &mut impl Rng, w: usize, h: usize) -> GrayMap {
    GrayMap::from_fn(w, h, |_, _| {
        if rng.random_bool(0.3) {
            0.0
        } else {
            f64::from(rng.random_range(0..=256u32)) / 256.0
        }
    })
    .unwrap()
}

pub fn binary_map(rng: &mut impl Rng, w: usize, h: usize) -> GrayMap {
    GrayMap::from_fn(w, h, |_, _| if rng.random_bool(0.2) { 1.0 } else { 0.0 }).unwrap()
}

/// Coordinates on a half-pixel lattice, a mix of integers and halves.
fn coord(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    let steps = ((hi - lo) * 2.0).floor() as u32;
    lo + f64::from(rng.random_range(0..=steps)) / 2.0
}

pub fn random_fixture(seed: u64, max_side: usize, max_k: usize) -> Fixture {
    let mut r = rng(seed);
    let w = r.random_range(8..=max_side);
    let h = r.random_range(8..=max_side);
    let size = LabelSize::new(r.random_range(1..=(w as u32 / 2).max(1)), r.random_range(1..=(h as u32 / 2).max(1)));
    let k = r.random_range(1..=max_k);
    let pois: Vec<Point> = (0..k)
        .map(|_| Point::new(r.random_range(0.0..w as f64 - 1e-9), r.random_range(0.0..h as f64 - 1e-9)))
        .collect();
    let (hw, hh) = (size.width as f64 / 2.0, size.height as f64 / 2.0);
    let positions = (0..k)
        .map(|_| Point::new(coord(&mut r, hw, w as f64 - hw), coord(&mut r, hh, h as f64 - hh)))
        .collect();
    let scene = Scene::new(format!("fx-{seed}"), w, h, pois, size).unwrap();
    let guidance = dyadic_map(&mut r, w, h);
    let edges = binary_map(&mut r, w, h);
    Fixture {
        scene,
        layout: Layout::new(positions),
        guidance,
        edges,
    }
}

/// Pixel `(i, j)` is under a label when its center lies in the half-open rectangle.
pub fn label_mask(scene: &Scene, center: Point) -> Vec<bool> {
    let (w, h) = (scene.width, scene.height);
    let hw = scene.label_size.width as f64 / 2.0;
    let hh = scene.label_size.height as f64 / 2.0;
    let mut m = vec![false; w * h];
    for j in 0..h {
        for i in 0..w {
            let (px, py) = (i as f64 + 0.5, j as f64 + 0.5);
            m[j * w + i] = px >= center.x - hw && px < center.x + hw && py >= center.y - hh && py < center.y + hh;
        }
    }
    m
}

fn round_half_up_div(num: i64, den: i64) -> i64 {
    (2 * num + den).div_euclid(2 * den)
}

/// Closed-form digital line between two pixels, minor offsets rounded half up
/// along the ascending major axis.
pub fn trace_oracle(a: (i64, i64), b: (i64, i64)) -> Vec<(i64, i64)> {
    if a == b {
        return Vec::new();
    }
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let mut out = Vec::new();
    if dx.abs() >= dy.abs() {
        let (s, e) = if a.0 <= b.0 { (a, b) } else { (b, a) };
        let major = e.0 - s.0;
        let minor = e.1 - s.1;
        for t in 0..=major {
            let off = round_half_up_div(t * minor.abs(), major) * minor.signum();
            out.push((s.0 + t, s.1 + off));
        }
    } else {
        let (s, e) = if a.1 <= b.1 { (a, b) } else { (b, a) };
        let major = e.1 - s.1;
        let minor = e.0 - s.0;
        for t in 0..=major {
            let off = round_half_up_div(t * minor.abs(), major) * minor.signum();
            out.push((s.0 + off, s.1 + t));
        }
    }
    out
}

/// Leader pixels of label `k`: the traced line, in the image, off the label body.
pub fn line_mask(scene: &Scene, layout: &Layout, k: usize) -> Vec<bool> {
    let (w, h) = (scene.width, scene.height);
    let body = label_mask(scene, layout.positions[k]);
    let poi = scene.pois[k];
    let c = layout.positions[k];
    let mut m = vec![false; w * h];
    for (x, y) in trace_oracle(
        (poi.x.floor() as i64, poi.y.floor() as i64),
        (c.x.floor() as i64, c.y.floor() as i64),
    ) {
        if x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h {
            let i = y as usize * w + x as usize;
            if !body[i] {
                m[i] = true;
            }
        }
    }
    m
}

/// The seven energy terms by per-pixel double loops.
pub fn brute_terms(scene: &Scene, layout: &Layout, guidance: &GrayMap, edges: &GrayMap, mode: OrientationMode) -> [f64; 7] {
    let (w, h) = (scene.width, scene.height);
    let area = scene.label_size.width as f64 * scene.label_size.height as f64;
    let labels: Vec<Vec<bool>> = layout.positions.iter().map(|&p| label_mask(scene, p)).collect();
    let lines: Vec<Vec<bool>> = (0..layout.len()).map(|k| line_mask(scene, layout, k)).collect();
    let mut t = [0.0; 7];
    for k in 0..layout.len() {
        for j in 0..h {
            for i in 0..w {
                let idx = j * w + i;
                if labels[k][idx] {
                    t[0] += guidance.get(i, j);
                    t[1] += edges.get(i, j);
                }
                if lines[k][idx] {
                    t[3] += guidance.get(i, j);
                }
            }
        }
        for q in 0..k {
            t[2] += (0..w * h).filter(|&i| labels[k][i] && labels[q][i]).count() as f64;
            t[4] += (0..w * h).filter(|&i| lines[k][i] && lines[q][i]).count() as f64;
        }
        let (p, m) = (layout.positions[k], scene.pois[k]);
        let (dx, dy) = (p.x - m.x, p.y - m.y);
        let len = dx.hypot(dy);
        t[5] += len;
        if len > 0.0 {
            let cos = dy.abs() / len;
            t[6] += match mode {
                OrientationMode::AsWritten => cos,
                OrientationMode::PreferVertical => 1.0 - cos,
            };
        }
    }
    t[0] /= area;
    t[1] /= area;
    t[2] /= area;
    t[3] /= area;
    t
}

pub fn weighted(t: &[f64; 7], w: &EnergyWeights) -> f64 {
    let label = w.label_guidance * t[0] + w.label_edge * t[1] + w.label_overlap * t[2];
    let line = w.line_guidance * t[3] + w.line_crossing * t[4] + w.line_length * t[5] + w.line_orientation * t[6];
    label + line
}

pub fn random_weights(rng: &mut impl Rng) -> EnergyWeights {
    let w: [f64; 7] = std::array::from_fn(|_| f64::from(rng.random_range(0..=64u32)) / 64.0);
    EnergyWeights::from_array(w, OrientationMode::PreferVertical)
}

pub fn relative_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
