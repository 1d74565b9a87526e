use super::SolverConfig;
use crate::error::Result;
use crate::raster::{LabelRect, Point};
use crate::scene::{Layout, Scene};

/// Each label centered on its POI, pushed inward to stay in-bounds.
pub fn solve_naive(scene: &Scene) -> Layout {
    Layout::new(scene.pois.iter().map(|&m| scene.clamp_center(m)).collect())
}

/// Starts from the naive layout and, while two labels overlap, moves the one
/// whose POI is farther away (smaller y) up by half a label height.
///
/// A label already at the top edge stays put; the loop ends once no overlap
/// remains or no overlapping label can move.
pub fn solve_height_separation(scene: &Scene) -> Layout {
    let mut layout = solve_naive(scene);
    let step = scene.label_size.half_height();
    let top = scene.label_size.half_height();
    let k = layout.len();
    loop {
        let mut moved = false;
        for i in 0..k {
            for j in (i + 1)..k {
                if layout.rect(scene, i).overlap_area(&layout.rect(scene, j)) == 0 {
                    continue;
                }
                let far = if scene.pois[j].y <= scene.pois[i].y { j } else { i };
                let p = &mut layout.positions[far];
                let y = (p.y - step).max(top);
                if y < p.y {
                    p.y = y;
                    moved = true;
                }
            }
        }
        if !moved {
            return layout;
        }
    }
}

/// The 36 ring centers around `poi` at 10 degree steps, counter-clockwise
/// on screen from the +x axis, clamped in-bounds.
pub fn planar_candidates(scene: &Scene, poi: Point, radius: f64) -> Vec<Point> {
    (0..36)
        .map(|i| {
            let theta = (i as f64 * 10.0).to_radians();
            scene.clamp_center(Point::new(poi.x + radius * theta.cos(), poi.y - radius * theta.sin()))
        })
        .collect()
}

/// Starts from the naive layout; each label in turn that overlaps an earlier
/// label moves to the ring candidate with the least overlap against the
/// earlier labels, ties going to the smallest angle.
pub fn solve_planar_separation(scene: &Scene, config: &SolverConfig) -> Result<Layout> {
    config.validate()?;
    let mut layout = solve_naive(scene);
    let overlap_with_earlier = |layout: &Layout, k: usize, center: Point| -> u64 {
        let r = LabelRect::new(center, scene.label_size);
        (0..k).map(|j| r.overlap_area(&layout.rect(scene, j))).sum()
    };
    for k in 1..layout.len() {
        if overlap_with_earlier(&layout, k, layout.positions[k]) == 0 {
            continue;
        }
        let mut best = (u64::MAX, layout.positions[k]);
        for c in planar_candidates(scene, scene.pois[k], config.planar_radius) {
            let o = overlap_with_earlier(&layout, k, c);
            if o < best.0 {
                best = (o, c);
            }
        }
        layout.positions[k] = best.1;
    }
    Ok(layout)
}
