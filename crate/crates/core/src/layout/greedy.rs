use std::cmp::Ordering;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::{LabelOrder, SolverConfig};
use crate::energy::{EnergyBreakdown, EnergyMaps, EnergyWeights, OrientationMode, PlacementState, UnaryTerms};
use crate::error::{Error, Result};
use crate::guidance::GuidanceBundle;
use crate::raster::Point;
use crate::scene::{Layout, Scene};

/// Label centers on a regular grid, each keeping the label fully in-bounds.
///
/// The first center sits flush with the left and top edges.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl CandidateGrid {
    pub fn new(scene: &Scene, stride: u32) -> Result<Self> {
        if stride == 0 {
            return Err(Error::InvalidConfig("grid stride must be at least 1".into()));
        }
        let size = scene.label_size;
        if !scene.fits_label() {
            return Err(Error::NoFeasiblePlacement {
                width: scene.width,
                height: scene.height,
                label_width: size.width,
                label_height: size.height,
            });
        }
        let axis = |extent: usize, len: u32, half: f64| -> Vec<f64> {
            let free = extent - len as usize;
            (0..=free / stride as usize).map(|i| half + (i * stride as usize) as f64).collect()
        };
        Ok(Self {
            xs: axis(scene.width, size.width, size.half_width()),
            ys: axis(scene.height, size.height, size.half_height()),
        })
    }

    pub fn len(&self) -> usize {
        self.xs.len() * self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Candidate `i` in row-major order.
    pub fn get(&self, i: usize) -> Point {
        Point::new(self.xs[i % self.xs.len()], self.ys[i / self.xs.len()])
    }

    pub fn iter(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(|i| self.get(i))
    }
}

/// Label indices in processing order.
pub fn processing_order(scene: &Scene, rule: LabelOrder) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scene.label_count()).collect();
    if rule == LabelOrder::LeftToRightNearFirst {
        let bottom = Point::new(scene.width as f64 / 2.0, scene.height as f64);
        order.sort_by(|&a, &b| {
            let (pa, pb) = (scene.pois[a], scene.pois[b]);
            pa.x.total_cmp(&pb.x)
                .then(pa.distance(bottom).total_cmp(&pb.distance(bottom)))
                .then(a.cmp(&b))
        });
    }
    order
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyResult {
    pub layout: Layout,
    pub order: Vec<usize>,
    /// Restricted energy of each label when it was committed, in processing order.
    pub committed: Vec<EnergyBreakdown>,
}

/// Greedy placement for one scene, reusable across weight vectors.
pub struct GreedySolver<'a> {
    scene: &'a Scene,
    maps: &'a EnergyMaps,
    grid: CandidateGrid,
    order: Vec<usize>,
    cache: Option<(OrientationMode, Vec<Vec<UnaryTerms>>)>,
}

impl<'a> GreedySolver<'a> {
    pub fn new(scene: &'a Scene, maps: &'a EnergyMaps, config: &SolverConfig) -> Result<Self> {
        config.validate()?;
        maps.check_scene(scene)?;
        Ok(Self {
            scene,
            maps,
            grid: CandidateGrid::new(scene, config.grid_stride)?,
            order: processing_order(scene, config.order),
            cache: None,
        })
    }

    /// Precomputes the weight-independent terms of every candidate.
    pub fn with_unary_cache(mut self, mode: OrientationMode) -> Self {
        let per_label = (0..self.scene.label_count())
            .map(|k| self.grid.iter().map(|p| self.maps.unary(self.scene, k, p, mode)).collect())
            .collect();
        self.cache = Some((mode, per_label));
        self
    }

    pub fn grid(&self) -> &CandidateGrid {
        &self.grid
    }

    fn unary(&self, k: usize, i: usize, mode: OrientationMode) -> UnaryTerms {
        match &self.cache {
            Some((m, terms)) if *m == mode => terms[k][i],
            _ => self.maps.unary(self.scene, k, self.grid.get(i), mode),
        }
    }

    /// Restricted energy of every candidate for label `k` given `state`.
    pub fn candidate_energies(&self, state: &PlacementState<'_>, k: usize, weights: &EnergyWeights) -> Vec<EnergyBreakdown> {
        (0..self.grid.len())
            .map(|i| state.candidate(&self.unary(k, i, weights.orientation), weights))
            .collect()
    }

    pub fn solve(&self, weights: &EnergyWeights) -> Result<GreedyResult> {
        weights.validate()?;
        let mut state = PlacementState::new(self.maps, self.scene);
        let mut positions = vec![Point::default(); self.scene.label_count()];
        let mut committed = Vec::with_capacity(self.order.len());
        for &k in &self.order {
            let score = |i: usize| {
                let u = self.unary(k, i, weights.orientation);
                (state.candidate(&u, weights), u)
            };
            #[cfg(feature = "parallel")]
            let best = (0..self.grid.len()).into_par_iter().map(score).min_by(|a, b| compare(a, b));
            #[cfg(not(feature = "parallel"))]
            let best = (0..self.grid.len()).map(score).min_by(|a, b| compare(a, b));
            let (energy, u) = best.expect("candidate grid is never empty");
            positions[k] = u.center;
            committed.push(energy);
            state.commit(&u);
        }
        Ok(GreedyResult {
            layout: Layout::new(positions),
            order: self.order.clone(),
            committed,
        })
    }
}

/// Lower energy first; ties go to the shorter leader, then smaller y, then smaller x.
fn compare(a: &(EnergyBreakdown, UnaryTerms), b: &(EnergyBreakdown, UnaryTerms)) -> Ordering {
    a.0.total
        .total_cmp(&b.0.total)
        .then(a.1.length.total_cmp(&b.1.length))
        .then(a.1.center.y.total_cmp(&b.1.center.y))
        .then(a.1.center.x.total_cmp(&b.1.center.x))
}

pub fn solve_greedy(scene: &Scene, bundle: &GuidanceBundle, weights: &EnergyWeights, config: &SolverConfig) -> Result<GreedyResult> {
    let maps = EnergyMaps::new(bundle)?;
    GreedySolver::new(scene, &maps, config)?.solve(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::total_energy;
    use crate::raster::{GrayMap, LabelSize};

    fn bundle(g: GrayMap) -> GuidanceBundle {
        let (w, h) = g.dims();
        GuidanceBundle::new(g, GrayMap::zeros(w, h)).unwrap()
    }

    #[test]
    fn grid_is_flush_and_in_bounds() {
        let s = Scene::new("g", 40, 20, vec![Point::new(5.0, 5.0)], LabelSize::new(10, 4)).unwrap();
        let g = CandidateGrid::new(&s, 8).unwrap();
        assert_eq!(g.xs, vec![5.0, 13.0, 21.0, 29.0]);
        assert_eq!(g.ys, vec![2.0, 10.0, 18.0]);
        let exact = CandidateGrid::new(
            &Scene::new("e", 10, 4, vec![Point::new(1.0, 1.0)], LabelSize::new(10, 4)).unwrap(),
            3,
        )
        .unwrap();
        assert_eq!(exact.len(), 1);
    }

    #[test]
    fn label_larger_than_image_is_infeasible() {
        let s = Scene::new("g", 20, 20, vec![Point::new(5.0, 5.0)], LabelSize::new(30, 4)).unwrap();
        let b = bundle(GrayMap::zeros(20, 20));
        assert!(matches!(
            solve_greedy(&s, &b, &EnergyWeights::paper(), &SolverConfig::default()),
            Err(Error::NoFeasiblePlacement { .. })
        ));
    }

    #[test]
    fn lands_in_unique_zero_basin() {
        let g = GrayMap::from_fn(64, 64, |x, y| if (40..60).contains(&x) && (4..16).contains(&y) { 0.0 } else { 1.0 }).unwrap();
        let s = Scene::new("b", 64, 64, vec![Point::new(10.0, 50.0)], LabelSize::new(12, 6)).unwrap();
        let w = EnergyWeights::from_array([1.0, 0.0, 0.0, 0.0, 0.0, 0.001, 0.0], OrientationMode::PreferVertical);
        let cfg = SolverConfig {
            grid_stride: 2,
            ..SolverConfig::default()
        };
        let r = solve_greedy(&s, &bundle(g), &w, &cfg).unwrap();
        let b = r.layout.rect(&s, 0).pixel_box();
        assert!(b.x0 >= 40 && b.x1 <= 60 && b.y0 >= 4 && b.y1 <= 16, "{b:?}");
        assert_eq!(r.committed[0].label_guidance, 0.0);
    }

    #[test]
    fn coincident_pois_are_separated() {
        let s = Scene::new("c", 64, 64, vec![Point::new(32.0, 32.0); 2], LabelSize::new(12, 6)).unwrap();
        let w = EnergyWeights::from_array([0.35, 0.07, 10.0, 0.04, 0.1, 0.01, 0.1], OrientationMode::PreferVertical);
        let r = solve_greedy(&s, &bundle(GrayMap::zeros(64, 64)), &w, &SolverConfig::default()).unwrap();
        assert_eq!(r.layout.rect(&s, 0).overlap_area(&r.layout.rect(&s, 1)), 0);
    }

    #[test]
    fn single_label_energy_matches_total() {
        let g = GrayMap::from_fn(48, 40, |x, y| ((x * 13 + y * 7) % 17) as f64 / 16.0).unwrap();
        let s = Scene::new("t", 48, 40, vec![Point::new(20.3, 17.9)], LabelSize::new(10, 6)).unwrap();
        let b = bundle(g);
        let w = EnergyWeights::paper();
        let r = solve_greedy(
            &s,
            &b,
            &w,
            &SolverConfig {
                grid_stride: 3,
                ..SolverConfig::default()
            },
        )
        .unwrap();
        assert_eq!(r.committed[0], total_energy(&s, &r.layout, &b, &w).unwrap());
    }

    #[test]
    fn order_is_left_to_right_then_near_first() {
        let pois = vec![Point::new(30.0, 5.0), Point::new(10.0, 5.0), Point::new(30.0, 35.0)];
        let s = Scene::new("o", 60, 40, pois, LabelSize::new(4, 4)).unwrap();
        assert_eq!(processing_order(&s, LabelOrder::LeftToRightNearFirst), vec![1, 2, 0]);
        assert_eq!(processing_order(&s, LabelOrder::Index), vec![0, 1, 2]);
    }

    #[test]
    fn cache_does_not_change_result() {
        let g = GrayMap::from_fn(50, 30, |x, y| ((x * 5 + y * 11) % 9) as f64 / 8.0).unwrap();
        let s = Scene::new(
            "k",
            50,
            30,
            vec![Point::new(10.0, 10.0), Point::new(30.0, 20.0), Point::new(31.0, 8.0)],
            LabelSize::new(8, 4),
        )
        .unwrap();
        let maps = EnergyMaps::from_maps(&g, &GrayMap::zeros(50, 30)).unwrap();
        let cfg = SolverConfig {
            grid_stride: 2,
            ..SolverConfig::default()
        };
        let w = EnergyWeights::paper();
        let plain = GreedySolver::new(&s, &maps, &cfg).unwrap().solve(&w).unwrap();
        let cached = GreedySolver::new(&s, &maps, &cfg)
            .unwrap()
            .with_unary_cache(w.orientation)
            .solve(&w)
            .unwrap();
        assert_eq!(plain, cached);
    }
}
