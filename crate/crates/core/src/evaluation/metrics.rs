use crate::energy::{e_line_intersection, EnergyMaps, EnergyWeights};
use crate::error::{Error, Result};
use crate::raster::{GrayMap, Point};
use crate::scene::{Layout, Scene};

/// Robust per-label center of participant placements.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusPlacement {
    pub layout: Layout,
    /// Points kept per label after outlier removal.
    pub retained: Vec<usize>,
}

/// Removes the two points with the greatest summed distance to the others,
/// one at a time, and returns the centroid of the rest. With fewer than three
/// points the centroid of all of them is returned.
pub fn consensus_point(points: &[Point]) -> (Point, usize) {
    let mut kept: Vec<Point> = points.to_vec();
    if kept.len() >= 3 {
        for _ in 0..2 {
            let isolation = |i: usize| kept.iter().map(|q| kept[i].distance(*q)).sum::<f64>();
            let mut worst = 0;
            let mut worst_sum = isolation(0);
            for i in 1..kept.len() {
                let s = isolation(i);
                if s > worst_sum {
                    worst = i;
                    worst_sum = s;
                }
            }
            kept.remove(worst);
        }
    }
    let n = kept.len().max(1) as f64;
    let sx: f64 = kept.iter().map(|p| p.x).sum();
    let sy: f64 = kept.iter().map(|p| p.y).sum();
    (Point::new(sx / n, sy / n), kept.len())
}

pub fn consensus(participants: &[Layout]) -> Result<ConsensusPlacement> {
    let Some(first) = participants.first() else {
        return Err(Error::EmptyDataset("no participant placements".into()));
    };
    let k = first.len();
    if let Some(u) = participants.iter().position(|l| l.len() != k) {
        return Err(Error::InvalidConfig(format!(
            "participant {u} placed {} labels, expected {k}",
            participants[u].len()
        )));
    }
    if participants.len() < 3 {
        log::warn!("only {} participants; consensus keeps every point", participants.len());
    }
    let (positions, retained) = (0..k)
        .map(|i| consensus_point(&participants.iter().map(|l| l.positions[i]).collect::<Vec<_>>()))
        .unzip();
    Ok(ConsensusPlacement {
        layout: Layout::new(positions),
        retained,
    })
}

/// Mean distance between predicted and consensus label centers over all labels.
pub fn mu_centroid(pairs: &[(&Layout, &Layout)]) -> Result<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (t, (pred, cons)) in pairs.iter().enumerate() {
        if pred.len() != cons.len() {
            return Err(Error::InvalidConfig(format!(
                "image {t}: {} predicted labels vs {} consensus labels",
                pred.len(),
                cons.len()
            )));
        }
        sum += pred.positions.iter().zip(&cons.positions).map(|(p, q)| p.distance(*q)).sum::<f64>();
        n += pred.len();
    }
    Ok(if n == 0 { 0.0 } else { sum / n as f64 })
}

/// Label coverage of the guidance map plus label-label overlap, per label.
pub fn mu_over(items: &[(&Scene, &Layout, &GrayMap)]) -> Result<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (scene, layout, guidance) in items {
        let zeros = GrayMap::zeros(guidance.width(), guidance.height());
        let b = EnergyMaps::from_maps(guidance, &zeros)?.breakdown(scene, layout, &EnergyWeights::zero())?;
        sum += b.label_guidance + b.label_overlap;
        n += layout.len();
    }
    Ok(if n == 0 { 0.0 } else { sum / n as f64 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossings {
    /// Shared leader-line pixels per image.
    pub mean: f64,
    pub total: f64,
}

pub fn mu_int(items: &[(&Scene, &Layout)]) -> Crossings {
    let total: f64 = items.iter().map(|(s, l)| e_line_intersection(s, l)).sum();
    Crossings {
        mean: if items.is_empty() { 0.0 } else { total / items.len() as f64 },
        total,
    }
}

/// Per-image sum of `| |p - m| - gamma |` over non-zero leaders, averaged over images.
pub fn mu_len(items: &[(&Scene, &Layout)], gamma: f64) -> f64 {
    if items.is_empty() {
        return 0.0;
    }
    let total: f64 = items
        .iter()
        .map(|(s, l)| {
            l.positions
                .iter()
                .zip(&s.pois)
                .map(|(p, m)| p.distance(*m))
                .filter(|&d| d > 0.0)
                .map(|d| (d - gamma).abs())
                .fold(0.0, |a, b| a + b)
        })
        .fold(0.0, |a, b| a + b);
    total / items.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::LabelSize;

    #[test]
    fn identical_points_and_symmetric_sets() {
        let same = vec![Point::new(4.0, 5.0); 20];
        assert_eq!(consensus_point(&same), (Point::new(4.0, 5.0), 18));
        let sym = [(-1.0, 0.0), (1.0, 0.0), (0.0, -1.0), (0.0, 1.0), (-2.0, 0.0), (2.0, 0.0)];
        let pts: Vec<Point> = sym.iter().map(|&(x, y)| Point::new(10.0 + x, 20.0 + y)).collect();
        let (c, n) = consensus_point(&pts);
        assert_eq!(n, 4);
        assert!((c.x - 10.0).abs() < 1e-12 && (c.y - 20.0).abs() < 1e-12);
    }

    #[test]
    fn both_outliers_removed() {
        let mut pts: Vec<Point> = (0..19).map(|i| Point::new(100.0 + (i % 5) as f64, 50.0 + (i / 5) as f64)).collect();
        pts.push(Point::new(400.0, 300.0));
        pts.push(Point::new(160.0, 50.0));
        let (c, n) = consensus_point(&pts);
        assert_eq!(n, 19);
        let mean = pts[..19].iter().fold(Point::default(), |a, p| a.offset(p.x / 19.0, p.y / 19.0));
        assert!(c.distance(mean) < 1e-9, "{c:?} vs {mean:?}");
    }

    #[test]
    fn fewer_than_three_keeps_all() {
        assert_eq!(
            consensus_point(&[Point::new(0.0, 0.0), Point::new(2.0, 4.0)]),
            (Point::new(1.0, 2.0), 2)
        );
    }

    #[test]
    fn centroid_offset() {
        let a = Layout::new(vec![Point::new(3.0, 4.0)]);
        let b = Layout::new(vec![Point::new(0.0, 0.0)]);
        assert_eq!(mu_centroid(&[(&a, &b)]).unwrap(), 5.0);
        assert_eq!(mu_centroid(&[(&a, &a)]).unwrap(), 0.0);
    }

    #[test]
    fn coincident_pair_over_is_half() {
        let s = Scene::new("c", 50, 50, vec![Point::new(25.0, 25.0); 2], LabelSize::new(10, 6)).unwrap();
        let l = Layout::new(vec![Point::new(25.0, 25.0); 2]);
        let g = GrayMap::zeros(50, 50);
        assert_eq!(mu_over(&[(&s, &l, &g)]).unwrap(), 0.5);
    }

    #[test]
    fn length_metric() {
        let s = Scene::new("l", 100, 100, vec![Point::new(50.0, 50.0); 2], LabelSize::new(4, 4)).unwrap();
        let l = Layout::new(vec![Point::new(55.0, 50.0), Point::new(50.0, 65.0)]);
        assert_eq!(mu_len(&[(&s, &l)], 10.0), 10.0);
        let naive = Layout::new(s.pois.clone());
        assert_eq!(mu_len(&[(&s, &naive)], 10.0), 0.0);
        assert_eq!(mu_int(&[(&s, &naive)]).total, 0.0);
    }
}
