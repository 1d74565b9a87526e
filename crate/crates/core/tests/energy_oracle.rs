mod common;

use common::*;
use proptest::prelude::*;
use streetlabel::energy::*;
use streetlabel::guidance::GuidanceBundle;
use streetlabel::raster::{line_trace, GrayMap, LabelSize, Point};
use streetlabel::scene::{Layout, Scene};

#[test]
fn terms_match_brute_force_on_random_fixtures() {
    for seed in 0..200 {
        let f = random_fixture(seed, 32, 3);
        for mode in [OrientationMode::AsWritten, OrientationMode::PreferVertical] {
            let w = EnergyWeights::paper();
            let w = EnergyWeights { orientation: mode, ..w };
            let maps = EnergyMaps::from_maps(&f.guidance, &f.edges).unwrap();
            let b = maps.breakdown(&f.scene, &f.layout, &w).unwrap();
            let oracle = brute_terms(&f.scene, &f.layout, &f.guidance, &f.edges, mode);
            let got = b.terms();
            for i in 0..5 {
                assert_eq!(got[i], oracle[i], "seed {seed} term {}", EnergyWeights::NAMES[i]);
            }
            for i in 5..7 {
                assert!(
                    relative_close(got[i], oracle[i], 1e-9),
                    "seed {seed} term {}: {} vs {}",
                    EnergyWeights::NAMES[i],
                    got[i],
                    oracle[i]
                );
            }
            assert!(relative_close(b.total, weighted(&oracle, &w), 1e-12));
        }
    }
}

#[test]
fn free_functions_agree_with_breakdown() {
    for seed in 300..340 {
        let f = random_fixture(seed, 32, 3);
        let bundle = GuidanceBundle::new(f.guidance.clone(), f.edges.clone()).unwrap();
        let b = total_energy(&f.scene, &f.layout, &bundle, &EnergyWeights::paper()).unwrap();
        assert_eq!(e_label_guidance(&f.scene, &f.layout, &f.guidance).unwrap(), b.label_guidance);
        assert_eq!(e_label_edge(&f.scene, &f.layout, &f.edges).unwrap(), b.label_edge);
        assert_eq!(e_label_intersection(&f.scene, &f.layout), b.label_overlap);
        assert_eq!(e_line_guidance(&f.scene, &f.layout, &f.guidance).unwrap(), b.line_guidance);
        assert_eq!(e_line_intersection(&f.scene, &f.layout), b.line_crossing);
        assert_eq!(e_line_length(&f.scene, &f.layout), b.line_length);
        assert_eq!(
            e_line_orientation(&f.scene, &f.layout, OrientationMode::PreferVertical),
            b.line_orientation
        );
    }
}

#[test]
fn non_dyadic_guidance_within_rounding() {
    let mut r = rng(99);
    for seed in 0..30 {
        let f = random_fixture(1000 + seed, 32, 3);
        let (w, h) = f.scene.dims();
        let g = GrayMap::from_fn(w, h, |_, _| rand::Rng::random::<f64>(&mut r)).unwrap();
        let t = brute_terms(&f.scene, &f.layout, &g, &f.edges, OrientationMode::PreferVertical);
        assert!(relative_close(e_label_guidance(&f.scene, &f.layout, &g).unwrap(), t[0], 1e-12));
        assert!(relative_close(e_line_guidance(&f.scene, &f.layout, &g).unwrap(), t[3], 1e-12));
    }
}

#[test]
fn trace_matches_closed_form() {
    for ax in -3..12i64 {
        for ay in -3..12i64 {
            for (bx, by) in [(0, 0), (7, 2), (2, 7), (-1, 9), (11, -2), (5, 5), (4, 8), (9, 4)] {
                assert_eq!(
                    line_trace((ax, ay), (bx, by)),
                    trace_oracle((ax, ay), (bx, by)),
                    "({ax},{ay})->({bx},{by})"
                );
            }
        }
    }
}

#[test]
fn documented_examples() {
    let s = Scene::new("d", 40, 30, vec![Point::new(10.0, 10.0)], LabelSize::new(8, 4)).unwrap();
    let ones = GrayMap::filled(40, 30, 1.0);
    let inside = Layout::new(vec![Point::new(20.0, 15.0)]);
    assert_eq!(e_label_guidance(&s, &inside, &ones).unwrap(), 1.0);
    assert_eq!(e_label_guidance(&s, &inside, &GrayMap::zeros(40, 30)).unwrap(), 0.0);

    let mut edges = GrayMap::zeros(40, 30);
    for x in 17..22 {
        edges.set(x, 15, 1.0);
    }
    assert_eq!(e_label_edge(&s, &inside, &edges).unwrap(), 5.0 / 32.0);

    let two = Scene::new("d2", 40, 30, vec![Point::new(5.0, 5.0); 2], LabelSize::new(8, 4)).unwrap();
    assert_eq!(e_label_intersection(&two, &Layout::new(vec![Point::new(20.0, 15.0); 2])), 1.0);
    assert_eq!(
        e_label_intersection(&two, &Layout::new(vec![Point::new(10.0, 15.0), Point::new(30.0, 15.0)])),
        0.0
    );

    let offset = Scene::new("d3", 40, 30, vec![Point::new(10.0, 10.0)], LabelSize::new(2, 2)).unwrap();
    assert_eq!(e_line_length(&offset, &Layout::new(vec![Point::new(13.0, 14.0)])), 5.0);
    let vertical = Layout::new(vec![Point::new(10.0, 25.0)]);
    assert_eq!(e_line_orientation(&offset, &vertical, OrientationMode::AsWritten), 1.0);
    assert_eq!(e_line_orientation(&offset, &vertical, OrientationMode::PreferVertical), 0.0);
    let horizontal = Layout::new(vec![Point::new(30.0, 10.0)]);
    assert_eq!(e_line_orientation(&offset, &horizontal, OrientationMode::AsWritten), 0.0);
    let at_poi = Layout::new(vec![Point::new(10.0, 10.0)]);
    assert_eq!(e_line_length(&offset, &at_poi), 0.0);
    assert_eq!(e_line_orientation(&offset, &at_poi, OrientationMode::PreferVertical), 0.0);
    assert_eq!(e_line_guidance(&offset, &at_poi, &ones).unwrap(), 0.0);
}

#[test]
fn two_lines_crossing_at_one_pixel() {
    let s = Scene::new(
        "x",
        30,
        30,
        vec![Point::new(5.5, 15.5), Point::new(15.5, 5.5)],
        LabelSize::new(1, 1),
    )
    .unwrap();
    let l = Layout::new(vec![Point::new(25.5, 15.5), Point::new(15.5, 25.5)]);
    assert_eq!(e_line_intersection(&s, &l), 1.0);
    let parallel = Layout::new(vec![Point::new(25.5, 15.5), Point::new(25.5, 5.5)]);
    assert_eq!(e_line_intersection(&s, &parallel), 0.0);
}

#[test]
fn all_zero_weights_give_zero_total() {
    let f = random_fixture(7, 32, 3);
    let b = EnergyMaps::from_maps(&f.guidance, &f.edges)
        .unwrap()
        .breakdown(&f.scene, &f.layout, &EnergyWeights::zero())
        .unwrap();
    assert_eq!(b.total, 0.0);
}

#[test]
fn dimension_mismatch_is_reported() {
    let f = random_fixture(3, 32, 2);
    let g = GrayMap::zeros(f.scene.width + 1, f.scene.height);
    assert!(e_label_guidance(&f.scene, &f.layout, &g).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn total_scales_linearly(seed in 0u64..10_000) {
        let f = random_fixture(seed, 24, 3);
        let maps = EnergyMaps::from_maps(&f.guidance, &f.edges).unwrap();
        let mut r = rng(seed);
        let w = random_weights(&mut r);
        let a = maps.breakdown(&f.scene, &f.layout, &w).unwrap().total;
        let b = maps.breakdown(&f.scene, &f.layout, &w.scaled(2.0)).unwrap().total;
        prop_assert!(relative_close(b, 2.0 * a, 1e-12));
    }

    #[test]
    fn pair_terms_ignore_label_order(seed in 0u64..10_000) {
        let f = random_fixture(seed, 24, 3);
        let mut pois = f.scene.pois.clone();
        let mut pos = f.layout.positions.clone();
        pois.reverse();
        pos.reverse();
        let s2 = Scene::new("r", f.scene.width, f.scene.height, pois, f.scene.label_size).unwrap();
        let l2 = Layout::new(pos);
        prop_assert_eq!(e_label_intersection(&f.scene, &f.layout), e_label_intersection(&s2, &l2));
        prop_assert_eq!(e_line_intersection(&f.scene, &f.layout), e_line_intersection(&s2, &l2));
    }

    #[test]
    fn total_is_monotone_in_each_weight(seed in 0u64..10_000, i in 0usize..7) {
        let f = random_fixture(seed, 24, 3);
        let maps = EnergyMaps::from_maps(&f.guidance, &f.edges).unwrap();
        let mut r = rng(seed);
        let w = random_weights(&mut r);
        let mut a = w.to_array();
        a[i] += 0.5;
        let bigger = EnergyWeights::from_array(a, w.orientation);
        let e0 = maps.breakdown(&f.scene, &f.layout, &w).unwrap().total;
        let e1 = maps.breakdown(&f.scene, &f.layout, &bigger).unwrap().total;
        prop_assert!(e1 >= e0);
    }

    #[test]
    fn translation_covariance(seed in 0u64..10_000, dx in 0usize..6, dy in 0usize..6) {
        let f = random_fixture(seed, 24, 3);
        let (w, h) = f.scene.dims();
        let (w2, h2) = (w + dx, h + dy);
        let shift = |m: &GrayMap| GrayMap::from_fn(w2, h2, |x, y| if x >= dx && y >= dy { m.get(x - dx, y - dy) } else { 0.0 }).unwrap();
        let pois = f.scene.pois.iter().map(|p| p.offset(dx as f64, dy as f64)).collect();
        let s2 = Scene::new("t", w2, h2, pois, f.scene.label_size).unwrap();
        let l2 = Layout::new(f.layout.positions.iter().map(|p| p.offset(dx as f64, dy as f64)).collect());
        let a = EnergyMaps::from_maps(&f.guidance, &f.edges).unwrap().breakdown(&f.scene, &f.layout, &EnergyWeights::paper()).unwrap();
        let b = EnergyMaps::from_maps(&shift(&f.guidance), &shift(&f.edges)).unwrap().breakdown(&s2, &l2, &EnergyWeights::paper()).unwrap();
        let (ta, tb) = (a.terms(), b.terms());
        for i in 0..5 {
            prop_assert_eq!(ta[i], tb[i]);
        }
        for i in 5..7 {
            prop_assert!(relative_close(ta[i], tb[i], 1e-9));
        }
    }
}
