use locnoise::geom::{clip_to_rect, resample_arc_length, resample_max_spacing, POINT_EPS};
use locnoise::metric::{
    aggregate_stats, assign, chamfer, hungarian, resampled, ring_evaluate, split_into_rings,
    RingSpec,
};
use locnoise::noise::{noise_offsets, scene_rng, NoiseConfig, NoiseKind};
use locnoise::{Point, Polyline, Pose2D, Rect, Trajectory};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Point> {
    (-40.0..40.0f64, -40.0..40.0f64).prop_map(|(x, y)| Point::new(x, y))
}

fn polyline() -> impl Strategy<Value = Polyline> {
    prop::collection::vec(point(), 2..8)
        .prop_filter_map("degenerate polyline", Polyline::from_points_dedup)
}

fn cost_matrix() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..6usize, 1..6usize)
        .prop_flat_map(|(n, m)| prop::collection::vec(prop::collection::vec(0.0..10.0f64, m), n))
}

/// Minimum total cost over every injective assignment of the smaller side.
fn brute_min(cost: &[Vec<f64>]) -> f64 {
    fn go(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
        if row == cost.len() {
            *best = best.min(acc);
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                go(cost, row + 1, used, acc + cost[row][j], best);
                used[j] = false;
            }
        }
    }
    let (n, m) = (cost.len(), cost[0].len());
    let t: Vec<Vec<f64>>;
    let c = if n > m {
        t = (0..m)
            .map(|j| (0..n).map(|i| cost[i][j]).collect())
            .collect();
        &t
    } else {
        cost
    };
    let mut best = f64::INFINITY;
    go(c, 0, &mut vec![false; c[0].len()], 0.0, &mut best);
    best
}

fn greedy(cost: &[Vec<f64>]) -> f64 {
    let mut cells: Vec<(f64, usize, usize)> = cost
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &c)| (c, i, j)))
        .collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut ri, mut cj) = (vec![false; cost.len()], vec![false; cost[0].len()]);
    let mut total = 0.0;
    for (c, i, j) in cells {
        if !ri[i] && !cj[j] {
            ri[i] = true;
            cj[j] = true;
            total += c;
        }
    }
    total
}

proptest! {
    #[test]
    fn chamfer_symmetric_and_non_negative(a in polyline(), b in polyline()) {
        let (ab, ba) = (chamfer(&a, &b), chamfer(&b, &a));
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert_eq!(chamfer(&a, &a), 0.0);
    }

    #[test]
    fn chamfer_triangle_bound_under_shift(a in polyline(), dx in -3.0..3.0f64, dy in -3.0..3.0f64) {
        let shifted = a.map_points(|p| p + Point::new(dx, dy)).unwrap();
        prop_assert!(chamfer(&a, &shifted) <= dx.hypot(dy) + 1e-9);
    }

    #[test]
    fn resampling_keeps_vertices_and_spacing(a in polyline()) {
        for r in [resample_max_spacing(&a, 1.0).unwrap(), resample_arc_length(&a, 1.0).unwrap()] {
            for w in r.points().windows(2) {
                prop_assert!(w[0].distance(w[1]) <= 1.0 + 1e-9);
            }
            let mut it = r.points().iter();
            for v in a.points() {
                prop_assert!(it.any(|p| p == v), "vertex {:?} dropped", v);
            }
            prop_assert!((r.length() - a.length()).abs() < 1e-9);
        }
    }

    #[test]
    fn hungarian_is_optimal(cost in cost_matrix()) {
        let sol = hungarian(&cost);
        let total: f64 = sol.iter().enumerate().filter_map(|(i, j)| j.map(|j| cost[i][j])).sum();
        let matched = sol.iter().flatten().count();
        prop_assert_eq!(matched, cost.len().min(cost[0].len()));
        prop_assert!((total - brute_min(&cost)).abs() < 1e-9);
        prop_assert!(total <= greedy(&cost) + 1e-9);
    }

    #[test]
    fn assign_respects_reject(cost in cost_matrix(), reject in 0.0..10.0f64) {
        let pairs = assign(&cost, Some(reject));
        for &(i, j, c) in &pairs {
            prop_assert!(c <= reject);
            prop_assert_eq!(c, cost[i][j]);
        }
        let mut rows: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        rows.dedup();
        prop_assert_eq!(rows.len(), pairs.len());
    }

    #[test]
    fn ring_split_partitions_points(a in polyline(), w in 2.0..10.0f64, n in 1..8usize) {
        let spec = RingSpec::new(w, n).unwrap();
        let pts = resampled(&a);
        let subs = split_into_rings(&pts, &spec);
        for s in &subs {
            prop_assert!(!s.points.is_empty());
            for q in &s.points {
                let r = q.norm();
                prop_assert!(r >= spec.inner_radius(s.ring) - POINT_EPS);
                prop_assert!(r < spec.outer_radius(s.ring) + POINT_EPS);
            }
        }
        let kept: usize = subs
            .iter()
            .flat_map(|s| &s.sources)
            .filter(|src| matches!(src, locnoise::metric::PointSource::Original(_)))
            .count();
        let inside = pts.iter().filter(|p| spec.ring_of(**p).is_some()).count();
        prop_assert_eq!(kept, inside);
    }

    #[test]
    fn ring_report_merge_is_concatenation(
        pairs in prop::collection::vec((polyline(), polyline()), 1..5),
    ) {
        let spec = RingSpec::default();
        let refs: Vec<(&Polyline, &Polyline)> = pairs.iter().map(|(a, b)| (a, b)).collect();
        let whole = ring_evaluate(&refs, &spec).unwrap();
        let mut merged = ring_evaluate(&refs[..1], &spec).unwrap();
        merged.merge(ring_evaluate(&refs[1..], &spec).unwrap());
        prop_assert_eq!(whole, merged);
    }

    #[test]
    fn stats_are_ordered_and_recomputable(xs in prop::collection::vec(-100.0..100.0f64, 1..50)) {
        let s = aggregate_stats(&xs);
        prop_assert_eq!(s.count, xs.len());
        let (min, q1, med, q3, max) =
            (s.min.unwrap(), s.q1.unwrap(), s.median.unwrap(), s.q3.unwrap(), s.max.unwrap());
        prop_assert!(min <= q1 && q1 <= med && med <= q3 && q3 <= max);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        prop_assert!((s.mean.unwrap() - mean).abs() < 1e-9);
        let mut rev = xs.clone();
        rev.reverse();
        let r = aggregate_stats(&rev);
        prop_assert_eq!((r.median, r.q1, r.q3, r.min, r.max), (s.median, s.q1, s.q3, s.min, s.max));
    }

    #[test]
    fn clipped_pieces_stay_inside(a in polyline()) {
        let rect = Rect::new([-30.0, 30.0], [-15.0, 15.0]).unwrap();
        for piece in clip_to_rect(&a, &rect) {
            for p in piece.points() {
                prop_assert!(rect.contains(*p, 1e-9));
            }
        }
    }

    #[test]
    fn offsets_respect_bounds(
        seed in any::<u64>(),
        kind in prop_oneof![Just(NoiseKind::Ramp), Just(NoiseKind::Gaussian), Just(NoiseKind::Perlin)],
        eps_l in 0.0..3.0f64,
        eps_r in 0.0..5.0f64,
    ) {
        let poses = (0..60).map(|i| Pose2D::new(i as f64 * 0.1, i as f64, 0.02 * (i * i) as f64, 0.04 * i as f64)).collect();
        let traj = Trajectory::new("prop", poses).unwrap();
        let cfg = NoiseConfig {
            kind,
            eps_l,
            eps_r,
            sigma_l: eps_l / 2.0,
            sigma_r: eps_r / 2.0,
            ..NoiseConfig::default()
        };
        for o in noise_offsets(&traj, &cfg, &mut scene_rng(seed, "prop")).unwrap() {
            prop_assert!(o.translation() <= eps_l);
            prop_assert!(o.dtheta.abs() <= cfg.eps_r_rad());
        }
    }
}
