//! Deterministic synthetic road scenes: a global map plus a trajectory
//! driving one lane's centerline at 10 m/s, sampled at 10 Hz.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::element::{ElementClass, MapElement};
use crate::error::{Error, Result};
use crate::geom::{Point, Polyline, Pose2D};
use crate::labelgen::GlobalMap;
use crate::noise::Trajectory;

pub const SPEED: f64 = 10.0;
pub const RATE_HZ: f64 = 10.0;

/// Vertex spacing of curved elements, meters.
const CURVE_STEP: f64 = 1.0;
/// Gap between a junction edge and its pedestrian crossing, and its depth.
const CROSSING_GAP: f64 = 1.0;
const CROSSING_DEPTH: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneKind {
    #[default]
    StraightRoad,
    CurvedRoad,
    Intersection,
}

impl SceneKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SceneKind::StraightRoad => "straight_road",
            SceneKind::CurvedRoad => "curved_road",
            SceneKind::Intersection => "intersection",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneTemplate {
    pub kind: SceneKind,
    pub lane_width: f64,
    pub length: f64,
    pub num_lanes: usize,
    pub seed: u64,
    /// Curvature of the road's reference line, 1/m; `curved_road` only.
    pub curvature: f64,
}

impl Default for SceneTemplate {
    fn default() -> Self {
        Self {
            kind: SceneKind::StraightRoad,
            lane_width: 3.5,
            length: 100.0,
            num_lanes: 1,
            seed: 0,
            curvature: 0.01,
        }
    }
}

impl SceneTemplate {
    pub fn width(&self) -> f64 {
        self.lane_width * self.num_lanes as f64
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.lane_width <= 0.0 || !self.lane_width.is_finite() {
            return bad(format!(
                "lane_width must be positive, got {}",
                self.lane_width
            ));
        }
        if self.length <= 0.0 || !self.length.is_finite() {
            return bad(format!("length must be positive, got {}", self.length));
        }
        if self.num_lanes == 0 {
            return bad("num_lanes must be at least 1".into());
        }
        match self.kind {
            SceneKind::StraightRoad => {}
            SceneKind::CurvedRoad => {
                if !self.curvature.is_finite() || self.curvature.abs() * self.width() / 2.0 >= 1.0 {
                    return bad(format!(
                        "curvature {} too tight for a {} m wide road",
                        self.curvature,
                        self.width()
                    ));
                }
            }
            SceneKind::Intersection => {
                if self.num_lanes < 2 {
                    return bad("intersection needs num_lanes >= 2".into());
                }
                let needed = self.width() + 2.0 * (CROSSING_GAP + CROSSING_DEPTH);
                if self.length <= needed {
                    return bad(format!("intersection length must exceed {needed} m"));
                }
            }
        }
        Ok(())
    }

    pub fn scene_id(&self) -> String {
        format!("{}_{}", self.kind.as_str(), self.seed)
    }
}

/// Road reference line: a straight or constant-curvature arc starting at
/// `origin` with heading `heading`. Lateral offsets are positive to the left.
#[derive(Debug, Clone, Copy)]
struct Road {
    origin: Point,
    heading: f64,
    curvature: f64,
    length: f64,
    width: f64,
    lanes: usize,
}

impl Road {
    fn heading_at(&self, s: f64) -> f64 {
        self.heading + self.curvature * s
    }

    fn at(&self, s: f64, d: f64) -> Point {
        let k = self.curvature;
        let local = if k == 0.0 {
            Point::new(s, 0.0)
        } else {
            Point::new((k * s).sin() / k, (1.0 - (k * s).cos()) / k)
        };
        let h = self.heading_at(s);
        let normal = Point::new(-h.sin(), h.cos());
        self.origin + local.rotate(self.heading) + normal * d
    }

    fn line(&self, d: f64, s0: f64, s1: f64) -> Polyline {
        let pieces = if self.curvature == 0.0 {
            1
        } else {
            ((s1 - s0) / CURVE_STEP).ceil().max(1.0) as usize
        };
        let pts = (0..=pieces).map(|i| self.at(s0 + (s1 - s0) * i as f64 / pieces as f64, d));
        Polyline::from_points_dedup(pts).expect("road lines have positive length")
    }

    fn lane_center(&self, lane: usize, lane_width: f64) -> f64 {
        -self.width / 2.0 + (lane as f64 + 0.5) * lane_width
    }

    fn crossing(&self, s0: f64, s1: f64) -> Polyline {
        let h = self.width / 2.0;
        Polyline::from_points_dedup([
            self.at(s0, -h),
            self.at(s1, -h),
            self.at(s1, h),
            self.at(s0, h),
            self.at(s0, -h),
        ])
        .expect("crossing has positive area")
    }
}

struct Builder {
    elements: Vec<MapElement>,
}

impl Builder {
    fn push(&mut self, prefix: &str, class: ElementClass, geometry: Polyline) {
        let id = format!("{prefix}_{}_{}", class.short_name(), self.elements.len());
        self.elements.push(MapElement::new(id, class, geometry));
    }

    /// Boundaries and dividers over each `[s0, s1]` span, centerlines over the
    /// whole road. Dividers alternate dashed/solid starting from `first`.
    fn road(
        &mut self,
        prefix: &str,
        road: &Road,
        lane_width: f64,
        spans: &[(f64, f64)],
        first: ElementClass,
    ) {
        let half = road.width / 2.0;
        let second = match first {
            ElementClass::DividerDashed => ElementClass::DividerSolid,
            _ => ElementClass::DividerDashed,
        };
        for &(s0, s1) in spans {
            self.push(prefix, ElementClass::Boundary, road.line(-half, s0, s1));
            self.push(prefix, ElementClass::Boundary, road.line(half, s0, s1));
            for i in 1..road.lanes {
                let class = if i % 2 == 1 { first } else { second };
                self.push(
                    prefix,
                    class,
                    road.line(-half + i as f64 * lane_width, s0, s1),
                );
            }
        }
        for lane in 0..road.lanes {
            let d = road.lane_center(lane, lane_width);
            self.push(
                prefix,
                ElementClass::Centerline,
                road.line(d, 0.0, road.length),
            );
        }
    }
}

fn trajectory(scene_id: String, road: &Road, d: f64) -> Result<Trajectory> {
    // Lane curvature at offset d, so that stepping one lane-arc-length
    // meter per sample keeps the 10 m/s speed along the lane itself.
    let lane_k = road.curvature / (1.0 - road.curvature * d);
    let step = SPEED / RATE_HZ;
    let lane_length = if road.curvature == 0.0 {
        road.length
    } else {
        road.length * (1.0 - road.curvature * d)
    };
    let n = (lane_length / step).floor() as usize + 1;
    let poses = (0..n)
        .map(|i| {
            let u = i as f64 * step;
            // Reference-line arc length whose offset point lies u along the lane.
            let s = if road.curvature == 0.0 {
                u
            } else {
                u * lane_k / road.curvature
            };
            let p = road.at(s, d);
            Pose2D::new(i as f64 / RATE_HZ, p.x, p.y, road.heading_at(s))
        })
        .collect();
    Trajectory::new(scene_id, poses)
}

/// Builds the map and ego trajectory described by `tpl`. The seed selects
/// the lane driven by the ego vehicle.
pub fn build_scene(tpl: &SceneTemplate) -> Result<(GlobalMap, Trajectory)> {
    tpl.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(tpl.seed);
    let ego_lane = rng.random_range(0..tpl.num_lanes);
    let width = tpl.width();
    let main = Road {
        origin: Point::ORIGIN,
        heading: 0.0,
        curvature: if tpl.kind == SceneKind::CurvedRoad {
            tpl.curvature
        } else {
            0.0
        },
        length: tpl.length,
        width,
        lanes: tpl.num_lanes,
    };
    let mut b = Builder {
        elements: Vec::new(),
    };
    match tpl.kind {
        SceneKind::StraightRoad | SceneKind::CurvedRoad => {
            b.road(
                "main",
                &main,
                tpl.lane_width,
                &[(0.0, tpl.length)],
                ElementClass::DividerDashed,
            );
        }
        SceneKind::Intersection => {
            let c = tpl.length / 2.0;
            let cross = Road {
                origin: Point::new(c, -c),
                heading: FRAC_PI_2,
                ..main
            };
            let (lo, hi) = (c - width / 2.0, c + width / 2.0);
            let spans = [(0.0, lo), (hi, tpl.length)];
            b.road(
                "main",
                &main,
                tpl.lane_width,
                &spans,
                ElementClass::DividerDashed,
            );
            b.road(
                "cross",
                &cross,
                tpl.lane_width,
                &spans,
                ElementClass::DividerSolid,
            );
            for road in [&main, &cross] {
                let near = lo - CROSSING_GAP;
                let far = hi + CROSSING_GAP;
                b.push(
                    "ped",
                    ElementClass::PedCrossing,
                    road.crossing(near - CROSSING_DEPTH, near),
                );
                b.push(
                    "ped",
                    ElementClass::PedCrossing,
                    road.crossing(far, far + CROSSING_DEPTH),
                );
            }
        }
    }
    let scene_id = tpl.scene_id();
    let map = GlobalMap::new(scene_id.clone(), b.elements)?;
    let traj = trajectory(scene_id, &main, main.lane_center(ego_lane, tpl.lane_width))?;
    Ok((map, traj))
}
