//! Ego-frame label generation: for each pose, the global map is moved into
//! the vehicle frame and clipped to the perception rectangle.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::element::MapElement;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geom::{clip_to_rect, Point, Pose2D, Rect};
use crate::noise::{apply_noise, scene_rng, NoiseConfig, Trajectory};

/// Default perception rectangle in the ego frame: 60 m along the heading
/// (x) by 30 m across it (y).
pub const DEFAULT_X_RANGE: [f64; 2] = [-30.0, 30.0];
pub const DEFAULT_Y_RANGE: [f64; 2] = [-15.0, 15.0];

pub fn default_perception_range() -> Rect {
    Rect::new(DEFAULT_X_RANGE, DEFAULT_Y_RANGE).expect("static range is valid")
}

/// Vector map in a global metric frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMap")]
pub struct GlobalMap {
    map_id: String,
    elements: Vec<MapElement>,
}

#[derive(Deserialize)]
struct RawMap {
    map_id: String,
    elements: Vec<MapElement>,
}

impl TryFrom<RawMap> for GlobalMap {
    type Error = Error;
    fn try_from(raw: RawMap) -> Result<Self> {
        GlobalMap::new(raw.map_id, raw.elements)
    }
}

impl GlobalMap {
    /// Validates id uniqueness. Pedestrian crossings are closed (first vertex
    /// repeated at the end) if they are not already.
    pub fn new(map_id: impl Into<String>, elements: Vec<MapElement>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &elements {
            if !seen.insert(e.id.as_str()) {
                return Err(Error::InvalidMap(format!(
                    "duplicate element id {:?}",
                    e.id
                )));
            }
        }
        Ok(Self {
            map_id: map_id.into(),
            elements: elements
                .into_iter()
                .map(MapElement::closed_if_crossing)
                .collect(),
        })
    }

    pub fn map_id(&self) -> &str {
        &self.map_id
    }

    pub fn elements(&self) -> &[MapElement] {
        &self.elements
    }
}

/// One training sample: map elements in the ego frame of `pose_used`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelFrame {
    pub scene_id: String,
    pub frame_index: usize,
    pub pose_used: Pose2D,
    pub elements: Vec<MapElement>,
}

impl LabelFrame {
    pub fn key(&self) -> (&str, usize) {
        (&self.scene_id, self.frame_index)
    }
}

/// Element with a cached bounding box for cheap range rejection.
struct Indexed<'a> {
    element: &'a MapElement,
    min: Point,
    max: Point,
}

fn index(map: &GlobalMap) -> Vec<Indexed<'_>> {
    map.elements
        .iter()
        .map(|e| {
            let mut min = Point::new(f64::INFINITY, f64::INFINITY);
            let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
            for p in e.points() {
                min = Point::new(min.x.min(p.x), min.y.min(p.y));
                max = Point::new(max.x.max(p.x), max.y.max(p.y));
            }
            Indexed {
                element: e,
                min,
                max,
            }
        })
        .collect()
}

fn rect_radius(rect: &Rect) -> f64 {
    let dx = rect.x_min.abs().max(rect.x_max.abs());
    let dy = rect.y_min.abs().max(rect.y_max.abs());
    dx.hypot(dy)
}

fn frame_for_pose(
    indexed: &[Indexed<'_>],
    radius: f64,
    rect: &Rect,
    scene_id: &str,
    frame_index: usize,
    pose: &Pose2D,
) -> LabelFrame {
    let mut elements = Vec::new();
    for ix in indexed {
        // Distance from the pose to the element's bounding box.
        let dx = (ix.min.x - pose.x).max(pose.x - ix.max.x).max(0.0);
        let dy = (ix.min.y - pose.y).max(pose.y - ix.max.y).max(0.0);
        if dx.hypot(dy) > radius {
            continue;
        }
        let ego = ix.element.to_ego(pose);
        let pieces = clip_to_rect(&ego.geometry, rect);
        let split = pieces.len() > 1;
        for (k, geometry) in pieces.into_iter().enumerate() {
            let id = if split {
                format!("{}#{k}", ix.element.id)
            } else {
                ix.element.id.clone()
            };
            elements.push(MapElement::new(id, ix.element.class, geometry));
        }
    }
    LabelFrame {
        scene_id: scene_id.to_string(),
        frame_index,
        pose_used: *pose,
        elements,
    }
}

/// One [`LabelFrame`] per pose. Elements split by clipping become separate
/// elements with ids `"<id>#<k>"`; frames without elements are kept.
pub fn generate_labels(
    map: &GlobalMap,
    traj: &Trajectory,
    rect: &Rect,
    exec: Execution,
) -> Vec<LabelFrame> {
    let indexed = index(map);
    let radius = rect_radius(rect);
    exec.map_indexed(traj.poses(), |i, pose| {
        frame_for_pose(&indexed, radius, rect, traj.scene_id(), i, pose)
    })
}

/// Clean and noise-distorted labels generated from the same trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortedLabels {
    pub noisy_trajectory: Trajectory,
    /// Whether the noise scheduler altered this scene at all.
    pub altered: bool,
    pub pairs: Vec<(LabelFrame, LabelFrame)>,
}

impl DistortedLabels {
    pub fn clean(&self) -> impl Iterator<Item = &LabelFrame> {
        self.pairs.iter().map(|(c, _)| c)
    }

    pub fn noisy(&self) -> impl Iterator<Item = &LabelFrame> {
        self.pairs.iter().map(|(_, n)| n)
    }
}

/// Noises the trajectory (RNG derived from `cfg.seed` and the scene id) and
/// generates label frames under both the clean and the noisy poses.
pub fn distorted_label_pair(
    map: &GlobalMap,
    traj: &Trajectory,
    cfg: &NoiseConfig,
    rect: &Rect,
    exec: Execution,
) -> Result<DistortedLabels> {
    let mut rng = scene_rng(cfg.seed, traj.scene_id());
    let outcome = apply_noise(traj, cfg, &mut rng)?;
    let clean = generate_labels(map, traj, rect, exec);
    let noisy = generate_labels(map, &outcome.trajectory, rect, exec);
    Ok(DistortedLabels {
        altered: outcome.altered(),
        noisy_trajectory: outcome.trajectory,
        pairs: clean.into_iter().zip(noisy).collect(),
    })
}

/// [`distorted_label_pair`] over several scenes; scenes are processed in
/// parallel and the result keeps input order.
pub fn distort_scenes(
    map: &GlobalMap,
    trajectories: &[Trajectory],
    cfg: &NoiseConfig,
    rect: &Rect,
    exec: Execution,
) -> Result<Vec<DistortedLabels>> {
    cfg.validate()?;
    // Frames inside a scene run sequentially when scenes already fan out.
    let inner = if trajectories.len() > 1 {
        Execution::Sequential
    } else {
        exec
    };
    exec.try_map(trajectories, |t| {
        distorted_label_pair(map, t, cfg, rect, inner)
    })
}
