//! JSON and JSON-lines formats.
//!
//! - map: `{"map_id", "elements": [{"id", "class", "points": [[x, y], …]}]}`
//! - trajectory: `{"scene_id", "poses": [{"t", "x", "y", "theta"}]}`, or an
//!   array of such objects for several scenes
//! - label frames: one `{"scene_id", "frame_index", "pose_used", "elements"}`
//!   object per line
//! - prediction frames: as label frames without `pose_used`; each element
//!   may carry a `confidence` (default 1.0)
//!
//! Coordinates are written rounded to 1 mm, headings and timestamps to 1e-6.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::element::MapElement;
use crate::error::{Error, Result};
use crate::geom::{quantize, Polyline, Pose2D};
use crate::labelgen::{GlobalMap, LabelFrame};
use crate::metric::Prediction;
use crate::noise::Trajectory;

pub const COORD_STEP: f64 = 1e-3;
pub const ANGLE_STEP: f64 = 1e-6;

/// Rounds vertices to [`COORD_STEP`]; `None` if the polyline collapses to a
/// single point.
pub fn quantize_polyline(p: &Polyline) -> Option<Polyline> {
    Polyline::from_points_dedup(p.points().iter().map(|q| q.quantized(COORD_STEP)))
}

pub fn quantize_element(e: &MapElement) -> Option<MapElement> {
    quantize_polyline(&e.geometry).map(|g| MapElement::new(e.id.clone(), e.class, g))
}

pub fn quantize_pose(p: &Pose2D) -> Pose2D {
    Pose2D::new(
        quantize(p.t, ANGLE_STEP),
        quantize(p.x, COORD_STEP),
        quantize(p.y, COORD_STEP),
        quantize(p.theta, ANGLE_STEP),
    )
}

fn quantize_elements(elements: &[MapElement]) -> Vec<MapElement> {
    elements
        .iter()
        .filter_map(|e| {
            let q = quantize_element(e);
            if q.is_none() {
                log::debug!("dropping sub-millimeter element {:?}", e.id);
            }
            q
        })
        .collect()
}

pub fn quantize_frame(f: &LabelFrame) -> LabelFrame {
    LabelFrame {
        scene_id: f.scene_id.clone(),
        frame_index: f.frame_index,
        pose_used: quantize_pose(&f.pose_used),
        elements: quantize_elements(&f.elements),
    }
}

pub fn quantize_trajectory(t: &Trajectory) -> Result<Trajectory> {
    Trajectory::new(t.scene_id(), t.poses().iter().map(quantize_pose).collect())
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        message: e.to_string(),
    }
}

pub fn map_to_json(map: &GlobalMap) -> Result<String> {
    let q = GlobalMap::new(map.map_id(), quantize_elements(map.elements()))?;
    Ok(serde_json::to_string_pretty(&q).expect("serializable") + "\n")
}

pub fn parse_map(text: &str) -> Result<GlobalMap> {
    serde_json::from_str(text).map_err(json_error)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TrajectoryDoc {
    One(Trajectory),
    Many(Vec<Trajectory>),
}

/// A single trajectory is written as an object, several as an array.
pub fn trajectories_to_json(trajs: &[Trajectory]) -> Result<String> {
    let q: Vec<Trajectory> = trajs
        .iter()
        .map(quantize_trajectory)
        .collect::<Result<_>>()?;
    let text = match q.as_slice() {
        [one] => serde_json::to_string_pretty(one),
        many => serde_json::to_string_pretty(many),
    };
    Ok(text.expect("serializable") + "\n")
}

pub fn parse_trajectories(text: &str) -> Result<Vec<Trajectory>> {
    // Parse as a value first so errors keep their line numbers; untagged
    // enums only report a generic mismatch.
    let value: serde_json::Value = serde_json::from_str(text).map_err(json_error)?;
    let doc = if value.is_array() {
        serde_json::from_value::<Vec<Trajectory>>(value).map(TrajectoryDoc::Many)
    } else {
        serde_json::from_value::<Trajectory>(value).map(TrajectoryDoc::One)
    }
    .map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    match doc {
        TrajectoryDoc::One(t) => Ok(vec![t]),
        TrajectoryDoc::Many(v) if v.is_empty() => {
            Err(Error::InvalidTrajectory("no trajectories in file".into()))
        }
        TrajectoryDoc::Many(v) => Ok(v),
    }
}

/// One compact JSON document per line.
pub fn to_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("serializable"));
        out.push('\n');
    }
    out
}

/// Parses JSON lines, skipping blank lines; errors carry 1-based line numbers.
pub fn parse_jsonl<T: DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn frames_to_jsonl(frames: &[LabelFrame]) -> String {
    let q: Vec<LabelFrame> = frames.iter().map(quantize_frame).collect();
    to_jsonl(&q)
}

/// Predicted elements of one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionFrame {
    pub scene_id: String,
    pub frame_index: usize,
    pub elements: Vec<Prediction>,
}

/// Anything indexed by `(scene_id, frame_index)`.
pub trait FrameKey {
    fn frame_key(&self) -> (&str, usize);
}

impl FrameKey for LabelFrame {
    fn frame_key(&self) -> (&str, usize) {
        (&self.scene_id, self.frame_index)
    }
}

impl FrameKey for PredictionFrame {
    fn frame_key(&self) -> (&str, usize) {
        (&self.scene_id, self.frame_index)
    }
}

fn keyed<T: FrameKey>(items: &[T], side: &str) -> Result<BTreeMap<(String, usize), usize>> {
    let mut map = BTreeMap::new();
    for (i, item) in items.iter().enumerate() {
        let (s, f) = item.frame_key();
        if map.insert((s.to_string(), f), i).is_some() {
            return Err(Error::FrameMismatch(format!(
                "duplicate frame ({s}, {f}) in {side}"
            )));
        }
    }
    Ok(map)
}

/// Pairs frames by `(scene_id, frame_index)` in the order of `reference`.
/// Frames present on only one side are reported together.
pub fn align_frames<'a, A: FrameKey, B: FrameKey>(
    reference: &'a [A],
    other: &'a [B],
) -> Result<Vec<(&'a A, &'a B)>> {
    let by_ref = keyed(reference, "reference")?;
    let by_other = keyed(other, "other")?;
    let fmt = |keys: Vec<&(String, usize)>| {
        keys.iter()
            .map(|(s, f)| format!("({s}, {f})"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let missing_other: Vec<_> = by_ref
        .keys()
        .filter(|k| !by_other.contains_key(*k))
        .collect();
    let missing_ref: Vec<_> = by_other
        .keys()
        .filter(|k| !by_ref.contains_key(*k))
        .collect();
    if !missing_other.is_empty() || !missing_ref.is_empty() {
        let mut parts = Vec::new();
        if !missing_other.is_empty() {
            parts.push(format!("missing from other: {}", fmt(missing_other)));
        }
        if !missing_ref.is_empty() {
            parts.push(format!("missing from reference: {}", fmt(missing_ref)));
        }
        return Err(Error::FrameMismatch(parts.join("; ")));
    }
    Ok(reference
        .iter()
        .map(|r| {
            let (s, f) = r.frame_key();
            (r, &other[by_other[&(s.to_string(), f)]])
        })
        .collect())
}
