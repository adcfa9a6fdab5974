use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Pose2D;

/// Time-ordered poses of one scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrajectory")]
pub struct Trajectory {
    scene_id: String,
    poses: Vec<Pose2D>,
}

#[derive(Deserialize)]
struct RawTrajectory {
    scene_id: String,
    poses: Vec<Pose2D>,
}

impl TryFrom<RawTrajectory> for Trajectory {
    type Error = Error;
    fn try_from(raw: RawTrajectory) -> Result<Self> {
        Trajectory::new(raw.scene_id, raw.poses)
    }
}

impl Trajectory {
    /// Validates that the trajectory is non-empty with strictly increasing,
    /// finite timestamps. Headings are re-normalized to (-π, π].
    pub fn new(scene_id: impl Into<String>, poses: Vec<Pose2D>) -> Result<Self> {
        if poses.is_empty() {
            return Err(Error::InvalidTrajectory("empty trajectory".into()));
        }
        for (i, p) in poses.iter().enumerate() {
            if ![p.t, p.x, p.y, p.theta].iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidTrajectory(format!(
                    "non-finite value in pose {i}"
                )));
            }
        }
        if let Some(i) = poses
            .windows(2)
            .position(|w| w[1].t.partial_cmp(&w[0].t) != Some(std::cmp::Ordering::Greater))
        {
            return Err(Error::InvalidTrajectory(format!(
                "timestamps not strictly increasing at pose {}",
                i + 1
            )));
        }
        let poses = poses
            .into_iter()
            .map(|p| Pose2D::new(p.t, p.x, p.y, p.theta))
            .collect();
        Ok(Self {
            scene_id: scene_id.into(),
            poses,
        })
    }

    pub(crate) fn from_parts_unchecked(scene_id: String, poses: Vec<Pose2D>) -> Self {
        Self { scene_id, poses }
    }

    pub fn scene_id(&self) -> &str {
        &self.scene_id
    }

    pub fn poses(&self) -> &[Pose2D] {
        &self.poses
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    /// Same timestamps with every pose replaced by `f(pose)`.
    pub fn map_poses(&self, f: impl Fn(&Pose2D) -> Pose2D) -> Trajectory {
        let poses = self
            .poses
            .iter()
            .map(|p| {
                let q = f(p);
                Pose2D::new(p.t, q.x, q.y, q.theta)
            })
            .collect();
        Trajectory::from_parts_unchecked(self.scene_id.clone(), poses)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_timestamps() {
        assert!(Trajectory::new("a", vec![]).is_err());
        let p = |t| Pose2D::new(t, 0.0, 0.0, 0.0);
        assert!(Trajectory::new("a", vec![p(0.0), p(0.0)]).is_err());
        assert!(Trajectory::new("a", vec![p(1.0), p(0.5)]).is_err());
        assert!(Trajectory::new("a", vec![p(0.0), p(f64::NAN)]).is_err());
        assert_eq!(Trajectory::new("a", vec![p(0.0), p(0.1)]).unwrap().len(), 2);
    }

    #[test]
    fn json_validation() {
        let ok = r#"{"scene_id":"s","poses":[{"t":0,"x":1,"y":2,"theta":7.0}]}"#;
        let t: Trajectory = serde_json::from_str(ok).unwrap();
        assert!((t.poses()[0].theta - (7.0 - 2.0 * std::f64::consts::PI)).abs() < 1e-12);
        let bad = r#"{"scene_id":"s","poses":[]}"#;
        assert!(serde_json::from_str::<Trajectory>(bad).is_err());
    }
}
