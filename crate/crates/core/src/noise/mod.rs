//! Localization-noise generators and the per-scene noise scheduler.
//!
//! Three offset patterns are modelled: a ramp that drifts away from the true
//! pose and snaps back (GNSS outage), independent truncated-Gaussian jitter
//! (raw GNSS) and smooth gradient noise (a stable but badly tuned filter).
//! Generators return per-pose offsets; [`apply_noise`] applies them to a
//! trajectory, optionally restricted to a fraction of scenes, and can re-derive
//! headings from the noisy direction of travel.

mod config;
mod gaussian;
mod perlin;
mod ramp;
mod trajectory;

pub use config::{NoiseConfig, NoiseKind, RatioMode};
pub use gaussian::TruncatedNormal;
pub use perlin::GradientNoise2D;
pub use ramp::RampInterval;
pub use trajectory::Trajectory;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geom::{normalize_angle, signed_angle, Point};

/// Additive pose offset (meters, meters, radians).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PoseOffset {
    pub dx: f64,
    pub dy: f64,
    pub dtheta: f64,
}

impl PoseOffset {
    pub const ZERO: PoseOffset = PoseOffset {
        dx: 0.0,
        dy: 0.0,
        dtheta: 0.0,
    };

    pub fn translation(&self) -> f64 {
        self.dx.hypot(self.dy)
    }
}

/// Deterministic RNG for one scene, independent of processing order.
pub fn scene_rng(seed: u64, scene_id: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(scene_id.as_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// Uniform draw on `[lo, hi)`; always consumes exactly one value so the draw
/// sequence does not depend on the bounds.
#[inline]
pub(crate) fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Offsets of the configured kind for every pose of `traj`.
pub fn noise_offsets<R: Rng + ?Sized>(
    traj: &Trajectory,
    cfg: &NoiseConfig,
    rng: &mut R,
) -> Result<Vec<PoseOffset>> {
    cfg.validate()?;
    match cfg.kind {
        NoiseKind::None => Ok(vec![PoseOffset::ZERO; traj.len()]),
        NoiseKind::Ramp => ramp::offsets(traj, cfg, rng),
        NoiseKind::Gaussian => Ok(gaussian::offsets(traj, cfg, rng)),
        NoiseKind::Perlin => perlin::offsets(traj, cfg, rng),
    }
}

fn offset_trajectory(traj: &Trajectory, offsets: &[PoseOffset]) -> Trajectory {
    let poses = traj
        .poses()
        .iter()
        .zip(offsets)
        .map(|(p, o)| p.offset(o.dx, o.dy, o.dtheta))
        .collect();
    Trajectory::from_parts_unchecked(traj.scene_id().to_string(), poses)
}

/// Ramp offsets applied to every pose.
pub fn apply_ramp<R: Rng + ?Sized>(
    traj: &Trajectory,
    cfg: &NoiseConfig,
    rng: &mut R,
) -> Result<Trajectory> {
    expect_kind(cfg, NoiseKind::Ramp)?;
    Ok(offset_trajectory(traj, &noise_offsets(traj, cfg, rng)?))
}

/// Truncated-Gaussian offsets applied to every pose.
pub fn apply_gaussian<R: Rng + ?Sized>(
    traj: &Trajectory,
    cfg: &NoiseConfig,
    rng: &mut R,
) -> Result<Trajectory> {
    expect_kind(cfg, NoiseKind::Gaussian)?;
    Ok(offset_trajectory(traj, &noise_offsets(traj, cfg, rng)?))
}

/// Gradient-noise offsets applied to every pose.
pub fn apply_perlin<R: Rng + ?Sized>(
    traj: &Trajectory,
    cfg: &NoiseConfig,
    rng: &mut R,
) -> Result<Trajectory> {
    expect_kind(cfg, NoiseKind::Perlin)?;
    Ok(offset_trajectory(traj, &noise_offsets(traj, cfg, rng)?))
}

fn expect_kind(cfg: &NoiseConfig, kind: NoiseKind) -> Result<()> {
    if cfg.kind != kind {
        return Err(Error::InvalidConfig(format!(
            "expected noise kind {kind}, got {}",
            cfg.kind
        )));
    }
    Ok(())
}

/// Re-derives headings so they follow the noisy direction of travel.
///
/// `θ_noisy(i) = θ_gt(i) + ∠(Δp_gt(i), Δp_noisy(i))` with forward differences;
/// the last pose reuses the final displacement. Positions are untouched.
pub fn heading_correct(original: &Trajectory, noised: &Trajectory) -> Result<Trajectory> {
    let (gt, noisy) = (original.poses(), noised.poses());
    if gt.len() != noisy.len() {
        return Err(Error::InvalidTrajectory(format!(
            "length mismatch: {} vs {}",
            gt.len(),
            noisy.len()
        )));
    }
    if gt.len() < 2 {
        return Err(Error::InvalidTrajectory(
            "heading correction needs at least 2 poses".into(),
        ));
    }
    if let Some(i) = gt.iter().zip(noisy).position(|(a, b)| a.t != b.t) {
        return Err(Error::InvalidTrajectory(format!(
            "timestamp mismatch at index {i}"
        )));
    }
    let n = gt.len();
    let delta = |poses: &[crate::geom::Pose2D], i: usize| -> Point {
        let j = if i + 1 < n { i } else { n - 2 };
        poses[j + 1].position() - poses[j].position()
    };
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let angle = signed_angle(delta(gt, i), delta(noisy, i))
            .map_err(|_| Error::DegenerateDisplacement { index: Some(i) })?;
        let mut p = noisy[i];
        p.theta = normalize_angle(gt[i].theta + angle);
        out.push(p);
    }
    Ok(Trajectory::from_parts_unchecked(
        noised.scene_id().to_string(),
        out,
    ))
}

/// Result of [`apply_noise`].
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseOutcome {
    pub trajectory: Trajectory,
    /// Number of poses that received an offset.
    pub altered_poses: usize,
}

impl NoiseOutcome {
    pub fn altered(&self) -> bool {
        self.altered_poses > 0
    }
}

/// Applies the configured noise to one scene.
///
/// With [`RatioMode::PerScene`] the scene is altered with probability
/// `noise_ratio`; with [`RatioMode::PerFrame`] each pose is. Heading correction
/// runs afterwards when requested (ramp and perlin only).
pub fn apply_noise<R: Rng + ?Sized>(
    traj: &Trajectory,
    cfg: &NoiseConfig,
    rng: &mut R,
) -> Result<NoiseOutcome> {
    cfg.validate()?;
    if cfg.kind == NoiseKind::None {
        return Ok(NoiseOutcome {
            trajectory: traj.clone(),
            altered_poses: 0,
        });
    }
    if cfg.heading_correction && traj.len() < 2 {
        return Err(Error::InvalidTrajectory(
            "heading correction needs at least 2 poses".into(),
        ));
    }

    let n = traj.len();
    let mask: Vec<bool> = match cfg.ratio_mode {
        RatioMode::PerScene => vec![rng.random::<f64>() < cfg.noise_ratio; n],
        RatioMode::PerFrame => (0..n)
            .map(|_| rng.random::<f64>() < cfg.noise_ratio)
            .collect(),
    };
    let altered_poses = mask.iter().filter(|&&m| m).count();
    if altered_poses == 0 {
        return Ok(NoiseOutcome {
            trajectory: traj.clone(),
            altered_poses: 0,
        });
    }

    let mut offsets = noise_offsets(traj, cfg, rng)?;
    for (o, keep) in offsets.iter_mut().zip(&mask) {
        if !keep {
            *o = PoseOffset::ZERO;
        }
    }
    let mut noisy = offset_trajectory(traj, &offsets);
    if cfg.heading_correction {
        noisy = heading_correct(traj, &noisy)?;
    }
    Ok(NoiseOutcome {
        trajectory: noisy,
        altered_poses,
    })
}
