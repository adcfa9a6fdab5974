use std::f64::consts::TAU;

use rand::Rng;

use super::{uniform, NoiseConfig, PoseOffset, Trajectory};
use crate::error::Result;

/// One ramp segment: the offset grows linearly from zero at `start` to the
/// full `(cos α·T, sin α·T, θ)` just before `end`, then snaps back to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampInterval {
    pub start: f64,
    pub end: f64,
    /// Direction of the translation offset, radians in [0, 2π).
    pub direction: f64,
    /// Peak translation magnitude, [0, ε_L).
    pub magnitude: f64,
    /// Peak heading offset, radians in [-ε_R, ε_R).
    pub heading: f64,
}

impl RampInterval {
    pub fn draw<R: Rng + ?Sized>(rng: &mut R, start: f64, cfg: &NoiseConfig) -> Self {
        let [lo, hi] = cfg.ramp_interval;
        let eps_r = cfg.eps_r_rad();
        RampInterval {
            start,
            end: start + uniform(rng, lo, hi),
            direction: uniform(rng, 0.0, TAU),
            magnitude: uniform(rng, 0.0, cfg.eps_l),
            heading: uniform(rng, -eps_r, eps_r),
        }
    }

    /// Ramp fraction `(t - start) / (end - start)`, in [0, 1) on the interval.
    pub fn ramp(&self, t: f64) -> f64 {
        (t - self.start) / (self.end - self.start)
    }

    pub fn offset_at(&self, t: f64) -> PoseOffset {
        let r = self.ramp(t);
        let (s, c) = self.direction.sin_cos();
        PoseOffset {
            dx: c * self.magnitude * r,
            dy: s * self.magnitude * r,
            dtheta: self.heading * r,
        }
    }
}

pub(super) fn offsets<R: Rng + ?Sized>(
    traj: &Trajectory,
    cfg: &NoiseConfig,
    rng: &mut R,
) -> Result<Vec<PoseOffset>> {
    let poses = traj.poses();
    let mut interval = RampInterval::draw(rng, poses[0].t, cfg);
    let mut out = Vec::with_capacity(poses.len());
    for p in poses {
        while p.t >= interval.end {
            interval = RampInterval::draw(rng, interval.end, cfg);
        }
        out.push(interval.offset_at(p.t));
    }
    Ok(out)
}

/// Ramp intervals covering `[t0, t1]`, drawn in the same order as
/// [`offsets`] draws them.
#[cfg(test)]
pub(super) fn intervals<R: Rng + ?Sized>(
    t0: f64,
    t1: f64,
    cfg: &NoiseConfig,
    rng: &mut R,
) -> Vec<RampInterval> {
    let mut out = vec![RampInterval::draw(rng, t0, cfg)];
    while t1 >= out.last().unwrap().end {
        let start = out.last().unwrap().end;
        out.push(RampInterval::draw(rng, start, cfg));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Pose2D;
    use crate::noise::{apply_ramp, scene_rng, NoiseKind};

    fn timeline(n: usize, dt: f64) -> Trajectory {
        Trajectory::new(
            "r",
            (0..n)
                .map(|i| Pose2D::new(i as f64 * dt, i as f64, 0.0, 0.0))
                .collect(),
        )
        .unwrap()
    }

    fn ramp_cfg(eps_l: f64, eps_r: f64) -> NoiseConfig {
        NoiseConfig {
            kind: NoiseKind::Ramp,
            eps_l,
            eps_r,
            ..NoiseConfig::default()
        }
    }

    #[test]
    fn zero_amplitude_is_identity() {
        let traj = timeline(200, 0.1);
        let out = apply_ramp(&traj, &ramp_cfg(0.0, 0.0), &mut scene_rng(1, "r")).unwrap();
        assert_eq!(out, traj);
    }

    #[test]
    fn endpoints_and_midpoint() {
        let iv = RampInterval {
            start: 2.0,
            end: 8.0,
            direction: 0.7,
            magnitude: 1.5,
            heading: 0.01,
        };
        assert_eq!(iv.offset_at(2.0).translation(), 0.0);
        assert_eq!(iv.offset_at(2.0).dtheta, 0.0);
        assert!((iv.offset_at(5.0).translation() - 0.75).abs() < 1e-12);
        assert!((iv.offset_at(5.0).dtheta - 0.005).abs() < 1e-15);
    }

    #[test]
    fn intervals_within_configured_bounds() {
        let cfg = ramp_cfg(2.0, 1.0);
        let ivs = intervals(0.0, 500.0, &cfg, &mut scene_rng(4, "iv"));
        for w in ivs.windows(2) {
            assert_eq!(w[0].end, w[1].start);
        }
        for iv in &ivs {
            let len = iv.end - iv.start;
            assert!((4.0..10.0).contains(&len), "{len}");
            assert!(iv.magnitude < 2.0 && iv.heading.abs() <= 1f64.to_radians());
        }
    }

    /// Scalar re-implementation of the ramp formula evaluated against the
    /// generator, using the same draw order.
    #[test]
    fn matches_scalar_formula() {
        let traj = timeline(1000, 0.1); // 100 s
        let cfg = ramp_cfg(2.0, 0.0);
        let offs = offsets(&traj, &cfg, &mut scene_rng(11, "r")).unwrap();
        let ivs = intervals(0.0, 99.9, &cfg, &mut scene_rng(11, "r"));

        let mut max_off: f64 = 0.0;
        for (p, o) in traj.poses().iter().zip(&offs) {
            let iv = ivs
                .iter()
                .find(|iv| iv.start <= p.t && p.t < iv.end)
                .unwrap();
            let r = (p.t - iv.start) / (iv.end - iv.start);
            let ex = iv.direction.cos() * iv.magnitude * r;
            let ey = iv.direction.sin() * iv.magnitude * r;
            assert!((o.dx - ex).abs() < 1e-12 && (o.dy - ey).abs() < 1e-12);
            max_off = max_off.max(o.translation());
        }
        assert!(max_off <= 2.0 && max_off > 0.0);

        // Magnitude non-decreasing inside each interval.
        for iv in &ivs {
            let mags: Vec<f64> = traj
                .poses()
                .iter()
                .zip(&offs)
                .filter(|(p, _)| iv.start <= p.t && p.t < iv.end)
                .map(|(_, o)| o.translation())
                .collect();
            assert!(mags.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        }
    }
}
