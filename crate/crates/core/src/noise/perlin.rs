use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{NoiseConfig, PoseOffset, Trajectory};
use crate::error::{Error, Result};

const TABLE: usize = 256;

/// Single-frequency 2-D gradient (Perlin) noise with unit gradients on an
/// integer lattice, seeded and fully deterministic.
#[derive(Debug, Clone)]
pub struct GradientNoise2D {
    perm: [u8; TABLE],
    gradients: [(f64, f64); TABLE],
}

impl GradientNoise2D {
    /// Largest magnitude the raw noise can reach with unit gradients in 2-D
    /// (`√2 / 2`, attained at a cell centre).
    pub const RAW_EXTREME: f64 = std::f64::consts::FRAC_1_SQRT_2;

    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm = [0u8; TABLE];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i as u8;
        }
        perm.shuffle(&mut rng);
        let mut gradients = [(0.0, 0.0); TABLE];
        for g in gradients.iter_mut() {
            let a = rng.random::<f64>() * TAU;
            *g = (a.cos(), a.sin());
        }
        Self { perm, gradients }
    }

    #[inline]
    fn gradient(&self, ix: i64, iy: i64) -> (f64, f64) {
        let h = self.perm[(ix & 0xff) as usize] as usize;
        let h = self.perm[(h ^ (iy & 0xff) as usize) & 0xff] as usize;
        self.gradients[h]
    }

    /// Raw noise in `[-RAW_EXTREME, RAW_EXTREME]`; zero on lattice points.
    pub fn raw(&self, x: f64, y: f64) -> f64 {
        let (x0, y0) = (x.floor(), y.floor());
        let (fx, fy) = (x - x0, y - y0);
        let (ix, iy) = (x0 as i64, y0 as i64);
        let dot = |cx: i64, cy: i64, dx: f64, dy: f64| {
            let (gx, gy) = self.gradient(ix + cx, iy + cy);
            gx * dx + gy * dy
        };
        let n00 = dot(0, 0, fx, fy);
        let n10 = dot(1, 0, fx - 1.0, fy);
        let n01 = dot(0, 1, fx, fy - 1.0);
        let n11 = dot(1, 1, fx - 1.0, fy - 1.0);
        let (u, v) = (fade(fx), fade(fy));
        let a = n00 + u * (n10 - n00);
        let b = n01 + u * (n11 - n01);
        a + v * (b - a)
    }

    /// Noise rescaled to `[-1, 1]`.
    pub fn unit(&self, x: f64, y: f64) -> f64 {
        (self.raw(x, y) / Self::RAW_EXTREME).clamp(-1.0, 1.0)
    }
}

#[inline]
fn fade(t: f64) -> f64 {
    t * t * t * (t * (t * 6.0 - 15.0) + 10.0)
}

/// Sample location of every pose in lattice units.
///
/// Positions are taken relative to the scene's bounding-box minimum, divided
/// by the step length `gamma` (meters per unit range) and multiplied by
/// `octave` (lattice cells per unit range).
pub(super) fn lattice_coords(traj: &Trajectory, cfg: &NoiseConfig) -> Result<Vec<(f64, f64)>> {
    let poses = traj.poses();
    let (mut x_min, mut y_min) = (f64::INFINITY, f64::INFINITY);
    let (mut x_max, mut y_max) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in poses {
        x_min = x_min.min(p.x);
        y_min = y_min.min(p.y);
        x_max = x_max.max(p.x);
        y_max = y_max.max(p.y);
    }
    if (x_max - x_min).max(y_max - y_min) <= crate::geom::POINT_EPS {
        return Err(Error::DegenerateBoundingBox);
    }
    let scale = cfg.octave as f64 / cfg.gamma;
    Ok(poses
        .iter()
        .map(|p| ((p.x - x_min) * scale, (p.y - y_min) * scale))
        .collect())
}

pub(super) fn offsets<R: Rng + ?Sized>(
    traj: &Trajectory,
    cfg: &NoiseConfig,
    rng: &mut R,
) -> Result<Vec<PoseOffset>> {
    let coords = lattice_coords(traj, cfg)?;
    // Each channel gets its own field and a random sub-cell phase so the
    // bounding-box corner does not pin every channel to a lattice node.
    let mut field = || {
        let noise = GradientNoise2D::new(rng.next_u64());
        let phase = (rng.random::<f64>(), rng.random::<f64>());
        move |u: f64, v: f64| noise.unit(u + phase.0, v + phase.1)
    };
    let (fx, fy, ftheta) = (field(), field(), field());
    let eps_r = cfg.eps_r_rad();
    Ok(coords
        .into_iter()
        .map(|(u, v)| {
            let (mut px, mut py) = (fx(u, v), fy(u, v));
            // Keep the translation magnitude within ε_L, not only each axis.
            let len = px.hypot(py);
            if len > 1.0 {
                // Shrink by one ulp so rounding cannot push the norm past 1.
                let s = (1.0 - f64::EPSILON) / len;
                px *= s;
                py *= s;
            }
            PoseOffset {
                dx: px * cfg.eps_l,
                dy: py * cfg.eps_l,
                dtheta: ftheta(u, v) * eps_r,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Pose2D;
    use crate::noise::{apply_perlin, gaussian, scene_rng, NoiseKind};

    fn drive(n: usize) -> Trajectory {
        // 10 Hz at 10 m/s
        Trajectory::new(
            "p",
            (0..n)
                .map(|i| Pose2D::new(i as f64 * 0.1, i as f64, 0.0, 0.0))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn raw_noise_zero_on_lattice_and_bounded() {
        let n = GradientNoise2D::new(17);
        assert_eq!(n.raw(3.0, -2.0), 0.0);
        let mut max: f64 = 0.0;
        for i in 0..300 {
            for j in 0..300 {
                let v = n.raw(i as f64 * 0.037, j as f64 * 0.041);
                max = max.max(v.abs());
            }
        }
        assert!(max <= GradientNoise2D::RAW_EXTREME + 1e-12, "{max}");
        assert!(max > 0.3, "{max}");
    }

    #[test]
    fn noise_is_continuous() {
        let n = GradientNoise2D::new(5);
        for i in 0..1000 {
            let x = i as f64 * 0.013;
            let d = (n.raw(x + 1e-6, 0.3) - n.raw(x, 0.3)).abs();
            assert!(d < 1e-5);
        }
    }

    #[test]
    fn zero_eps_is_identity() {
        let cfg = NoiseConfig {
            kind: NoiseKind::Perlin,
            ..NoiseConfig::default()
        };
        let t = drive(100);
        assert_eq!(apply_perlin(&t, &cfg, &mut scene_rng(0, "p")).unwrap(), t);
    }

    #[test]
    fn degenerate_bbox_rejected() {
        let t = Trajectory::new(
            "p",
            (0..5)
                .map(|i| Pose2D::new(i as f64, 1.0, 1.0, 0.0))
                .collect(),
        )
        .unwrap();
        let cfg = NoiseConfig::preset("P2").unwrap();
        assert!(matches!(
            apply_perlin(&t, &cfg, &mut scene_rng(0, "p")),
            Err(Error::DegenerateBoundingBox)
        ));
    }

    #[test]
    fn offsets_bounded() {
        let cfg = NoiseConfig::preset("P4").unwrap();
        for seed in 0..20 {
            let offs = offsets(&drive(1000), &cfg, &mut scene_rng(seed, "p")).unwrap();
            for o in offs {
                assert!(o.dx.abs() <= cfg.eps_l && o.dy.abs() <= cfg.eps_l);
                assert!(o.translation() <= cfg.eps_l);
                assert!(o.dtheta.abs() <= cfg.eps_r_rad());
            }
        }
    }

    fn max_step_change(offs: &[PoseOffset]) -> f64 {
        offs.windows(2)
            .map(|w| (w[1].dx - w[0].dx).hypot(w[1].dy - w[0].dy))
            .fold(0.0, f64::max)
    }

    #[test]
    fn smoother_than_gaussian() {
        // 100 m straight drive, 10 Hz at 10 m/s.
        let traj = Trajectory::new(
            "p",
            (0..=100)
                .map(|i| Pose2D::new(i as f64 * 0.1, i as f64, 0.0, 0.0))
                .collect(),
        )
        .unwrap();
        let perlin_cfg = NoiseConfig {
            kind: NoiseKind::Perlin,
            eps_l: 2.0,
            ..NoiseConfig::default()
        };
        let gauss_cfg = NoiseConfig {
            kind: NoiseKind::Gaussian,
            eps_l: 2.0,
            sigma_l: 0.5,
            ..NoiseConfig::default()
        };
        let (mut p_sum, mut g_sum) = (0.0, 0.0);
        for seed in 0..20 {
            let p = offsets(&traj, &perlin_cfg, &mut scene_rng(seed, "p")).unwrap();
            let g = gaussian::offsets(&traj, &gauss_cfg, &mut scene_rng(seed, "p"));
            p_sum += max_step_change(&p);
            g_sum += max_step_change(&g);
        }
        assert!(
            p_sum / 20.0 < g_sum / 20.0,
            "{} vs {}",
            p_sum / 20.0,
            g_sum / 20.0
        );
    }
}
