use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{uniform, NoiseConfig, PoseOffset, Trajectory};

/// Zero-mean normal distribution truncated to `[-bound, bound]`, sampled by
/// rejection.
///
/// For `bound >= sigma` the proposal is the untruncated normal (acceptance
/// ≥ 68%); for narrower windows it is uniform on the window, accepted with
/// probability `exp(-x² / 2σ²)` (acceptance ≥ 60%). Either way the output is
/// exactly truncated-normal distributed. A zero `sigma` or zero `bound`
/// yields the constant 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedNormal {
    sigma: f64,
    bound: f64,
}

impl TruncatedNormal {
    pub fn new(sigma: f64, bound: f64) -> Self {
        debug_assert!(sigma >= 0.0 && bound >= 0.0);
        Self { sigma, bound }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }
}

impl Distribution<f64> for TruncatedNormal {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (sigma, bound) = (self.sigma, self.bound);
        if sigma == 0.0 || bound == 0.0 {
            return 0.0;
        }
        if bound >= sigma {
            loop {
                let z: f64 = StandardNormal.sample(rng);
                let x = z * sigma;
                if x.abs() <= bound {
                    return x;
                }
            }
        } else {
            loop {
                let x = uniform(rng, -bound, bound);
                let u: f64 = rng.random();
                if u <= (-0.5 * (x / sigma).powi(2)).exp() {
                    return x;
                }
            }
        }
    }
}

pub(super) fn offsets<R: Rng + ?Sized>(
    traj: &Trajectory,
    cfg: &NoiseConfig,
    rng: &mut R,
) -> Vec<PoseOffset> {
    let translation = TruncatedNormal::new(cfg.sigma_l, cfg.eps_l);
    let heading = TruncatedNormal::new(cfg.sigma_r_rad(), cfg.eps_r_rad());
    traj.poses()
        .iter()
        .map(|_| {
            let t = translation.sample(rng);
            let theta = heading.sample(rng);
            // Half-circle direction; the sign of `t` covers the other half.
            let alpha = uniform(rng, 0.0, PI);
            let (s, c) = alpha.sin_cos();
            PoseOffset {
                dx: c * t,
                dy: s * t,
                dtheta: theta,
            }
        })
        .collect()
}
