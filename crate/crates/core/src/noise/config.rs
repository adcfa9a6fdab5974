use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    #[default]
    None,
    Ramp,
    Gaussian,
    Perlin,
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseKind::None => "none",
            NoiseKind::Ramp => "ramp",
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::Perlin => "perlin",
        })
    }
}

/// Granularity at which `noise_ratio` selects what gets altered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioMode {
    #[default]
    PerScene,
    PerFrame,
}

/// Noise parameters. Angles are degrees here and converted to radians by the
/// generators.
///
/// Serialized form (TOML or JSON), every key optional:
///
/// ```toml
/// kind = "ramp"              # none | ramp | gaussian | perlin
/// eps_l = 2.0                # max translation offset [m]
/// eps_r = 1.0                # max heading offset [deg]
/// sigma_l = 0.5              # gaussian translation std-dev [m]
/// sigma_r = 0.0              # gaussian heading std-dev [deg]
/// gamma = 1000.0             # perlin step length
/// octave = 10                # perlin lattice cells per unit
/// noise_ratio = 1.0          # fraction of scenes (or poses) altered
/// ratio_mode = "per_scene"   # per_scene | per_frame
/// heading_correction = false # ramp / perlin only
/// ramp_interval = [4.0, 10.0]
/// seed = 0
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub kind: NoiseKind,
    pub eps_l: f64,
    pub eps_r: f64,
    pub sigma_l: f64,
    pub sigma_r: f64,
    pub gamma: f64,
    pub octave: u32,
    pub noise_ratio: f64,
    pub ratio_mode: RatioMode,
    pub heading_correction: bool,
    pub ramp_interval: [f64; 2],
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            kind: NoiseKind::None,
            eps_l: 0.0,
            eps_r: 0.0,
            sigma_l: 0.0,
            sigma_r: 0.0,
            gamma: 1000.0,
            octave: 10,
            noise_ratio: 1.0,
            ratio_mode: RatioMode::PerScene,
            heading_correction: false,
            ramp_interval: [4.0, 10.0],
            seed: 0,
        }
    }
}

impl NoiseConfig {
    /// Named parameter presets: `R1`–`R5`, `G1`–`G3`, `P1`–`P4`.
    pub fn preset(name: &str) -> Option<NoiseConfig> {
        use NoiseKind::{Gaussian, Perlin, Ramp};
        // (kind, eps_l, sigma_l, eps_r, sigma_r, noise_ratio, heading_correction)
        let (kind, eps_l, sigma_l, eps_r, sigma_r, nr, hc) =
            match name.to_ascii_uppercase().as_str() {
                "R1" => (Ramp, 2.0, 0.0, 1.0, 0.0, 0.5, true),
                "R2" => (Ramp, 2.0, 0.0, 0.0, 0.0, 1.0, false),
                "R3" => (Ramp, 2.0, 0.0, 0.0, 0.0, 1.0, true),
                "R4" => (Ramp, 2.0, 0.0, 1.0, 0.0, 1.0, true),
                "R5" => (Ramp, 1.0, 0.0, 0.5, 0.0, 1.0, true),
                "G1" => (Gaussian, 2.0, 0.5, 0.0, 0.0, 1.0, false),
                "G2" => (Gaussian, 2.0, 0.5, 0.3, 1.0, 1.0, false),
                "G3" => (Gaussian, 2.0, 0.5, 3.0, 10.0, 1.0, false),
                "P1" => (Perlin, 0.0, 0.0, 0.5, 0.0, 1.0, false),
                "P2" => (Perlin, 1.0, 0.0, 0.0, 0.0, 1.0, true),
                "P3" => (Perlin, 2.0, 0.0, 0.0, 0.0, 1.0, true),
                "P4" => (Perlin, 2.0, 0.0, 0.5, 0.0, 1.0, true),
                _ => return None,
            };
        Some(NoiseConfig {
            kind,
            eps_l,
            eps_r,
            sigma_l,
            sigma_r,
            noise_ratio: nr,
            heading_correction: hc,
            ..NoiseConfig::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        for (name, v) in [
            ("eps_l", self.eps_l),
            ("eps_r", self.eps_r),
            ("sigma_l", self.sigma_l),
            ("sigma_r", self.sigma_r),
        ] {
            if v < 0.0 || !v.is_finite() {
                return bad(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        if !(0.0..=1.0).contains(&self.noise_ratio) {
            return bad(format!(
                "noise_ratio must be in [0, 1], got {}",
                self.noise_ratio
            ));
        }
        let [lo, hi] = self.ramp_interval;
        if !lo.is_finite() || !hi.is_finite() || lo < 0.0 || lo > hi || hi <= 0.0 {
            return bad(format!(
                "ramp_interval must satisfy 0 <= min <= max, max > 0, got [{lo}, {hi}]"
            ));
        }
        if self.kind == NoiseKind::Perlin {
            if self.gamma <= 0.0 || !self.gamma.is_finite() {
                return bad(format!("gamma must be positive, got {}", self.gamma));
            }
            if self.octave == 0 {
                return bad("octave must be a positive integer".into());
            }
        }
        if self.heading_correction && self.kind == NoiseKind::Gaussian {
            return bad("heading correction is only defined for ramp and perlin noise".into());
        }
        Ok(())
    }

    pub fn eps_r_rad(&self) -> f64 {
        self.eps_r.to_radians()
    }

    pub fn sigma_r_rad(&self) -> f64 {
        self.sigma_r.to_radians()
    }
}
