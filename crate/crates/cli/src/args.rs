use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use locnoise::noise::RatioMode;
use locnoise::{NoiseKind, SceneKind};

#[derive(Debug, Parser)]
#[command(
    name = "locnoise",
    version,
    about = "Localization-noise label distortion and map evaluation"
)]
pub struct Cli {
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic map and trajectory.
    Synth(SynthArgs),
    /// Apply pose noise and write clean and noisy label frames.
    Distort(DistortArgs),
    /// Chamfer-threshold average precision of predictions.
    EvalAp(EvalApArgs),
    /// Ring-wise chamfer statistics.
    EvalRings(EvalRingsArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// TOML template; flags override its fields.
    #[arg(long)]
    pub template: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: Option<SceneKindArg>,
    #[arg(long)]
    pub lane_width: Option<f64>,
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long)]
    pub num_lanes: Option<usize>,
    /// Reference-line curvature for curved roads, 1/m.
    #[arg(long, allow_negative_numbers = true)]
    pub curvature: Option<f64>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum SceneKindArg {
    StraightRoad,
    CurvedRoad,
    Intersection,
}

impl From<SceneKindArg> for SceneKind {
    fn from(k: SceneKindArg) -> Self {
        match k {
            SceneKindArg::StraightRoad => SceneKind::StraightRoad,
            SceneKindArg::CurvedRoad => SceneKind::CurvedRoad,
            SceneKindArg::Intersection => SceneKind::Intersection,
        }
    }
}

#[derive(Debug, Args)]
pub struct PerceptionArgs {
    /// Ego-frame x range (along the heading), meters.
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], allow_negative_numbers = true)]
    pub x_range: Option<Vec<f64>>,
    /// Ego-frame y range (left of the heading), meters.
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], allow_negative_numbers = true)]
    pub y_range: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct DistortArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// Trajectory file: one object or an array of scenes.
    #[arg(long)]
    pub traj: PathBuf,
    /// Noise configuration (TOML, or JSON with a .json extension).
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Named parameter row: R1-R5, G1-G3, P1-P4.
    #[arg(long)]
    pub preset: Option<String>,
    #[command(flatten)]
    pub noise: NoiseFlags,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub perception: PerceptionArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
}

/// Individual noise parameters; each overrides the config file or preset.
#[derive(Debug, Args)]
pub struct NoiseFlags {
    #[arg(long, value_enum)]
    pub kind: Option<NoiseKindArg>,
    /// Maximum translation offset, meters.
    #[arg(long)]
    pub eps_l: Option<f64>,
    /// Maximum heading offset, degrees.
    #[arg(long)]
    pub eps_r: Option<f64>,
    #[arg(long)]
    pub sigma_l: Option<f64>,
    /// Degrees.
    #[arg(long)]
    pub sigma_r: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub octave: Option<u32>,
    #[arg(long)]
    pub noise_ratio: Option<f64>,
    #[arg(long, value_enum)]
    pub ratio_mode: Option<RatioModeArg>,
    #[arg(long)]
    pub heading_correction: Option<bool>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum NoiseKindArg {
    None,
    Ramp,
    Gaussian,
    Perlin,
}

impl From<NoiseKindArg> for NoiseKind {
    fn from(k: NoiseKindArg) -> Self {
        match k {
            NoiseKindArg::None => NoiseKind::None,
            NoiseKindArg::Ramp => NoiseKind::Ramp,
            NoiseKindArg::Gaussian => NoiseKind::Gaussian,
            NoiseKindArg::Perlin => NoiseKind::Perlin,
        }
    }
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum RatioModeArg {
    PerScene,
    PerFrame,
}

impl From<RatioModeArg> for RatioMode {
    fn from(m: RatioModeArg) -> Self {
        match m {
            RatioModeArg::PerScene => RatioMode::PerScene,
            RatioModeArg::PerFrame => RatioMode::PerFrame,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalApArgs {
    /// Ground-truth label frames (JSON lines).
    #[arg(long)]
    pub gt: PathBuf,
    /// Prediction frames (JSON lines).
    #[arg(long)]
    pub pred: PathBuf,
    /// Chamfer thresholds, meters.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 1.5])]
    pub thresholds: Vec<f64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalRingsArgs {
    /// Reference (clean) label frames.
    #[arg(long)]
    pub gt: PathBuf,
    /// Noise-distorted label frames, evaluated as the `gt_distortion` series.
    #[arg(long, required_unless_present = "pred")]
    pub distorted: Option<PathBuf>,
    /// Prediction frames, evaluated as the `prediction` series.
    #[arg(long)]
    pub pred: Option<PathBuf>,
    #[arg(long, default_value_t = 5.0)]
    pub ring_width: f64,
    #[arg(long, default_value_t = 7)]
    pub num_rings: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
}
