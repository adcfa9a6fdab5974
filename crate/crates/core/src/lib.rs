//! Localization-noise injection for vehicle trajectories, ego-frame HD-map
//! label regeneration under noisy poses, and evaluation of vectorized map
//! elements with chamfer-threshold AP and a distance-aware ring metric.
//!
//! Modules, bottom up:
//!
//! - [`geom`]: poses, polylines, rigid transforms, resampling, clipping.
//! - [`noise`]: ramp / truncated-Gaussian / gradient-noise pose offsets,
//!   heading correction and the noise-ratio scheduler.
//! - [`labelgen`]: local "cutouts" of a global map for every pose.
//! - [`metric`]: chamfer distance, matching, AP and ring evaluation.
//! - [`synth`]: deterministic synthetic scenes.
//! - [`io`]: JSON / JSON-lines formats shared with the CLI.

pub mod element;
pub mod error;
pub mod exec;
pub mod geom;
pub mod io;
pub mod labelgen;
pub mod metric;
pub mod noise;
pub mod synth;

pub use element::{ElementClass, MapElement};
pub use error::{Error, Result};
pub use exec::Execution;
pub use geom::{Point, Polyline, Pose2D, Rect};
pub use labelgen::{GlobalMap, LabelFrame};
pub use metric::{Prediction, RingReport, RingSpec};
pub use noise::{NoiseConfig, NoiseKind, Trajectory};
pub use synth::{build_scene, SceneKind, SceneTemplate};
