//! Chamfer distance, element matching, chamfer-threshold AP and the
//! ring-wise (distance-aware) evaluation.

pub mod ap;
pub mod chamfer;
pub mod matching;
pub mod rings;
pub mod stats;

pub use ap::{
    average_precision, interpolated_ap, ApReport, ClassAp, EvalFrame, DEFAULT_THRESHOLDS,
};
pub use chamfer::{
    chamfer, chamfer_points, resampled, NearestIndex, SampledShape, RESAMPLE_SPACING,
};
pub use matching::{assign, hungarian, match_elements, match_predictions, Assignment, Prediction};
pub use rings::{
    evaluate_frame, evaluate_rings, ring_evaluate, split_into_rings, PointSource, RingFrame,
    RingReport, RingSpec, StatsRow, SubElement,
};
pub use stats::{aggregate_stats, quantile_sorted, Stats};
