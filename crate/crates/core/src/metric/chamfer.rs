use crate::error::{Error, Result};
use crate::geom::{arc_length_points, Point, Polyline};

/// Point spacing used before every chamfer evaluation, meters.
pub const RESAMPLE_SPACING: f64 = 1.0;

/// Points of `p` sampled every [`RESAMPLE_SPACING`] of arc length, plus its vertices.
pub fn resampled(p: &Polyline) -> Vec<Point> {
    arc_length_points(p.points(), RESAMPLE_SPACING)
}

/// Nearest-neighbour lookup over a fixed point set, sorted by x so queries
/// can stop once the x gap exceeds the best distance found.
#[derive(Debug, Clone)]
pub struct NearestIndex {
    sorted: Vec<Point>,
}

impl NearestIndex {
    pub fn new(points: &[Point]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        let mut sorted = points.to_vec();
        sorted.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        Ok(Self { sorted })
    }

    pub fn nearest_distance(&self, q: Point) -> f64 {
        let pts = &self.sorted;
        let start = pts.partition_point(|p| p.x < q.x);
        let mut best = f64::INFINITY;
        for p in &pts[start..] {
            let dx = p.x - q.x;
            if dx * dx > best {
                break;
            }
            best = best.min(p.distance_sq(q));
        }
        for p in pts[..start].iter().rev() {
            let dx = q.x - p.x;
            if dx * dx > best {
                break;
            }
            best = best.min(p.distance_sq(q));
        }
        best.sqrt()
    }

    /// Mean nearest distance from each point of `from` into this set.
    pub fn mean_distance_from(&self, from: &[Point]) -> f64 {
        let sum: f64 = from.iter().map(|&q| self.nearest_distance(q)).sum();
        sum / from.len() as f64
    }
}

/// Symmetric chamfer distance of two point sets: the average of the two
/// directed mean nearest-neighbour distances.
pub fn chamfer_points(a: &[Point], b: &[Point]) -> Result<f64> {
    let ia = NearestIndex::new(a)?;
    let ib = NearestIndex::new(b)?;
    Ok(0.5 * (ib.mean_distance_from(a) + ia.mean_distance_from(b)))
}

/// Chamfer distance of two polylines after resampling both to 1 m spacing.
pub fn chamfer(a: &Polyline, b: &Polyline) -> f64 {
    chamfer_points(&resampled(a), &resampled(b)).expect("polylines are never empty")
}

/// Resampled element geometry with its lookup index, reused across many
/// chamfer evaluations.
#[derive(Debug, Clone)]
pub struct SampledShape {
    pub points: Vec<Point>,
    index: NearestIndex,
}

impl SampledShape {
    pub fn new(p: &Polyline) -> Self {
        Self::from_points(resampled(p)).expect("polylines are never empty")
    }

    pub fn from_points(points: Vec<Point>) -> Result<Self> {
        let index = NearestIndex::new(&points)?;
        Ok(Self { points, index })
    }

    pub fn chamfer(&self, other: &SampledShape) -> f64 {
        0.5 * (other.index.mean_distance_from(&self.points)
            + self.index.mean_distance_from(&other.points))
    }
}
