use serde::{Deserialize, Serialize};

use super::chamfer::{chamfer_points, resampled};
use super::matching::{assign, match_elements};
use super::stats::{aggregate_stats, Stats};
use crate::element::MapElement;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geom::{Point, Polyline, POINT_EPS};

/// Concentric half-open annuli `[k·w, (k+1)·w)` around the ego origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RingSpec {
    pub ring_width: f64,
    pub num_rings: usize,
}

impl Default for RingSpec {
    fn default() -> Self {
        Self {
            ring_width: 5.0,
            num_rings: 7,
        }
    }
}

impl RingSpec {
    pub fn new(ring_width: f64, num_rings: usize) -> Result<Self> {
        let spec = Self {
            ring_width,
            num_rings,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ring_width <= 0.0 || !self.ring_width.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "ring_width must be positive, got {}",
                self.ring_width
            )));
        }
        if self.num_rings == 0 {
            return Err(Error::InvalidConfig("num_rings must be at least 1".into()));
        }
        Ok(())
    }

    pub fn inner_radius(&self, k: usize) -> f64 {
        k as f64 * self.ring_width
    }

    pub fn outer_radius(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.ring_width
    }

    pub fn covered_radius(&self) -> f64 {
        self.inner_radius(self.num_rings)
    }

    /// Index of the ring containing `p`, `None` beyond the last ring. Points
    /// within [`POINT_EPS`] inside a circle count as lying on it.
    pub fn ring_of(&self, p: Point) -> Option<usize> {
        let k = ((p.norm() + POINT_EPS) / self.ring_width).floor() as usize;
        (k < self.num_rings).then_some(k)
    }
}

/// Where a point of a sub-element came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointSource {
    /// Index into the resampled input points.
    Original(usize),
    /// Interpolated crossing of the circle of radius `k·w`.
    Boundary(usize),
}

/// Piece of a polyline lying inside one ring.
#[derive(Debug, Clone, PartialEq)]
pub struct SubElement {
    pub ring: usize,
    pub points: Vec<Point>,
    pub sources: Vec<PointSource>,
}

/// Segment parameters `t ∈ (0, 1)` where `a + t·(b − a)` has norm `radius`,
/// excluding crossings within [`POINT_EPS`] of either endpoint.
fn circle_crossings(a: Point, b: Point, radius: f64, out: &mut Vec<f64>) {
    let d = b - a;
    let qa = d.dot(d);
    let margin = POINT_EPS / qa.sqrt();
    let qb = 2.0 * a.dot(d);
    let qc = a.dot(a) - radius * radius;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc.is_nan() || disc <= 0.0 || qa == 0.0 {
        return;
    }
    // Numerically stable root pair.
    let q = -0.5 * (qb + qb.signum() * disc.sqrt());
    if q == 0.0 {
        return;
    }
    for t in [q / qa, qc / q] {
        if t > margin && t < 1.0 - margin {
            out.push(t);
        }
    }
}

/// Splits resampled points into per-ring sub-elements, inserting a point
/// wherever a segment crosses a ring circle. A crossing point belongs to the
/// ring outside its circle; points beyond the last ring are dropped.
pub fn split_into_rings(points: &[Point], spec: &RingSpec) -> Vec<SubElement> {
    let mut tagged: Vec<(Point, Option<usize>, PointSource)> = Vec::with_capacity(points.len());
    let mut roots: Vec<(f64, usize)> = Vec::new();
    let mut ts = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        tagged.push((p, spec.ring_of(p), PointSource::Original(i)));
        let Some(&next) = points.get(i + 1) else {
            break;
        };
        roots.clear();
        for k in 1..=spec.num_rings {
            ts.clear();
            circle_crossings(p, next, spec.inner_radius(k), &mut ts);
            roots.extend(ts.iter().map(|&t| (t, k)));
        }
        roots.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(t, k) in &roots {
            let ring = (k < spec.num_rings).then_some(k);
            tagged.push((p.lerp(next, t), ring, PointSource::Boundary(k)));
        }
    }

    let mut out: Vec<SubElement> = Vec::new();
    let mut open = false;
    for (p, ring, src) in tagged {
        match ring {
            None => open = false,
            Some(k) => {
                if !open || out.last().is_some_and(|s| s.ring != k) {
                    out.push(SubElement {
                        ring: k,
                        points: Vec::new(),
                        sources: Vec::new(),
                    });
                    open = true;
                }
                let cur = out.last_mut().expect("just pushed");
                cur.points.push(p);
                cur.sources.push(src);
            }
        }
    }
    out
}

/// Chamfer distances of sub-element pairs per ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ReportRepr", try_from = "ReportRepr")]
pub struct RingReport {
    spec: RingSpec,
    entries: Vec<Vec<f64>>,
}

impl RingReport {
    pub fn new(spec: RingSpec) -> Self {
        Self {
            spec,
            entries: vec![Vec::new(); spec.num_rings],
        }
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    pub fn entries(&self, ring: usize) -> &[f64] {
        &self.entries[ring]
    }

    pub fn all_entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    /// Appends `other`'s entries ring by ring.
    pub fn merge(&mut self, other: RingReport) {
        assert_eq!(
            self.spec, other.spec,
            "merging reports with different rings"
        );
        for (mine, theirs) in self.entries.iter_mut().zip(other.entries) {
            mine.extend(theirs);
        }
    }

    pub fn stats(&self) -> Vec<Stats> {
        self.entries.iter().map(|e| aggregate_stats(e)).collect()
    }

    pub fn medians(&self) -> Vec<Option<f64>> {
        self.stats().into_iter().map(|s| s.median).collect()
    }

    /// One CSV-ready row per ring.
    pub fn rows(&self, series: &str) -> Vec<StatsRow> {
        self.stats()
            .into_iter()
            .enumerate()
            .map(|(k, s)| StatsRow {
                ring_index: k,
                series: series.to_string(),
                count: s.count,
                mean: s.mean,
                median: s.median,
                q1: s.q1,
                q3: s.q3,
                min: s.min,
                max: s.max,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub ring_index: usize,
    pub series: String,
    pub count: usize,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub q1: Option<f64>,
    pub q3: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct ReportRepr {
    ring_width: f64,
    num_rings: usize,
    rings: Vec<RingRepr>,
}

#[derive(Serialize, Deserialize)]
struct RingRepr {
    ring_index: usize,
    inner_radius: f64,
    outer_radius: f64,
    stats: Stats,
    entries: Vec<f64>,
}

impl From<RingReport> for ReportRepr {
    fn from(r: RingReport) -> Self {
        let stats = r.stats();
        ReportRepr {
            ring_width: r.spec.ring_width,
            num_rings: r.spec.num_rings,
            rings: r
                .entries
                .into_iter()
                .zip(stats)
                .enumerate()
                .map(|(k, (entries, stats))| RingRepr {
                    ring_index: k,
                    inner_radius: r.spec.inner_radius(k),
                    outer_radius: r.spec.outer_radius(k),
                    stats,
                    entries,
                })
                .collect(),
        }
    }
}

impl TryFrom<ReportRepr> for RingReport {
    type Error = Error;
    fn try_from(r: ReportRepr) -> Result<Self> {
        let spec = RingSpec::new(r.ring_width, r.num_rings)?;
        if r.rings.len() != spec.num_rings
            || r.rings
                .iter()
                .enumerate()
                .any(|(k, ring)| ring.ring_index != k)
        {
            return Err(Error::InvalidConfig(
                "ring list does not match num_rings".into(),
            ));
        }
        Ok(RingReport {
            spec,
            entries: r.rings.into_iter().map(|ring| ring.entries).collect(),
        })
    }
}

fn all_in(points: &[Point], spec: &RingSpec, k: usize) -> bool {
    points.iter().all(|&p| spec.ring_of(p) == Some(k))
}

fn any_in(points: &[Point], spec: &RingSpec, k: usize) -> bool {
    points.iter().any(|&p| spec.ring_of(p) == Some(k))
}

fn evaluate_pair_into(a: &Polyline, b: &Polyline, spec: &RingSpec, report: &mut RingReport) {
    let (pa, pb) = (resampled(a), resampled(b));
    let (sa, sb) = (split_into_rings(&pa, spec), split_into_rings(&pb, spec));
    for k in 0..spec.num_rings {
        if !any_in(&pa, spec, k) || !any_in(&pb, spec, k) {
            continue;
        }
        if all_in(&pa, spec, k) && all_in(&pb, spec, k) {
            let d = chamfer_points(&pa, &pb).expect("non-empty");
            report.entries[k].push(d);
            continue;
        }
        let subs_a: Vec<&SubElement> = sa.iter().filter(|s| s.ring == k).collect();
        let subs_b: Vec<&SubElement> = sb.iter().filter(|s| s.ring == k).collect();
        let cost: Vec<Vec<f64>> = subs_a
            .iter()
            .map(|x| {
                subs_b
                    .iter()
                    .map(|y| chamfer_points(&x.points, &y.points).expect("non-empty"))
                    .collect()
            })
            .collect();
        for (_, _, d) in assign(&cost, Some(spec.outer_radius(k))) {
            report.entries[k].push(d);
        }
    }
}

/// Ring-wise chamfer distances of already matched element pairs.
pub fn ring_evaluate(pairs: &[(&Polyline, &Polyline)], spec: &RingSpec) -> Result<RingReport> {
    spec.validate()?;
    let mut report = RingReport::new(*spec);
    for (a, b) in pairs {
        evaluate_pair_into(a, b, spec, &mut report);
    }
    Ok(report)
}

/// Reference elements and the elements compared against them, both in the
/// same ego frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RingFrame {
    pub gts: Vec<MapElement>,
    pub others: Vec<MapElement>,
}

/// Matches one frame's elements per class and evaluates the matched pairs.
pub fn evaluate_frame(frame: &RingFrame, spec: &RingSpec) -> Result<RingReport> {
    let assignment = match_elements(&frame.gts, &frame.others);
    let pairs: Vec<(&Polyline, &Polyline)> = assignment
        .pairs
        .iter()
        .map(|&(g, o, _)| (&frame.gts[g].geometry, &frame.others[o].geometry))
        .collect();
    ring_evaluate(&pairs, spec)
}

/// Evaluates all frames and concatenates their entries in frame order.
pub fn evaluate_rings(
    frames: &[RingFrame],
    spec: &RingSpec,
    exec: Execution,
) -> Result<RingReport> {
    spec.validate()?;
    let reports = exec.try_map(frames, |f| evaluate_frame(f, spec))?;
    let mut total = RingReport::new(*spec);
    for r in reports {
        total.merge(r);
    }
    Ok(total)
}
