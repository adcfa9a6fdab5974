//! 2-D geometry: points, SE(2) poses, polylines, rigid transforms,
//! resampling, rectangle clipping and signed angles.
//!
//! All angles are radians, counter-clockwise positive. The ego frame has the
//! vehicle at the origin looking along +X.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two points closer than this are considered identical.
pub const POINT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Z component of the 3-D cross product.
    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    #[inline]
    pub fn distance_sq(self, other: Point) -> f64 {
        let d = self - other;
        d.dot(d)
    }

    /// Rotates counter-clockwise by `angle` about the origin.
    #[inline]
    pub fn rotate(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    #[inline]
    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }

    /// Rounds both coordinates to a multiple of `step`.
    pub fn quantized(self, step: f64) -> Point {
        Point::new(quantize(self.x, step), quantize(self.y, step))
    }
}

pub(crate) fn quantize(v: f64, step: f64) -> f64 {
    // Dividing by the integer reciprocal gives the double nearest to the
    // decimal value, so e.g. 1.234 prints as "1.234".
    let inv = (1.0 / step).round();
    let q = if inv >= 1.0 {
        (v * inv).round() / inv
    } else {
        (v / step).round() * step
    };
    // Avoid writing "-0.0".
    if q == 0.0 {
        0.0
    } else {
        q
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point::new(x, y)
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Wraps an angle into (-π, π].
pub fn normalize_angle(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    // rem_euclid can return exactly 2π for tiny negative inputs.
    if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Signed angle rotating `u` onto `v`, in (-π, π].
pub fn signed_angle(u: Point, v: Point) -> Result<f64> {
    if u.norm() <= POINT_EPS || v.norm() <= POINT_EPS {
        return Err(Error::DegenerateDisplacement { index: None });
    }
    let a = u.cross(v).atan2(u.dot(v));
    Ok(if a <= -PI { PI } else { a })
}

/// Vehicle pose in a metric frame at time `t` (seconds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose2D {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// Heading in radians, (-π, π].
    pub theta: f64,
}

impl Pose2D {
    pub fn new(t: f64, x: f64, y: f64, theta: f64) -> Self {
        Self {
            t,
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    /// Maps a point from the pose's parent frame into the ego frame.
    #[inline]
    pub fn to_ego(&self, p: Point) -> Point {
        (p - self.position()).rotate(-self.theta)
    }

    /// Inverse of [`Pose2D::to_ego`].
    #[inline]
    pub fn from_ego(&self, p: Point) -> Point {
        p.rotate(self.theta) + self.position()
    }

    /// Pose with the given offsets added (heading re-normalized).
    pub fn offset(&self, dx: f64, dy: f64, dtheta: f64) -> Pose2D {
        Pose2D::new(self.t, self.x + dx, self.y + dy, self.theta + dtheta)
    }
}

/// Ordered point sequence with at least two points and no consecutive duplicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct Polyline {
    points: Vec<Point>,
}

impl Polyline {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPolyline(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        if let Some(w) = points
            .windows(2)
            .position(|w| w[0].distance(w[1]) <= POINT_EPS)
        {
            return Err(Error::InvalidPolyline(format!(
                "points {} and {} coincide",
                w,
                w + 1
            )));
        }
        if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidPolyline("non-finite coordinate".into()));
        }
        Ok(Self { points })
    }

    /// Builds a polyline after merging consecutive points closer than
    /// [`POINT_EPS`]. Returns `None` if fewer than two distinct points remain.
    pub fn from_points_dedup(points: impl IntoIterator<Item = Point>) -> Option<Self> {
        let mut out: Vec<Point> = Vec::new();
        for p in points {
            push_dedup(&mut out, p);
        }
        (out.len() >= 2).then_some(Self { points: out })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> Point {
        self.points[0]
    }

    pub fn last(&self) -> Point {
        self.points[self.points.len() - 1]
    }

    pub fn is_closed(&self) -> bool {
        self.points.len() > 2 && self.first().distance(self.last()) <= POINT_EPS
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    /// Applies `f` to every point; fails if the mapping collapses two
    /// consecutive points.
    pub fn map_points(&self, f: impl Fn(Point) -> Point) -> Result<Polyline> {
        Polyline::new(self.points.iter().copied().map(f).collect())
    }

    pub fn transform_to_ego(&self, pose: &Pose2D) -> Polyline {
        transform_to_ego(self, pose)
    }
}

impl TryFrom<Vec<Point>> for Polyline {
    type Error = Error;
    fn try_from(points: Vec<Point>) -> Result<Self> {
        Polyline::new(points)
    }
}

impl From<Polyline> for Vec<Point> {
    fn from(p: Polyline) -> Self {
        p.points
    }
}

pub(crate) fn push_dedup(out: &mut Vec<Point>, p: Point) {
    match out.last() {
        Some(last) if last.distance(p) <= POINT_EPS => {}
        _ => out.push(p),
    }
}

/// Rigid transform of a polyline into the ego frame of `pose`.
pub fn transform_to_ego(p: &Polyline, pose: &Pose2D) -> Polyline {
    // Rotations preserve distances, so consecutive points stay distinct.
    Polyline {
        points: p.points.iter().map(|&q| pose.to_ego(q)).collect(),
    }
}

/// Inverse of [`transform_to_ego`].
pub fn transform_from_ego(p: &Polyline, pose: &Pose2D) -> Polyline {
    Polyline {
        points: p.points.iter().map(|&q| pose.from_ego(q)).collect(),
    }
}

/// Inserts evenly spaced points so that no segment is longer than `d_max`.
///
/// A segment of length `L` is divided into `ceil(L / d_max)` equal parts;
/// original vertices are kept.
pub fn resample_max_spacing(p: &Polyline, d_max: f64) -> Result<Polyline> {
    if d_max <= 0.0 || !d_max.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "resampling spacing must be positive, got {d_max}"
        )));
    }
    Ok(Polyline {
        points: resample_points(&p.points, d_max),
    })
}

pub(crate) fn resample_points(points: &[Point], d_max: f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(points.len());
    if let Some(&first) = points.first() {
        out.push(first);
    }
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = a.distance(b);
        let pieces = ((len / d_max).ceil() as usize).max(1);
        for k in 1..pieces {
            out.push(a.lerp(b, k as f64 / pieces as f64));
        }
        out.push(b);
    }
    out
}

/// Samples `p` every `step` meters of arc length from its first point and
/// keeps all original vertices, so no gap exceeds `step`.
///
/// Unlike [`resample_max_spacing`], the sample grid does not restart at each
/// vertex: two copies of a curve that share a start sample identically.
/// Samples within [`POINT_EPS`] of a vertex are merged into it.
pub fn resample_arc_length(p: &Polyline, step: f64) -> Result<Polyline> {
    if step <= 0.0 || !step.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "resampling step must be positive, got {step}"
        )));
    }
    Ok(Polyline {
        points: arc_length_points(&p.points, step),
    })
}

pub(crate) fn arc_length_points(points: &[Point], step: f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(points.len());
    let Some(&first) = points.first() else {
        return out;
    };
    out.push(first);
    // Arc length at the start of the current segment, and index of the next
    // grid sample.
    let mut s0 = 0.0;
    let mut k = 1u64;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = a.distance(b);
        let s1 = s0 + len;
        loop {
            let s = k as f64 * step;
            if s >= s1 - POINT_EPS {
                break;
            }
            if s > s0 + POINT_EPS {
                out.push(a.lerp(b, (s - s0) / len));
            }
            k += 1;
        }
        out.push(b);
        s0 = s1;
    }
    out
}

/// Axis-aligned rectangle, boundary inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_range: [f64; 2], y_range: [f64; 2]) -> Result<Self> {
        let valid = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] < r[1];
        if !valid(x_range) || !valid(y_range) {
            return Err(Error::InvalidConfig(format!(
                "degenerate rectangle x={x_range:?} y={y_range:?}"
            )));
        }
        Ok(Self {
            x_min: x_range[0],
            x_max: x_range[1],
            y_min: y_range[0],
            y_max: y_range[1],
        })
    }

    pub fn contains(&self, p: Point, eps: f64) -> bool {
        p.x >= self.x_min - eps
            && p.x <= self.x_max + eps
            && p.y >= self.y_min - eps
            && p.y <= self.y_max + eps
    }

    /// Liang–Barsky parametric clip of segment `a → b`.
    ///
    /// Returns the parameter interval `[t0, t1] ⊆ [0, 1]` inside the rectangle.
    pub fn clip_segment(&self, a: Point, b: Point) -> Option<(f64, f64)> {
        let d = b - a;
        let mut t0 = 0.0_f64;
        let mut t1 = 1.0_f64;
        let edges = [
            (-d.x, a.x - self.x_min),
            (d.x, self.x_max - a.x),
            (-d.y, a.y - self.y_min),
            (d.y, self.y_max - a.y),
        ];
        for (p, q) in edges {
            if p == 0.0 {
                if q < 0.0 {
                    return None;
                }
            } else {
                let r = q / p;
                if p < 0.0 {
                    if r > t1 {
                        return None;
                    }
                    t0 = t0.max(r);
                } else {
                    if r < t0 {
                        return None;
                    }
                    t1 = t1.min(r);
                }
            }
        }
        Some((t0, t1))
    }

    /// Evaluates `a + t (b - a)`, snapping coordinates that sit on an edge
    /// within rounding error exactly onto it.
    fn point_at(&self, a: Point, b: Point, t: f64) -> Point {
        let p = if t <= 0.0 {
            a
        } else if t >= 1.0 {
            b
        } else {
            a.lerp(b, t)
        };
        Point::new(
            p.x.clamp(self.x_min, self.x_max),
            p.y.clamp(self.y_min, self.y_max),
        )
    }
}

/// Clips a polyline to a rectangle.
///
/// Every piece lies inside the rectangle (boundary inclusive), crossings get
/// an interpolated vertex exactly on the boundary and a polyline that leaves
/// and re-enters yields several pieces. Pieces that degenerate to a single
/// point (e.g. grazing a corner) are dropped.
pub fn clip_to_rect(p: &Polyline, rect: &Rect) -> Vec<Polyline> {
    let mut pieces = Vec::new();
    let mut current: Vec<Point> = Vec::new();
    for (a, b) in p.segments() {
        match rect.clip_segment(a, b) {
            Some((t0, t1)) => {
                let start = rect.point_at(a, b, t0);
                let end = rect.point_at(a, b, t1);
                if t0 > 0.0 && !current.is_empty() {
                    flush(&mut current, &mut pieces);
                }
                push_dedup(&mut current, start);
                push_dedup(&mut current, end);
                if t1 < 1.0 {
                    flush(&mut current, &mut pieces);
                }
            }
            None => flush(&mut current, &mut pieces),
        }
    }
    flush(&mut current, &mut pieces);
    pieces
}

fn flush(current: &mut Vec<Point>, pieces: &mut Vec<Polyline>) {
    if current.len() >= 2 {
        pieces.push(Polyline {
            points: std::mem::take(current),
        });
    } else {
        current.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pl(points: &[[f64; 2]]) -> Polyline {
        Polyline::new(points.iter().map(|&p| p.into()).collect()).unwrap()
    }

    fn assert_close(a: Point, b: Point) {
        assert!(a.distance(b) < 1e-12, "{a:?} != {b:?}");
    }

    #[test]
    fn ego_transform_examples() {
        let pose = Pose2D::new(0.0, 5.0, 0.0, 0.0);
        assert_close(pose.to_ego(Point::new(5.0, 0.0)), Point::ORIGIN);

        let pose = Pose2D::new(0.0, 0.0, 0.0, PI / 2.0);
        assert_close(pose.to_ego(Point::new(1.0, 0.0)), Point::new(0.0, -1.0));

        // Explicit 2x2 matrix R(-θ) = [[c, s], [-s, c]] applied to p - t.
        let pose = Pose2D::new(0.0, 1.0, 1.0, 0.3);
        let (dx, dy) = (3.0 - 1.0, 4.0 - 1.0);
        let (c, s) = (0.3_f64.cos(), 0.3_f64.sin());
        let expected = Point::new(c * dx + s * dy, -s * dx + c * dy);
        assert_close(pose.to_ego(Point::new(3.0, 4.0)), expected);
    }

    #[test]
    fn polyline_rejects_duplicates_and_short_input() {
        assert!(Polyline::new(vec![Point::ORIGIN]).is_err());
        assert!(Polyline::new(vec![Point::ORIGIN, Point::new(0.0, 1e-12)]).is_err());
        assert!(Polyline::from_points_dedup([Point::ORIGIN, Point::new(0.0, 1e-12)]).is_none());
    }

    #[test]
    fn resample_examples() {
        let r = resample_max_spacing(&pl(&[[0.0, 0.0], [3.0, 0.0]]), 1.0).unwrap();
        let xs: Vec<f64> = r.points().iter().map(|p| p.x).collect();
        assert_eq!(xs, vec![0.0, 1.0, 2.0, 3.0]);

        let short = pl(&[[0.0, 0.0], [0.5, 0.0]]);
        assert_eq!(resample_max_spacing(&short, 1.0).unwrap(), short);

        let r = resample_max_spacing(&pl(&[[0.0, 0.0], [2.5, 0.0]]), 1.0).unwrap();
        assert_eq!(r.len(), 4);
        for w in r.points().windows(2) {
            assert!((w[0].distance(w[1]) - 2.5 / 3.0).abs() < 1e-12);
        }
        assert!(resample_max_spacing(&short, 0.0).is_err());
    }

    #[test]
    fn arc_length_grid_spans_vertices() {
        // Corner at s = 2.5: grid continues at s = 3 on the second leg.
        let r = resample_arc_length(&pl(&[[0.0, 0.0], [2.5, 0.0], [2.5, 2.0]]), 1.0).unwrap();
        let expected = [
            [0.0, 0.0],
            [1.0, 0.0],
            [2.0, 0.0],
            [2.5, 0.0],
            [2.5, 0.5],
            [2.5, 1.5],
            [2.5, 2.0],
        ];
        assert_eq!(r.len(), expected.len());
        for (p, e) in r.points().iter().zip(expected) {
            assert!(p.distance(Point::from(e)) < 1e-12, "{p:?} vs {e:?}");
        }

        let exact = resample_arc_length(&pl(&[[0.0, 0.0], [3.0, 0.0]]), 1.0).unwrap();
        assert_eq!(exact.len(), 4);
        let short = pl(&[[0.0, 0.0], [0.5, 0.0]]);
        assert_eq!(resample_arc_length(&short, 1.0).unwrap(), short);
        assert!(resample_arc_length(&short, -1.0).is_err());
    }

    #[test]
    fn arc_length_grid_is_rigid() {
        let a = pl(&[[-30.0, 1.75], [12.3, 1.75], [30.0, 4.0]]);
        let pose = Pose2D::new(0.0, 0.4, -0.2, 0.017);
        let moved = resample_arc_length(&transform_to_ego(&a, &pose), 1.0).unwrap();
        let base = resample_arc_length(&a, 1.0).unwrap();
        assert_eq!(moved.len(), base.len());
        for (m, b) in moved.points().iter().zip(base.points()) {
            assert!(pose.from_ego(*m).distance(*b) < 1e-9);
        }
    }

    #[test]
    fn clip_axis_crossing() {
        let rect = Rect::new([-15.0, 15.0], [-30.0, 30.0]).unwrap();
        let pieces = clip_to_rect(&pl(&[[-50.0, 0.0], [50.0, 0.0]]), &rect);
        assert_eq!(pieces.len(), 1);
        assert_eq!(
            pieces[0].points(),
            &[Point::new(-15.0, 0.0), Point::new(15.0, 0.0)]
        );

        let inside = pl(&[[0.0, -5.0], [0.0, 5.0]]);
        assert_eq!(clip_to_rect(&inside, &rect), vec![inside]);
    }

    #[test]
    fn clip_outside_and_corner_graze() {
        let rect = Rect::new([0.0, 1.0], [0.0, 1.0]).unwrap();
        assert!(clip_to_rect(&pl(&[[2.0, 0.0], [3.0, 1.0]]), &rect).is_empty());
        // Touches only the corner (1, 1).
        assert!(clip_to_rect(&pl(&[[0.0, 2.0], [2.0, 0.0]]), &rect).is_empty());
    }

    #[test]
    fn clip_leave_and_reenter() {
        let rect = Rect::new([-15.0, 15.0], [-30.0, 30.0]).unwrap();
        let zig = pl(&[[0.0, 0.0], [20.0, 5.0], [0.0, 10.0]]);
        let pieces = clip_to_rect(&zig, &rect);
        assert_eq!(pieces.len(), 2);
        assert!((pieces[0].last().x - 15.0).abs() < 1e-12);
        assert!((pieces[1].first().x - 15.0).abs() < 1e-12);
    }

    #[test]
    fn clip_rejects_degenerate_rect() {
        assert!(Rect::new([1.0, 1.0], [0.0, 2.0]).is_err());
        assert!(Rect::new([0.0, 1.0], [3.0, 2.0]).is_err());
    }

    #[test]
    fn signed_angle_examples() {
        let e = Point::new(1.0, 0.0);
        assert_eq!(signed_angle(e, e).unwrap(), 0.0);
        assert!((signed_angle(e, Point::new(0.0, 1.0)).unwrap() - PI / 2.0).abs() < 1e-15);
        let (u, v) = (Point::new(1.0, 1.0), Point::new(-1.0, 2.0));
        let expected = (1.0 * 2.0 - -1.0_f64).atan2(-1.0 + 1.0 * 2.0);
        assert!((signed_angle(u, v).unwrap() - expected).abs() < 1e-15);
        assert_eq!(signed_angle(e, Point::new(-1.0, -0.0)).unwrap(), PI);
        assert!(matches!(
            signed_angle(Point::ORIGIN, e),
            Err(Error::DegenerateDisplacement { .. })
        ));
    }

    #[test]
    fn normalize_angle_range() {
        assert_eq!(normalize_angle(PI), PI);
        assert_eq!(normalize_angle(-PI), PI);
        assert!((normalize_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        for k in -20..20 {
            let a = normalize_angle(0.37 * k as f64);
            assert!(a > -PI && a <= PI);
        }
    }
}
