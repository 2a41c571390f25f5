//! Metric primitives on `[a,b] × Y`: the weighted product metric `d_θ`,
//! the plain sum metric `d_1`, and Hausdorff distances between finite
//! point sets.
//!
//! Both metrics dominate `|x - x'|`, which is what lets
//! [`hausdorff_sweep`] prune its scan on x-sorted sets while staying exact.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Point2 { x, y }
    }
}

/// Weight `θ ∈ (0,1)` of the product metric `|x - x'| + θ|y - y'|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaMetric {
    theta: f64,
}

impl ThetaMetric {
    pub fn new(theta: f64) -> Result<Self> {
        ensure_finite("theta", theta)?;
        if theta <= 0.0 || theta >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "theta must lie in (0, 1), got {theta}"
            )));
        }
        Ok(ThetaMetric { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Metric {
    D1,
    DTheta(ThetaMetric),
}

impl Metric {
    #[inline]
    pub fn eval(&self, p: &Point2, q: &Point2) -> f64 {
        match self {
            Metric::D1 => (p.x - q.x).abs() + (p.y - q.y).abs(),
            Metric::DTheta(m) => (p.x - q.x).abs() + m.theta * (p.y - q.y).abs(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::D1 => "d1",
            Metric::DTheta(_) => "dtheta",
        }
    }
}

pub fn d_theta(p: Point2, q: Point2, m: ThetaMetric) -> Result<f64> {
    if !p.is_finite() || !q.is_finite() {
        return Err(Error::InvalidInput("non-finite point".into()));
    }
    Ok(Metric::DTheta(m).eval(&p, &q))
}

pub fn d1(p: Point2, q: Point2) -> Result<f64> {
    if !p.is_finite() || !q.is_finite() {
        return Err(Error::InvalidInput("non-finite point".into()));
    }
    Ok(Metric::D1.eval(&p, &q))
}

/// A non-empty finite point cloud, sorted by `(x, y)`, in which no two points
/// are within `tolerance` of each other in `d_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    points: Vec<Point2>,
    tolerance: f64,
}

impl PointSet {
    pub fn new(points: Vec<Point2>, tolerance: f64) -> Result<Self> {
        ensure_finite("dedup tolerance", tolerance)?;
        if tolerance < 0.0 {
            return Err(Error::InvalidInput(format!(
                "dedup tolerance must be >= 0, got {tolerance}"
            )));
        }
        if points.is_empty() {
            return Err(Error::InvalidInput("point set is empty".into()));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite point {p:?}")));
        }
        Ok(PointSet {
            points: separated_net(points, tolerance),
            tolerance,
        })
    }

    pub fn singleton(p: Point2) -> Self {
        PointSet {
            points: vec![p],
            tolerance: 0.0,
        }
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn into_points(self) -> Vec<Point2> {
        self.points
    }

    /// Reduces the set to at most `budget` points by a greedy separated net.
    ///
    /// The radius starts at the dedup tolerance and doubles until the net
    /// fits; every removed point lies within the returned radius (in `d_1`)
    /// of a kept one, so the Hausdorff error of thinning is at most that
    /// radius. Returns `None` for the radius when no thinning was needed.
    pub fn thin(self, budget: usize) -> (PointSet, Option<f64>) {
        self.thin_from(budget, 0.0)
    }

    /// [`thin`](Self::thin) with the doubling started at `start` (when larger
    /// than the default), e.g. the radius that the previous, sparser cloud
    /// of an iteration needed.
    pub fn thin_from(self, budget: usize, start: f64) -> (PointSet, Option<f64>) {
        if self.points.len() <= budget.max(1) {
            return (self, None);
        }
        let span = {
            let (lo, hi) = self.bounding_box();
            (hi.x - lo.x) + (hi.y - lo.y)
        };
        let default = if self.tolerance > 0.0 {
            self.tolerance
        } else {
            (span / budget as f64).max(f64::MIN_POSITIVE)
        };
        let mut radius = default.max(start);
        loop {
            let net = separated_net(self.points.clone(), radius);
            if net.len() <= budget.max(1) {
                return (
                    PointSet {
                        points: net,
                        tolerance: self.tolerance,
                    },
                    Some(radius),
                );
            }
            radius *= 2.0;
        }
    }

    pub fn bounding_box(&self) -> (Point2, Point2) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.points {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// Smallest `d_1` distance from `p` to the set.
    pub fn distance_to(&self, p: &Point2, metric: Metric) -> f64 {
        nearest_sorted(&self.points, p, metric)
    }
}

fn sort_points(points: &mut [Point2]) {
    points.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
}

/// Sorts and greedily drops every point within `radius` (d_1) of an
/// already-kept point.
fn separated_net(mut points: Vec<Point2>, radius: f64) -> Vec<Point2> {
    sort_points(&mut points);
    let mut kept: Vec<Point2> = Vec::with_capacity(points.len());
    for p in points {
        let close = kept
            .iter()
            .rev()
            .take_while(|k| p.x - k.x <= radius)
            .any(|k| Metric::D1.eval(k, &p) <= radius);
        if !close {
            kept.push(p);
        }
    }
    kept
}

/// Distance from `p` to an x-sorted slice, scanning outward from the
/// insertion point and stopping once `|Δx|` alone exceeds the best found.
fn nearest_sorted(sorted: &[Point2], p: &Point2, metric: Metric) -> f64 {
    let start = sorted.partition_point(|q| q.x < p.x);
    let mut best = f64::INFINITY;
    for q in &sorted[start..] {
        if q.x - p.x >= best {
            break;
        }
        best = best.min(metric.eval(p, q));
    }
    for q in sorted[..start].iter().rev() {
        if p.x - q.x >= best {
            break;
        }
        best = best.min(metric.eval(p, q));
    }
    best
}

fn directed_exhaustive(a: &[Point2], b: &[Point2], metric: Metric) -> f64 {
    a.par_iter()
        .map(|p| {
            b.iter()
                .map(|q| metric.eval(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

fn directed_sweep(a: &[Point2], b_sorted: &[Point2], metric: Metric) -> f64 {
    a.par_iter()
        .map(|p| nearest_sorted(b_sorted, p, metric))
        .reduce(|| 0.0, f64::max)
}

/// Hausdorff distance by exhaustive pairwise scan, `O(|A|·|B|)`.
pub fn hausdorff(a: &PointSet, b: &PointSet, metric: Metric) -> Result<f64> {
    hausdorff_points(&a.points, &b.points, metric)
}

/// Exhaustive Hausdorff distance on raw slices.
pub fn hausdorff_points(a: &[Point2], b: &[Point2], metric: Metric) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("Hausdorff distance of an empty set".into()));
    }
    Ok(directed_exhaustive(a, b, metric).max(directed_exhaustive(b, a, metric)))
}

/// Exact Hausdorff distance using x-sorted pruning.
///
/// Same value as [`hausdorff`]; typically close to `O(n log n)` on
/// graph-like clouds.
pub fn hausdorff_sweep(a: &PointSet, b: &PointSet, metric: Metric) -> Result<f64> {
    Ok(directed_sweep(&a.points, &b.points, metric)
        .max(directed_sweep(&b.points, &a.points, metric)))
}

/// Sweep variant for unsorted slices; sorts copies internally.
pub fn hausdorff_sweep_points(a: &[Point2], b: &[Point2], metric: Metric) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("Hausdorff distance of an empty set".into()));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sort_points(&mut sa);
    sort_points(&mut sb);
    Ok(directed_sweep(&sa, &sb, metric).max(directed_sweep(&sb, &sa, metric)))
}
