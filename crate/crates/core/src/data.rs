//! Countable systems of data `Δ = {(x_n, y_n)}` given by closed-form
//! generators with exact declared limits, truncated at a depth `N`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::metric::Point2;

/// A real sequence indexed from `n = 0` together with its exact limit.
#[derive(Clone)]
pub enum SequenceSpec {
    /// `offset + scale · base^(-n)`, `base > 1`; limit `offset`.
    Geometric { offset: f64, scale: f64, base: f64 },
    /// `offset + scale / (n + shift)`, `shift > 0`; limit `offset`.
    Harmonic { offset: f64, scale: f64, shift: f64 },
    /// Explicit values; the limit must be supplied, it is never extrapolated.
    Table { values: Vec<f64>, limit: f64 },
    Function {
        label: String,
        f: Arc<dyn Fn(usize) -> f64 + Send + Sync>,
        limit: f64,
    },
}

impl fmt::Debug for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSpec::Geometric {
                offset,
                scale,
                base,
            } => write!(f, "Geometric({offset} + {scale}*{base}^-n)"),
            SequenceSpec::Harmonic {
                offset,
                scale,
                shift,
            } => write!(f, "Harmonic({offset} + {scale}/(n+{shift}))"),
            SequenceSpec::Table { values, limit } => {
                write!(f, "Table(len={}, limit={limit})", values.len())
            }
            SequenceSpec::Function { label, limit, .. } => write!(f, "Function({label}, {limit})"),
        }
    }
}

impl SequenceSpec {
    pub fn geometric(offset: f64, scale: f64, base: f64) -> Self {
        SequenceSpec::Geometric {
            offset,
            scale,
            base,
        }
    }

    pub fn harmonic(offset: f64, scale: f64, shift: f64) -> Self {
        SequenceSpec::Harmonic {
            offset,
            scale,
            shift,
        }
    }

    pub fn constant(c: f64) -> Self {
        SequenceSpec::Geometric {
            offset: c,
            scale: 0.0,
            base: 2.0,
        }
    }

    pub fn table(values: Vec<f64>, limit: f64) -> Self {
        SequenceSpec::Table { values, limit }
    }

    pub fn function(
        label: impl Into<String>,
        limit: f64,
        f: impl Fn(usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SequenceSpec::Function {
            label: label.into(),
            f: Arc::new(f),
            limit,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SequenceSpec::Geometric {
                offset,
                scale,
                base,
            } => {
                ensure_finite("geometric offset", *offset)?;
                ensure_finite("geometric scale", *scale)?;
                ensure_finite("geometric base", *base)?;
                if *base <= 1.0 {
                    return Err(Error::InvalidInput(format!(
                        "geometric base must exceed 1, got {base}"
                    )));
                }
            }
            SequenceSpec::Harmonic {
                offset,
                scale,
                shift,
            } => {
                ensure_finite("harmonic offset", *offset)?;
                ensure_finite("harmonic scale", *scale)?;
                ensure_finite("harmonic shift", *shift)?;
                if *shift <= 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "harmonic shift must be positive, got {shift}"
                    )));
                }
            }
            SequenceSpec::Table { values, limit } => {
                ensure_finite("table limit", *limit)?;
                if values.is_empty() {
                    return Err(Error::InvalidInput("table sequence is empty".into()));
                }
            }
            SequenceSpec::Function { limit, .. } => ensure_finite("function limit", *limit)?,
        }
        Ok(())
    }

    /// Highest index the sequence can produce, if bounded.
    pub fn max_index(&self) -> Option<usize> {
        match self {
            SequenceSpec::Table { values, .. } => Some(values.len() - 1),
            _ => None,
        }
    }

    pub fn value(&self, n: usize) -> Result<f64> {
        let v = match self {
            SequenceSpec::Geometric {
                offset,
                scale,
                base,
            } => {
                if *scale == 0.0 {
                    *offset
                } else {
                    offset + scale / base.powi(n as i32)
                }
            }
            SequenceSpec::Harmonic {
                offset,
                scale,
                shift,
            } => offset + scale / (n as f64 + shift),
            SequenceSpec::Table { values, .. } => *values.get(n).ok_or(Error::Index {
                index: n,
                max: values.len() - 1,
            })?,
            SequenceSpec::Function { f, .. } => f(n),
        };
        ensure_finite("sequence value", v)?;
        Ok(v)
    }

    pub fn limit(&self) -> f64 {
        match self {
            SequenceSpec::Geometric { offset, .. } | SequenceSpec::Harmonic { offset, .. } => {
                *offset
            }
            SequenceSpec::Table { limit, .. } | SequenceSpec::Function { limit, .. } => *limit,
        }
    }
}

/// The compact interval `Y = [lo, hi]` with `d(y, y') = |y - y'|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YInterval {
    pub lo: f64,
    pub hi: f64,
}

impl YInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        ensure_finite("Y lower end", lo)?;
        ensure_finite("Y upper end", hi)?;
        if lo >= hi {
            return Err(Error::InvalidInput(format!(
                "Y interval must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(YInterval { lo, hi })
    }

    pub fn diam(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, y: f64, tol: f64) -> bool {
        y >= self.lo - tol && y <= self.hi + tol
    }

    /// How far `y` lies outside the interval (0 when inside).
    pub fn excess(&self, y: f64) -> f64 {
        (self.lo - y).max(y - self.hi).max(0.0)
    }
}

/// Which piece of `[a, b]` a point falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    /// `x ∈ [x_{n-1}, x_n]`, `1 <= n <= N`.
    Interval(usize),
    /// `x ∈ (x_N, b]`.
    Tail,
}

#[derive(Debug, Clone)]
pub struct CountableDataSystem {
    xs: SequenceSpec,
    ys: SequenceSpec,
    depth: usize,
    y_interval: YInterval,
    nodes: Vec<Point2>,
    a: f64,
    b: f64,
    m: f64,
    big_m: f64,
}

pub fn build_system(
    xs: SequenceSpec,
    ys: SequenceSpec,
    depth: usize,
    y_interval: YInterval,
) -> Result<CountableDataSystem> {
    CountableDataSystem::new(xs, ys, depth, y_interval)
}

impl CountableDataSystem {
    pub fn new(
        xs: SequenceSpec,
        ys: SequenceSpec,
        depth: usize,
        y_interval: YInterval,
    ) -> Result<Self> {
        if depth < 1 {
            return Err(Error::InvalidInput("truncation depth must be >= 1".into()));
        }
        xs.validate()?;
        ys.validate()?;
        let y_interval = YInterval::new(y_interval.lo, y_interval.hi)?;
        for (name, s) in [("x", &xs), ("y", &ys)] {
            if let Some(max) = s.max_index() {
                if max < depth {
                    return Err(Error::InvalidInput(format!(
                        "{name} table has {} values but depth {depth} needs {}",
                        max + 1,
                        depth + 1
                    )));
                }
            }
        }

        let mut nodes = Vec::with_capacity(depth + 1);
        for n in 0..=depth {
            let x = xs.value(n)?;
            let y = ys.value(n)?;
            if let Some(prev) = nodes.last().map(|p: &Point2| p.x) {
                if !(x > prev) {
                    return Err(Error::NotIncreasing {
                        sequence: "x",
                        index: n,
                        prev,
                        value: x,
                    });
                }
            }
            if !y_interval.contains(y, 0.0) {
                return Err(Error::Containment {
                    sequence: "y",
                    index: n,
                    value: y,
                    lo: y_interval.lo,
                    hi: y_interval.hi,
                });
            }
            nodes.push(Point2::new(x, y));
        }

        let b = xs.limit();
        let x_last = nodes[depth].x;
        if !(b > x_last) {
            return Err(Error::LimitConsistency {
                sequence: "x",
                depth,
                value: x_last,
                limit: b,
            });
        }
        let big_m = ys.limit();
        if !y_interval.contains(big_m, 0.0) {
            return Err(Error::Containment {
                sequence: "y-limit",
                index: usize::MAX,
                value: big_m,
                lo: y_interval.lo,
                hi: y_interval.hi,
            });
        }

        Ok(CountableDataSystem {
            a: nodes[0].x,
            m: nodes[0].y,
            b,
            big_m,
            xs,
            ys,
            depth,
            y_interval,
            nodes,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn m(&self) -> f64 {
        self.m
    }
    /// The limit `M` of the y-sequence.
    pub fn big_m(&self) -> f64 {
        self.big_m
    }
    pub fn depth(&self) -> usize {
        self.depth
    }
    pub fn y_interval(&self) -> YInterval {
        self.y_interval
    }
    pub fn xs(&self) -> &SequenceSpec {
        &self.xs
    }
    pub fn ys(&self) -> &SequenceSpec {
        &self.ys
    }

    /// Nodes `(x_0, y_0) ..= (x_N, y_N)`.
    pub fn nodes(&self) -> &[Point2] {
        &self.nodes
    }

    pub fn limit_point(&self) -> Point2 {
        Point2::new(self.b, self.big_m)
    }

    pub fn node(&self, n: usize) -> Result<Point2> {
        self.nodes.get(n).copied().ok_or(Error::Index {
            index: n,
            max: self.depth,
        })
    }

    /// Data point for any index, including beyond the truncation depth.
    pub fn point_at(&self, n: usize) -> Result<Point2> {
        if n <= self.depth {
            return Ok(self.nodes[n]);
        }
        Ok(Point2::new(self.xs.value(n)?, self.ys.value(n)?))
    }

    pub fn check_x(&self, x: f64) -> Result<()> {
        if !(x >= self.a && x <= self.b) {
            return Err(Error::Domain {
                what: "x",
                value: x,
                lo: self.a,
                hi: self.b,
            });
        }
        Ok(())
    }

    /// Locates `x` among the truncated intervals; shared endpoints go to the
    /// left interval.
    pub fn find_interval(&self, x: f64) -> Result<Segment> {
        self.check_x(x)?;
        Ok(self.segment_unchecked(x))
    }

    #[inline]
    pub(crate) fn segment_unchecked(&self, x: f64) -> Segment {
        let xs = &self.nodes[1..];
        let i = xs.partition_point(|p| p.x < x);
        if i < xs.len() {
            Segment::Interval(i + 1)
        } else {
            Segment::Tail
        }
    }
}

pub fn node(sys: &CountableDataSystem, n: usize) -> Result<Point2> {
    sys.node(n)
}

pub fn find_interval(sys: &CountableDataSystem, x: f64) -> Result<Segment> {
    sys.find_interval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical() -> CountableDataSystem {
        build_system(
            SequenceSpec::geometric(1.0, -1.0, 2.0),
            SequenceSpec::geometric(1.0, -1.0, 3.0),
            8,
            YInterval::new(0.0, 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn canonical_limits() {
        let s = canonical();
        assert_eq!((s.a(), s.b(), s.m(), s.big_m()), (0.0, 1.0, 0.0, 1.0));
    }

    #[test]
    fn canonical_nodes() {
        let s = canonical();
        assert_eq!(s.node(0).unwrap(), Point2::new(0.0, 0.0));
        let p1 = s.node(1).unwrap();
        assert_eq!(p1.x, 0.5);
        assert!((p1.y - 2.0 / 3.0).abs() < 1e-15);
        let p3 = s.node(3).unwrap();
        assert_eq!(p3.x, 0.875);
        assert!((p3.y - 26.0 / 27.0).abs() < 1e-15);
        assert!(matches!(s.node(9), Err(Error::Index { index: 9, max: 8 })));
    }

    #[test]
    fn constant_y_system() {
        let s = build_system(
            SequenceSpec::geometric(1.0, -1.0, 2.0),
            SequenceSpec::constant(0.0),
            4,
            YInterval::new(0.0, 1.0).unwrap(),
        )
        .unwrap();
        assert_eq!((s.m(), s.big_m()), (0.0, 0.0));
    }

    #[test]
    fn alternating_xs_rejected_at_index_one() {
        let err = build_system(
            SequenceSpec::table(vec![1.0, -1.0, 1.0, -1.0, 1.0], 0.0),
            SequenceSpec::constant(0.0),
            4,
            YInterval::new(0.0, 1.0).unwrap(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotIncreasing { index: 1, .. }), "{err}");
    }

    #[test]
    fn y_outside_interval_rejected() {
        let err = build_system(
            SequenceSpec::geometric(1.0, -1.0, 2.0),
            SequenceSpec::geometric(2.0, -2.0, 3.0),
            4,
            YInterval::new(0.0, 1.0).unwrap(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Containment { index: 1, .. }), "{err}");
    }

    #[test]
    fn limit_must_exceed_last_node() {
        let err = build_system(
            SequenceSpec::table(vec![0.0, 0.5, 0.75], 0.75),
            SequenceSpec::constant(0.0),
            2,
            YInterval::new(0.0, 1.0).unwrap(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::LimitConsistency { .. }), "{err}");
    }

    #[test]
    fn find_interval_examples() {
        let s = canonical();
        assert_eq!(s.find_interval(0.6).unwrap(), Segment::Interval(2));
        assert_eq!(s.find_interval(0.5).unwrap(), Segment::Interval(1));
        assert_eq!(s.find_interval(0.0).unwrap(), Segment::Interval(1));
        assert_eq!(s.find_interval(1.0).unwrap(), Segment::Tail);
        let x8 = s.node(8).unwrap().x;
        assert_eq!(s.find_interval(x8).unwrap(), Segment::Interval(8));
        assert_eq!(s.find_interval(0.999).unwrap(), Segment::Tail);
        assert!(s.find_interval(1.0 + 1e-12).is_err());
        assert!(s.find_interval(-1e-12).is_err());
    }

    #[test]
    fn find_interval_brackets_x() {
        let s = canonical();
        let x_last = s.node(8).unwrap().x;
        for i in 0..=10_000 {
            let x = i as f64 / 10_000.0;
            match s.find_interval(x).unwrap() {
                Segment::Interval(n) => {
                    let lo = s.node(n - 1).unwrap().x;
                    let hi = s.node(n).unwrap().x;
                    assert!(lo <= x && x <= hi);
                    if n > 1 {
                        assert!(x > lo, "left tie-break violated at {x}");
                    }
                }
                Segment::Tail => assert!(x > x_last),
            }
        }
    }

    #[test]
    fn harmonic_sequence() {
        let s = build_system(
            SequenceSpec::harmonic(1.0, -1.0, 1.0),
            SequenceSpec::harmonic(0.5, -0.5, 1.0),
            6,
            YInterval::new(0.0, 1.0).unwrap(),
        )
        .unwrap();
        assert_eq!(s.a(), 0.0);
        assert_eq!(s.node(1).unwrap().x, 0.5);
        assert_eq!(s.b(), 1.0);
    }
}
