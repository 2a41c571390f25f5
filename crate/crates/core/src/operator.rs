//! The operator `T` on `C([a,b]) = {f : f(a) = m, f(b) = M, f continuous}`
//! and its Picard iteration towards the interpolant `f_*`.
//!
//! Functions are sampled on an [`EvalGrid`] (uniform points plus every node
//! `x_0..x_N` and `b`) and read between samples by piecewise-linear
//! interpolation. Values on the truncated tail `(x_N, b]` are `M`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::{CountableDataSystem, Segment};
use crate::error::{Error, Result};
use crate::maps::{MapSystem, RangePolicy, MEMBERSHIP_TOL};

/// Boundary slack for membership in `C([a,b])`.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Starting functions for the iteration. All satisfy `f(a) = m`, `f(b) = M`
/// by construction except `Custom`, which is checked.
#[derive(Clone)]
pub enum Seed {
    /// The line through `(a, m)` and `(b, M)`.
    Chord,
    /// Chord plus `Σ amp_k · sin(k π t)`, `t = (x - a)/(b - a)`.
    Bump { modes: Vec<(u32, f64)> },
    /// Constant `level` in the interior, joined linearly to `m` at `a` and
    /// `M` at `b` over a fraction `ramp` of the interval at each end.
    Plateau { level: f64, ramp: f64 },
    /// Another seed clipped into `Y`.
    Clamped(Box<Seed>),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Seed::Chord => f.write_str("Chord"),
            Seed::Bump { modes } => write!(f, "Bump({modes:?})"),
            Seed::Plateau { level, ramp } => write!(f, "Plateau({level}, {ramp})"),
            Seed::Clamped(s) => write!(f, "Clamped({s:?})"),
            Seed::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Seed {
    pub fn bump(amplitude: f64) -> Self {
        Seed::Bump {
            modes: vec![(1, amplitude)],
        }
    }

    /// Three random sine modes with `Σ|amp| <= max_amplitude`.
    pub fn random_bump<R: Rng>(rng: &mut R, max_amplitude: f64) -> Self {
        let raw: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let norm: f64 = raw.iter().map(|v| v.abs()).sum::<f64>().max(1e-300);
        let scale = rng.gen_range(0.0..=max_amplitude) / norm;
        let modes = raw
            .into_iter()
            .enumerate()
            .map(|(k, v)| (rng.gen_range(1..=6) * (k as u32 + 1), v * scale))
            .collect();
        Seed::Bump { modes }
    }

    /// A random bump clipped into `Y`, so it stays a valid argument of `T`.
    pub fn random_in_range<R: Rng>(rng: &mut R, max_amplitude: f64) -> Self {
        Seed::Clamped(Box::new(Self::random_bump(rng, max_amplitude)))
    }

    pub fn eval(&self, sys: &CountableDataSystem, x: f64) -> f64 {
        let (a, b, m, big_m) = (sys.a(), sys.b(), sys.m(), sys.big_m());
        let t = (x - a) / (b - a);
        let chord = (1.0 - t) * m + t * big_m;
        match self {
            Seed::Chord => chord,
            Seed::Bump { modes } => {
                chord
                    + modes
                        .iter()
                        .map(|(k, amp)| amp * (*k as f64 * PI * t).sin())
                        .sum::<f64>()
            }
            Seed::Plateau { level, ramp } => {
                if t <= *ramp {
                    m + (level - m) * (t / ramp)
                } else if t >= 1.0 - ramp {
                    big_m + (level - big_m) * ((1.0 - t) / ramp)
                } else {
                    *level
                }
            }
            Seed::Clamped(s) => {
                let y = sys.y_interval();
                s.eval(sys, x).clamp(y.lo, y.hi)
            }
            Seed::Custom(f) => f(x),
        }
    }

    /// Checks the boundary values that place the seed in `C([a,b])`.
    pub fn validate(&self, sys: &CountableDataSystem) -> Result<()> {
        if let Seed::Clamped(inner) = self {
            return inner.validate(sys);
        }
        if let Seed::Plateau { ramp, .. } = self {
            if !(*ramp > 0.0 && *ramp <= 0.5) {
                return Err(Error::InvalidInput(format!(
                    "plateau ramp must lie in (0, 0.5], got {ramp}"
                )));
            }
        }
        check_boundary(self.eval(sys, sys.a()), self.eval(sys, sys.b()), sys)
    }
}

fn check_boundary(fa: f64, fb: f64, sys: &CountableDataSystem) -> Result<()> {
    if (fa - sys.m()).abs() > BOUNDARY_TOL || (fb - sys.big_m()).abs() > BOUNDARY_TOL {
        return Err(Error::InvalidInput(format!(
            "function is not in C([a,b]): f(a) = {fa} (want {}), f(b) = {fb} (want {})",
            sys.m(),
            sys.big_m()
        )));
    }
    Ok(())
}

/// Sorted sample abscissae: `R + 1` uniform points on `[a,b]` merged with
/// the nodes `x_0..x_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGrid {
    xs: Vec<f64>,
    resolution: usize,
}

impl EvalGrid {
    pub fn new(sys: &CountableDataSystem, resolution: usize) -> Result<Self> {
        if resolution < 1 {
            return Err(Error::InvalidInput("grid resolution must be >= 1".into()));
        }
        let (a, b) = (sys.a(), sys.b());
        let mut xs: Vec<f64> = (0..=resolution)
            .map(|i| {
                let t = i as f64 / resolution as f64;
                (1.0 - t) * a + t * b
            })
            .collect();
        xs.extend(sys.nodes().iter().map(|p| p.x));
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        Ok(EvalGrid { xs, resolution })
    }

    /// A grid from explicit abscissae; must be strictly increasing.
    pub fn from_points(xs: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || !xs.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(
                "grid must have >= 2 strictly increasing points".into(),
            ));
        }
        let resolution = xs.len() - 1;
        Ok(EvalGrid { xs, resolution })
    }

    pub fn points(&self) -> &[f64] {
        &self.xs
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Largest gap between consecutive samples.
    pub fn max_spacing(&self) -> f64 {
        self.xs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Cell `j` and weight `w` with `x = (1-w)·xs[j] + w·xs[j+1]`.
    #[inline]
    fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.xs.len();
        let i = self.xs.partition_point(|&g| g <= x);
        let j = i.clamp(1, n - 1) - 1;
        let (x0, x1) = (self.xs[j], self.xs[j + 1]);
        let w = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
        (j, w)
    }

    fn check_contains_nodes(&self, sys: &CountableDataSystem) -> Result<()> {
        for (n, p) in sys.nodes().iter().enumerate() {
            if self.xs.binary_search_by(|g| g.total_cmp(&p.x)).is_err() {
                return Err(Error::Config(format!(
                    "evaluation grid is missing node x_{n} = {}",
                    p.x
                )));
            }
        }
        if self.xs.last() != Some(&sys.b()) || self.xs.first() != Some(&sys.a()) {
            return Err(Error::Config("evaluation grid must span exactly [a, b]".into()));
        }
        Ok(())
    }
}

/// Samples of a function on an [`EvalGrid`], read by linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<EvalGrid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<EvalGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_fn(grid: Arc<EvalGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.xs.iter().map(|&x| f(x)).collect();
        GridFunction { grid, values }
    }

    pub fn from_seed(grid: Arc<EvalGrid>, seed: &Seed, sys: &CountableDataSystem) -> Self {
        Self::from_fn(grid, |x| seed.eval(sys, x))
    }

    pub fn grid(&self) -> &Arc<EvalGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.xs.iter().copied().zip(self.values.iter().copied())
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let (j, w) = self.grid.locate(x);
        (1.0 - w) * self.values[j] + w * self.values[j + 1]
    }

    /// Uniform distance over the shared grid.
    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        if self.grid.xs != other.grid.xs {
            return Err(Error::InvalidInput(
                "uniform distance needs functions on the same grid".into(),
            ));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max))
    }

    /// Largest distance of a sample outside `Y`.
    pub fn range_excess(&self, sys: &CountableDataSystem) -> f64 {
        let y = sys.y_interval();
        self.values.iter().map(|v| y.excess(*v)).fold(0.0, f64::max)
    }

    /// Largest jump between adjacent samples.
    pub fn max_jump(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max)
    }

    pub fn check_boundary(&self, sys: &CountableDataSystem) -> Result<()> {
        check_boundary(self.values[0], *self.values.last().unwrap(), sys)
    }
}

#[derive(Debug, Clone, Copy)]
enum Pull {
    Tail,
    Map { n: usize, u: f64, cell: usize, w: f64 },
}

/// `T` specialised to one grid: the pullback `l_n^{-1}(x)` of every sample
/// and its interpolation cell are computed once.
#[derive(Debug, Clone)]
pub struct TOperator<'a> {
    ms: &'a MapSystem,
    grid: Arc<EvalGrid>,
    pulls: Vec<Pull>,
}

impl<'a> TOperator<'a> {
    pub fn new(ms: &'a MapSystem, grid: Arc<EvalGrid>) -> Result<Self> {
        let sys = ms.system();
        grid.check_contains_nodes(sys)?;
        let pulls = grid
            .xs
            .iter()
            .map(|&x| match sys.segment_unchecked(x) {
                Segment::Tail => Pull::Tail,
                Segment::Interval(n) => {
                    let u = ms.subinterval_map(n).expect("n <= N").pull_back(x);
                    let (cell, w) = grid.locate(u);
                    Pull::Map { n, u, cell, w }
                }
            })
            .collect();
        Ok(TOperator { ms, grid, pulls })
    }

    pub fn grid(&self) -> &Arc<EvalGrid> {
        &self.grid
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        if !Arc::ptr_eq(&f.grid, &self.grid) && f.grid.xs != self.grid.xs {
            return Err(Error::InvalidInput("function lives on a different grid".into()));
        }
        let sys = self.ms.system();
        if self.ms.range_policy() == RangePolicy::Strict {
            let y = sys.y_interval();
            if let Some(v) = f.values.iter().find(|v| !y.contains(**v, MEMBERSHIP_TOL)) {
                return Err(Error::Domain {
                    what: "f(x)",
                    value: *v,
                    lo: y.lo,
                    hi: y.hi,
                });
            }
        }
        let big_m = sys.big_m();
        let values = self
            .pulls
            .par_iter()
            .map(|p| match *p {
                Pull::Tail => Ok(big_m),
                Pull::Map { n, u, cell, w } => {
                    let fu = (1.0 - w) * f.values[cell] + w * f.values[cell + 1];
                    self.ms.w_kernel(n, u, fu)
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(GridFunction {
            grid: Arc::clone(&self.grid),
            values,
        })
    }
}

/// One application of `T` to a sampled function.
pub fn apply_t(f: &GridFunction, ms: &MapSystem) -> Result<GridFunction> {
    TOperator::new(ms, Arc::clone(&f.grid))?.apply(f)
}

/// `(T^[k] seed)(x)` evaluated exactly by unrolling the pullback chain of
/// `x`; no grid is involved.
pub fn evaluate_recursive(ms: &MapSystem, x: f64, depth: usize, seed: &Seed) -> Result<f64> {
    let sys = ms.system();
    sys.check_x(x)?;
    let mut chain = Vec::with_capacity(depth);
    let mut u = x;
    let mut inner = None;
    for _ in 0..depth {
        match sys.segment_unchecked(u) {
            Segment::Tail => {
                inner = Some(sys.big_m());
                break;
            }
            Segment::Interval(n) => {
                u = ms.subinterval_map(n)?.pull_back(u);
                chain.push((n, u));
            }
        }
    }
    let mut v = match inner {
        Some(v) => v,
        None => seed.eval(sys, u),
    };
    for &(n, u) in chain.iter().rev() {
        v = ms.w_kernel(n, u, v)?;
    }
    Ok(v)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    /// Number of applications of `T`.
    pub iterations: usize,
    /// Uniform distance between the last two iterates.
    pub sup_residual: f64,
    pub history: Vec<f64>,
    /// `|f(x_n) - y_n|` for `n = 0..=N`.
    pub node_errors: Vec<f64>,
    pub limit_error: f64,
    pub converged: bool,
    pub tolerance: f64,
    pub max_iter: usize,
    pub grid_resolution: usize,
    pub grid_points: usize,
    /// Uniform error bound from truncating the tail.
    pub tail_bound: f64,
    /// Largest excursion of the result outside `Y`.
    pub range_excess: f64,
}

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub interpolant: GridFunction,
    pub report: ResidualReport,
}

/// Iterates `T` from `seed` until successive iterates are within `tol`
/// uniformly, or `max_iter` applications have been made.
pub fn picard_iterate(
    ms: &MapSystem,
    seed: &Seed,
    grid: Arc<EvalGrid>,
    tol: f64,
    max_iter: usize,
) -> Result<PicardOutcome> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    if max_iter < 1 {
        return Err(Error::InvalidInput("max_iter must be >= 1".into()));
    }
    let sys = ms.system();
    seed.validate(sys)?;
    let op = TOperator::new(ms, Arc::clone(&grid))?;
    let mut f = GridFunction::from_seed(grid, seed, sys);
    let mut history = Vec::new();
    let mut converged = false;
    for _ in 0..max_iter {
        let next = op.apply(&f)?;
        let r = next.sup_distance(&f)?;
        history.push(r);
        f = next;
        if r <= tol {
            converged = true;
            break;
        }
    }
    let node_errors = sys
        .nodes()
        .iter()
        .map(|p| (f.eval(p.x) - p.y).abs())
        .collect();
    let report = ResidualReport {
        iterations: history.len(),
        sup_residual: *history.last().unwrap(),
        node_errors,
        limit_error: (f.eval(sys.b()) - sys.big_m()).abs(),
        converged,
        tolerance: tol,
        max_iter,
        grid_resolution: f.grid.resolution(),
        grid_points: f.grid.len(),
        tail_bound: ms.tail_bound()?.value,
        range_excess: f.range_excess(sys),
        history,
    };
    Ok(PicardOutcome {
        interpolant: f,
        report,
    })
}

/// A computable approximant of `f_*`.
#[derive(Debug, Clone)]
pub enum Interpolant {
    Grid(GridFunction),
    Recursive { seed: Seed, depth: usize },
}

impl Interpolant {
    pub fn value(&self, ms: &MapSystem, x: f64) -> Result<f64> {
        match self {
            Interpolant::Grid(g) => {
                ms.system().check_x(x)?;
                Ok(g.eval(x))
            }
            Interpolant::Recursive { seed, depth } => evaluate_recursive(ms, x, *depth, seed),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InterpolationReport {
    pub node_errors: Vec<f64>,
    pub limit_error: f64,
    pub max_error: f64,
    /// Node indices whose error exceeds the tolerance.
    pub failures: Vec<usize>,
    pub limit_ok: bool,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks `|f(x_n) - y_n| <= tol` for `0 <= n <= N` and `|f(b) - M| <= tol`.
pub fn verify_interpolation(
    f: &Interpolant,
    ms: &MapSystem,
    tol: f64,
) -> Result<InterpolationReport> {
    let sys = ms.system();
    let node_errors = sys
        .nodes()
        .iter()
        .map(|p| Ok((f.value(ms, p.x)? - p.y).abs()))
        .collect::<Result<Vec<f64>>>()?;
    let limit_error = (f.value(ms, sys.b())? - sys.big_m()).abs();
    let failures: Vec<usize> = node_errors
        .iter()
        .enumerate()
        .filter(|(_, e)| !(**e <= tol))
        .map(|(n, _)| n)
        .collect();
    let limit_ok = limit_error <= tol;
    let max_error = node_errors.iter().copied().fold(limit_error, f64::max);
    Ok(InterpolationReport {
        pass: failures.is_empty() && limit_ok,
        node_errors,
        limit_error,
        max_error,
        failures,
        limit_ok,
        tolerance: tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionReport {
    pub dist_gh: f64,
    pub dist_tg_th: f64,
    pub phi_bound: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Checks `d(Tg, Th) <= φ(d(g, h)) + slack` in the uniform grid distance.
pub fn t_contraction_check(
    ms: &MapSystem,
    g: &GridFunction,
    h: &GridFunction,
    slack: f64,
) -> Result<ContractionReport> {
    let sys = ms.system();
    g.check_boundary(sys)?;
    h.check_boundary(sys)?;
    let op = TOperator::new(ms, Arc::clone(&g.grid))?;
    let dist_gh = g.sup_distance(h)?;
    let dist_tg_th = op.apply(g)?.sup_distance(&op.apply(h)?)?;
    let phi_bound = ms.phi().apply(dist_gh);
    Ok(ContractionReport {
        dist_gh,
        dist_tg_th,
        phi_bound,
        slack,
        holds: dist_tg_th <= phi_bound + slack,
    })
}
