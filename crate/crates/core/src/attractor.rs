//! The fractal operator `F_S(K) = ∪ f_n(K)` on finite point clouds, its
//! iteration towards the attractor, and the comparison of the attractor
//! with the graph of the interpolant.
//!
//! Clouds are truncated to `n = 1..N`; the limit point `(b, M)` of the
//! discarded maps is appended at every step in place of the closure.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{MapSystem, MEMBERSHIP_TOL};
use crate::metric::{hausdorff_sweep, hausdorff_sweep_points, Metric, Point2, PointSet};
use crate::operator::{GridFunction, Interpolant, PicardOutcome, Seed};

/// Which of the two equivalent metrics to measure clouds in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricChoice {
    #[default]
    D1,
    DTheta,
}

impl MetricChoice {
    pub fn resolve(self, ms: &MapSystem) -> Metric {
        match self {
            MetricChoice::D1 => Metric::D1,
            MetricChoice::DTheta => Metric::DTheta(ms.theta_metric()),
        }
    }
}

impl FromStr for MetricChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d1" => Ok(MetricChoice::D1),
            "dtheta" | "d_theta" => Ok(MetricChoice::DTheta),
            other => Err(Error::Config(format!(
                "unknown metric '{other}' (expected d1 or dtheta)"
            ))),
        }
    }
}

impl fmt::Display for MetricChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricChoice::D1 => "d1",
            MetricChoice::DTheta => "dtheta",
        })
    }
}

#[derive(Debug, Clone)]
pub enum InitialSet {
    /// The data points `(x_n, y_n)`, `0 <= n <= N`.
    Nodes,
    /// The single point `(b, M)`.
    LimitPoint,
    /// `samples + 1` equally spaced points on the graph of a seed.
    SeedGraph { seed: Seed, samples: usize },
    Cloud(Vec<Point2>),
}

#[derive(Debug, Clone)]
pub struct IterationConfig {
    pub initial: InitialSet,
    pub max_iterations: usize,
    /// Stop once successive clouds are this close in Hausdorff distance.
    pub tolerance: f64,
    /// Points closer than this (in `d_1`) are merged.
    pub dedup: f64,
    /// Cloud size cap; larger clouds are thinned.
    pub budget: usize,
    pub metric: MetricChoice,
}

impl Default for IterationConfig {
    fn default() -> Self {
        IterationConfig {
            initial: InitialSet::Nodes,
            max_iterations: 60,
            tolerance: 1e-6,
            dedup: 1e-7,
            budget: 200_000,
            metric: MetricChoice::D1,
        }
    }
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || !(self.dedup > 0.0) {
            return Err(Error::InvalidInput(format!(
                "attractor tolerances must be positive (tolerance {}, dedup {})",
                self.tolerance, self.dedup
            )));
        }
        if self.max_iterations == 0 || self.budget == 0 {
            return Err(Error::InvalidInput(
                "max_iterations and budget must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct AttractorApprox {
    pub cloud: PointSet,
    pub iteration: usize,
    pub hausdorff_trace: Vec<f64>,
    pub converged: bool,
    pub tolerance: f64,
    pub metric: Metric,
    /// Largest thinning radius used, if the budget was ever hit.
    pub thinning_radius: Option<f64>,
}

fn check_in_domain(ms: &MapSystem, points: &[Point2]) -> Result<()> {
    let sys = ms.system();
    let (a, b) = (sys.a(), sys.b());
    for p in points {
        if !p.is_finite() || p.x < a - MEMBERSHIP_TOL || p.x > b + MEMBERSHIP_TOL {
            return Err(Error::Domain {
                what: "cloud x",
                value: p.x,
                lo: a,
                hi: b,
            });
        }
    }
    Ok(())
}

/// `∪_{n=1..N} f_n(K)` plus `(b, M)`, without deduplication.
pub fn fractal_union(points: &[Point2], ms: &MapSystem) -> Result<Vec<Point2>> {
    check_in_domain(ms, points)?;
    let depth = ms.depth();
    let mut out = (1..=depth)
        .into_par_iter()
        .flat_map_iter(|n| points.iter().map(move |p| ms.f_kernel(n, *p)))
        .collect::<Result<Vec<Point2>>>()?;
    out.push(ms.system().limit_point());
    Ok(out)
}

/// One application of `F_S`, deduplicated at the cloud's own tolerance.
pub fn fractal_step(k: &PointSet, ms: &MapSystem) -> Result<PointSet> {
    PointSet::new(fractal_union(k.points(), ms)?, k.tolerance())
}

fn initial_cloud(ms: &MapSystem, cfg: &IterationConfig) -> Result<PointSet> {
    let sys = ms.system();
    let points = match &cfg.initial {
        InitialSet::Nodes => sys.nodes().to_vec(),
        InitialSet::LimitPoint => vec![sys.limit_point()],
        InitialSet::SeedGraph { seed, samples } => {
            seed.validate(sys)?;
            let samples = (*samples).max(1);
            (0..=samples)
                .map(|i| {
                    let t = i as f64 / samples as f64;
                    let x = (1.0 - t) * sys.a() + t * sys.b();
                    Point2::new(x, seed.eval(sys, x))
                })
                .collect()
        }
        InitialSet::Cloud(points) => {
            check_in_domain(ms, points)?;
            points.clone()
        }
    };
    PointSet::new(points, cfg.dedup)
}

/// Picard iteration of `F_S` from the configured initial set.
pub fn iterate_attractor(ms: &MapSystem, cfg: &IterationConfig) -> Result<AttractorApprox> {
    cfg.validate()?;
    let metric = cfg.metric.resolve(ms);
    let mut cloud = initial_cloud(ms, cfg)?;
    let mut trace = Vec::new();
    let mut thinning_radius: Option<f64> = None;
    let mut converged = false;
    for _ in 0..cfg.max_iterations {
        let start = thinning_radius.unwrap_or(0.0);
        let (next, radius) = fractal_step(&cloud, ms)?.thin_from(cfg.budget, start);
        if let Some(r) = radius {
            thinning_radius = Some(thinning_radius.map_or(r, |t| t.max(r)));
        }
        let d = hausdorff_sweep(&next, &cloud, metric)?;
        trace.push(d);
        cloud = next;
        if d <= cfg.tolerance {
            converged = true;
            break;
        }
    }
    Ok(AttractorApprox {
        cloud,
        iteration: trace.len(),
        hausdorff_trace: trace,
        converged,
        tolerance: cfg.tolerance,
        metric,
        thinning_radius,
    })
}

/// `Hausdorff(F_S(A), A)`; small for a converged cloud.
pub fn invariance_residual(ms: &MapSystem, a: &AttractorApprox) -> Result<f64> {
    hausdorff_sweep(&fractal_step(&a.cloud, ms)?, &a.cloud, a.metric)
}

/// `density + 1` equally spaced points on the graph of `f`.
pub fn graph_sample(f: &Interpolant, ms: &MapSystem, density: usize) -> Result<Vec<Point2>> {
    if density == 0 {
        return Err(Error::InvalidInput("graph sample density must be >= 1".into()));
    }
    let sys = ms.system();
    (0..=density)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 / density as f64;
            let x = (1.0 - t) * sys.a() + t * sys.b();
            Ok(Point2::new(x, f.value(ms, x)?))
        })
        .collect()
}

/// Hausdorff distance between a graph sample of `f` and a cloud, with no
/// convergence requirement.
pub fn graph_distance(
    f: &Interpolant,
    ms: &MapSystem,
    cloud: &PointSet,
    density: usize,
    metric: Metric,
) -> Result<f64> {
    hausdorff_sweep_points(&graph_sample(f, ms, density)?, cloud.points(), metric)
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphAttractorReport {
    pub distance: f64,
    pub bound: f64,
    pub tail_bound: f64,
    pub grid_spacing: f64,
    pub cloud_tolerance: f64,
    pub samples: usize,
    pub metric: String,
    pub within_bound: bool,
}

/// Compares the converged interpolant with the converged attractor.
///
/// The bound is `tail_bound + 10·h + 2·tol`, with `h` the interpolant's grid
/// spacing and `tol` the attractor tolerance.
pub fn graph_vs_attractor(
    ms: &MapSystem,
    outcome: &PicardOutcome,
    a: &AttractorApprox,
    density: usize,
    metric: Metric,
) -> Result<GraphAttractorReport> {
    if !outcome.report.converged {
        return Err(Error::Precondition(
            "interpolant has not converged".into(),
        ));
    }
    if !a.converged {
        return Err(Error::Precondition("attractor has not converged".into()));
    }
    let f = Interpolant::Grid(outcome.interpolant.clone());
    let distance = graph_distance(&f, ms, &a.cloud, density, metric)?;
    let tail_bound = ms.tail_bound()?.value;
    let grid_spacing = outcome.interpolant.grid().max_spacing();
    let bound = tail_bound + 10.0 * grid_spacing + 2.0 * a.tolerance;
    Ok(GraphAttractorReport {
        distance,
        bound,
        tail_bound,
        grid_spacing,
        cloud_tolerance: a.tolerance,
        samples: density + 1,
        metric: metric.name().into(),
        within_bound: distance <= bound,
    })
}

/// `Hausdorff(F_S(G_f), G_{Tf})` over the grid samples of `f` and `Tf`.
pub fn commutation_distance(ms: &MapSystem, f: &GridFunction, metric: Metric) -> Result<f64> {
    let graph: Vec<Point2> = f.samples().map(Point2::from).collect();
    let image = fractal_union(&graph, ms)?;
    let tf = crate::operator::apply_t(f, ms)?;
    let t_graph: Vec<Point2> = tf.samples().map(Point2::from).collect();
    hausdorff_sweep_points(&image, &t_graph, metric)
}
