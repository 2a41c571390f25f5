//! Fractal interpolation functions for countable systems of data.
//!
//! A countable system of data `{(x_n, y_n)}` with `x_n` strictly increasing
//! to `b` and `y_n → M` is interpolated by the fixed point `f_*` of the
//! operator `T_f(x) = W_n(l_n^{-1}(x), f(l_n^{-1}(x)))` on `[x_{n-1}, x_n]`.
//! The graph of `f_*` is the attractor of the countable iterated function
//! system `f_n = (l_n, W_n)`, whose maps are Rakotch contractions for the
//! weighted metric `d_θ`.
//!
//! Modules, bottom-up:
//!
//! - [`metric`] and [`comparison`]: `d_θ`, Hausdorff distances, comparison
//!   functions and sampled Rakotch certificates.
//! - [`data`]: the data system, its truncation and interval lookup.
//! - [`maps`]: the families `l_n`, `W_n`, `f_n`, `θ`, tail bounds.
//! - [`operator`]: `T`, Picard iteration, recursive evaluation, checks.
//! - [`attractor`]: the fractal operator on point clouds and the
//!   graph-equals-attractor check.
//! - [`config`] and [`cli`]: declarative run files and the `fif` commands.

pub mod attractor;
pub mod cli;
pub mod comparison;
pub mod config;
pub mod data;
pub mod error;
pub mod maps;
pub mod metric;
pub mod operator;

pub use attractor::{
    fractal_step, graph_vs_attractor, iterate_attractor, AttractorApprox, InitialSet,
    IterationConfig, MetricChoice,
};
pub use comparison::{certify_rakotch, phi_eval, ComparisonFunction, RakotchReport};
pub use data::{build_system, CountableDataSystem, Segment, SequenceSpec, YInterval};
pub use error::{Error, Result};
pub use maps::{
    compute_theta, rakotch_certificate, tail_bound, FamilySpec, MapSystem, RangePolicy,
};
pub use config::RunConfig;
pub use metric::{d_theta, hausdorff, hausdorff_sweep, Metric, Point2, PointSet, ThetaMetric};
pub use operator::{
    apply_t, evaluate_recursive, picard_iterate, verify_interpolation, EvalGrid, GridFunction,
    Interpolant, PicardOutcome, Seed,
};
