//! Comparison functions `φ` and sampled Rakotch certificates.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};

#[derive(Clone)]
pub enum PhiKind {
    /// `φ(t) = c·t`, `0 <= c < 1`.
    Banach(f64),
    /// `φ(t) = t / (1 + t)`.
    RakotchHyperbolic,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for PhiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiKind::Banach(c) => write!(f, "Banach({c})"),
            PhiKind::RakotchHyperbolic => f.write_str("RakotchHyperbolic"),
            PhiKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonFunction {
    kind: PhiKind,
    description: String,
}

impl ComparisonFunction {
    pub fn banach(c: f64) -> Result<Self> {
        ensure_finite("Banach constant", c)?;
        if !(0.0..1.0).contains(&c) {
            return Err(Error::InvalidInput(format!(
                "Banach constant must lie in [0, 1), got {c}"
            )));
        }
        Ok(ComparisonFunction {
            kind: PhiKind::Banach(c),
            description: format!("phi(t) = {c} * t"),
        })
    }

    pub fn rakotch_hyperbolic() -> Self {
        ComparisonFunction {
            kind: PhiKind::RakotchHyperbolic,
            description: "phi(t) = t / (1 + t)".into(),
        }
    }

    pub fn custom(
        description: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ComparisonFunction {
            kind: PhiKind::Custom(Arc::new(f)),
            description: description.into(),
        }
    }

    pub fn kind(&self) -> &PhiKind {
        &self.kind
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn is_custom(&self) -> bool {
        matches!(self.kind, PhiKind::Custom(_))
    }

    /// Unchecked evaluation; `t` is assumed non-negative.
    #[inline]
    pub fn apply(&self, t: f64) -> f64 {
        match &self.kind {
            PhiKind::Banach(c) => c * t,
            PhiKind::RakotchHyperbolic => t / (1.0 + t),
            PhiKind::Custom(f) => f(t),
        }
    }

    /// `φ^[k](t)`.
    pub fn iterate(&self, k: usize, t: f64) -> f64 {
        match &self.kind {
            PhiKind::Banach(c) => c.powi(k as i32) * t,
            // t/(1+t) iterates in closed form
            PhiKind::RakotchHyperbolic => t / (1.0 + k as f64 * t),
            PhiKind::Custom(_) => (0..k).fold(t, |acc, _| self.apply(acc)),
        }
    }
}

pub fn phi_eval(phi: &ComparisonFunction, t: f64) -> Result<f64> {
    ensure_finite("t", t)?;
    if t < 0.0 {
        return Err(Error::InvalidInput(format!("phi is defined on [0, inf), got t = {t}")));
    }
    Ok(phi.apply(t))
}

#[derive(Debug, Clone, Serialize)]
pub struct RakotchReport {
    pub description: String,
    pub grid: Vec<f64>,
    /// `φ(t)/t` at each grid point.
    pub alphas: Vec<f64>,
    pub ratio_below_one: bool,
    pub ratio_non_increasing: bool,
    pub phi_non_decreasing: bool,
    /// `min (1 - φ(t)/t)` over the grid; negative when some ratio reaches 1.
    pub worst_margin: f64,
    /// Grid points where `φ(t)/t >= 1`.
    pub failing_points: Vec<f64>,
    pub pass: bool,
}

/// Samples `α(t) = φ(t)/t` on a strictly increasing positive grid.
pub fn certify_rakotch(phi: &ComparisonFunction, grid: &[f64]) -> Result<RakotchReport> {
    if grid.len() < 2 {
        return Err(Error::InvalidInput(
            "certificate grid needs at least two points".into(),
        ));
    }
    for w in grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidInput(
                "certificate grid must be strictly increasing".into(),
            ));
        }
    }
    if !(grid[0] > 0.0) || !grid.iter().all(|t| t.is_finite()) {
        return Err(Error::InvalidInput(
            "certificate grid must be finite and positive".into(),
        ));
    }

    let phis: Vec<f64> = grid.iter().map(|&t| phi.apply(t)).collect();
    let alphas: Vec<f64> = grid.iter().zip(&phis).map(|(t, p)| p / t).collect();
    let failing_points: Vec<f64> = grid
        .iter()
        .zip(&alphas)
        .filter(|(_, a)| !(**a < 1.0))
        .map(|(t, _)| *t)
        .collect();
    let ratio_below_one = failing_points.is_empty();
    // one ulp of slack for ratios that are mathematically constant
    let ratio_non_increasing = alphas
        .windows(2)
        .all(|w| w[1] <= w[0] + 4.0 * f64::EPSILON * w[0].abs());
    let phi_non_decreasing = phis.windows(2).all(|w| w[1] >= w[0]);
    let worst_margin = alphas.iter().map(|a| 1.0 - a).fold(f64::INFINITY, f64::min);

    Ok(RakotchReport {
        description: phi.description.clone(),
        grid: grid.to_vec(),
        alphas,
        ratio_below_one,
        ratio_non_increasing,
        phi_non_decreasing,
        worst_margin,
        failing_points,
        pass: ratio_below_one && ratio_non_increasing && phi_non_decreasing,
    })
}

/// Log-spaced grid on `[lo, hi]`, the default sampling for certificates.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && points >= 2);
    let (l, h) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (l + (h - l) * i as f64 / (points - 1) as f64).exp())
        .collect()
}
