//! TOML run files.
//!
//! ```toml
//! depth = 8
//!
//! [x]
//! kind = "geometric"   # offset + scale * base^-n
//! offset = 1.0
//! scale = -1.0
//! base = 2.0
//!
//! [y]
//! kind = "geometric"
//! offset = 1.0
//! scale = -1.0
//! base = 3.0
//!
//! [y_interval]
//! lo = 0.0
//! hi = 1.0
//!
//! [family]
//! kind = "A"           # d defaults to 2^-n
//! ```
//!
//! `[run]`, `[attractor]` and `[verify]` are optional; see [`RunSettings`],
//! [`AttractorSettings`] and [`VerifySettings`] for their keys and defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::attractor::{InitialSet, IterationConfig, MetricChoice};
use crate::data::{CountableDataSystem, SequenceSpec, YInterval};
use crate::error::{Error, Result};
use crate::maps::{FamilySpec, MapSystem, RangePolicy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SequenceConfig {
    Geometric { offset: f64, scale: f64, base: f64 },
    Harmonic { offset: f64, scale: f64, shift: f64 },
    Table { values: Vec<f64>, limit: f64 },
    Constant { value: f64 },
}

impl SequenceConfig {
    pub fn to_spec(&self) -> SequenceSpec {
        match self {
            SequenceConfig::Geometric {
                offset,
                scale,
                base,
            } => SequenceSpec::geometric(*offset, *scale, *base),
            SequenceConfig::Harmonic {
                offset,
                scale,
                shift,
            } => SequenceSpec::harmonic(*offset, *scale, *shift),
            SequenceConfig::Table { values, limit } => SequenceSpec::table(values.clone(), *limit),
            SequenceConfig::Constant { value } => SequenceSpec::constant(*value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalConfig {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum FamilyConfig {
    #[serde(alias = "a")]
    A {
        #[serde(default)]
        d: Option<SequenceConfig>,
    },
    #[serde(alias = "b")]
    B {},
}

impl FamilyConfig {
    pub fn to_spec(&self) -> FamilySpec {
        match self {
            FamilyConfig::A { d: Some(d) } => FamilySpec::A { d: d.to_spec() },
            FamilyConfig::A { d: None } => FamilySpec::a_default(),
            FamilyConfig::B {} => FamilySpec::B,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSettings {
    /// Uniform grid resolution `R`.
    pub grid: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Seed for every sampled certificate.
    pub seed: u64,
    pub metric: MetricChoice,
    pub range_policy: RangePolicy,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            grid: 4096,
            tol: 1e-10,
            max_iter: 10_000,
            seed: 42,
            metric: MetricChoice::D1,
            range_policy: RangePolicy::Strict,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialChoice {
    #[default]
    Nodes,
    Limit,
    Chord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttractorSettings {
    pub tol: f64,
    pub max_iterations: usize,
    pub dedup: f64,
    pub budget: usize,
    pub initial: InitialChoice,
}

impl Default for AttractorSettings {
    fn default() -> Self {
        AttractorSettings {
            tol: 1e-4,
            max_iterations: 200,
            dedup: 1e-7,
            budget: 200_000,
            initial: InitialChoice::Nodes,
        }
    }
}

impl AttractorSettings {
    pub fn iteration_config(&self, initial: InitialChoice, metric: MetricChoice) -> IterationConfig {
        IterationConfig {
            initial: match initial {
                InitialChoice::Nodes => InitialSet::Nodes,
                InitialChoice::Limit => InitialSet::LimitPoint,
                InitialChoice::Chord => InitialSet::SeedGraph {
                    seed: crate::operator::Seed::Chord,
                    samples: 256,
                },
            },
            max_iterations: self.max_iterations,
            tolerance: self.tol,
            dedup: self.dedup,
            budget: self.budget,
            metric,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySettings {
    pub rakotch_pairs: usize,
    pub contraction_pairs: usize,
    pub rakotch_tol: f64,
    pub contraction_slack: f64,
    pub interpolation_tol: f64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        VerifySettings {
            rakotch_pairs: 1000,
            contraction_pairs: 100,
            rakotch_tol: 1e-10,
            contraction_slack: 1e-8,
            interpolation_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub depth: usize,
    pub x: SequenceConfig,
    pub y: SequenceConfig,
    pub y_interval: IntervalConfig,
    pub family: FamilyConfig,
    #[serde(default)]
    pub run: RunSettings,
    #[serde(default)]
    pub attractor: AttractorSettings,
    #[serde(default)]
    pub verify: VerifySettings,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate_settings()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Run-parameter checks; system validity is left to the builders.
    pub fn validate_settings(&self) -> Result<()> {
        let bad = |field: &str, why: &str| Err(Error::Config(format!("{field}: {why}")));
        if self.run.grid == 0 {
            return bad("run.grid", "must be >= 1");
        }
        if !(self.run.tol > 0.0) {
            return bad("run.tol", "must be positive");
        }
        if self.run.max_iter == 0 {
            return bad("run.max_iter", "must be >= 1");
        }
        if !(self.attractor.tol > 0.0) || !(self.attractor.dedup > 0.0) {
            return bad("attractor.tol / attractor.dedup", "must be positive");
        }
        if self.attractor.budget == 0 || self.attractor.max_iterations == 0 {
            return bad("attractor.budget / attractor.max_iterations", "must be >= 1");
        }
        Ok(())
    }

    pub fn build_system(&self) -> Result<CountableDataSystem> {
        CountableDataSystem::new(
            self.x.to_spec(),
            self.y.to_spec(),
            self.depth,
            YInterval::new(self.y_interval.lo, self.y_interval.hi)?,
        )
    }

    pub fn build_map_system(&self) -> Result<MapSystem> {
        Ok(MapSystem::new(self.build_system()?, self.family.to_spec())?
            .with_range_policy(self.run.range_policy))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANON: &str = r#"
depth = 8

[x]
kind = "geometric"
offset = 1.0
scale = -1.0
base = 2.0

[y]
kind = "geometric"
offset = 1.0
scale = -1.0
base = 3.0

[y_interval]
lo = 0.0
hi = 1.0

[family]
kind = "B"
"#;

    #[test]
    fn parses_canonical() {
        let cfg = RunConfig::from_toml_str(CANON).unwrap();
        assert_eq!(cfg.depth, 8);
        assert_eq!(cfg.run, RunSettings::default());
        let ms = cfg.build_map_system().unwrap();
        assert_eq!(ms.family().name(), "B");
        let n2 = ms.system().node(2).unwrap();
        assert_eq!((n2.x, n2.y), (0.75, 1.0 - 1.0 / 9.0));
    }

    #[test]
    fn family_a_with_d() {
        let with_d = |d: &str| CANON.replace("kind = \"B\"", &format!("kind = \"A\"\n[family.d]\n{d}"));
        let cfg =
            RunConfig::from_toml_str(&with_d("kind = \"geometric\"\noffset = 0.0\nscale = 0.5\nbase = 3.0"))
                .unwrap();
        let ms = cfg.build_map_system().unwrap();
        assert!((ms.coeffs(3).unwrap().d.unwrap() - 0.5 / 27.0).abs() < 1e-15);
        let cfg = RunConfig::from_toml_str(&with_d("kind = \"constant\"\nvalue = 0.25")).unwrap();
        assert!(matches!(cfg.build_map_system(), Err(Error::InvalidSystem(_))));
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = CANON.replace("depth = 8", "depth = 8\ndetph = 3");
        assert!(matches!(RunConfig::from_toml_str(&text), Err(Error::Config(_))));
        let text = CANON.replace("base = 3.0", "base = 3.0\nratio = 2");
        assert!(matches!(RunConfig::from_toml_str(&text), Err(Error::Config(_))));
        let text = format!("{CANON}\n[run]\ngrdi = 5\n");
        assert!(matches!(RunConfig::from_toml_str(&text), Err(Error::Config(_))));
    }

    #[test]
    fn bad_settings_rejected() {
        let text = format!("{CANON}\n[run]\ntol = 0.0\n");
        let err = RunConfig::from_toml_str(&text).unwrap_err();
        assert!(err.to_string().contains("run.tol"));
    }

    #[test]
    fn invalid_system_is_not_a_config_error() {
        let text = CANON.replace("lo = 0.0", "lo = -1.0");
        let cfg = RunConfig::from_toml_str(&text).unwrap();
        assert!(!matches!(cfg.build_map_system(), Err(Error::Config(_)) | Ok(_)));
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = RunConfig::from_toml_str(CANON).unwrap();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), cfg);
    }
}
