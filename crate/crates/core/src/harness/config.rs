//! Experiment configuration: a versioned TOML tree, optionally layered over a named preset.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::grid::LogGrid;
use crate::hardy::HalfLineSpec;
use crate::kernel::{GrowthSpec, KernelSpec};
use crate::operators::QuadratureSpec;
use crate::spaces::{FunctionSpec, PhiSpec};
use crate::weights::{BallGrid, ExponentSet, WeightSpec};

use super::presets;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Spanne,
    WeakType,
    Adams,
    LemmaLocal,
    Hardy,
    ConditionsOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: String,
    #[serde(default = "json")]
    pub format: OutputFormat,
}

fn json() -> OutputFormat {
    OutputFormat::Json
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentSpec {
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardyConfig {
    pub w1: HalfLineSpec,
    pub w2: HalfLineSpec,
    pub w: HalfLineSpec,
    /// Non-decreasing test functions g; rows of the report.
    #[serde(default)]
    pub g: Vec<HardyTestSpec>,
}

// no deny_unknown_fields here: the flattened spec rejects stray keys itself
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyTestSpec {
    pub id: String,
    #[serde(flatten)]
    pub g: HalfLineSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
    #[serde(default = "unit_weight")]
    pub weight: WeightSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<ExponentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi1: Option<PhiSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi2: Option<PhiSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<Vec<f64>>>,
    #[serde(default = "radius_grid")]
    pub r_grid: LogGrid,
    #[serde(default = "half_line_grid")]
    pub t_grid: LogGrid,
    #[serde(default)]
    pub functions: Vec<FunctionSpec>,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default = "default_growth")]
    pub growth: GrowthSpec,
    #[serde(default = "default_samples")]
    pub hedberg_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hardy: Option<HardyConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

fn unit_weight() -> WeightSpec {
    WeightSpec::Constant { c: 1.0 }
}

fn radius_grid() -> LogGrid {
    LogGrid {
        lo: 1e-2,
        hi: 1e2,
        n: 33,
    }
}

fn half_line_grid() -> LogGrid {
    LogGrid::half_line_default()
}

fn default_growth() -> GrowthSpec {
    GrowthSpec {
        k1: 1.0,
        k2: 4.0,
        c: 10.0,
    }
}

fn default_samples() -> usize {
    64
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn parse_table(text: &str, origin: &str) -> Result<toml::Table> {
    toml::from_str::<toml::Table>(text).map_err(|e| Error::Config(format!("{origin}: {e}")))
}

/// Resolve `preset = "name"` (if present) and layer the remaining keys over it.
fn resolve(mut table: toml::Table, origin: &str) -> Result<toml::Table> {
    let Some(name) = table.remove("preset") else {
        return Ok(table);
    };
    let name = name
        .as_str()
        .ok_or_else(|| Error::Config(format!("{origin}: `preset` must be a string")))?;
    let text = presets::preset(name).ok_or_else(|| {
        Error::Config(format!(
            "{origin}: unknown preset `{name}` (known: {})",
            presets::NAMES.join(", ")
        ))
    })?;
    let mut base = parse_table(text, name)?;
    // arrays of tables replace, not append
    merge(&mut base, table);
    Ok(base)
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_table(parse_table(text, "config")?, "config")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_table(
            parse_table(&text, &path.display().to_string())?,
            &path.display().to_string(),
        )
    }

    pub fn preset(name: &str) -> Result<Self> {
        let mut t = toml::Table::new();
        t.insert("preset".into(), toml::Value::String(name.into()));
        Self::from_table(t, "preset")
    }

    fn from_table(table: toml::Table, origin: &str) -> Result<Self> {
        let table = resolve(table, origin)?;
        let cfg: ExperimentConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(format!("{origin}: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {SCHEMA_VERSION})",
                self.version
            )));
        }
        if !(1..=3).contains(&self.n) {
            return Err(Error::Config(format!(
                "dimension n = {} outside 1..=3",
                self.n
            )));
        }
        self.r_grid
            .validate()
            .map_err(|e| Error::Config(format!("r_grid: {e}")))?;
        self.t_grid
            .validate()
            .map_err(|e| Error::Config(format!("t_grid: {e}")))?;
        self.quadrature
            .validate()
            .map_err(|e| Error::Config(format!("quadrature: {e}")))?;
        self.growth
            .validate()
            .map_err(|e| Error::Config(format!("growth: {e}")))?;
        for c in self
            .centers
            .iter()
            .flatten()
            .chain(self.x0.iter())
            .chain(self.points.iter())
        {
            if c.len() != self.n {
                return Err(Error::Config(format!("point {c:?} is not in R^{}", self.n)));
            }
        }
        if matches!(self.centers.as_deref(), Some([])) {
            return Err(Error::Config("centers must be nonempty".into()));
        }
        let mut ids: Vec<&str> = self.functions.iter().map(|f| f.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Config(format!("duplicate function id `{}`", w[0])));
        }
        let needs = |what: bool, key: &str| {
            if what {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{:?} experiment needs `{key}`",
                    self.kind
                )))
            }
        };
        match self.kind {
            ExperimentKind::Spanne | ExperimentKind::WeakType => {
                needs(self.kernel.is_some(), "kernel")?;
                needs(self.exponents.is_some(), "exponents")?;
                needs(self.phi1.is_some(), "phi1")?;
                needs(self.phi2.is_some(), "phi2")?;
            }
            ExperimentKind::Adams => {
                needs(self.kernel.is_some(), "kernel")?;
                needs(self.exponents.is_some(), "exponents")?;
                needs(self.phi.is_some(), "phi")?;
            }
            ExperimentKind::LemmaLocal => {
                needs(self.kernel.is_some(), "kernel")?;
                needs(self.exponents.is_some(), "exponents")?;
            }
            ExperimentKind::Hardy => needs(self.hardy.is_some(), "hardy")?,
            ExperimentKind::ConditionsOnly => {}
        }
        Ok(())
    }

    /// Multiply the resolution of the radius and half-line grids.
    pub fn refine(&mut self, factor: usize) {
        if factor > 1 {
            self.r_grid = self.r_grid.refined_by(factor);
            self.t_grid = self.t_grid.refined_by(factor);
        }
    }

    pub fn x0_point(&self) -> Result<Point> {
        match &self.x0 {
            Some(c) => Point::new(c),
            None => Ok(Point::origin(self.n)),
        }
    }

    /// Centers of the global (Adams) norms and of the ball grids.
    pub fn center_points(&self) -> Result<Vec<Point>> {
        match &self.centers {
            Some(cs) => cs.iter().map(|c| Point::new(c)).collect(),
            None => Ok(BallGrid::default_for(self.n).centers),
        }
    }

    pub fn ball_grid(&self) -> Result<BallGrid> {
        BallGrid::new(self.center_points()?, LogGrid::radius_default())
    }

    pub fn exponent_set(&self) -> Result<ExponentSet> {
        let e = self
            .exponents
            .ok_or_else(|| Error::Config("missing `exponents`".into()))?;
        ExponentSet::new(e.p, e.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "version = 1\nkind = \"conditions-only\"\nn = 1\ncolour = 3\n";
        assert!(matches!(
            ExperimentConfig::from_toml_str(text),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn version_is_checked() {
        let text = "version = 2\nkind = \"conditions-only\"\nn = 1\n";
        assert!(matches!(
            ExperimentConfig::from_toml_str(text),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn preset_overrides() {
        let text = "preset = \"spanne-classical\"\nseed = 9\n[exponents]\np = 2.0\nq = 5.0\n";
        let cfg = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.exponents.unwrap().q, 5.0);
        assert_eq!(cfg.kind, ExperimentKind::Spanne);
        assert!(!cfg.functions.is_empty());
    }

    #[test]
    fn unknown_preset() {
        let text = "preset = \"nope\"\n";
        assert!(matches!(
            ExperimentConfig::from_toml_str(text),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn presets_parse() {
        for name in presets::NAMES {
            let cfg = ExperimentConfig::preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            let back = ExperimentConfig::from_toml_str(&cfg.to_toml().unwrap()).unwrap();
            assert_eq!(cfg, back, "{name}");
        }
    }

    #[test]
    fn missing_sections() {
        let text = "version = 1\nkind = \"spanne\"\nn = 1\n";
        assert!(matches!(
            ExperimentConfig::from_toml_str(text),
            Err(Error::Config(_))
        ));
    }
}
