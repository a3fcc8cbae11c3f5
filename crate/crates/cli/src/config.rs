//! Run configuration: defaults, JSON file form, and validation.

use std::fmt;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use holoq::exact::Rational;
use holoq::geometry::presets::PRESET_NAMES;
use holoq::geometry::StencilOrder;
use holoq::suites::{HypergeomParams, NumericParams, SphereParams, Tolerances};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid value for {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field, reason: reason.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Sphere,
    Hypergeom,
    Numeric,
    CriticalN4,
    Conformal,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Sphere, Suite::Hypergeom, Suite::Numeric, Suite::CriticalN4, Suite::Conformal];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Sphere => "sphere",
            Suite::Hypergeom => "hypergeom",
            Suite::Numeric => "numeric",
            Suite::CriticalN4 => "critical-n4",
            Suite::Conformal => "conformal",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inclusive dimension range written `a..b` (or a single `n`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimRange {
    pub min: i64,
    pub max: i64,
}

impl DimRange {
    pub fn iter(self) -> RangeInclusive<i64> {
        self.min..=self.max
    }
}

impl FromStr for DimRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}"));
        let (min, max) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let n = parse(s)?;
                (n, n)
            }
        };
        if min > max {
            return Err(format!("empty range {s}"));
        }
        Ok(DimRange { min, max })
    }
}

impl fmt::Display for DimRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.min == self.max {
            write!(f, "{}", self.min)
        } else {
            write!(f, "{}..{}", self.min, self.max)
        }
    }
}

impl Serialize for DimRange {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DimRange {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Rational written as a string such as `"-7/2"`, so that config files stay
/// exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatValue(pub Rational);

impl FromStr for RatValue {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.trim().parse::<Rational>().map(RatValue).map_err(|e| format!("{s:?} is not a rational: {e}"))
    }
}

impl Serialize for RatValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for RatValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Md,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Md => "md",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SphereConfig {
    pub n: DimRange,
    pub big_n_max: usize,
    /// `J` values of extra Einstein constant modes (not part of the sphere
    /// setting proper).
    pub einstein: Vec<RatValue>,
}

impl Default for SphereConfig {
    fn default() -> Self {
        let p = SphereParams::default();
        SphereConfig {
            n: DimRange { min: p.n_min, max: p.n_max },
            big_n_max: p.big_n_max,
            einstein: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HypergeomConfig {
    pub instances: usize,
    pub connection_instances: usize,
    pub max_m: usize,
    pub seed: u64,
    pub series_order: usize,
}

impl Default for HypergeomConfig {
    fn default() -> Self {
        let p = HypergeomParams::default();
        HypergeomConfig {
            instances: p.instances,
            connection_instances: p.connection_instances,
            max_m: p.max_m,
            seed: p.seed,
            series_order: p.series_order,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericConfig {
    pub dims: Vec<usize>,
    pub grid: usize,
    pub coarse_grid: Option<usize>,
    pub presets: Vec<String>,
    pub seed: u64,
    pub lambdas: Vec<RatValue>,
    pub stencil_order: usize,
    pub tolerances: Tolerances,
}

impl Default for NumericConfig {
    fn default() -> Self {
        let p = NumericParams::default();
        NumericConfig {
            dims: p.dims,
            grid: p.grid,
            coarse_grid: p.coarse_grid,
            presets: p.presets,
            seed: p.seed,
            lambdas: p.lambdas.into_iter().map(RatValue).collect(),
            stencil_order: p.order.order(),
            tolerances: p.tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory receiving `report.<ext>`; `None` prints a summary only.
    pub dir: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: None, formats: vec![Format::Json, Format::Md] }
    }
}

/// Everything a run depends on. The defaults reproduce the acceptance run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub suites: Vec<Suite>,
    pub sphere: SphereConfig,
    pub hypergeom: HypergeomConfig,
    pub numeric: NumericConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suites: Suite::ALL.to_vec(),
            sphere: SphereConfig::default(),
            hypergeom: HypergeomConfig::default(),
            numeric: NumericConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::from_json(&text).map_err(|source| ConfigError::Parse { path: path.into(), source })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.suites.is_empty() {
            return Err(invalid("suites", "no suite selected"));
        }
        let s = &self.sphere;
        if s.n.min < 2 {
            return Err(invalid("sphere.n", format!("dimension {} < 2", s.n.min)));
        }
        if s.big_n_max == 0 {
            return Err(invalid("sphere.big_n_max", "must be at least 1"));
        }
        let h = &self.hypergeom;
        if h.max_m == 0 || h.series_order == 0 {
            return Err(invalid("hypergeom", "max_m and series_order must be positive"));
        }
        let nc = &self.numeric;
        if nc.dims.is_empty() || nc.dims.iter().any(|&n| n < 3) {
            return Err(invalid("numeric.dims", format!("{:?}: need at least one dimension, each ≥ 3", nc.dims)));
        }
        for (field, size) in [("numeric.grid", Some(nc.grid)), ("numeric.coarse_grid", nc.coarse_grid)] {
            if let Some(size) = size {
                if size < 16 {
                    return Err(invalid(field, format!("{size} < 16 points per axis")));
                }
            }
        }
        if let Some(c) = nc.coarse_grid {
            if c >= nc.grid {
                return Err(invalid("numeric.coarse_grid", format!("{c} is not coarser than {}", nc.grid)));
            }
        }
        if nc.presets.is_empty() {
            return Err(invalid("numeric.presets", "no preset selected"));
        }
        for p in &nc.presets {
            if !PRESET_NAMES.contains(&p.as_str()) {
                return Err(invalid("numeric.presets", format!("unknown preset {p:?}; known: {}", PRESET_NAMES.join(", "))));
            }
        }
        if nc.lambdas.is_empty() {
            return Err(invalid("numeric.lambdas", "no λ sample"));
        }
        StencilOrder::try_from(nc.stencil_order).map_err(|e| invalid("numeric.stencil_order", e.to_string()))?;
        let t = &nc.tolerances;
        for (name, v) in [
            ("identity", t.identity),
            ("adjoint", t.adjoint),
            ("coherence", t.coherence),
            ("critical", t.critical),
            ("refinement_factor", t.refinement_factor),
            ("roundoff_floor", t.roundoff_floor),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid("numeric.tolerances", format!("{name} = {v} must be positive")));
            }
        }
        if self.output.formats.is_empty() {
            return Err(invalid("output.formats", "no format selected"));
        }
        Ok(())
    }

    pub fn sphere_params(&self) -> SphereParams {
        SphereParams {
            n_min: self.sphere.n.min,
            n_max: self.sphere.n.max,
            big_n_max: self.sphere.big_n_max,
            einstein: self.sphere.einstein.iter().map(|r| r.0.clone()).collect(),
        }
    }

    pub fn hypergeom_params(&self) -> HypergeomParams {
        let h = &self.hypergeom;
        HypergeomParams {
            instances: h.instances,
            connection_instances: h.connection_instances,
            max_m: h.max_m,
            seed: h.seed,
            series_order: h.series_order,
        }
    }

    /// Call after [`validate`](Self::validate).
    pub fn numeric_params(&self) -> NumericParams {
        let nc = &self.numeric;
        NumericParams {
            dims: nc.dims.clone(),
            grid: nc.grid,
            coarse_grid: nc.coarse_grid,
            presets: nc.presets.clone(),
            seed: nc.seed,
            lambdas: nc.lambdas.iter().map(|r| r.0.clone()).collect(),
            order: StencilOrder::try_from(nc.stencil_order).unwrap_or_default(),
            tol: nc.tolerances.clone(),
        }
    }

    /// Apply a `--tol` value: a bare number sets the identity tolerance,
    /// `key=value` sets one named tolerance.
    pub fn set_tolerance(&mut self, spec: &str) -> Result<(), ConfigError> {
        let (key, value) = spec.split_once('=').unwrap_or(("identity", spec));
        let v: f64 = value.trim().parse().map_err(|e| invalid("tol", format!("{value:?}: {e}")))?;
        let t = &mut self.numeric.tolerances;
        let slot = match key.trim() {
            "identity" => &mut t.identity,
            "adjoint" => &mut t.adjoint,
            "coherence" => &mut t.coherence,
            "critical" => &mut t.critical,
            "refinement_factor" => &mut t.refinement_factor,
            "roundoff_floor" => &mut t.roundoff_floor,
            other => return Err(invalid("tol", format!("unknown tolerance {other:?}"))),
        };
        *slot = v;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use holoq::exact::rat;

    #[test]
    fn defaults_round_trip_through_json() {
        let c = RunConfig::default();
        let back = RunConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert!(c.validate().is_ok());
        assert_eq!(c.numeric_params(), NumericParams::default());
        assert_eq!(c.sphere_params(), SphereParams::default());
        assert_eq!(c.hypergeom_params(), HypergeomParams::default());
    }

    #[test]
    fn non_default_values_round_trip() {
        let mut c = RunConfig::default();
        c.suites = vec![Suite::CriticalN4, Suite::Sphere];
        c.sphere.n = "5..7".parse().unwrap();
        c.sphere.einstein = vec![RatValue(rat(-3, 7))];
        c.numeric.lambdas = vec![RatValue(rat(7, 2)), RatValue(rat(-1, 3))];
        c.numeric.coarse_grid = None;
        c.output.dir = Some("out".into());
        c.output.formats = vec![Format::Md];
        c.set_tolerance("adjoint=1e-9").unwrap();
        c.set_tolerance("2e-6").unwrap();
        let json = c.to_json();
        assert!(json.contains("\"-1/3\"") && json.contains("\"5..7\""));
        assert_eq!(RunConfig::from_json(&json).unwrap(), c);
        assert_eq!(c.numeric.tolerances.identity, 2e-6);
        assert_eq!(c.numeric.tolerances.adjoint, 1e-9);
    }

    #[test]
    fn partial_files_fill_in_defaults() {
        let c = RunConfig::from_json(r#"{"suites": ["sphere"], "sphere": {"n": "4"}}"#).unwrap();
        assert_eq!(c.suites, vec![Suite::Sphere]);
        assert_eq!(c.sphere.n, DimRange { min: 4, max: 4 });
        assert_eq!(c.sphere.big_n_max, 6);
        assert!(RunConfig::from_json(r#"{"suite": []}"#).is_err());
        assert!(RunConfig::from_json(r#"{"numeric": {"lambdas": ["x"]}}"#).is_err());
    }

    #[test]
    fn validation_rejects_bad_values() {
        let bad = |f: fn(&mut RunConfig)| {
            let mut c = RunConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.suites.clear()));
        assert!(bad(|c| c.sphere.n = DimRange { min: 1, max: 3 }));
        assert!(bad(|c| c.numeric.presets = vec!["wobbly".into()]));
        assert!(bad(|c| c.numeric.coarse_grid = Some(64)));
        assert!(bad(|c| c.numeric.stencil_order = 5));
        assert!(bad(|c| c.numeric.tolerances.identity = -1.0));
        assert!(bad(|c| c.numeric.dims = vec![2]));
        assert!(RunConfig::default().set_tolerance("speed=3").is_err());
        assert!("7..3".parse::<DimRange>().is_err());
        assert_eq!("3..=12".parse::<DimRange>().unwrap(), DimRange { min: 3, max: 12 });
    }
}
