//! Run configuration and its flat `key = value` file format.
//!
//! ```text
//! # comments start with '#'
//! local = data/local.csv
//! global = data/global.csv
//! gazetteer = data/cities.csv
//! target = Beijing,CN
//! focus_categories = Banking industry; Leasing and business services
//! exclusions = Lvmc Holdings Co.,Ltd
//! ```
//!
//! One assignment per line; whitespace around keys and values is ignored.
//! List values are separated by `;`. Relative paths resolve against the
//! directory holding the config file. Unknown or repeated keys are errors.

use std::path::{Path, PathBuf};

use crate::crosswalk::GbCategory;
use crate::scoring::{DEFAULT_REFERENCE_DISTANCE_KM, DEFAULT_TOP_K};
use crate::Fraction;

pub const KEYS: [&str; 16] = [
    "local",
    "global",
    "gazetteer",
    "crosswalk",
    "year",
    "quartile",
    "home_country",
    "target",
    "target_lat",
    "target_lon",
    "focus_categories",
    "top_decile_fraction",
    "reference_distance_km",
    "top_k",
    "exclusions",
    "out",
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("line {line}: key `{key}` set twice")]
    Duplicate { line: usize, key: String },
    #[error("invalid value for `{key}`: {message}")]
    Value { key: String, message: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
}

/// Where the scoring anchor comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec {
    /// A gazetteer key such as `Beijing,CN`.
    City(String),
    Coordinates {
        latitude: f64,
        longitude: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Directory that relative paths resolve against.
    pub base_dir: PathBuf,
    pub local: Option<PathBuf>,
    pub global: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
    /// `None` selects the bundled crosswalk.
    pub crosswalk: Option<PathBuf>,
    pub year: i32,
    pub quartile: Fraction,
    pub home_country: String,
    pub target: Option<String>,
    pub target_lat: Option<f64>,
    pub target_lon: Option<f64>,
    pub focus_categories: Vec<GbCategory>,
    pub top_decile_fraction: Fraction,
    pub reference_distance_km: f64,
    pub top_k: usize,
    pub exclusions: Vec<String>,
    pub out: Option<PathBuf>,
}

/// The four service and finance categories screened by default.
pub const DEFAULT_FOCUS: [GbCategory; 4] = [
    GbCategory::LeasingBusiness,
    GbCategory::InformationTechnology,
    GbCategory::ScientificResearch,
    GbCategory::Banking,
];

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            base_dir: PathBuf::from("."),
            local: None,
            global: None,
            gazetteer: None,
            crosswalk: None,
            year: 2022,
            quartile: Fraction::new(0.25).expect("valid"),
            home_country: "CN".into(),
            target: None,
            target_lat: None,
            target_lon: None,
            focus_categories: DEFAULT_FOCUS.to_vec(),
            top_decile_fraction: Fraction::new(0.10).expect("valid"),
            reference_distance_km: DEFAULT_REFERENCE_DISTANCE_KM,
            top_k: DEFAULT_TOP_K,
            exclusions: Vec::new(),
            out: None,
        }
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(';').map(str::trim).filter(|s| !s.is_empty())
}

impl RunConfig {
    /// Parses config text. `base_dir` is usually the config file's directory.
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, ConfigError> {
        let mut config = RunConfig { base_dir: base_dir.into(), ..RunConfig::default() };
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(ConfigError::Duplicate { line: i + 1, key: key.to_string() });
            }
            seen.push(key);
            config.set(key, value.trim())?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, crate::pipeline::PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|source| {
            crate::pipeline::PipelineError::Io { path: path.to_path_buf(), source }
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self::parse(&text, base)?)
    }

    /// Sets one key using the file grammar. Used for CLI overrides as well.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |message: String| ConfigError::Value { key: key.to_string(), message };
        let path = |v: &str| if v.is_empty() { None } else { Some(PathBuf::from(v)) };
        let float = |v: &str| v.parse::<f64>().map_err(|_| bad(format!("`{v}` is not a number")));
        let fraction = |v: &str| -> Result<Fraction, ConfigError> {
            Fraction::new(float(v)?).map_err(|e| bad(e.to_string()))
        };
        match key {
            "local" => self.local = path(value),
            "global" => self.global = path(value),
            "gazetteer" => self.gazetteer = path(value),
            "crosswalk" => self.crosswalk = path(value),
            "year" => {
                self.year = value
                    .parse()
                    .ok()
                    .filter(|y: &i32| *y > 0)
                    .ok_or_else(|| bad(format!("`{value}` is not a positive year")))?
            }
            "quartile" => self.quartile = fraction(value)?,
            "home_country" => self.home_country = value.to_ascii_uppercase(),
            "target" => self.target = Some(value.to_string()).filter(|v| !v.is_empty()),
            "target_lat" if value.is_empty() => self.target_lat = None,
            "target_lon" if value.is_empty() => self.target_lon = None,
            "target_lat" => self.target_lat = Some(float(value)?),
            "target_lon" => self.target_lon = Some(float(value)?),
            "focus_categories" => {
                self.focus_categories = split_list(value)
                    .map(|v| v.parse::<GbCategory>().map_err(|e| bad(e.to_string())))
                    .collect::<Result<_, _>>()?;
                if self.focus_categories.is_empty() {
                    return Err(bad("at least one category is required".into()));
                }
            }
            "top_decile_fraction" => self.top_decile_fraction = fraction(value)?,
            "reference_distance_km" => {
                let v = float(value)?;
                if !(v > 0.0 && v.is_finite()) {
                    return Err(bad("must be positive".into()));
                }
                self.reference_distance_km = v;
            }
            "top_k" => {
                self.top_k = value
                    .parse()
                    .ok()
                    .filter(|k: &usize| *k >= 1)
                    .ok_or_else(|| bad(format!("`{value}` is not an integer >= 1")))?
            }
            "exclusions" => self.exclusions = split_list(value).map(str::to_string).collect(),
            "out" => self.out = path(value),
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn target_spec(&self) -> Result<TargetSpec, ConfigError> {
        match (&self.target, self.target_lat, self.target_lon) {
            (_, Some(latitude), Some(longitude)) => {
                Ok(TargetSpec::Coordinates { latitude, longitude })
            }
            (Some(city), _, _) => Ok(TargetSpec::City(city.clone())),
            _ => Err(ConfigError::Missing("target")),
        }
    }

    /// Canonical rendering, in [`KEYS`] order. Paths are echoed as written and
    /// `out` is omitted so the echo does not depend on where a run is written.
    pub fn echo(&self) -> String {
        let path = |p: &Option<PathBuf>| {
            p.as_ref().map(|p| p.to_string_lossy().replace('\\', "/")).unwrap_or_default()
        };
        let opt_f = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        let focus: Vec<&str> = self.focus_categories.iter().map(|c| c.name()).collect();
        let values = [
            path(&self.local),
            path(&self.global),
            path(&self.gazetteer),
            path(&self.crosswalk),
            self.year.to_string(),
            self.quartile.get().to_string(),
            self.home_country.clone(),
            self.target.clone().unwrap_or_default(),
            opt_f(self.target_lat),
            opt_f(self.target_lon),
            focus.join("; "),
            self.top_decile_fraction.get().to_string(),
            self.reference_distance_km.to_string(),
            self.top_k.to_string(),
            self.exclusions.join("; "),
            path(&self.out),
        ];
        KEYS.iter()
            .zip(values)
            .filter(|(k, _)| **k != "out")
            .map(|(k, v)| if v.is_empty() { format!("{k} =\n") } else { format!("{k} = {v}\n") })
            .collect()
    }
}

/// Reads an exclusion list: one company name per line, `#` comments allowed.
pub fn parse_exclusion_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}
