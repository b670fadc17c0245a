//! Run and sweep configuration files.
//!
//! Configs are TOML. A user file only needs the keys it changes: it is laid
//! over the defaults of the selected model before strict deserialization, so
//! unknown keys are reported by name.
//!
//! ```toml
//! model = "discrete"
//!
//! [params]
//! g = 5.0
//! temperature = 2.0
//!
//! [params.pulse]
//! amplitude = 2.0
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::discrete::{DiscreteModelParams, IntegratorConfig};
use crate::error::{Error, Result};
use crate::mps::{ContinuumModelParams, EvolveConfig};

/// A single simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum RunConfig {
    Discrete {
        params: DiscreteModelParams,
        integrator: IntegratorConfig,
    },
    Continuum {
        /// Use the reduced CI-scale discretization and MPS settings as defaults.
        #[serde(default)]
        ci_scale: bool,
        params: ContinuumModelParams,
        mps: EvolveConfig,
        /// Save an MPS checkpoint every this many steps (0 disables).
        #[serde(default)]
        checkpoint_every: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Discrete,
    Continuum,
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discrete" => Ok(Model::Discrete),
            "continuum" => Ok(Model::Continuum),
            _ => Err(Error::invalid(
                "model",
                "must be \"discrete\" or \"continuum\"",
            )),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Discrete => "discrete",
            Model::Continuum => "continuum",
        })
    }
}

fn prefixed(prefix: &str, e: Error) -> Error {
    match e {
        Error::Invalid { key, constraint } if !key.contains('.') || key.starts_with("pulse.") => {
            Error::Invalid {
                key: format!("{prefix}.{key}"),
                constraint,
            }
        }
        other => other,
    }
}

/// Recursively overwrite `base` with the entries of `over`.
pub(crate) fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Table(a), Value::Table(b)) => {
            for (k, v) in b {
                match a.get_mut(&k) {
                    Some(x) if x.is_table() && v.is_table() => merge(x, v),
                    _ => {
                        a.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscreteBody {
    params: DiscreteModelParams,
    integrator: IntegratorConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ContinuumBody {
    #[serde(default)]
    ci_scale: bool,
    params: ContinuumModelParams,
    mps: EvolveConfig,
    #[serde(default)]
    checkpoint_every: usize,
}

fn body<T: serde::de::DeserializeOwned>(table: Table) -> Result<T> {
    serde_path_to_error::deserialize(Value::Table(table)).map_err(|e| {
        let path = e.path().to_string();
        let key = if path == "." { "config".into() } else { path };
        Error::invalid(key, e.into_inner().message().trim().to_string())
    })
}

/// Deserialize with the failing key spelled out as a dotted path.
fn from_value(value: Value) -> Result<RunConfig> {
    let Value::Table(mut table) = value else {
        return Err(Error::invalid("config", "must be a table"));
    };
    let model: Model = match table.remove("model") {
        Some(Value::String(s)) => s.parse()?,
        _ => return Err(Error::invalid("model", "missing or not a string")),
    };
    Ok(match model {
        Model::Discrete => {
            let b: DiscreteBody = body(table)?;
            RunConfig::Discrete {
                params: b.params,
                integrator: b.integrator,
            }
        }
        Model::Continuum => {
            let b: ContinuumBody = body(table)?;
            RunConfig::Continuum {
                ci_scale: b.ci_scale,
                params: b.params,
                mps: b.mps,
                checkpoint_every: b.checkpoint_every,
            }
        }
    })
}

impl RunConfig {
    pub fn discrete_default() -> Self {
        RunConfig::Discrete {
            params: DiscreteModelParams::default(),
            integrator: IntegratorConfig::default(),
        }
    }

    /// Full-scale continuum defaults, or the CI preset.
    pub fn continuum_default(ci_scale: bool) -> Self {
        let (params, mps) = if ci_scale {
            (
                ContinuumModelParams::ci_scale(0.0),
                EvolveConfig::ci_scale(),
            )
        } else {
            (
                ContinuumModelParams::full_scale(0.0),
                EvolveConfig::full_scale(),
            )
        };
        RunConfig::Continuum {
            ci_scale,
            params,
            mps,
            checkpoint_every: 0,
        }
    }

    pub fn default_for(model: Model, ci_scale: bool) -> Self {
        match model {
            Model::Discrete => Self::discrete_default(),
            Model::Continuum => Self::continuum_default(ci_scale),
        }
    }

    pub fn model(&self) -> Model {
        match self {
            RunConfig::Discrete { .. } => Model::Discrete,
            RunConfig::Continuum { .. } => Model::Continuum,
        }
    }

    pub fn temperature(&self) -> f64 {
        match self {
            RunConfig::Discrete { params, .. } => params.temperature,
            RunConfig::Continuum { params, .. } => params.temperature,
        }
    }

    /// Lay `table` over the defaults for its model and deserialize.
    ///
    /// `model_hint` and `ci_scale_hint` apply when the table does not name
    /// them itself.
    pub fn from_table(
        mut table: Table,
        model_hint: Option<Model>,
        ci_scale_hint: bool,
    ) -> Result<Self> {
        let model = match table.get("model") {
            Some(Value::String(s)) => s.parse()?,
            Some(_) => return Err(Error::invalid("model", "must be a string")),
            None => model_hint.ok_or_else(|| Error::invalid("model", "missing"))?,
        };
        let ci_scale = match table.get("ci_scale") {
            Some(Value::Boolean(b)) => *b || ci_scale_hint,
            Some(_) => return Err(Error::invalid("ci_scale", "must be a boolean")),
            None => ci_scale_hint,
        };
        if model == Model::Continuum {
            table.insert("ci_scale".into(), Value::Boolean(ci_scale));
        }
        table.insert("model".into(), Value::String(model.to_string()));
        let mut value = Value::try_from(Self::default_for(model, ci_scale))?;
        merge(&mut value, Value::Table(table));
        let cfg = from_value(value)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_str(text: &str, model_hint: Option<Model>, ci_scale: bool) -> Result<Self> {
        Self::from_table(text.parse::<Table>()?, model_hint, ci_scale)
    }

    pub fn from_path(
        path: impl AsRef<Path>,
        model_hint: Option<Model>,
        ci_scale: bool,
    ) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?, model_hint, ci_scale)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RunConfig::Discrete { params, integrator } => {
                params.validate().map_err(|e| prefixed("params", e))?;
                integrator.validate()?;
                integrator.grid(params).map(|_| ())
            }
            RunConfig::Continuum { params, mps, .. } => {
                params.validate().map_err(|e| prefixed("params", e))?;
                mps.validate()?;
                if params.n_chain > 0 {
                    let n_star = (params.spectral.cutoff / params.delta).round() as usize;
                    if params.n_chain > n_star {
                        return Err(Error::invalid(
                            "params.n_chain",
                            format!("must not exceed the {n_star} discretized modes"),
                        ));
                    }
                }
                mps.grid(&params.pulse).map(|_| ()).map_err(|e| match e {
                    Error::Invalid { constraint, .. } => Error::invalid("mps.t_max", constraint),
                    other => other,
                })
            }
        }
    }

    /// Replace the number at dotted `path` (for example `params.pulse.width`).
    pub fn with_value(&self, path: &str, x: f64) -> Result<Self> {
        let mut value = Value::try_from(self)?;
        let mut slot = &mut value;
        for part in path.split('.') {
            slot = slot
                .as_table_mut()
                .and_then(|t| t.get_mut(part))
                .ok_or_else(|| Error::invalid(path, "no such parameter"))?;
        }
        *slot = match slot {
            Value::Float(_) => Value::Float(x),
            Value::Integer(_) if x.fract() == 0.0 && x >= 0.0 => Value::Integer(x as i64),
            Value::Integer(_) => return Err(Error::invalid(path, "expects an integer")),
            _ => return Err(Error::invalid(path, "is not a numeric parameter")),
        };
        let cfg = from_value(value)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One sweep axis: a parameter path and the values it takes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub path: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(path: impl Into<String>, values: Vec<f64>) -> Self {
        Axis {
            path: path.into(),
            values,
        }
    }

    /// `count` evenly spaced values from `start` to `stop` inclusive.
    pub fn linspace(path: impl Into<String>, start: f64, stop: f64, count: usize) -> Self {
        let values = if count == 1 {
            vec![start]
        } else {
            (0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect()
        };
        Axis::new(path, values)
    }

    /// Last path component, used for column names and plot labels.
    pub fn label(&self) -> &str {
        self.path.rsplit('.').next().unwrap_or(&self.path)
    }
}

/// A fully resolved sweep: baseline run plus axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub name: String,
    pub base: RunConfig,
    pub axes: Vec<Axis>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig3,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2a" => Ok(Preset::Fig2a),
            "fig2b" => Ok(Preset::Fig2b),
            "fig2c" => Ok(Preset::Fig2c),
            "fig2d" => Ok(Preset::Fig2d),
            "fig3" => Ok(Preset::Fig3),
            _ => Err(Error::invalid(
                "preset",
                "must be one of fig2a, fig2b, fig2c, fig2d, fig3",
            )),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig2c => "fig2c",
            Preset::Fig2d => "fig2d",
            Preset::Fig3 => "fig3",
        })
    }
}

/// Default points per axis of the discrete presets.
pub const DEFAULT_RESOLUTION: usize = 9;

/// Recorded-step stride of the discrete presets; keeps traces to a few
/// hundred rows.
pub const PRESET_STRIDE: usize = 100;

/// Temperatures of the continuum preset.
pub const FIG3_TEMPERATURES: [f64; 5] = [0.0, 0.2, 0.4, 0.6, 1.0];

impl Preset {
    /// Build the preset sweep. `resolution` is the number of points per axis
    /// for the discrete panels; `ci_scale` selects the reduced continuum run.
    pub fn sweep(self, resolution: usize, ci_scale: bool) -> SweepConfig {
        let n = resolution.max(1);
        let temperature = Axis::linspace("params.temperature", 0.0, 20.0, n);
        let mut base = RunConfig::discrete_default();
        if let RunConfig::Discrete { integrator, .. } = &mut base {
            integrator.stride = PRESET_STRIDE;
        }
        let axes = match self {
            Preset::Fig2a => vec![temperature, Axis::linspace("params.g", 1.0, 10.0, n)],
            Preset::Fig2b => vec![
                temperature,
                Axis::linspace("params.pulse.amplitude", 1.0, 4.0, n),
            ],
            Preset::Fig2c => vec![
                temperature,
                Axis::linspace("params.pulse.delay", 1.0, 8.0, n),
            ],
            Preset::Fig2d => vec![
                temperature,
                Axis::linspace("params.pulse.width", 1.0, 5.0, n),
            ],
            Preset::Fig3 => {
                base = RunConfig::continuum_default(ci_scale);
                vec![Axis::new("params.temperature", FIG3_TEMPERATURES.to_vec())]
            }
        };
        SweepConfig {
            name: self.to_string(),
            base,
            axes,
        }
    }
}

/// Sweep file as written by a user: either a preset with overrides or an
/// explicit base and axes.
///
/// ```toml
/// preset = "fig2a"
/// resolution = 5
///
/// [base.params]
/// omega_m = 1.2
///
/// [[axes]]
/// path = "params.temperature"
/// values = [0.0, 5.0, 10.0]
/// ```
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub name: Option<String>,
    pub preset: Option<Preset>,
    pub resolution: Option<usize>,
    pub ci_scale: Option<bool>,
    /// Worker threads.
    pub jobs: Option<usize>,
    /// Output directory.
    pub out: Option<String>,
    pub resume: Option<bool>,
    pub base: Option<Table>,
    pub axes: Option<Vec<AxisFile>>,
}

/// An axis given either as explicit values or as `start`, `stop`, `count`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisFile {
    pub path: String,
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
}

impl AxisFile {
    fn resolve(&self, i: usize) -> Result<Axis> {
        let key = format!("axes[{i}]");
        match (&self.values, self.start, self.stop, self.count) {
            (Some(v), None, None, None) => Ok(Axis::new(&self.path, v.clone())),
            (None, Some(a), Some(b), Some(n)) if n >= 1 => Ok(Axis::linspace(&self.path, a, b, n)),
            _ => Err(Error::invalid(
                key,
                "give either `values` or all of `start`, `stop`, `count` (count >= 1)",
            )),
        }
    }
}

impl SweepFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Resolve into a concrete sweep. Command-line values, when given, take
    /// precedence over the file.
    pub fn resolve(&self, preset: Option<Preset>, ci_scale: bool) -> Result<SweepConfig> {
        let preset = preset.or(self.preset);
        let ci_scale = ci_scale || self.ci_scale.unwrap_or(false);
        let resolution = self.resolution.unwrap_or(DEFAULT_RESOLUTION);
        if resolution == 0 {
            return Err(Error::invalid("resolution", "must be >= 1"));
        }
        let mut sweep = match preset {
            Some(p) => p.sweep(resolution, ci_scale),
            None => {
                let base = self
                    .base
                    .clone()
                    .ok_or_else(|| Error::invalid("base", "required when no preset is given"))?;
                SweepConfig {
                    name: "sweep".into(),
                    base: RunConfig::from_table(base, None, ci_scale)?,
                    axes: Vec::new(),
                }
            }
        };
        if let (Some(_), Some(over)) = (preset, &self.base) {
            let mut value = Value::try_from(&sweep.base)?;
            merge(&mut value, Value::Table(over.clone()));
            sweep.base = from_value(value)?;
            sweep.base.validate()?;
        }
        if let Some(axes) = &self.axes {
            sweep.axes = axes
                .iter()
                .enumerate()
                .map(|(i, a)| a.resolve(i))
                .collect::<Result<_>>()?;
        }
        if let Some(name) = &self.name {
            sweep.name = name.clone();
        }
        sweep.validate()?;
        Ok(sweep)
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::invalid("axes", "at least one axis is required"));
        }
        for (i, a) in self.axes.iter().enumerate() {
            if a.values.is_empty() {
                return Err(Error::invalid(
                    format!("axes[{i}].values"),
                    "must not be empty",
                ));
            }
            if a.values.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(
                    format!("axes[{i}].values"),
                    "must be finite",
                ));
            }
            // every value must produce a valid run
            for &x in &a.values {
                self.base.with_value(&a.path, x)?;
            }
        }
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(Error::invalid("name", "use letters, digits, '-' or '_'"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis values of point `index`; the last axis varies fastest.
    pub fn coords(&self, index: usize) -> Vec<f64> {
        let mut rem = index;
        let mut out = vec![0.0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            out[k] = a.values[rem % a.values.len()];
            rem /= a.values.len();
        }
        out
    }

    pub fn point(&self, index: usize) -> Result<RunConfig> {
        let mut cfg = self.base.clone();
        for (a, x) in self.axes.iter().zip(self.coords(index)) {
            cfg = cfg.with_value(&a.path, x)?;
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_discrete_config() {
        let cfg = RunConfig::from_toml_str(
            "model = \"discrete\"\n[params]\ng = 5\n[params.pulse]\nwidth = 3.0\n",
            None,
            false,
        )
        .unwrap();
        let RunConfig::Discrete { params, .. } = cfg else {
            panic!()
        };
        assert_eq!(params.g, 5.0);
        assert_eq!(params.pulse.width, 3.0);
        assert_eq!(params.pulse.amplitude, 2.0);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = RunConfig::from_toml_str("model = \"discrete\"\n[params]\ngg = 5\n", None, false)
            .unwrap_err()
            .to_string();
        assert!(err.contains("gg"), "{err}");
    }

    #[test]
    fn constraint_violation_names_key() {
        let err =
            RunConfig::from_toml_str("model = \"discrete\"\n[params]\nn_max = 1\n", None, false)
                .unwrap_err();
        match err {
            Error::Invalid { key, .. } => assert_eq!(key, "params.n_max"),
            e => panic!("{e}"),
        }
        let err =
            RunConfig::from_toml_str("model = \"continuum\"\n[mps]\nchi_max = 1\n", None, true)
                .unwrap_err();
        assert!(matches!(err, Error::Invalid { ref key, .. } if key == "mps.chi_max"));
    }

    #[test]
    fn ci_scale_defaults() {
        let cfg = RunConfig::from_toml_str("model = \"continuum\"\n", None, true).unwrap();
        let RunConfig::Continuum { params, mps, .. } = cfg else {
            panic!()
        };
        assert_eq!((params.delta, params.n_chain), (0.05, 20));
        assert_eq!((mps.chi_max, mps.d_loc), (64, 4));
    }

    #[test]
    fn path_override() {
        let cfg = RunConfig::discrete_default();
        let c2 = cfg.with_value("params.pulse.delay", 3.5).unwrap();
        let RunConfig::Discrete { params, .. } = c2 else {
            panic!()
        };
        assert_eq!(params.pulse.delay, 3.5);
        assert!(cfg.with_value("params.nope", 1.0).is_err());
        assert!(cfg.with_value("params.n_max", 2.5).is_err());
        assert!(cfg.with_value("params.n_max", 3.0).is_ok());
        assert!(cfg.with_value("params.n_max", 1.0).is_err());
    }

    #[test]
    fn presets() {
        let s = Preset::Fig2a.sweep(5, false);
        assert_eq!(s.len(), 25);
        assert_eq!(s.coords(0), vec![0.0, 1.0]);
        assert_eq!(s.coords(1), vec![0.0, 3.25]);
        assert_eq!(s.coords(24), vec![20.0, 10.0]);
        s.validate().unwrap();
        let c = Preset::Fig2c.sweep(9, false);
        assert_eq!(c.axes[1].values.first(), Some(&1.0));
        assert_eq!(c.axes[1].values.last(), Some(&8.0));
        let f3 = Preset::Fig3.sweep(9, true);
        assert_eq!(f3.len(), 5);
        assert_eq!(f3.base.model(), Model::Continuum);
    }

    #[test]
    fn sweep_file_overrides_preset() {
        let f = SweepFile::from_toml_str(
            "preset = \"fig2b\"\nresolution = 3\n[base.params]\ng = 4.0\n",
        )
        .unwrap();
        let s = f.resolve(None, false).unwrap();
        assert_eq!(s.len(), 9);
        let RunConfig::Discrete { params, .. } = &s.base else {
            panic!()
        };
        assert_eq!(params.g, 4.0);
        let bad = SweepFile::from_toml_str("[[axes]]\npath = \"params.g\"\nvalues = [1.0]\n")
            .unwrap()
            .resolve(None, false);
        assert!(matches!(bad, Err(Error::Invalid { ref key, .. }) if key == "base"));
    }

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig::continuum_default(true);
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(RunConfig::from_toml_str(&text, None, false).unwrap(), cfg);
    }
}
