//! Run configuration files.
//!
//! The format is flat `key = value` text, one entry per line, with dotted
//! keys and `#` comments:
//!
//! ```text
//! controller = "ftt_geo"
//! controller.epsilon_switch = 1e-9
//! reference = "paper_sim"
//! init.seed = 7
//! integrator.h = 1e-3
//! t_final = 10
//! ```
//!
//! Values are numbers, strings (quoted or bare words) or three-vectors
//! written `[x, y, z]`. Every key except `controller` is optional; unknown
//! or repeated keys are errors. See the README for the full key list.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use so3_track::so3::BodyRate;
use so3_track::analysis::{
    AnalysisSettings, DEFAULT_ALPHA, DEFAULT_FIT_WINDOW, DEFAULT_THRESHOLD,
};
use so3_track::controllers::{ControlLaw, ControllerKind, DEFAULT_EPSILON_SWITCH};
use so3_track::integrator::{
    InitialCondition, IntegratorSpec, Method, SimConfig, DEFAULT_REPROJECT_EVERY,
    DEFAULT_SAMPLE_EVERY, DEFAULT_STEP, DEFAULT_THETA_MAX, DEFAULT_T_FINAL,
};
use so3_track::reference::ReferenceKind;

use crate::error::ConfigError;

/// Every key the parser accepts.
pub const KNOWN_KEYS: &[&str] = &[
    "controller",
    "controller.epsilon_switch",
    "reference",
    "reference.amplitude",
    "reference.frequency",
    "reference.phase",
    "init",
    "init.seed",
    "init.theta_max",
    "init.target",
    "init.follower",
    "integrator.method",
    "integrator.h",
    "integrator.reproject_every",
    "t_final",
    "sample_every",
    "analysis.threshold",
    "analysis.alpha",
    "analysis.fit_start",
    "analysis.fit_end",
    "output.csv",
    "output.report",
    "output.plot",
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub sim: SimConfig,
    pub analysis: AnalysisSettings,
    pub output: OutputPaths,
}

/// Command-line flags that take precedence over the file.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub controller: Option<ControlLaw>,
    pub seed: Option<u64>,
    pub t_final: Option<f64>,
    pub dt: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
enum Value {
    Number(f64),
    Text(String),
    Vector([f64; 3]),
}

#[derive(Debug)]
struct Entry {
    line: usize,
    value: Value,
}

struct Entries {
    path: String,
    map: BTreeMap<String, Entry>,
}

impl Entries {
    fn error(&self, key: &str, message: impl std::fmt::Display) -> ConfigError {
        ConfigError::Parse {
            path: self.path.clone(),
            line: self.map.get(key).map_or(0, |e| e.line),
            message: format!("key '{key}': {message}"),
        }
    }

    fn number(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.map.get(key).map(|e| &e.value) {
            None => Ok(default),
            Some(Value::Number(x)) => Ok(*x),
            Some(_) => Err(self.error(key, "expected a number")),
        }
    }

    fn count(&self, key: &str, default: u64) -> Result<u64, ConfigError> {
        let x = self.number(key, default as f64)?;
        if x < 0.0 || x.fract() != 0.0 || x > u64::MAX as f64 {
            return Err(self.error(key, "expected a non-negative integer"));
        }
        Ok(x as u64)
    }

    fn text(&self, key: &str) -> Result<Option<&str>, ConfigError> {
        match self.map.get(key).map(|e| &e.value) {
            None => Ok(None),
            Some(Value::Text(s)) => Ok(Some(s)),
            Some(_) => Err(self.error(key, "expected a string")),
        }
    }

    fn vector(&self, key: &str, default: [f64; 3]) -> Result<BodyRate, ConfigError> {
        match self.map.get(key).map(|e| &e.value) {
            None => Ok(BodyRate::from(default)),
            Some(Value::Vector(v)) => Ok(BodyRate::from(*v)),
            Some(_) => Err(self.error(key, "expected a vector [x, y, z]")),
        }
    }
}

fn parse_value(raw: &str) -> Result<Value, String> {
    if let Some(inner) = raw.strip_prefix('"') {
        return inner
            .strip_suffix('"')
            .filter(|s| !s.contains('"'))
            .map(|s| Value::Text(s.to_string()))
            .ok_or_else(|| format!("unterminated string {raw}"));
    }
    if let Some(inner) = raw.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| format!("unterminated vector {raw}"))?;
        let parts: Vec<f64> = inner
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number '{}'", p.trim())))
            .collect::<Result<_, _>>()?;
        let v: [f64; 3] = parts
            .try_into()
            .map_err(|p: Vec<f64>| format!("vector needs 3 entries, got {}", p.len()))?;
        return Ok(Value::Vector(v));
    }
    if let Ok(x) = raw.parse::<f64>() {
        return Ok(Value::Number(x));
    }
    if raw.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Ok(Value::Text(raw.to_string()));
    }
    Err(format!("cannot parse value '{raw}'"))
}

fn parse_entries(text: &str, path: &str) -> Result<Entries, ConfigError> {
    let mut map = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| ConfigError::Parse {
            path: path.to_string(),
            line,
            message,
        };
        let content = match raw_line.find('#') {
            Some(pos) if !raw_line[..pos].contains('"') => &raw_line[..pos],
            _ => raw_line,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected 'key = value', got '{content}'")))?;
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(err(format!("unknown key '{key}'")));
        }
        let value = parse_value(value.trim()).map_err(|m| err(format!("key '{key}': {m}")))?;
        if map.insert(key.to_string(), Entry { line, value }).is_some() {
            return Err(err(format!("duplicate key '{key}'")));
        }
    }
    Ok(Entries {
        path: path.to_string(),
        map,
    })
}

fn build(entries: &Entries) -> Result<RunConfig, ConfigError> {
    let law_name = entries
        .text("controller")?
        .ok_or_else(|| ConfigError::Validation("missing required key 'controller'".into()))?;
    let law: ControlLaw = law_name
        .parse()
        .map_err(|e| entries.error("controller", e))?;
    let controller = ControllerKind {
        law,
        epsilon_switch: entries.number("controller.epsilon_switch", DEFAULT_EPSILON_SWITCH)?,
    };

    let reference = match entries.text("reference")?.unwrap_or("paper_sim") {
        "paper_sim" => ReferenceKind::PaperSim,
        "zero" => ReferenceKind::Zero,
        "constant" => ReferenceKind::Constant {
            amplitude: entries.vector("reference.amplitude", [1.0; 3])?,
        },
        "sinusoid" => ReferenceKind::Sinusoid {
            amplitude: entries.vector("reference.amplitude", [1.0; 3])?,
            frequency: entries.vector("reference.frequency", [1.0; 3])?,
            phase: entries.vector("reference.phase", [0.0; 3])?,
        },
        other => {
            return Err(entries.error(
                "reference",
                format!("unknown reference '{other}' (expected paper_sim, constant, sinusoid or zero)"),
            ))
        }
    };

    let init = match entries.text("init")?.unwrap_or("random") {
        "random" => InitialCondition::Random {
            seed: entries.count("init.seed", 0)?,
            theta_max: entries.number("init.theta_max", DEFAULT_THETA_MAX)?,
        },
        "explicit" => InitialCondition::Explicit {
            target: entries.vector("init.target", [0.0; 3])?,
            follower: entries.vector("init.follower", [0.0; 3])?,
        },
        other => {
            return Err(entries.error(
                "init",
                format!("unknown init '{other}' (expected random or explicit)"),
            ))
        }
    };

    let method: Method = entries
        .text("integrator.method")?
        .unwrap_or("lie_euler")
        .parse()
        .map_err(|e| entries.error("integrator.method", e))?;
    let integrator = IntegratorSpec {
        method,
        h: entries.number("integrator.h", DEFAULT_STEP)?,
        reproject_every: entries.count("integrator.reproject_every", DEFAULT_REPROJECT_EVERY)?,
    };

    let sim = SimConfig {
        controller,
        reference,
        init,
        integrator,
        t_final: entries.number("t_final", DEFAULT_T_FINAL)?,
        sample_every: entries.count("sample_every", DEFAULT_SAMPLE_EVERY)?,
    };
    let analysis = AnalysisSettings {
        law,
        threshold: entries.number("analysis.threshold", DEFAULT_THRESHOLD)?,
        alpha: entries.number("analysis.alpha", DEFAULT_ALPHA)?,
        fit_window: (
            entries.number("analysis.fit_start", DEFAULT_FIT_WINDOW.0)?,
            entries.number("analysis.fit_end", DEFAULT_FIT_WINDOW.1)?,
        ),
    };
    let path = |key: &str| -> Result<Option<PathBuf>, ConfigError> {
        Ok(entries.text(key)?.map(PathBuf::from))
    };
    let output = OutputPaths {
        csv: path("output.csv")?,
        report: path("output.report")?,
        plot: path("output.plot")?,
    };
    Ok(RunConfig {
        sim,
        analysis,
        output,
    })
}

impl RunConfig {
    /// Defaults for everything but the control law.
    pub fn new(law: ControlLaw) -> Self {
        RunConfig {
            sim: SimConfig::new(ControllerKind::new(law)),
            analysis: AnalysisSettings::new(law),
            output: OutputPaths::default(),
        }
    }

    /// Checks every invariant of the run; errors name the violated one.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let sim = &self.sim;
        if sim.t_final.is_nan() || sim.t_final <= 0.0 {
            return Err(ConfigError::Validation(format!(
                "t_final must be positive, got {}",
                sim.t_final
            )));
        }
        if let InitialCondition::Random { theta_max, .. } = sim.init {
            if !(theta_max > 0.0 && theta_max < PI) {
                return Err(ConfigError::Validation(format!(
                    "init.theta_max must lie in (0, pi), got {theta_max}"
                )));
            }
        }
        sim.validate()
            .map_err(|e| ConfigError::Validation(e.to_string()))?;
        if self.analysis.law != sim.controller.law {
            return Err(ConfigError::Validation(
                "analysis law differs from the controller".into(),
            ));
        }
        self.analysis
            .validate(sim.controller.epsilon_switch)
            .map_err(|e| ConfigError::Validation(e.to_string()))
    }

    pub fn apply(&mut self, overrides: &Overrides) -> Result<(), ConfigError> {
        if let Some(law) = overrides.controller {
            self.sim.controller.law = law;
            self.analysis.law = law;
        }
        if let Some(seed) = overrides.seed {
            self.set_seed(seed)?;
        }
        if let Some(t) = overrides.t_final {
            self.sim.t_final = t;
        }
        if let Some(h) = overrides.dt {
            self.sim.integrator.h = h;
        }
        self.validate()
    }

    /// Replaces the seed of a random initial condition.
    pub fn set_seed(&mut self, seed: u64) -> Result<(), ConfigError> {
        match &mut self.sim.init {
            InitialCondition::Random { seed: s, .. } => {
                *s = seed;
                Ok(())
            }
            InitialCondition::Explicit { .. } => Err(ConfigError::Validation(
                "a seed only applies to init = random".into(),
            )),
        }
    }
}

/// Parses and validates configuration text. `origin` labels error messages.
pub fn parse_config_str(text: &str, origin: &str) -> Result<RunConfig, ConfigError> {
    let entries = parse_entries(text, origin)?;
    let config = build(&entries)?;
    config.validate()?;
    Ok(config)
}

pub fn parse_config(path: &Path) -> Result<RunConfig, crate::error::CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| crate::error::CliError::io(path, e))?;
    Ok(parse_config_str(&text, &path.display().to_string())?)
}
