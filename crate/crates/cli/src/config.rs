//! Line-based `key = value` run and sweep configuration.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use nmqsd_core::spin::PSEUDO_PURE_SITES;
use nmqsd_core::{BathSpec, ChainSpec, InitMode, InitSpec, StepSpec};

pub const DEFAULT_OUT_DIR: &str = "results";

const KEYS: &[&str] = &[
    "n_sites",
    "j_coupling",
    "d_z",
    "b_z",
    "boundary",
    "coupling_strength",
    "memory_rate",
    "bath_temperature",
    "system_temperature",
    "init_mode",
    "epsilon_sign",
    "dt",
    "t_max",
    "record_stride",
    "sweep_axis",
    "sweep_values",
    "out",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based line the error refers to; `None` for whole-file problems.
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    MemoryRate,
    CouplingStrength,
    BathTemperature,
    SystemTemperature,
    DmStrength,
    FieldStrength,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 6] = [
        SweepAxis::MemoryRate,
        SweepAxis::CouplingStrength,
        SweepAxis::BathTemperature,
        SweepAxis::SystemTemperature,
        SweepAxis::DmStrength,
        SweepAxis::FieldStrength,
    ];

    /// Name used in output file names.
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::MemoryRate => "gamma",
            SweepAxis::CouplingStrength => "coupling",
            SweepAxis::BathTemperature => "T_b",
            SweepAxis::SystemTemperature => "T_s",
            SweepAxis::DmStrength => "D_z",
            SweepAxis::FieldStrength => "B_z",
        }
    }

    /// The config key this axis overrides.
    pub fn key(self) -> &'static str {
        match self {
            SweepAxis::MemoryRate => "memory_rate",
            SweepAxis::CouplingStrength => "coupling_strength",
            SweepAxis::BathTemperature => "bath_temperature",
            SweepAxis::SystemTemperature => "system_temperature",
            SweepAxis::DmStrength => "d_z",
            SweepAxis::FieldStrength => "b_z",
        }
    }

    pub fn apply(self, run: &mut RunConfig, value: f64) {
        match self {
            SweepAxis::MemoryRate => run.bath.memory_rate = value,
            SweepAxis::CouplingStrength => run.bath.coupling_strength = value,
            SweepAxis::BathTemperature => run.bath.bath_temperature = value,
            SweepAxis::SystemTemperature => run.init.system_temperature = value,
            SweepAxis::DmStrength => run.chain.dm_strength = value,
            SweepAxis::FieldStrength => run.chain.field_strength = value,
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.name() == s || a.key() == s)
            .or(match s {
                "Gamma" => Some(SweepAxis::CouplingStrength),
                _ => None,
            })
            .ok_or_else(|| {
                let names: Vec<_> = SweepAxis::ALL.iter().map(|a| a.name()).collect();
                format!(
                    "unknown sweep axis '{s}' (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

/// A single trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub label: String,
    pub chain: ChainSpec,
    pub bath: BathSpec,
    pub init: InitSpec,
    pub steps: StepSpec,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            label: "run".into(),
            chain: ChainSpec::default(),
            bath: BathSpec {
                coupling_strength: 0.003,
                memory_rate: 5.0,
                bath_temperature: 80.0,
            },
            init: InitSpec {
                system_temperature: 10.0,
                mode: InitMode::default(),
                epsilon_sign: Default::default(),
            },
            steps: StepSpec::default(),
            out: PathBuf::from(DEFAULT_OUT_DIR),
        }
    }
}

impl RunConfig {
    /// Full parameter validation; the message starts with the offending key.
    pub fn validate(&self) -> Result<(), String> {
        self.chain.validate().map_err(core_message)?;
        self.bath.validate().map_err(core_message)?;
        self.init.validate().map_err(core_message)?;
        if self.steps.t_max.is_nan() || self.steps.t_max <= 0.0 {
            return Err("t_max must be > 0".into());
        }
        self.steps.validate().map_err(core_message)?;
        if self.init.mode == InitMode::PseudoPure && self.chain.n_sites != PSEUDO_PURE_SITES {
            return Err(format!(
                "n_sites must be {PSEUDO_PURE_SITES} for init_mode pseudo_pure"
            ));
        }
        Ok(())
    }
}

/// One base run repeated over a list of values of a single parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

impl SweepConfig {
    pub fn runs(&self) -> Vec<(f64, RunConfig)> {
        self.values
            .iter()
            .map(|&v| {
                let mut run = self.base.clone();
                self.axis.apply(&mut run, v);
                (v, run)
            })
            .collect()
    }

    /// Output stem of the run at `value`.
    pub fn run_stem(&self, value: f64) -> String {
        format!("{}_{}={}", self.base.label, self.axis, value)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.values.is_empty() {
            return Err("sweep_values must not be empty".into());
        }
        for (value, run) in self.runs() {
            run.validate()
                .map_err(|e| format!("{e} (at {} = {value})", self.axis.key()))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Config {
    Run(RunConfig),
    Sweep(SweepConfig),
}

impl Config {
    pub fn base(&self) -> &RunConfig {
        match self {
            Config::Run(r) => r,
            Config::Sweep(s) => &s.base,
        }
    }

    pub fn base_mut(&mut self) -> &mut RunConfig {
        match self {
            Config::Run(r) => r,
            Config::Sweep(s) => &mut s.base,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match self {
            Config::Run(r) => r.validate(),
            Config::Sweep(s) => s.validate(),
        }
    }
}

fn parse_core<T: FromStr<Err = nmqsd_core::Error>>(
    line: usize,
    value: &str,
) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|e| ConfigError::at(line, core_message(e)))
}

fn core_message(e: nmqsd_core::Error) -> String {
    match e {
        nmqsd_core::Error::InvalidParameter(m)
        | nmqsd_core::Error::Usage(m)
        | nmqsd_core::Error::Unsupported(m) => m,
        other => other.to_string(),
    }
}

/// Parses `key = value` lines. Blank lines and `#` comments are ignored;
/// keys missing from the text keep their [`RunConfig::default`] values.
pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut run = RunConfig::default();
    let mut axis: Option<SweepAxis> = None;
    let mut values: Option<Vec<f64>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| {
                ConfigError::at(line, format!("expected 'key = value', got '{content}'"))
            })?;
        let key = KEYS
            .iter()
            .copied()
            .find(|k| *k == key)
            .ok_or_else(|| ConfigError::at(line, format!("unknown key '{key}'")))?;
        if let Some(first) = seen.insert(key, line) {
            return Err(ConfigError::at(
                line,
                format!("duplicate key '{key}' (first set on line {first})"),
            ));
        }

        let num = || -> Result<f64, ConfigError> {
            value
                .parse::<f64>()
                .map_err(|_| ConfigError::at(line, format!("malformed number '{value}' for {key}")))
        };
        let int = || -> Result<usize, ConfigError> {
            value.parse::<usize>().map_err(|_| {
                ConfigError::at(line, format!("malformed integer '{value}' for {key}"))
            })
        };

        match key {
            "n_sites" => run.chain.n_sites = int()?,
            "j_coupling" => run.chain.j_coupling = num()?,
            "d_z" => run.chain.dm_strength = num()?,
            "b_z" => run.chain.field_strength = num()?,
            "boundary" => run.chain.boundary = parse_core(line, value)?,
            "coupling_strength" => run.bath.coupling_strength = num()?,
            "memory_rate" => run.bath.memory_rate = num()?,
            "bath_temperature" => run.bath.bath_temperature = num()?,
            "system_temperature" => run.init.system_temperature = num()?,
            "init_mode" => run.init.mode = parse_core(line, value)?,
            "epsilon_sign" => run.init.epsilon_sign = parse_core(line, value)?,
            "dt" => run.steps.dt = num()?,
            "t_max" => run.steps.t_max = num()?,
            "record_stride" => run.steps.record_stride = int()?,
            "sweep_axis" => {
                axis = Some(
                    value
                        .parse()
                        .map_err(|e: String| ConfigError::at(line, e))?,
                )
            }
            "sweep_values" => {
                let vals = value
                    .split(',')
                    .map(|v| {
                        v.trim().parse::<f64>().map_err(|_| {
                            ConfigError::at(
                                line,
                                format!("malformed number '{}' in sweep_values", v.trim()),
                            )
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                values = Some(vals);
            }
            "out" => run.out = PathBuf::from(value),
            _ => unreachable!("key list and match arms differ"),
        }
    }

    // Point a validation failure at the last line among the keys it names.
    let locate = |message: String| {
        let line = seen
            .iter()
            .filter(|(k, _)| {
                message
                    .split(|c: char| !(c.is_alphanumeric() || c == '_'))
                    .any(|word| word == **k)
            })
            .map(|(_, l)| *l)
            .max();
        ConfigError { line, message }
    };

    let config = match (axis, values) {
        (None, None) => Config::Run(run),
        (Some(axis), Some(values)) => Config::Sweep(SweepConfig {
            base: run,
            axis,
            values,
        }),
        (Some(_), None) => {
            return Err(ConfigError::at(
                seen["sweep_axis"],
                "sweep_axis given without sweep_values",
            ))
        }
        (None, Some(_)) => {
            return Err(ConfigError::at(
                seen["sweep_values"],
                "sweep_values given without sweep_axis",
            ))
        }
    };
    match &config {
        Config::Run(r) => r.validate().map_err(locate)?,
        Config::Sweep(s) => s.validate().map_err(|m| {
            let mut e = locate(m);
            e.line = e.line.or(Some(seen["sweep_values"]));
            e
        })?,
    }
    Ok(config)
}
