//! Run configuration: flat `key = value` text with `#` comments.

use std::fmt;

use serde::Serialize;

use crate::evaluate::EvalContext;
use crate::format::{MAX_PRECISION, MIN_PRECISION};
use crate::geometry::Waveguide;
use crate::quadrature::QuadratureSpec;

pub const DEFAULTS_HELP: &str = "\
Configuration keys (file `key = value`, `#` comments; flags override the file):
  b1 = 1                 guide width
  b2 = 2                 guide height, sets omega_c = pi / b2
  grid = 0:40:81,0:20:41 t0:t1:n,r0:r1:m (also t_min, t_max, t_steps, r_min, r_max, r_steps)
  abs_tol = 1e-12        quadrature absolute tolerance
  rel_tol = 1e-10        quadrature relative tolerance
  max_subdivisions = 10000
  tail_bound_tol = 1e-14 semi-infinite tail bound
  eps_light = 0          light-cone classification tolerance on |t^2 - r^2|
  fit_window = auto      a:b in units of 1/omega_c; auto is 5:30 spacelike, 10:60 timelike
  format = csv           csv or json
  precision = 17         significant digits, 6 to 17
  modes_r = 1            cutoff table covers r = 0..modes_r
  modes_s = 2            and s = 1..modes_s
Units: hbar = c = 1; lengths and inverse frequencies share one unit.";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k == self.steps - 1 {
                    self.max
                } else {
                    self.min + (self.max - self.min) * k as f64 / last
                }
            })
            .collect()
    }

    fn parse(s: &str) -> Result<Axis, String> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected min:max:steps, got '{s}'"));
        }
        Ok(Axis {
            min: parse_f64(parts[0])?,
            max: parse_f64(parts[1])?,
            steps: parts[2]
                .parse()
                .map_err(|_| format!("expected an integer step count, got '{}'", parts[2]))?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub t: Axis,
    pub r: Axis,
}

impl GridSpec {
    /// Row-major in `(t, r)`: `t` outer, `r` inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let rs = self.r.points();
        self.t
            .points()
            .into_iter()
            .flat_map(|t| rs.iter().map(move |&r| (t, r)))
            .collect()
    }

    pub fn parse(s: &str) -> Result<GridSpec, String> {
        let (t, r) = s
            .split_once(',')
            .ok_or_else(|| format!("expected t0:t1:n,r0:r1:m, got '{s}'"))?;
        Ok(GridSpec {
            t: Axis::parse(t)?,
            r: Axis::parse(r)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("expected csv or json, got '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        ConfigError {
            line: None,
            field: field.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        write!(f, "field '{}': {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub b1: f64,
    pub b2: f64,
    pub grid: GridSpec,
    pub quadrature: QuadratureSpec,
    pub eps_light: f64,
    pub fit_window: Option<(f64, f64)>,
    pub output_format: OutputFormat,
    pub precision: usize,
    pub modes_r: u32,
    pub modes_s: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            b1: 1.0,
            b2: 2.0,
            grid: GridSpec {
                t: Axis { min: 0.0, max: 40.0, steps: 81 },
                r: Axis { min: 0.0, max: 20.0, steps: 41 },
            },
            quadrature: QuadratureSpec::default(),
            eps_light: 0.0,
            fit_window: None,
            output_format: OutputFormat::Csv,
            precision: MAX_PRECISION,
            modes_r: 1,
            modes_s: 2,
        }
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim().parse().map_err(|_| format!("expected a number, got '{s}'"))
}

fn parse_window(s: &str) -> Result<Option<(f64, f64)>, String> {
    if s == "auto" {
        return Ok(None);
    }
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected min:max or auto, got '{s}'"))?;
    Ok(Some((parse_f64(a)?, parse_f64(b)?)))
}

impl RunConfig {
    /// Parses config text on top of the defaults. Unknown keys are errors.
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |e: ConfigError| ConfigError {
                line: Some(idx + 1),
                ..e
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(ConfigError::new(line, "expected key = value")))?;
            cfg.set(key.trim(), value.trim()).map_err(at)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one field from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let err = |m: String| ConfigError::new(key, m);
        let int = |v: &str| v.parse::<u64>().map_err(|_| format!("expected a non-negative integer, got '{v}'"));
        match key {
            "b1" => self.b1 = parse_f64(value).map_err(err)?,
            "b2" => self.b2 = parse_f64(value).map_err(err)?,
            "grid" => self.grid = GridSpec::parse(value).map_err(err)?,
            "t_min" => self.grid.t.min = parse_f64(value).map_err(err)?,
            "t_max" => self.grid.t.max = parse_f64(value).map_err(err)?,
            "t_steps" => self.grid.t.steps = int(value).map_err(err)? as usize,
            "r_min" => self.grid.r.min = parse_f64(value).map_err(err)?,
            "r_max" => self.grid.r.max = parse_f64(value).map_err(err)?,
            "r_steps" => self.grid.r.steps = int(value).map_err(err)? as usize,
            "abs_tol" => self.quadrature.abs_tol = parse_f64(value).map_err(err)?,
            "rel_tol" => self.quadrature.rel_tol = parse_f64(value).map_err(err)?,
            "max_subdivisions" => self.quadrature.max_subdivisions = int(value).map_err(err)? as usize,
            "tail_bound_tol" => self.quadrature.tail_bound_tol = parse_f64(value).map_err(err)?,
            "eps_light" => self.eps_light = parse_f64(value).map_err(err)?,
            "fit_window" => self.fit_window = parse_window(value).map_err(err)?,
            "format" | "output_format" => self.output_format = value.parse().map_err(err)?,
            "precision" => self.precision = int(value).map_err(err)? as usize,
            "modes_r" => self.modes_r = int(value).map_err(err)? as u32,
            "modes_s" => self.modes_s = int(value).map_err(err)? as u32,
            _ => return Err(ConfigError::new(key, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Err(e) = Waveguide::new(self.b1, self.b2) {
            let field = if self.b1.is_finite() && self.b1 > 0.0 { "b2" } else { "b1" };
            return Err(ConfigError::new(field, e.to_string()));
        }
        for (name, axis) in [("t", &self.grid.t), ("r", &self.grid.r)] {
            let field = format!("{name}_steps");
            if axis.steps < 1 {
                return Err(ConfigError::new(&field, "need at least 1 step"));
            }
            if !(axis.min <= axis.max) || !axis.min.is_finite() || !axis.max.is_finite() {
                return Err(ConfigError::new(
                    &format!("{name}_min"),
                    format!("need finite min <= max, got {}:{}", axis.min, axis.max),
                ));
            }
            if axis.min < 0.0 {
                return Err(ConfigError::new(&format!("{name}_min"), "coordinates must be non-negative"));
            }
        }
        self.quadrature
            .validate()
            .map_err(|e| ConfigError::new("quadrature", e.to_string()))?;
        if !(self.eps_light >= 0.0) {
            return Err(ConfigError::new("eps_light", "must be non-negative"));
        }
        if let Some((a, b)) = self.fit_window {
            if !(a < b) || !(a > 0.0) {
                return Err(ConfigError::new("fit_window", format!("need 0 < min < max, got {a}:{b}")));
            }
        }
        if !(MIN_PRECISION..=MAX_PRECISION).contains(&self.precision) {
            return Err(ConfigError::new(
                "precision",
                format!("must lie in {MIN_PRECISION}..={MAX_PRECISION}, got {}", self.precision),
            ));
        }
        if self.modes_s < 1 {
            return Err(ConfigError::new("modes_s", "need at least 1"));
        }
        Ok(())
    }

    pub fn waveguide(&self) -> Waveguide {
        Waveguide::new(self.b1, self.b2).expect("validated config")
    }

    pub fn context(&self) -> EvalContext {
        EvalContext {
            waveguide: self.waveguide(),
            quadrature: self.quadrature,
            eps_light: self.eps_light,
        }
    }
}
