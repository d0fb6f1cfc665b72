use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use vheat_core::VModelParams;

use crate::error::{ExpError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    /// Full Redfield generator, direct steady state.
    Nonsecular,
    /// Redfield generator with the secular approximation.
    Secular,
    /// Closed-form steady state (rates at nu).
    Analytic,
    /// Quasi-degenerate 3x3 linear system (rates at nu).
    QuasiDegenerateLinear,
}

impl FromStr for Engine {
    type Err = ExpError;

    fn from_str(s: &str) -> Result<Self> {
        <Engine as ValueEnum>::from_str(s.trim(), true).map_err(|_| ExpError::BadInput(format!("unknown engine '{s}'")))
    }
}

/// Sample points: `MIN:MAX:N`, `log:MIN:MAX:N`, or a comma list.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Linear { min: f64, max: f64, n: usize },
    Log { min: f64, max: f64, n: usize },
    List(Vec<f64>),
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| ExpError::BadInput(format!("not a number: '{s}'")))
}

impl FromStr for Grid {
    type Err = ExpError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parts: Vec<&str> = s.split(':').collect();
        let range = |p: &[&str]| -> Result<(f64, f64, usize)> {
            let n = p[2].trim().parse::<usize>().map_err(|_| ExpError::BadInput(format!("bad point count '{}'", p[2])))?;
            Ok((parse_f64(p[0])?, parse_f64(p[1])?, n))
        };
        let grid = match parts.as_slice() {
            [kind, rest @ ..] if kind.trim() == "log" && rest.len() == 3 => {
                let (min, max, n) = range(rest)?;
                Grid::Log { min, max, n }
            }
            p if p.len() == 3 => {
                let (min, max, n) = range(p)?;
                Grid::Linear { min, max, n }
            }
            [single] => Grid::List(single.split(',').map(parse_f64).collect::<Result<_>>()?),
            _ => return Err(ExpError::BadInput(format!("cannot parse grid '{s}'"))),
        };
        grid.validate()?;
        Ok(grid)
    }
}

impl Grid {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ExpError::BadInput(m));
        match *self {
            Grid::Linear { min, max, n } | Grid::Log { min, max, n } => {
                if n < 2 {
                    return bad(format!("grid needs n >= 2, got {n}"));
                }
                if !(min.is_finite() && max.is_finite() && min < max) {
                    return bad(format!("grid bounds must be finite with min < max, got {min}..{max}"));
                }
                if matches!(self, Grid::Log { .. }) && min <= 0.0 {
                    return bad(format!("log grid needs min > 0, got {min}"));
                }
            }
            Grid::List(ref v) => {
                if v.is_empty() {
                    return bad("empty grid".into());
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return bad("grid values must be finite".into());
                }
                if v.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("grid values must be strictly increasing".into());
                }
            }
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        match *self {
            Grid::Linear { min, max, n } => (0..n)
                .map(|i| if i + 1 == n { max } else { min + (max - min) * i as f64 / (n - 1) as f64 })
                .collect(),
            Grid::Log { min, max, n } => {
                let (a, b) = (min.ln(), max.ln());
                (0..n)
                    .map(|i| match i {
                        0 => min,
                        i if i + 1 == n => max,
                        i => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
                    })
                    .collect()
            }
            Grid::List(ref v) => v.clone(),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Linear { min, max, n } => write!(f, "{min}:{max}:{n}"),
            Grid::Log { min, max, n } => write!(f, "log:{min}:{max}:{n}"),
            Grid::List(v) => {
                let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", s.join(","))
            }
        }
    }
}

/// Shared settings of every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub params: VModelParams,
    pub engine: Engine,
    pub grid: Option<Grid>,
    pub out: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { params: VModelParams::default(), engine: Engine::Nonsecular, grid: None, out: None }
    }
}

impl SweepConfig {
    /// Applies one `key = value` setting; `-` and `_` are interchangeable in keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let p = &mut self.params;
        match key.trim().replace('-', "_").as_str() {
            "nu" => p.nu = parse_f64(value)?,
            "delta" => p.delta = parse_f64(value)?,
            "alpha" => p.alpha = parse_f64(value)?,
            "t_hot" => p.t_hot = parse_f64(value)?,
            "t_cold" => p.t_cold = parse_f64(value)?,
            "gamma" => {
                let g = parse_f64(value)?;
                p.gamma_hot = g;
                p.gamma_cold = g;
            }
            "gamma_hot" => p.gamma_hot = parse_f64(value)?,
            "gamma_cold" => p.gamma_cold = parse_f64(value)?,
            "engine" => self.engine = value.parse()?,
            "grid" => self.grid = Some(value.parse()?),
            "out" => self.out = Some(PathBuf::from(value.trim())),
            other => return Err(ExpError::BadInput(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Parses a flat `key = value` file; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ExpError::Io { path: path.display().to_string(), source })?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                ExpError::BadInput(format!("{}:{}: expected key = value", path.display(), lineno + 1))
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate().map_err(|e| ExpError::BadInput(e.to_string()))?;
        if let Some(g) = &self.grid {
            g.validate()?;
        }
        Ok(())
    }

    pub fn grid_or(&self, default: &str) -> Grid {
        self.grid.clone().unwrap_or_else(|| default.parse().expect("default grid parses"))
    }
}
