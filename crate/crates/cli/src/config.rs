use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyBand {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl EnergyBand {
    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vectors {
    pub m: Option<Vec<f64>>,
    pub n: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecaySection {
    pub fock: bool,
}

impl Default for DecaySection {
    fn default() -> Self {
        Self { fock: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Heisenberg,
    Reversed,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub half_line: bool,
    pub beta: f64,
    pub convention: Convention,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self { half_line: true, beta: 1.0, convention: Convention::Heisenberg }
    }
}

/// Scenario parameters, read from TOML and overridden by flags.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub omega: f64,
    pub gamma: f64,
    pub n_modes: usize,
    pub dt: f64,
    pub t_max: f64,
    pub t_samples: Vec<f64>,
    pub energy_band: EnergyBand,
    pub output_path: Option<PathBuf>,
    pub vectors: Vectors,
    pub decay: DecaySection,
    pub verify: VerifySection,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            omega: 1.0,
            gamma: 0.5,
            n_modes: 1,
            dt: 1e-3,
            t_max: 40.0,
            t_samples: vec![0.0, 0.25, 0.5, 1.0, 2.0, 3.0],
            energy_band: EnergyBand { min: -3.0, max: 3.0, count: 601 },
            output_path: None,
            vectors: Vectors::default(),
            decay: DecaySection::default(),
            verify: VerifySection::default(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub omega: Option<f64>,
    pub gamma: Option<f64>,
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub out: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        toml::from_str(text).map_err(|e| Failure::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, Failure> {
        let mut cfg = match path {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| Failure::Config(format!("cannot read {}: {e}", p.display())))?;
                Self::parse(&text)?
            }
            None => Self::default(),
        };
        cfg.apply(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.omega {
            self.omega = v;
        }
        if let Some(v) = o.gamma {
            self.gamma = v;
        }
        if let Some(v) = o.dt {
            self.dt = v;
        }
        if let Some(v) = o.t_max {
            self.t_max = v;
        }
        if let Some(p) = &o.out {
            self.output_path = Some(p.clone());
        }
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let bad = |msg: String| Err(Failure::Config(msg));
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return bad(format!("omega must be positive, got {}", self.omega));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be non-negative, got {}", self.gamma));
        }
        if self.n_modes == 0 {
            return bad("n_modes must be at least 1".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad(format!("t_max must be positive, got {}", self.t_max));
        }
        if self.t_samples.is_empty() {
            return bad("t_samples must not be empty".into());
        }
        if let Some(t) = self.t_samples.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
            return bad(format!("t_samples must be non-negative, got {t}"));
        }
        let band = &self.energy_band;
        if !(band.min < band.max) || band.count < 2 || !band.min.is_finite() || !band.max.is_finite() {
            return bad("energy_band needs min < max and count >= 2".into());
        }
        for (name, v) in [("m", &self.vectors.m), ("n", &self.vectors.n)] {
            if let Some(v) = v {
                if v.len() != 2 * self.n_modes {
                    return bad(format!("vector {name} has length {}, expected {}", v.len(), 2 * self.n_modes));
                }
                if v.iter().all(|x| *x == 0.0) || v.iter().any(|x| !x.is_finite()) {
                    return bad(format!("vector {name} must be finite and non-zero"));
                }
            }
        }
        if !(self.verify.beta > 0.0 && self.verify.beta.is_finite()) {
            return bad(format!("verify.beta must be positive, got {}", self.verify.beta));
        }
        Ok(())
    }
}
