//! JSON run configuration. Every section is optional at parse time; each
//! command asks for the sections it needs and reports the missing ones.

use std::path::Path;

use opendeco::params::SymmetricCoefficients;
use opendeco::{OscillatorParams, ThermalParams, TwoModeEnvironment};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub oscillator: Option<OscillatorSection>,
    pub thermal: Option<ThermalSection>,
    pub initial: Option<InitialSection>,
    pub two_mode_env: Option<TwoModeSection>,
    pub deco_grid: Option<DecoGridSection>,
    pub density: Option<DensitySection>,
    pub propagate: Option<PropagateSection>,
    pub scan: Option<ScanSection>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorSection {
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    pub lambda: f64,
    #[serde(default)]
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalSection {
    #[serde(alias = "C")]
    pub c: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub delta: f64,
    #[serde(default)]
    pub r: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub p0: f64,
}

/// Coefficients of an environment with identical diagonal blocks and
/// `Dxpy = Dypx`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoModeSection {
    #[serde(alias = "Dxx")]
    pub dxx: f64,
    #[serde(default, alias = "Dxpx")]
    pub dxpx: f64,
    #[serde(alias = "Dpxpx")]
    pub dpxpx: f64,
    #[serde(default, alias = "Dxy")]
    pub dxy: f64,
    #[serde(default, alias = "Dxpy")]
    pub dxpy: f64,
    #[serde(default, alias = "Dpxpy")]
    pub dpxpy: f64,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoGridSection {
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_steps: Option<usize>,
    pub c_min: Option<f64>,
    pub c_max: Option<f64>,
    pub c_steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySection {
    pub t: Option<f64>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagateSection {
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub dxx_min: Option<f64>,
    pub dxx_max: Option<f64>,
    pub dxx_steps: Option<usize>,
    pub dxpy_min: Option<f64>,
    pub dxpy_max: Option<f64>,
    pub dxpy_steps: Option<usize>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn oscillator(&self) -> Result<OscillatorParams, CliError> {
        let o = require(self.oscillator, "oscillator")?;
        Ok(OscillatorParams::new(o.m, o.omega, o.lambda, o.mu).with_hbar(o.hbar))
    }

    pub fn thermal(&self) -> Result<ThermalParams, CliError> {
        let t = require(self.thermal, "thermal")?;
        Ok(ThermalParams::new(t.c)?)
    }

    pub fn initial(&self) -> Result<InitialSection, CliError> {
        require(self.initial, "initial")
    }

    pub fn two_mode_env(&self) -> Result<TwoModeEnvironment, CliError> {
        let e = require(self.two_mode_env, "two_mode_env")?;
        let lambda = require(self.oscillator, "oscillator")?.lambda;
        let coefficients = SymmetricCoefficients {
            dxx: e.dxx,
            dxpx: e.dxpx,
            dpxpx: e.dpxpx,
            dxy: e.dxy,
            dxpy: e.dxpy,
            dpxpy: e.dpxpy,
        };
        Ok(TwoModeEnvironment::symmetric(coefficients, lambda))
    }
}

fn require<T: Copy>(section: Option<T>, name: &str) -> Result<T, CliError> {
    section.ok_or_else(|| CliError::Config(format!("missing required section \"{name}\"")))
}

/// Flag value if given, else the config value, else an error naming both.
pub fn pick<T: Copy>(flag: Option<T>, config: Option<T>, flag_name: &str) -> Result<T, CliError> {
    flag.or(config).ok_or_else(|| {
        CliError::Config(format!(
            "no value for {flag_name}: pass the flag or set it in the config"
        ))
    })
}
