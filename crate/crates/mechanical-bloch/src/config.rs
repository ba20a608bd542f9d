//! Run configuration: a single JSON document, all quantities in SI base
//! units. Exactly one protocol section per run; the CLI subcommand must match
//! the section present.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DetuningSpec, SystemParams};
use crate::newton::ForceSpec;
use crate::protocol::PulseTiming;

/// Uniform grid start + i (stop - start) / (points - 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points == 0 {
            return Err(Error::Config("grid must have at least one point".into()));
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| self.start + i as f64 * step)
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Detuning grid (N/m) for the eigenfrequency sweep.
    pub dk_grid: GridSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateConfig {
    pub x_a: f64,
    pub v_a: f64,
    pub x_b: f64,
    pub v_b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub detuning: DetuningSpec,
    #[serde(default = "default_force")]
    pub force: ForceSpec,
    pub initial: InitialStateConfig,
    pub t_end: f64,
    #[serde(default = "default_steps_per_period")]
    pub steps_per_period: u32,
}

fn default_force() -> ForceSpec {
    ForceSpec::None
}

fn default_steps_per_period() -> u32 {
    200
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RabiConfig {
    /// Drive amplitude A (rad/s).
    pub amplitude: f64,
    /// Detuning delta between drive and splitting (rad/s).
    pub delta: f64,
    /// Damping rate (1/s); for the Newton model this overrides system.gamma.
    pub gamma: f64,
    pub t_max: f64,
    pub samples: usize,
    #[serde(default = "default_steps_per_period")]
    pub steps_per_period: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaitScanConfig {
    pub pulses: PulseTiming,
    pub delta: f64,
    pub gamma: f64,
    pub t_grid: GridSpec,
    #[serde(default = "default_steps_per_period")]
    pub steps_per_period: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    /// Grid of drive-to-carrier ratios A / omega0 to probe.
    pub amplitude_ratios: Vec<f64>,
    /// Damping as a fraction of omega0.
    #[serde(default)]
    pub gamma_ratio: f64,
    #[serde(default = "default_steps_per_period")]
    pub steps_per_period: u32,
    #[serde(default = "default_compare_samples")]
    pub samples: usize,
}

fn default_compare_samples() -> usize {
    200
}

/// Top-level configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rabi: Option<RabiConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramsey: Option<WaitScanConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hahn: Option<WaitScanConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareConfig>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        let sections = [
            self.spectrum.is_some(),
            self.simulate.is_some(),
            self.rabi.is_some(),
            self.ramsey.is_some(),
            self.hahn.is_some(),
            self.compare.is_some(),
        ];
        let count = sections.iter().filter(|p| **p).count();
        if count != 1 {
            return Err(Error::Config(format!(
                "exactly one protocol section required, found {count}"
            )));
        }
        Ok(())
    }
}
