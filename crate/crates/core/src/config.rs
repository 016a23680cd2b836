//! Run configuration: a flat JSON document plus conversion into the typed
//! parameter structs used by the library.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feedback::LoopParams;
use crate::nopa::{AnalysisPoint, NopaParams};
use crate::sweep::{FixedParams, SweepAxis, SweepSpec};

/// Everything a single command run needs. Physical keys are flat; sweep
/// and optimization settings are optional and only consulted by the
/// commands that need them. Command-line flags override loaded values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub gamma1: f64,
    pub gamma2: f64,
    pub tau_s: f64,
    pub n_modes: u32,
    pub beta: f64,
    pub t: f64,
    pub l: f64,
    pub freq_hz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<SweepAxis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to_value: Option<f64>,
    pub points: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    /// The reference operating point: γ1 = 0.1, γ2 = 0.003, τ = 0.67 ns,
    /// four modes, β = 0.15, open loop (t = 0) with 1% loop loss,
    /// analyzed at 1 MHz.
    fn default() -> Self {
        RunConfig {
            gamma1: 0.1,
            gamma2: 0.003,
            tau_s: 6.7e-10,
            n_modes: 4,
            beta: 0.15,
            t: 0.0,
            l: 0.01,
            freq_hz: 1e6,
            axis: None,
            from_value: None,
            to_value: None,
            points: 501,
            free: None,
            output: None,
        }
    }
}

impl RunConfig {
    /// Parses a JSON document; unknown keys are rejected, missing keys
    /// fall back to the defaults.
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("config parse error: {e}")))
    }

    /// Serializes to JSON. Floats use the shortest exact representation,
    /// so a reloaded config reproduces bit-identical outputs.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn nopa(&self) -> Result<NopaParams> {
        NopaParams::new(
            self.gamma1,
            self.gamma2,
            self.tau_s,
            self.n_modes,
            self.beta,
        )
    }

    pub fn loop_params(&self) -> Result<LoopParams> {
        LoopParams::new(self.t, self.l)
    }

    pub fn analysis_point(&self) -> Result<AnalysisPoint> {
        AnalysisPoint::from_freq_hz(self.freq_hz)
    }

    pub fn fixed(&self) -> Result<FixedParams> {
        Ok(FixedParams {
            nopa: self.nopa()?,
            loop_params: self.loop_params()?,
            at: self.analysis_point()?,
        })
    }

    /// Builds the sweep request; `axis`, `from_value` and `to_value` must
    /// all be present.
    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let (Some(axis), Some(from_value), Some(to_value)) =
            (self.axis, self.from_value, self.to_value)
        else {
            return Err(Error::InvalidInput(
                "a sweep needs axis, from_value and to_value".into(),
            ));
        };
        Ok(SweepSpec {
            axis,
            from_value,
            to_value,
            points: self.points,
            fixed: self.fixed()?,
        })
    }
}
