//! Scenario configuration files and the parameter echo.
//!
//! A configuration is a flat TOML document. Rates are in units of the total
//! cavity decay κ and times in 1/κ, except for the device keys of
//! `design_report`, which are SI. Unknown keys are rejected.
//!
//! ```toml
//! units = "kappa"
//! scenario = "single_node_swap"
//! G = 5.0
//! nbar_init = 0.0
//! wigner_snapshots = [0.0, 0.39, 0.85]
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    SingleNodeSwap,
    TwoNodeTransfer,
    XiSweep,
    LinearizationCheck,
    DesignReport,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::SingleNodeSwap => "single_node_swap",
            Self::TwoNodeTransfer => "two_node_transfer",
            Self::XiSweep => "xi_sweep",
            Self::LinearizationCheck => "linearization_check",
            Self::DesignReport => "design_report",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct ScenarioConfig {
    pub scenario: Option<ScenarioKind>,
    /// Must be `"kappa"` when present.
    pub units: Option<String>,

    // node and network parameters [κ]
    pub G: Option<f64>,
    pub Lambda: Option<f64>,
    pub Omega: Option<f64>,
    pub Delta_c: Option<f64>,
    pub omega_m: Option<f64>,
    pub gamma_q: Option<f64>,
    pub gamma_m: Option<f64>,
    pub g0: Option<f64>,
    pub xi: Option<f64>,
    pub nbar_init: Option<f64>,
    pub fibre_phase: Option<f64>,
    pub N_a: Option<usize>,
    pub N_b: Option<usize>,

    // integration
    pub t_end: Option<f64>,
    pub dt_factor: Option<f64>,
    pub sample_every: Option<usize>,
    pub leakage_threshold: Option<f64>,
    pub leakage_strict: Option<bool>,

    // outputs
    pub wigner_snapshots: Option<Vec<f64>>,
    pub wigner_extent: Option<f64>,
    pub wigner_points: Option<usize>,

    // xi_sweep
    pub xi_values: Option<Vec<f64>>,

    // linearization_check
    pub alpha_s: Option<f64>,
    pub N_a_full: Option<usize>,
    pub N_b_full: Option<usize>,

    // design_report [SI]
    pub radius: Option<f64>,
    pub thickness: Option<f64>,
    pub cavity_length: Option<f64>,
    pub wavelength: Option<f64>,
    pub finesse: Option<f64>,
    pub density: Option<f64>,
    pub sound_speed: Option<f64>,
    pub temperature: Option<f64>,
    /// κ/2π [Hz].
    pub kappa_hz: Option<f64>,
    /// Quoted values reported next to the formula values.
    pub override_g0_hz: Option<f64>,
    pub override_p_in_w: Option<f64>,
    pub override_m_eff_kg: Option<f64>,
    pub override_nu_m_hz: Option<f64>,
    pub override_nbar_th: Option<f64>,
    pub override_kappa_fwhm_hz: Option<f64>,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(u) = &cfg.units {
            if u != "kappa" {
                return Err(Error::Config(format!("units must be \"kappa\", got \"{u}\"")));
            }
        }
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn kind(&self) -> Result<ScenarioKind> {
        self.scenario.ok_or_else(|| Error::Config("missing key `scenario`".into()))
    }

    /// Keys set in this file, in sorted order.
    pub fn present_keys(&self) -> Vec<String> {
        match serde_json::to_value(self) {
            Ok(Value::Object(map)) => map.into_iter().filter(|(_, v)| !v.is_null()).map(|(k, _)| k).collect(),
            _ => Vec::new(),
        }
    }
}

/// Where a parameter value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Config,
    Default,
    /// A quoted value reported next to the computed one.
    Quoted,
    /// Computed from other parameters.
    Derived,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EchoEntry {
    pub value: Value,
    pub source: Source,
}

/// Every number used by a run, with its provenance.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamEcho {
    pub entries: BTreeMap<String, EchoEntry>,
}

impl ParamEcho {
    pub fn record(&mut self, name: &str, value: impl Into<Value>, source: Source) {
        self.entries.insert(name.to_string(), EchoEntry { value: value.into(), source });
    }

    /// Config value if present, else `default`; recorded either way.
    pub fn pick(&mut self, name: &str, given: Option<f64>, default: f64) -> f64 {
        let (v, src) = given.map_or((default, Source::Default), |v| (v, Source::Config));
        self.record(name, v, src);
        v
    }

    pub fn pick_usize(&mut self, name: &str, given: Option<usize>, default: usize) -> usize {
        let (v, src) = given.map_or((default, Source::Default), |v| (v, Source::Config));
        self.record(name, v, src);
        v
    }

    pub fn derived(&mut self, name: &str, value: impl Into<Value>) {
        self.record(name, value, Source::Derived);
    }

    pub fn get_f64(&self, name: &str) -> Option<f64> {
        self.entries.get(name).and_then(|e| e.value.as_f64())
    }

    /// Prefixes every entry, for nesting sweep points.
    pub fn prefixed(&self, prefix: &str) -> Self {
        Self { entries: self.entries.iter().map(|(k, v)| (format!("{prefix}{k}"), v.clone())).collect() }
    }
}

/// Checks a value against an inclusive range.
pub(crate) fn check_range(name: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if !(v >= lo && v <= hi) {
        return Err(Error::Config(format!("{name} = {v} is outside [{lo}, {hi}]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_document() {
        let cfg = ScenarioConfig::from_toml_str(
            "units = \"kappa\"\nscenario = \"two_node_transfer\"\nG = 2\nxi = 0.9\nN_a = 3\nwigner_snapshots = [0, 0.5]\n",
        )
        .unwrap();
        assert_eq!(cfg.kind().unwrap(), ScenarioKind::TwoNodeTransfer);
        assert_eq!(cfg.G, Some(2.0));
        assert_eq!(cfg.N_a, Some(3));
        assert_eq!(cfg.present_keys(), vec!["G", "N_a", "scenario", "units", "wigner_snapshots", "xi"]);
    }

    #[test]
    fn rejects_bad_documents() {
        for text in [
            "scenario = \"single_node_swap\"\nGG = 1.0\n",
            "scenario = \"warp_drive\"\n",
            "scenario = \"single_node_swap\"\nN_a = 2.5\n",
            "units = \"MHz\"\nscenario = \"single_node_swap\"\n",
            "scenario = \"single_node_swap\"\n[section]\nG = 1\n",
        ] {
            assert!(matches!(ScenarioConfig::from_toml_str(text), Err(Error::Config(_))), "{text}");
        }
        assert!(ScenarioConfig::from_toml_str("G = 1.0").unwrap().kind().is_err());
    }

    #[test]
    fn echo_records_sources() {
        let mut echo = ParamEcho::default();
        assert_eq!(echo.pick("G", Some(2.0), 5.0), 2.0);
        assert_eq!(echo.pick("Lambda", None, 5.0), 5.0);
        echo.derived("dt", 0.01);
        let json = serde_json::to_value(&echo).unwrap();
        assert_eq!(json["G"]["source"], "config");
        assert_eq!(json["Lambda"]["source"], "default");
        assert_eq!(json["dt"]["source"], "derived");
        assert_eq!(echo.prefixed("a.").get_f64("a.G"), Some(2.0));
    }
}
