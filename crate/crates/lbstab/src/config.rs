//! Run configuration: JSON parsing, background-velocity presets, numeric
//! literals as exact fractions, and per-command validation.
//!
//! Configuration values that are algebraically exact (√3-multiples, rational
//! fractions) can be written as strings like `"3/20/sqrt3"` or `"1/2"` so
//! the construction pipeline can recover them exactly; plain JSON numbers
//! are accepted everywhere as decimals.

use crate::equilibrium::BackgroundState;
use crate::error::{Error, Result};
use serde::Deserialize;
use std::collections::BTreeSet;
use std::path::Path;

/// Names of the four shipped background-velocity presets.
pub const PRESET_NAMES: [&str; 4] = ["preset-1", "preset-2", "preset-3", "preset-4"];

/// Preset background velocities as fractions (p, q) meaning u₀ᵢ = (p/q)/√3.
///
/// These are the four background flows exercised by the convergence studies
/// and the feasibility regression suite.
pub fn preset_u0_fractions(name: &str) -> Result<[(i64, i64); 3]> {
    match name {
        "preset-1" => Ok([(3, 20), (1, 10), (1, 5)]),
        "preset-2" => Ok([(-1, 4), (1, 4), (1, 2)]),
        "preset-3" => Ok([(2, 5), (9, 10), (3, 4)]),
        "preset-4" => Ok([(3, 4), (5, 8), (1, 1)]),
        other => Err(Error::Config(format!(
            "unknown preset {other:?}; expected one of {}",
            PRESET_NAMES.join(", ")
        ))),
    }
}

/// Preset background velocity as floating point.
pub fn preset_u0(name: &str) -> Result<[f64; 3]> {
    let fr = preset_u0_fractions(name)?;
    // Same evaluation order as the "p/q/sqrt3" text form, so preset and
    // spelled-out configurations agree bit-for-bit.
    Ok(std::array::from_fn(|i| {
        fr[i].0 as f64 / fr[i].1 as f64 / 3f64.sqrt()
    }))
}

/// A numeric config value: a JSON number, or a string fraction `"p/q"`,
/// optionally suffixed `"/sqrt3"` for division by √3.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Num {
    Float(f64),
    Text(String),
}

impl Num {
    pub fn to_f64(&self) -> Result<f64> {
        match self {
            Num::Float(v) => Ok(*v),
            Num::Text(s) => parse_numeric_text(s),
        }
    }
}

fn parse_numeric_text(s: &str) -> Result<f64> {
    let bad = |_| Error::Config(format!("cannot parse numeric value {s:?}"));
    let (body, sqrt3) = match s.strip_suffix("/sqrt3") {
        Some(rest) => (rest, true),
        None => (s, false),
    };
    let value = match body.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(bad)?;
            let q: f64 = q.trim().parse().map_err(bad)?;
            if q == 0.0 {
                return Err(Error::Config(format!("zero denominator in {s:?}")));
            }
            p / q
        }
        None => body.trim().parse().map_err(bad)?,
    };
    Ok(if sqrt3 { value / 3f64.sqrt() } else { value })
}

/// Background-state section of a run configuration.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackgroundConfig {
    pub rho0: Option<Num>,
    pub u0: Option<[Num; 3]>,
    pub cs2: Option<Num>,
}

/// Stability-domain scan section.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    /// Fixed first background-velocity component.
    pub u01: Num,
    /// Lower edge of the (u₀₂, u₀₃) square; default −1.
    pub min: Option<Num>,
    /// Upper edge of the (u₀₂, u₀₃) square; default 1.
    pub max: Option<Num>,
    /// Cells per axis; default 41.
    pub cells: Option<u32>,
}

/// Optional overrides of the built-in verification tolerances.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Maximum accepted symmetrization / idempotency residual.
    pub certification_residual: Option<f64>,
}

/// Commands the dispatcher understands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Construct,
    Verify,
    Simulate,
    Converge,
    Scan,
}

impl CommandKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "construct" => Ok(Self::Construct),
            "verify" => Ok(Self::Verify),
            "simulate" => Ok(Self::Simulate),
            "converge" => Ok(Self::Converge),
            "scan" => Ok(Self::Scan),
            other => Err(Error::Config(format!(
                "unknown command {other:?}; expected construct, verify, simulate, \
                 converge, or scan"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Construct => "construct",
            Self::Verify => "verify",
            Self::Simulate => "simulate",
            Self::Converge => "converge",
            Self::Scan => "scan",
        }
    }
}

/// A parsed run configuration. Field presence is validated per command by
/// [`RunConfig::validate`]; unknown keys anywhere are rejected with a
/// message listing all of them.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    /// Velocity-set name; default D3Q33.
    pub velocity_set: Option<String>,
    /// Background state; merged with `preset` (preset supplies u₀).
    pub background: Option<BackgroundConfig>,
    /// Name of a shipped background-velocity preset.
    pub preset: Option<String>,
    /// Relaxation time; default 1/2.
    pub tau: Option<Num>,
    /// Grid nodes per dimension (simulate).
    pub grid: Option<u32>,
    /// Grid list for convergence studies.
    pub grids: Option<Vec<u32>>,
    /// Test-case id 1..3 (converge).
    pub test_case: Option<u8>,
    /// Number of time steps (simulate).
    pub steps: Option<u64>,
    /// Final physical time (converge); defaults depend on the test case.
    pub final_time: Option<Num>,
    /// Output directory; default "out".
    pub out: Option<String>,
    /// Path of an operator file to check (verify).
    pub operator: Option<String>,
    /// Permit τ < 1/2 (outside the certified range).
    pub allow_unstable: Option<bool>,
    /// Worker threads; default: all available.
    pub threads: Option<usize>,
    pub scan: Option<ScanConfig>,
    pub tolerances: Option<ToleranceConfig>,
}

/// Top-level keys accepted in a configuration file, kept in sync with
/// [`RunConfig`] by the unit tests.
const TOP_KEYS: [&str; 16] = [
    "command",
    "velocity_set",
    "background",
    "preset",
    "tau",
    "grid",
    "grids",
    "test_case",
    "steps",
    "final_time",
    "out",
    "operator",
    "allow_unstable",
    "threads",
    "scan",
    "tolerances",
];

fn collect_unknown_keys(value: &serde_json::Value) -> Vec<String> {
    let mut unknown = Vec::new();
    let Some(map) = value.as_object() else {
        return unknown;
    };
    for key in map.keys() {
        if !TOP_KEYS.contains(&key.as_str()) {
            unknown.push(key.clone());
        }
    }
    let nested: [(&str, &[&str]); 3] = [
        ("background", &["rho0", "u0", "cs2"]),
        ("scan", &["u01", "min", "max", "cells"]),
        ("tolerances", &["certification_residual"]),
    ];
    for (section, keys) in nested {
        if let Some(obj) = map.get(section).and_then(|v| v.as_object()) {
            for key in obj.keys() {
                if !keys.contains(&key.as_str()) {
                    unknown.push(format!("{section}.{key}"));
                }
            }
        }
    }
    unknown
}

impl RunConfig {
    /// Parses and checks key spelling, but defers the per-command
    /// field-presence checks — callers that merge command-line overrides
    /// into the config run [`RunConfig::validate`] after merging.
    pub fn from_json_str_lenient(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("malformed JSON: {e}")))?;
        let unknown = collect_unknown_keys(&value);
        if !unknown.is_empty() {
            let sorted: BTreeSet<_> = unknown.into_iter().collect();
            return Err(Error::Config(format!(
                "unknown configuration keys: {}",
                sorted.into_iter().collect::<Vec<_>>().join(", ")
            )));
        }
        serde_json::from_value(value)
            .map_err(|e| Error::Config(format!("invalid configuration: {e}")))
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg = Self::from_json_str_lenient(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    /// An empty configuration for the given command, to be filled from
    /// command-line flags and then validated.
    pub fn minimal(command: &str) -> Self {
        Self {
            command: command.to_string(),
            velocity_set: None,
            background: None,
            preset: None,
            tau: None,
            grid: None,
            grids: None,
            test_case: None,
            steps: None,
            final_time: None,
            out: None,
            operator: None,
            allow_unstable: None,
            threads: None,
            scan: None,
            tolerances: None,
        }
    }

    pub fn command_kind(&self) -> Result<CommandKind> {
        CommandKind::parse(&self.command)
    }

    /// Relaxation time with default 1/2, gated to the certified range
    /// τ ≥ 1/2 unless `allow_unstable` is set.
    pub fn resolved_tau(&self) -> Result<f64> {
        let tau = match &self.tau {
            Some(n) => n.to_f64()?,
            None => 0.5,
        };
        if !(tau > 0.0) {
            return Err(Error::Config(format!(
                "relaxation time must be positive, got {tau}"
            )));
        }
        if tau < 0.5 && !self.allow_unstable.unwrap_or(false) {
            return Err(Error::Config(format!(
                "relaxation time {tau} is below 1/2, outside the certified \
                 stability range; pass allow_unstable to proceed anyway"
            )));
        }
        Ok(tau)
    }

    /// Background state resolved from the preset and/or explicit fields.
    /// Defaults: ρ₀ = 1, c_s² = 1/3; u₀ from the preset when named.
    pub fn resolved_background(&self) -> Result<BackgroundState> {
        let mut rho0 = 1.0;
        let mut cs2 = 1.0 / 3.0;
        let mut u0: Option<[f64; 3]> = None;
        if let Some(name) = &self.preset {
            u0 = Some(preset_u0(name)?);
        }
        if let Some(bg) = &self.background {
            if let Some(r) = &bg.rho0 {
                rho0 = r.to_f64()?;
            }
            if let Some(c) = &bg.cs2 {
                cs2 = c.to_f64()?;
            }
            if let Some(parts) = &bg.u0 {
                if self.preset.is_some() {
                    return Err(Error::Config(
                        "both a preset and an explicit background.u0 are given; \
                         choose one"
                            .into(),
                    ));
                }
                u0 = Some([
                    parts[0].to_f64()?,
                    parts[1].to_f64()?,
                    parts[2].to_f64()?,
                ]);
            }
        }
        let u0 = u0.ok_or_else(|| {
            Error::Config("no background velocity: set background.u0 or preset".into())
        })?;
        if u0.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config(format!("background velocity {u0:?} not finite")));
        }
        BackgroundState::new(rho0, u0, cs2)
    }

    pub fn velocity_set_name(&self) -> &str {
        self.velocity_set.as_deref().unwrap_or("D3Q33")
    }

    pub fn out_dir(&self) -> &str {
        self.out.as_deref().unwrap_or("out")
    }

    pub fn certification_residual(&self) -> f64 {
        self.tolerances
            .as_ref()
            .and_then(|t| t.certification_residual)
            .unwrap_or(crate::tolerances::CERTIFICATION_RESIDUAL)
    }

    /// Command-specific field presence and range checks.
    pub fn validate(&self) -> Result<()> {
        let kind = self.command_kind()?;
        self.resolved_tau()?;
        if let Some(name) = &self.velocity_set {
            crate::lattice::build_velocity_set(name)?;
        }
        match kind {
            CommandKind::Construct => {
                self.resolved_background()?;
            }
            CommandKind::Verify => {
                if self.operator.is_none() {
                    return Err(Error::Config(
                        "verify requires the operator key (path of the operator file)".into(),
                    ));
                }
            }
            CommandKind::Simulate => {
                self.resolved_background()?;
                let grid = self.grid.ok_or_else(|| {
                    Error::Config("simulate requires the grid key".into())
                })?;
                if grid < 5 {
                    return Err(Error::Config(format!(
                        "grid must be at least 5 nodes per dimension, got {grid}"
                    )));
                }
                if self.steps.is_none() {
                    return Err(Error::Config("simulate requires the steps key".into()));
                }
            }
            CommandKind::Converge => {
                let tc = self.test_case.ok_or_else(|| {
                    Error::Config("converge requires the test_case key (1, 2, or 3)".into())
                })?;
                if !(1..=3).contains(&tc) {
                    return Err(Error::Config(format!(
                        "test_case must be 1, 2, or 3, got {tc}"
                    )));
                }
                if self.preset.is_none()
                    && self.background.as_ref().map_or(true, |b| b.u0.is_none())
                {
                    return Err(Error::Config(
                        "converge requires a background velocity (preset or background.u0)"
                            .into(),
                    ));
                }
                let grids = self.grids.as_ref().ok_or_else(|| {
                    Error::Config("converge requires the grids key (list of sizes)".into())
                })?;
                if grids.len() < 2 {
                    return Err(Error::Config(
                        "converge requires at least two grid sizes".into(),
                    ));
                }
                for pair in grids.windows(2) {
                    if pair[1] != pair[0] * 2 {
                        return Err(Error::Config(format!(
                            "convergence grids must double: {} does not follow {}",
                            pair[1], pair[0]
                        )));
                    }
                }
            }
            CommandKind::Scan => {
                let scan = self
                    .scan
                    .as_ref()
                    .ok_or_else(|| Error::Config("scan requires the scan section".into()))?;
                scan.u01.to_f64()?;
                if let Some(cells) = scan.cells {
                    if cells < 2 {
                        return Err(Error::Config(format!(
                            "scan.cells must be at least 2, got {cells}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_values_match_their_fractions() {
        for name in PRESET_NAMES {
            let fr = preset_u0_fractions(name).unwrap();
            let u0 = preset_u0(name).unwrap();
            for i in 0..3 {
                let expect = fr[i].0 as f64 / fr[i].1 as f64 / 3f64.sqrt();
                assert_eq!(u0[i], expect);
            }
        }
        assert!(preset_u0("preset-5").is_err());
    }

    #[test]
    fn numeric_text_forms() {
        assert_eq!(parse_numeric_text("1/2").unwrap(), 0.5);
        assert_eq!(parse_numeric_text("-3/4").unwrap(), -0.75);
        assert_eq!(parse_numeric_text("0.25").unwrap(), 0.25);
        let v = parse_numeric_text("3/20/sqrt3").unwrap();
        assert!((v - 0.15 / 3f64.sqrt()).abs() < 1e-16);
        assert!(parse_numeric_text("1/0").is_err());
        assert!(parse_numeric_text("abc").is_err());
    }

    #[test]
    fn minimal_construct_config_fills_defaults() {
        let cfg = RunConfig::from_json_str(
            r#"{"command": "construct", "preset": "preset-1"}"#,
        )
        .unwrap();
        assert_eq!(cfg.command_kind().unwrap(), CommandKind::Construct);
        assert_eq!(cfg.resolved_tau().unwrap(), 0.5);
        assert_eq!(cfg.velocity_set_name(), "D3Q33");
        let bg = cfg.resolved_background().unwrap();
        assert_eq!(bg.rho0, 1.0);
        assert_eq!(bg.cs2, 1.0 / 3.0);
        assert!((bg.u0[0] - 0.15 / 3f64.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn unknown_keys_are_listed() {
        let err = RunConfig::from_json_str(
            r#"{"command": "construct", "preset": "preset-1",
                "bogus": 1, "background": {"rho0": 1, "extra": 2}}"#,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus"), "{msg}");
        assert!(msg.contains("background.extra"), "{msg}");
    }

    #[test]
    fn low_tau_requires_explicit_override() {
        let rejected = RunConfig::from_json_str(
            r#"{"command": "construct", "preset": "preset-1", "tau": 0.4}"#,
        );
        assert!(rejected.is_err());
        let msg = rejected.unwrap_err().to_string();
        assert!(msg.contains("1/2"), "{msg}");

        let allowed = RunConfig::from_json_str(
            r#"{"command": "construct", "preset": "preset-1", "tau": 0.4,
                "allow_unstable": true}"#,
        )
        .unwrap();
        assert_eq!(allowed.resolved_tau().unwrap(), 0.4);
    }

    #[test]
    fn tau_accepts_fraction_text() {
        let cfg = RunConfig::from_json_str(
            r#"{"command": "construct", "preset": "preset-1", "tau": "1/2"}"#,
        )
        .unwrap();
        assert_eq!(cfg.resolved_tau().unwrap(), 0.5);
    }

    #[test]
    fn per_command_required_fields() {
        assert!(RunConfig::from_json_str(r#"{"command": "verify"}"#).is_err());
        assert!(RunConfig::from_json_str(
            r#"{"command": "simulate", "preset": "preset-1", "steps": 10}"#
        )
        .is_err());
        assert!(RunConfig::from_json_str(
            r#"{"command": "simulate", "preset": "preset-1", "grid": 4, "steps": 1}"#
        )
        .is_err());
        assert!(RunConfig::from_json_str(
            r#"{"command": "converge", "preset": "preset-1", "test_case": 1,
                "grids": [32, 48]}"#
        )
        .is_err());
        assert!(RunConfig::from_json_str(
            r#"{"command": "converge", "preset": "preset-1", "test_case": 4,
                "grids": [32, 64]}"#
        )
        .is_err());
        assert!(RunConfig::from_json_str(r#"{"command": "scan"}"#).is_err());
        assert!(RunConfig::from_json_str(r#"{"command": "dance"}"#).is_err());

        let ok = RunConfig::from_json_str(
            r#"{"command": "converge", "preset": "preset-2", "test_case": 1,
                "grids": [32, 64, 128]}"#,
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn preset_and_explicit_u0_conflict() {
        let err = RunConfig::from_json_str(
            r#"{"command": "construct", "preset": "preset-1",
                "background": {"u0": [0.1, 0.1, 0.1]}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("choose one"));
    }

    #[test]
    fn background_u0_accepts_fraction_strings() {
        let cfg = RunConfig::from_json_str(
            r#"{"command": "construct",
                "background": {"rho0": "2/5", "u0": ["3/20/sqrt3", "1/10/sqrt3", "1/5/sqrt3"]}}"#,
        )
        .unwrap();
        let bg = cfg.resolved_background().unwrap();
        assert_eq!(bg.rho0, 0.4);
        let p1 = preset_u0("preset-1").unwrap();
        for i in 0..3 {
            assert_eq!(bg.u0[i], p1[i]);
        }
    }

    #[test]
    fn velocity_set_name_is_checked_at_parse_time() {
        let err = RunConfig::from_json_str(
            r#"{"command": "construct", "preset": "preset-1", "velocity_set": "D3Q9"}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("D3Q9"));
    }
}
