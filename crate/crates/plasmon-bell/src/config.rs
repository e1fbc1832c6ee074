//! Experiment configuration: a versioned JSON document that selects a
//! scenario and optionally overrides channel, source, sweep, Bell-angle and
//! dispersion parameters. Angles in the file are degrees; the library works
//! in radians internally.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::counting::{
    ChshAngles, CountingError, ScenarioConfig, ScenarioKind, SourceParams, SweepPlan,
};
use crate::dispersion::{HoleArraySpec, MaterialError, MaterialModel, OpticalTable};
use crate::estimation::AnalysisPlan;
use crate::quantum::{ChannelParams, QuantumError};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config parse error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported config version {0}, expected {CONFIG_VERSION}")]
    Version(u32),
    #[error("{0}")]
    Scenario(#[from] CountingError),
    #[error("channel: {0}")]
    Channel(#[from] QuantumError),
    #[error("material: {0}")]
    Material(#[from] MaterialError),
    #[error("{field}: {message}")]
    Field { field: &'static str, message: String },
}

fn field_err(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field,
        message: message.into(),
    }
}

/// Complex number in config files, imaginary part optional.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexValue {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<ComplexValue> for Complex64 {
    fn from(c: ComplexValue) -> Self {
        Complex64::new(c.re, c.im)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub h: ComplexValue,
    pub v: ComplexValue,
    #[serde(default)]
    pub delta_phi_c_deg: f64,
    pub env_overlap: ComplexValue,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub pair_rate_hz: f64,
    pub integration_time_s: f64,
    #[serde(default = "default_survival")]
    pub channel_survival: f64,
    #[serde(default)]
    pub accidental_rate_hz: f64,
}

fn default_survival() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub beta_list_deg: Vec<f64>,
    pub alpha_step_deg: f64,
    #[serde(default = "default_visibility_beta")]
    pub visibility_beta_deg: f64,
}

fn default_visibility_beta() -> f64 {
    45.0
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshConfig {
    pub a_deg: [f64; 2],
    pub b_deg: [f64; 2],
    #[serde(default = "default_violation_sigma")]
    pub violation_n_sigma: f64,
}

fn default_violation_sigma() -> f64 {
    3.0
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DephasingConfig {
    pub t_p_fs: f64,
    #[serde(default = "default_bound_sigma")]
    pub n_sigma: f64,
}

fn default_bound_sigma() -> f64 {
    1.0
}

impl Default for DephasingConfig {
    fn default() -> Self {
        Self {
            t_p_fs: 80.0,
            n_sigma: 1.0,
        }
    }
}

/// Metal model selection for the dispersion pipeline.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MetalConfig {
    /// Bundled gold optical constants.
    #[default]
    BuiltinGold,
    /// Optical constants CSV (`wavelength_nm,n,k`).
    Table { path: PathBuf },
    Drude {
        eps_inf: f64,
        omega_p_ev: f64,
        gamma_ev: f64,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyGridConfig {
    pub min_ev: f64,
    pub max_ev: f64,
    pub step_ev: f64,
}

impl Default for EnergyGridConfig {
    fn default() -> Self {
        Self {
            min_ev: 1.40,
            max_ev: 2.40,
            step_ev: 0.0025,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DispersionConfig {
    pub metal: MetalConfig,
    /// Dielectric constant of the weakly dispersive reference interface.
    /// The default models the substrate side of the photon-like array.
    pub reference_eps_d: f64,
    /// Dielectric constant of the amorphous-silicon cladding. Deposition
    /// dependent; the default reproduces the design operating point at the
    /// working wavelength.
    pub dispersive_eps_d: f64,
    pub wavelength_nm: f64,
    pub period_nm: f64,
    pub max_order: u32,
    /// Distance between coupled holes; the array eigenmodes run diagonally,
    /// so roughly period * sqrt(2).
    pub hop_distance_um: f64,
    pub absorption_length_um: f64,
    pub energy_grid: EnergyGridConfig,
    pub eot_search_nm: (f64, f64),
    /// Optional measured transmission spectrum for the resonance-lifetime fit.
    pub spectrum_csv: Option<PathBuf>,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        Self {
            metal: MetalConfig::default(),
            reference_eps_d: 2.25,
            dispersive_eps_d: 15.75,
            wavelength_nm: 812.0,
            period_nm: 850.0,
            max_order: 8,
            hop_distance_um: 1.2,
            absorption_length_um: 0.15,
            energy_grid: EnergyGridConfig::default(),
            eot_search_nm: (600.0, 880.0),
            spectrum_csv: None,
        }
    }
}

/// Top-level experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    pub scenario: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chsh: Option<ChshConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dephasing: Option<DephasingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersion: Option<DispersionConfig>,
}

fn default_version() -> u32 {
    CONFIG_VERSION
}

/// A parsed config together with the digest of the bytes it came from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub experiment: ExperimentConfig,
    pub sha256: String,
}

impl LoadedConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let bytes = std::fs::read(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_slice(&bytes)
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self, ConfigError> {
        let experiment = ExperimentConfig::from_slice(bytes)?;
        let mut hasher = Sha256::new();
        hasher.update(bytes);
        let sha256 = hasher
            .finalize()
            .iter()
            .fold(String::with_capacity(64), |mut acc, b| {
                use std::fmt::Write;
                let _ = write!(acc, "{b:02x}");
                acc
            });
        Ok(Self { experiment, sha256 })
    }
}

impl ExperimentConfig {
    pub fn from_slice(bytes: &[u8]) -> Result<Self, ConfigError> {
        let config: Self = serde_json::from_slice(bytes).map_err(|e| ConfigError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Semantic validation beyond what the schema enforces. Does not touch
    /// the filesystem.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.version != CONFIG_VERSION {
            return Err(ConfigError::Version(self.version));
        }
        let kind: ScenarioKind = self.scenario.parse()?;
        if kind == ScenarioKind::Custom && (self.channel.is_none() || self.source.is_none()) {
            return Err(CountingError::CustomWithoutParams.into());
        }
        if let Some(channel) = &self.channel {
            ChannelParams::new(
                channel.h.into(),
                channel.v.into(),
                channel.env_overlap.into(),
            )?;
            if !channel.delta_phi_c_deg.is_finite() {
                return Err(field_err("channel.delta_phi_c_deg", "must be finite"));
            }
        }
        if let Some(source) = &self.source {
            SourceParams::new(
                source.pair_rate_hz,
                source.integration_time_s,
                source.channel_survival,
                source.accidental_rate_hz,
                self.seed,
            )?;
        }
        if let Some(sweep) = &self.sweep {
            if sweep.beta_list_deg.is_empty() {
                return Err(field_err("sweep.beta_list_deg", "must not be empty"));
            }
            if !sweep.beta_list_deg.iter().all(|b| b.is_finite()) {
                return Err(field_err("sweep.beta_list_deg", "angles must be finite"));
            }
            if !(sweep.alpha_step_deg > 0.0 && sweep.alpha_step_deg <= 120.0) {
                return Err(field_err(
                    "sweep.alpha_step_deg",
                    format!("must lie in (0, 120], got {}", sweep.alpha_step_deg),
                ));
            }
            let covered = sweep
                .beta_list_deg
                .iter()
                .any(|b| (b - sweep.visibility_beta_deg).abs() < 1e-9);
            if !covered {
                return Err(field_err(
                    "sweep.visibility_beta_deg",
                    "must be one of the swept beta angles",
                ));
            }
        }
        if let Some(chsh) = &self.chsh {
            let all = chsh.a_deg.iter().chain(chsh.b_deg.iter());
            if !all.clone().all(|a| a.is_finite()) {
                return Err(field_err("chsh", "angles must be finite"));
            }
            if !(chsh.violation_n_sigma >= 0.0) {
                return Err(field_err("chsh.violation_n_sigma", "must be non-negative"));
            }
        }
        if let Some(dephasing) = &self.dephasing {
            if !(dephasing.t_p_fs > 0.0) || !dephasing.t_p_fs.is_finite() {
                return Err(field_err("dephasing.t_p_fs", "must be positive"));
            }
            if !(dephasing.n_sigma >= 0.0) {
                return Err(field_err("dephasing.n_sigma", "must be non-negative"));
            }
        }
        if let Some(d) = &self.dispersion {
            if !(d.reference_eps_d > 0.0) || !(d.dispersive_eps_d > 0.0) {
                return Err(field_err("dispersion", "dielectric constants must be positive"));
            }
            if !(d.wavelength_nm > 0.0) {
                return Err(field_err("dispersion.wavelength_nm", "must be positive"));
            }
            if !(d.period_nm > 0.0) {
                return Err(field_err("dispersion.period_nm", "must be positive"));
            }
            if d.max_order < 1 {
                return Err(field_err("dispersion.max_order", "must be at least 1"));
            }
            if !(d.hop_distance_um > 0.0) || !(d.absorption_length_um > 0.0) {
                return Err(field_err("dispersion", "distances must be positive"));
            }
            let grid = &d.energy_grid;
            if !(grid.min_ev > 0.0 && grid.max_ev > grid.min_ev && grid.step_ev > 0.0) {
                return Err(field_err("dispersion.energy_grid", "must be a positive ascending grid"));
            }
            if !(d.eot_search_nm.0 > 0.0 && d.eot_search_nm.1 > d.eot_search_nm.0) {
                return Err(field_err("dispersion.eot_search_nm", "must be an ascending range"));
            }
            if let MetalConfig::Drude {
                eps_inf,
                omega_p_ev,
                gamma_ev,
            } = d.metal
            {
                MaterialModel::drude(eps_inf, omega_p_ev, gamma_ev)?;
            }
        }
        Ok(())
    }

    pub fn scenario_kind(&self) -> Result<ScenarioKind, ConfigError> {
        Ok(self.scenario.parse()?)
    }

    /// Resolve scenario defaults and overrides into runnable parameters.
    /// `seed_override` takes precedence over the seed in the file.
    pub fn resolve_scenario(
        &self,
        seed_override: Option<u64>,
    ) -> Result<ScenarioConfig, ConfigError> {
        let kind = self.scenario_kind()?;
        let seed = seed_override.unwrap_or(self.seed);
        let (channel, delta_phi_c) = match &self.channel {
            Some(c) => (
                ChannelParams::new(c.h.into(), c.v.into(), c.env_overlap.into())?,
                c.delta_phi_c_deg.to_radians(),
            ),
            None => (
                kind.default_channel()
                    .ok_or(CountingError::CustomWithoutParams)?,
                0.0,
            ),
        };
        let source = match &self.source {
            Some(s) => SourceParams::new(
                s.pair_rate_hz,
                s.integration_time_s,
                s.channel_survival,
                s.accidental_rate_hz,
                seed,
            )?,
            None => kind
                .default_source(seed)
                .ok_or(CountingError::CustomWithoutParams)?,
        };
        let sweep = match &self.sweep {
            Some(s) => SweepPlan {
                beta_list_deg: s.beta_list_deg.clone(),
                alpha_step_deg: s.alpha_step_deg,
            },
            None => SweepPlan::default(),
        };
        let chsh = match &self.chsh {
            Some(c) => ChshAngles {
                a_deg: c.a_deg,
                b_deg: c.b_deg,
            },
            None => ChshAngles::default(),
        };
        Ok(ScenarioConfig {
            kind,
            channel,
            delta_phi_c,
            source,
            sweep,
            chsh,
        })
    }

    /// The estimation-side choices implied by this config.
    pub fn analysis_plan(&self) -> Result<AnalysisPlan, ConfigError> {
        // Validation already checked the cross-field constraints.
        let mut plan = AnalysisPlan::default();
        if let Some(sweep) = &self.sweep {
            plan.beta_list_deg = sweep.beta_list_deg.clone();
            plan.visibility_beta_deg = sweep.visibility_beta_deg;
        }
        if let Some(chsh) = &self.chsh {
            plan.chsh = ChshAngles {
                a_deg: chsh.a_deg,
                b_deg: chsh.b_deg,
            };
            plan.violation_n_sigma = chsh.violation_n_sigma;
        }
        let dephasing = self.dephasing.unwrap_or_default();
        plan.t_p_fs = dephasing.t_p_fs;
        plan.bound_n_sigma = dephasing.n_sigma;
        Ok(plan)
    }

    /// Materialize the metal model, reading a table file if configured.
    /// `base_dir` anchors relative paths.
    pub fn resolve_metal(
        dispersion: &DispersionConfig,
        base_dir: &Path,
    ) -> Result<MaterialModel, ConfigError> {
        match &dispersion.metal {
            MetalConfig::BuiltinGold => Ok(MaterialModel::gold()),
            MetalConfig::Drude {
                eps_inf,
                omega_p_ev,
                gamma_ev,
            } => Ok(MaterialModel::drude(*eps_inf, *omega_p_ev, *gamma_ev)?),
            MetalConfig::Table { path } => {
                let full = if path.is_absolute() {
                    path.clone()
                } else {
                    base_dir.join(path)
                };
                let bytes = std::fs::read(&full).map_err(|source| ConfigError::Io {
                    path: full.clone(),
                    source,
                })?;
                Ok(MaterialModel::Tabulated(OpticalTable::parse_csv(&bytes)?))
            }
        }
    }

    /// Hole array for the dispersive interface.
    pub fn resolve_hole_array(
        dispersion: &DispersionConfig,
        metal: MaterialModel,
    ) -> Result<HoleArraySpec, ConfigError> {
        Ok(HoleArraySpec {
            period_nm: dispersion.period_nm,
            metal,
            dielectric: MaterialModel::constant(dispersion.dispersive_eps_d)?,
            max_order: dispersion.max_order,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(scenario: &str) -> String {
        format!(r#"{{"scenario": "{scenario}", "seed": 7}}"#)
    }

    #[test]
    fn minimal_named_scenarios_parse() {
        for name in ["calibration", "holearray-air", "holearray-silicon"] {
            let config = ExperimentConfig::from_slice(minimal(name).as_bytes()).unwrap();
            let resolved = config.resolve_scenario(None).unwrap();
            assert_eq!(resolved.kind.name(), name);
            assert_eq!(resolved.source.seed, 7);
        }
    }

    #[test]
    fn unknown_scenario_is_rejected() {
        let err = ExperimentConfig::from_slice(minimal("warp-drive").as_bytes()).unwrap_err();
        assert!(err.to_string().contains("warp-drive"));
    }

    #[test]
    fn custom_requires_channel_and_source() {
        let err = ExperimentConfig::from_slice(minimal("custom").as_bytes()).unwrap_err();
        assert!(matches!(err, ConfigError::Scenario(CountingError::CustomWithoutParams)));

        let full = r#"{
            "scenario": "custom",
            "channel": {"h": {"re": 1.0}, "v": {"re": 1.0}, "env_overlap": {"re": 0.5}},
            "source": {"pair_rate_hz": 1e4, "integration_time_s": 1.0}
        }"#;
        let config = ExperimentConfig::from_slice(full.as_bytes()).unwrap();
        let resolved = config.resolve_scenario(Some(3)).unwrap();
        assert_eq!(resolved.source.seed, 3);
        assert_eq!(resolved.channel.env_overlap().re, 0.5);
    }

    #[test]
    fn json_errors_carry_position() {
        let err = ExperimentConfig::from_slice(b"{\n  \"scenario\": }").unwrap_err();
        match err {
            ConfigError::Json { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err =
            ExperimentConfig::from_slice(br#"{"scenario": "calibration", "sed": 1}"#).unwrap_err();
        assert!(matches!(err, ConfigError::Json { .. }));
    }

    #[test]
    fn invalid_overrides_are_rejected() {
        let bad_overlap = r#"{
            "scenario": "calibration",
            "channel": {"h": {"re": 1.0}, "v": {"re": 1.0}, "env_overlap": {"re": 1.5}}
        }"#;
        assert!(matches!(
            ExperimentConfig::from_slice(bad_overlap.as_bytes()).unwrap_err(),
            ConfigError::Channel(QuantumError::OverlapTooLarge(_))
        ));

        let bad_sweep = r#"{
            "scenario": "calibration",
            "sweep": {"beta_list_deg": [0.0], "alpha_step_deg": 10.0}
        }"#;
        assert!(matches!(
            ExperimentConfig::from_slice(bad_sweep.as_bytes()).unwrap_err(),
            ConfigError::Field { field: "sweep.visibility_beta_deg", .. }
        ));
    }

    #[test]
    fn version_gate() {
        let err = ExperimentConfig::from_slice(br#"{"version": 99, "scenario": "calibration"}"#)
            .unwrap_err();
        assert!(matches!(err, ConfigError::Version(99)));
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = LoadedConfig::from_slice(minimal("calibration").as_bytes()).unwrap();
        let b = LoadedConfig::from_slice(minimal("calibration").as_bytes()).unwrap();
        assert_eq!(a.sha256, b.sha256);
        let c = LoadedConfig::from_slice(minimal("holearray-air").as_bytes()).unwrap();
        assert_ne!(a.sha256, c.sha256);
        assert_eq!(a.sha256.len(), 64);
    }

    #[test]
    fn dispersion_defaults_round_trip() {
        let text = r#"{"scenario": "holearray-silicon", "dispersion": {}}"#;
        let config = ExperimentConfig::from_slice(text.as_bytes()).unwrap();
        let d = config.dispersion.unwrap();
        assert_eq!(d.wavelength_nm, 812.0);
        assert_eq!(d.period_nm, 850.0);
        assert!(matches!(d.metal, MetalConfig::BuiltinGold));
    }
}
