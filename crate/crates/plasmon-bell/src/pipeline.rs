//! End-to-end pipelines behind the command-line interface: simulate counts
//! and analyze them, analyze an existing counts file, and compute the
//! dispersion products. Identical config and seed produce byte-identical
//! output files.

use serde::Serialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::config::{ConfigError, DispersionConfig, ExperimentConfig, LoadedConfig};
use crate::counting::{run_scenario, CountRecord};
use crate::dispersion::{
    group_velocity, propagation_length, spp_wavevector_for, timescales, DispersionError,
    MaterialModel, TimescaleError, Timescales,
};
use crate::estimation::{analyze_counts, lorentzian_lifetime, AnalysisSummary, EstimationError};
use crate::io::{
    parse_counts_csv, parse_spectrum_csv, write_band_csv, write_counts_csv, write_eot_csv,
    write_fringes_csv, CsvError,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Pipeline failures, grouped the way the CLI maps them to exit codes.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: CsvError },
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error(transparent)]
    Dispersion(#[from] DispersionError),
    #[error(transparent)]
    Timescale(#[from] TimescaleError),
    #[error("cannot write `{path}`: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config has no `dispersion` section")]
    NoDispersionSection,
}

impl PipelineError {
    /// True for failures caused by the input data rather than the config or
    /// the numerics.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Self::Csv { .. }
                | Self::Estimation(
                    EstimationError::TooFewAngles(_)
                        | EstimationError::MixedFringe
                        | EstimationError::MissingBeta(_)
                        | EstimationError::MissingSetting { .. }
                        | EstimationError::ZeroCounts
                        | EstimationError::SpectrumTooShort { .. }
                )
        )
    }
}

/// Analysis result document written as `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryReport {
    pub scenario: String,
    pub seed: u64,
    pub v: f64,
    pub sigma_v: f64,
    pub visibility_beta_deg: f64,
    pub s: f64,
    pub sigma_s: f64,
    pub e_values: [f64; 4],
    pub bell_violation: bool,
    /// Model lower bound on the pure dephasing time. Absent when the
    /// visibility permits no bound; `null` with the order-of-magnitude field
    /// present means the data are consistent with no dephasing at all.
    pub t2star_bound_fs: Option<f64>,
    pub t2star_order_of_magnitude_fs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timescales: Option<Timescales>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts_file: Option<String>,
    pub tool_version: String,
    pub config_sha256: String,
}

/// Dispersion result document written as `timescales.json`.
#[derive(Debug, Clone, Serialize)]
pub struct DispersionReport {
    pub wavelength_nm: f64,
    pub eps_metal_re: f64,
    pub eps_metal_im: f64,
    pub reference_eps_d: f64,
    pub dispersive_eps_d: f64,
    /// Group velocity on the weakly dispersive reference interface (c).
    pub v_g_reference_c: f64,
    /// Group velocity on the dispersive interface (c).
    pub v_g_dispersive_c: f64,
    pub group_velocity_ratio: f64,
    pub k_reference_rad_per_um: f64,
    pub k_dispersive_rad_per_um: f64,
    /// Confinement relative to a bare gold/vacuum interface.
    pub wavevector_ratio_vs_air: f64,
    /// Absent for a lossless metal model.
    pub l_prop_dispersive_um: Option<f64>,
    pub period_nm: f64,
    pub timescales: Timescales,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lorentzian_lifetime_fs: Option<f64>,
    pub eot_resonance_count: usize,
    pub tool_version: String,
    pub config_sha256: String,
}

#[derive(Debug)]
pub struct SimulateArtifacts {
    pub counts_csv: PathBuf,
    pub fringes_csv: PathBuf,
    pub summary_json: PathBuf,
    pub records: Vec<CountRecord>,
    pub summary: SummaryReport,
}

#[derive(Debug)]
pub struct AnalyzeArtifacts {
    pub fringes_csv: PathBuf,
    pub summary_json: PathBuf,
    pub summary: SummaryReport,
}

#[derive(Debug)]
pub struct DispersionArtifacts {
    pub band_csv: PathBuf,
    pub eot_csv: PathBuf,
    pub report_json: PathBuf,
    pub report: DispersionReport,
}

fn write_file(path: &Path, contents: &str) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|source| PipelineError::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    std::fs::write(path, contents).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn render_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

/// Optionally compute channel timescales for the summary when a dispersion
/// section is present.
fn summary_timescales(
    config: &ExperimentConfig,
    base_dir: &Path,
) -> Result<Option<Timescales>, PipelineError> {
    let Some(d) = &config.dispersion else {
        return Ok(None);
    };
    let metal = ExperimentConfig::resolve_metal(d, base_dir)?;
    let dielectric = MaterialModel::constant(d.dispersive_eps_d).map_err(ConfigError::from)?;
    let v_g = group_velocity(&metal, &dielectric, d.wavelength_nm, 1.0)?;
    Ok(Some(timescales(
        v_g,
        d.hop_distance_um,
        d.absorption_length_um,
    )?))
}

fn build_summary(
    config: &ExperimentConfig,
    sha256: &str,
    seed: u64,
    analysis: &AnalysisSummary,
    timescales: Option<Timescales>,
    counts_file: Option<String>,
) -> SummaryReport {
    let bound = analysis.dephasing.as_ref();
    SummaryReport {
        scenario: config.scenario.clone(),
        seed,
        v: analysis.visibility.v,
        sigma_v: analysis.visibility.sigma_v,
        visibility_beta_deg: analysis.visibility.beta_fixed_deg,
        s: analysis.chsh.s,
        sigma_s: analysis.chsh.sigma_s,
        e_values: analysis.chsh.e_values,
        bell_violation: analysis.bell_violation,
        t2star_bound_fs: bound.and_then(|b| b.t2star_model_fs.is_finite().then_some(b.t2star_model_fs)),
        t2star_order_of_magnitude_fs: bound.map(|b| b.t2star_order_of_magnitude_fs),
        timescales,
        counts_file,
        tool_version: TOOL_VERSION.to_string(),
        config_sha256: sha256.to_string(),
    }
}

/// Simulate the configured scenario, then analyze the synthetic counts.
/// Writes `counts.csv`, `fringes.csv` and `summary.json` under `out_dir`.
pub fn run_simulate(
    loaded: &LoadedConfig,
    seed_override: Option<u64>,
    base_dir: &Path,
    out_dir: &Path,
) -> Result<SimulateArtifacts, PipelineError> {
    let config = &loaded.experiment;
    let scenario = config.resolve_scenario(seed_override)?;
    let (_, records) = run_scenario(&scenario);

    let plan = config.analysis_plan()?;
    let analysis = analyze_counts(&records, &plan)?;
    let timescales = summary_timescales(config, base_dir)?;
    let summary = build_summary(
        config,
        &loaded.sha256,
        scenario.source.seed,
        &analysis,
        timescales,
        None,
    );

    let counts_csv = out_dir.join("counts.csv");
    write_file(&counts_csv, &write_counts_csv(&records))?;
    let fringes_csv = out_dir.join("fringes.csv");
    write_file(&fringes_csv, &write_fringes_csv(&analysis.fits, 1.0))?;
    let summary_json = out_dir.join("summary.json");
    write_file(&summary_json, &render_json(&summary))?;

    Ok(SimulateArtifacts {
        counts_csv,
        fringes_csv,
        summary_json,
        records,
        summary,
    })
}

/// Analyze an existing counts CSV through the same estimation path as
/// [`run_simulate`]. Writes `fringes.csv` and `summary.json` under `out_dir`.
pub fn run_analyze(
    loaded: &LoadedConfig,
    counts_path: &Path,
    base_dir: &Path,
    out_dir: &Path,
) -> Result<AnalyzeArtifacts, PipelineError> {
    let config = &loaded.experiment;
    let bytes = std::fs::read(counts_path).map_err(|source| PipelineError::Io {
        path: counts_path.to_path_buf(),
        source,
    })?;
    let records = parse_counts_csv(&bytes).map_err(|source| PipelineError::Csv {
        path: counts_path.to_path_buf(),
        source,
    })?;

    let plan = config.analysis_plan()?;
    let analysis = analyze_counts(&records, &plan)?;
    let timescales = summary_timescales(config, base_dir)?;
    let summary = build_summary(
        config,
        &loaded.sha256,
        config.seed,
        &analysis,
        timescales,
        Some(counts_path.display().to_string()),
    );

    let fringes_csv = out_dir.join("fringes.csv");
    write_file(&fringes_csv, &write_fringes_csv(&analysis.fits, 1.0))?;
    let summary_json = out_dir.join("summary.json");
    write_file(&summary_json, &render_json(&summary))?;

    Ok(AnalyzeArtifacts {
        fringes_csv,
        summary_json,
        summary,
    })
}

/// Compute the band structure, transmission resonances and timescales.
/// Writes `band.csv`, `eot.csv` and `timescales.json` under `out_dir`.
pub fn run_dispersion(
    loaded: &LoadedConfig,
    base_dir: &Path,
    out_dir: &Path,
) -> Result<DispersionArtifacts, PipelineError> {
    let config = &loaded.experiment;
    let d: DispersionConfig = config
        .dispersion
        .clone()
        .ok_or(PipelineError::NoDispersionSection)?;

    let metal = ExperimentConfig::resolve_metal(&d, base_dir)?;
    let reference = MaterialModel::constant(d.reference_eps_d).map_err(ConfigError::from)?;
    let dispersive = MaterialModel::constant(d.dispersive_eps_d).map_err(ConfigError::from)?;
    let vacuum = MaterialModel::constant(1.0).map_err(ConfigError::from)?;

    let eps_metal = metal.permittivity(d.wavelength_nm).map_err(DispersionError::from)?;
    let k_reference = spp_wavevector_for(&metal, &reference, d.wavelength_nm)?;
    let k_dispersive = spp_wavevector_for(&metal, &dispersive, d.wavelength_nm)?;
    let k_air = spp_wavevector_for(&metal, &vacuum, d.wavelength_nm)?;
    let v_g_reference = group_velocity(&metal, &reference, d.wavelength_nm, 1.0)?;
    let v_g_dispersive = group_velocity(&metal, &dispersive, d.wavelength_nm, 1.0)?;
    let l_prop = match propagation_length(k_dispersive) {
        Ok(l) => Some(l),
        Err(DispersionError::LosslessMode) => None,
        Err(e) => return Err(e.into()),
    };
    let scales = timescales(v_g_dispersive, d.hop_distance_um, d.absorption_length_um)?;

    let array = ExperimentConfig::resolve_hole_array(&d, metal)?;
    let grid = &d.energy_grid;
    let mut energies = Vec::new();
    let mut energy = grid.min_ev;
    while energy <= grid.max_ev + 1e-12 {
        energies.push(energy);
        energy += grid.step_ev;
    }
    let band = array.band_structure(&energies)?;
    let resonances = array.eot_resonances(d.eot_search_nm)?;

    let lorentzian_lifetime_fs = match &d.spectrum_csv {
        Some(path) => {
            let full = if path.is_absolute() {
                path.clone()
            } else {
                base_dir.join(path)
            };
            let bytes = std::fs::read(&full).map_err(|source| PipelineError::Io {
                path: full.clone(),
                source,
            })?;
            let spectrum = parse_spectrum_csv(&bytes).map_err(|source| PipelineError::Csv {
                path: full,
                source,
            })?;
            Some(lorentzian_lifetime(&spectrum)?.lifetime_fs)
        }
        None => None,
    };

    let report = DispersionReport {
        wavelength_nm: d.wavelength_nm,
        eps_metal_re: eps_metal.re,
        eps_metal_im: eps_metal.im,
        reference_eps_d: d.reference_eps_d,
        dispersive_eps_d: d.dispersive_eps_d,
        v_g_reference_c: v_g_reference,
        v_g_dispersive_c: v_g_dispersive,
        group_velocity_ratio: v_g_reference / v_g_dispersive,
        k_reference_rad_per_um: k_reference.re,
        k_dispersive_rad_per_um: k_dispersive.re,
        wavevector_ratio_vs_air: k_dispersive.re / k_air.re,
        l_prop_dispersive_um: l_prop,
        period_nm: d.period_nm,
        timescales: scales,
        lorentzian_lifetime_fs,
        eot_resonance_count: resonances.len(),
        tool_version: TOOL_VERSION.to_string(),
        config_sha256: loaded.sha256.clone(),
    };

    let band_csv = out_dir.join("band.csv");
    write_file(&band_csv, &write_band_csv(&band))?;
    let eot_csv = out_dir.join("eot.csv");
    write_file(&eot_csv, &write_eot_csv(&resonances))?;
    let report_json = out_dir.join("timescales.json");
    write_file(&report_json, &render_json(&report))?;

    Ok(DispersionArtifacts {
        band_csv,
        eot_csv,
        report_json,
        report,
    })
}
