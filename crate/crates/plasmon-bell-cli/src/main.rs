//! Command-line front end: `simulate`, `analyze` and `dispersion`
//! subcommands over a JSON experiment config.
//!
//! Exit codes: 0 success, 2 config error, 3 data error, 4 numerical
//! failure, 5 I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use plasmon_bell::config::LoadedConfig;
use plasmon_bell::pipeline::{run_analyze, run_dispersion, run_simulate, PipelineError};

const EXIT_CONFIG: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;
const EXIT_IO: u8 = 5;

#[derive(Parser)]
#[command(
    name = "plasmon-bell",
    version,
    about = "Entangled-photon Bell tests through dispersive plasmonic channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the seed in the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for result files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the configured scenario and analyze the synthetic counts.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Analyze an existing counts CSV through the same estimation path.
    Analyze {
        /// Counts file with columns alpha_deg,beta_deg,time_s,counts.
        counts_csv: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compute band structure, transmission resonances and timescales.
    Dispersion {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn exit_code_for(err: &PipelineError) -> u8 {
    match err {
        PipelineError::Config(_) => EXIT_CONFIG,
        PipelineError::NoDispersionSection => EXIT_CONFIG,
        PipelineError::Io { .. } => EXIT_IO,
        e if e.is_data_error() => EXIT_DATA,
        _ => EXIT_NUMERICAL,
    }
}

fn base_dir(config_path: &Path) -> PathBuf {
    config_path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn run(cli: Cli) -> Result<(), (u8, String)> {
    let common = match &cli.command {
        Command::Simulate { common }
        | Command::Analyze { common, .. }
        | Command::Dispersion { common } => common,
    };
    let loaded = LoadedConfig::from_path(&common.config)
        .map_err(|e| (EXIT_CONFIG, e.to_string()))?;
    let base = base_dir(&common.config);

    match &cli.command {
        Command::Simulate { common } => {
            let artifacts = run_simulate(&loaded, common.seed, &base, &common.out)
                .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            let s = &artifacts.summary;
            println!(
                "scenario {}: V = {:.4} +/- {:.4}, S = {:.4} +/- {:.4}, Bell violation: {}",
                s.scenario, s.v, s.sigma_v, s.s, s.sigma_s, s.bell_violation
            );
            println!("wrote {}", artifacts.counts_csv.display());
            println!("wrote {}", artifacts.fringes_csv.display());
            println!("wrote {}", artifacts.summary_json.display());
        }
        Command::Analyze { counts_csv, common } => {
            let artifacts = run_analyze(&loaded, counts_csv, &base, &common.out)
                .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            let s = &artifacts.summary;
            println!(
                "analyzed {}: V = {:.4} +/- {:.4}, S = {:.4} +/- {:.4}, Bell violation: {}",
                counts_csv.display(),
                s.v,
                s.sigma_v,
                s.s,
                s.sigma_s,
                s.bell_violation
            );
            println!("wrote {}", artifacts.fringes_csv.display());
            println!("wrote {}", artifacts.summary_json.display());
        }
        Command::Dispersion { common } => {
            let artifacts = run_dispersion(&loaded, &base, &common.out)
                .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            let r = &artifacts.report;
            println!(
                "at {} nm: v_g = {:.3} c (reference) vs {:.3} c (dispersive), ratio {:.1}, k ratio vs air {:.1}",
                r.wavelength_nm,
                r.v_g_reference_c,
                r.v_g_dispersive_c,
                r.group_velocity_ratio,
                r.wavevector_ratio_vs_air
            );
            println!(
                "timescales: t_p = {:.1} fs, T1 = {:.1} fs, T2 = {:.1} fs",
                r.timescales.t_p_fs, r.timescales.t1_fs, r.timescales.t2_fs
            );
            println!("wrote {}", artifacts.band_csv.display());
            println!("wrote {}", artifacts.eot_csv.display());
            println!("wrote {}", artifacts.report_json.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
