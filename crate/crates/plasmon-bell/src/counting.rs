//! Synthetic coincidence counting.
//!
//! Converts coincidence probabilities into detector data: expected rates from
//! the source brightness and channel survival, Poisson-sampled counts, and
//! the full angle sweeps of standard measurement scenarios. Sampling for
//! setting index `i` always uses an independent generator stream derived from
//! (seed, i), so results are bit-identical regardless of evaluation order or
//! how the work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantum::{coincidence_probability, ChannelParams, PolarizerPair};

#[derive(Debug, Error, PartialEq)]
pub enum CountingError {
    #[error("pair rate must be positive, got {0}")]
    BadPairRate(f64),
    #[error("integration time must be positive, got {0}")]
    BadIntegrationTime(f64),
    #[error("channel survival must lie in (0, 1], got {0}")]
    BadSurvival(f64),
    #[error("accidental rate must be non-negative, got {0}")]
    BadAccidentalRate(f64),
    #[error("unknown scenario name `{0}`")]
    UnknownScenario(String),
    #[error("scenario `custom` requires explicit channel and source parameters")]
    CustomWithoutParams,
}

/// Source and detection parameters for the counting simulation.
///
/// `pair_rate` is the detected pair rate at unit coincidence probability with
/// a transparent channel; `channel_survival` scales it for the lossy path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams {
    /// Detected pairs per second at unit coincidence probability (1/s).
    pub pair_rate: f64,
    /// Integration time per polarizer setting (s).
    pub integration_time: f64,
    /// Probability that the channel-side photon survives, in (0, 1].
    pub channel_survival: f64,
    /// Accidental coincidences per second (1/s).
    pub accidental_rate: f64,
    /// Seed for the counting statistics.
    pub seed: u64,
}

impl SourceParams {
    pub fn new(
        pair_rate: f64,
        integration_time: f64,
        channel_survival: f64,
        accidental_rate: f64,
        seed: u64,
    ) -> Result<Self, CountingError> {
        if !(pair_rate > 0.0) || !pair_rate.is_finite() {
            return Err(CountingError::BadPairRate(pair_rate));
        }
        if !(integration_time > 0.0) || !integration_time.is_finite() {
            return Err(CountingError::BadIntegrationTime(integration_time));
        }
        if !(channel_survival > 0.0 && channel_survival <= 1.0) {
            return Err(CountingError::BadSurvival(channel_survival));
        }
        if !(accidental_rate >= 0.0) || !accidental_rate.is_finite() {
            return Err(CountingError::BadAccidentalRate(accidental_rate));
        }
        Ok(Self {
            pair_rate,
            integration_time,
            channel_survival,
            accidental_rate,
            seed,
        })
    }
}

/// One recorded polarizer setting with its observed coincidence count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub alpha_deg: f64,
    pub beta_deg: f64,
    pub time_s: f64,
    pub counts: u64,
}

/// Expected coincidence count for one setting:
/// pair_rate * survival * time * p_cc + accidental_rate * time.
pub fn expected_count(source: &SourceParams, p_cc: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p_cc));
    source.pair_rate * source.channel_survival * source.integration_time * p_cc
        + source.accidental_rate * source.integration_time
}

/// Draw the Poisson count for the setting at `index`, using the substream
/// derived from (seed, index). Deterministic for fixed inputs.
pub fn sample_count_at(
    source: &SourceParams,
    index: usize,
    channel: &ChannelParams,
    delta_phi_c: f64,
    setting_deg: (f64, f64),
) -> CountRecord {
    let pair = PolarizerPair::from_degrees(setting_deg.0, setting_deg.1);
    let p = coincidence_probability(channel, delta_phi_c, &pair);
    let mu = expected_count(source, p);
    let counts = if mu > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(source.seed);
        rng.set_stream(index as u64);
        let draw: f64 = Poisson::new(mu).expect("positive mean").sample(&mut rng);
        draw as u64
    } else {
        0
    };
    CountRecord {
        alpha_deg: setting_deg.0,
        beta_deg: setting_deg.1,
        time_s: source.integration_time,
        counts,
    }
}

/// Simulate counts for a list of polarizer settings given in degrees.
pub fn sample_counts(
    source: &SourceParams,
    settings_deg: &[(f64, f64)],
    channel: &ChannelParams,
    delta_phi_c: f64,
) -> Vec<CountRecord> {
    settings_deg
        .iter()
        .enumerate()
        .map(|(i, &s)| sample_count_at(source, i, channel, delta_phi_c, s))
        .collect()
}

/// Angle sweep plan: for every beta in the list, alpha covers [0, 360) in
/// steps of `alpha_step_deg`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub beta_list_deg: Vec<f64>,
    pub alpha_step_deg: f64,
}

impl Default for SweepPlan {
    fn default() -> Self {
        Self {
            beta_list_deg: vec![0.0, 45.0, 90.0, 135.0],
            alpha_step_deg: 10.0,
        }
    }
}

impl SweepPlan {
    pub fn settings(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for &beta in &self.beta_list_deg {
            let mut alpha = 0.0;
            while alpha < 360.0 - 1e-9 {
                out.push((alpha, beta));
                alpha += self.alpha_step_deg;
            }
        }
        out
    }
}

/// The two analyzer angles per side used for the Bell measurement, degrees
/// from vertical. The 16-point set is the product of each angle and its
/// orthogonal complement on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshAngles {
    pub a_deg: [f64; 2],
    pub b_deg: [f64; 2],
}

impl Default for ChshAngles {
    fn default() -> Self {
        // Canonical set maximizing the Bell parameter for the prepared state.
        Self {
            a_deg: [0.0, 45.0],
            b_deg: [22.5, 67.5],
        }
    }
}

impl ChshAngles {
    /// All 16 (alpha, beta) settings in degrees.
    pub fn settings(&self) -> Vec<(f64, f64)> {
        let a_all = [
            self.a_deg[0],
            self.a_deg[1],
            self.a_deg[0] + 90.0,
            self.a_deg[1] + 90.0,
        ];
        let b_all = [
            self.b_deg[0],
            self.b_deg[1],
            self.b_deg[0] + 90.0,
            self.b_deg[1] + 90.0,
        ];
        let mut out = Vec::with_capacity(16);
        for &a in &a_all {
            for &b in &b_all {
                out.push((a, b));
            }
        }
        out
    }
}

/// Named measurement scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// Source characterization without a plasmonic sample.
    Calibration,
    /// Weakly dispersive hole array operating near the light line.
    HolearrayAir,
    /// Strongly dispersive hole array on amorphous silicon.
    HolearraySilicon,
    /// Caller supplies channel and source parameters explicitly.
    Custom,
}

impl std::str::FromStr for ScenarioKind {
    type Err = CountingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "calibration" => Ok(Self::Calibration),
            "holearray-air" => Ok(Self::HolearrayAir),
            "holearray-silicon" => Ok(Self::HolearraySilicon),
            "custom" => Ok(Self::Custom),
            other => Err(CountingError::UnknownScenario(other.to_string())),
        }
    }
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Calibration => "calibration",
            Self::HolearrayAir => "holearray-air",
            Self::HolearraySilicon => "holearray-silicon",
            Self::Custom => "custom",
        }
    }

    /// Default channel for the named scenarios. `None` for `Custom`.
    pub fn default_channel(&self) -> Option<ChannelParams> {
        let overlap = match self {
            Self::Calibration => 0.99,
            Self::HolearrayAir => 0.99,
            Self::HolearraySilicon => 0.98,
            Self::Custom => return None,
        };
        Some(ChannelParams::balanced(overlap).expect("valid default channel"))
    }

    /// Default source for the named scenarios. `None` for `Custom`.
    ///
    /// Rates and times are not measured quantities; they are chosen so the
    /// statistical errors on the recovered visibility and Bell parameter land
    /// at realistic levels, and can be overridden in the experiment config.
    pub fn default_source(&self, seed: u64) -> Option<SourceParams> {
        let survival = match self {
            Self::Calibration => 1.0,
            Self::HolearrayAir => 0.1,
            Self::HolearraySilicon => 0.01,
            Self::Custom => return None,
        };
        Some(SourceParams::new(1.0e4, 10.0, survival, 0.0, seed).expect("valid default source"))
    }
}

/// Fully resolved scenario: everything needed to generate counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub channel: ChannelParams,
    pub delta_phi_c: f64,
    pub source: SourceParams,
    pub sweep: SweepPlan,
    pub chsh: ChshAngles,
}

impl ScenarioConfig {
    /// Build the named scenario with its defaults. Errors for `Custom`,
    /// which has no defaults.
    pub fn with_defaults(kind: ScenarioKind, seed: u64) -> Result<Self, CountingError> {
        let channel = kind.default_channel().ok_or(CountingError::CustomWithoutParams)?;
        let source = kind.default_source(seed).ok_or(CountingError::CustomWithoutParams)?;
        Ok(Self {
            kind,
            channel,
            delta_phi_c: 0.0,
            source,
            sweep: SweepPlan::default(),
            chsh: ChshAngles::default(),
        })
    }

    /// All settings of the run: the fringe sweep followed by the 16 Bell
    /// settings.
    pub fn settings(&self) -> Vec<(f64, f64)> {
        let mut settings = self.sweep.settings();
        settings.extend(self.chsh.settings());
        settings
    }
}

/// Generate the standard sweep plus the 16-point Bell settings and simulate
/// counts for each.
pub fn run_scenario(config: &ScenarioConfig) -> (Vec<(f64, f64)>, Vec<CountRecord>) {
    let settings = config.settings();
    let records = sample_counts(&config.source, &settings, &config.channel, config.delta_phi_c);
    (settings, records)
}
