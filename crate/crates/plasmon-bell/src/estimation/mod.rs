//! Physics recovery from count data: fringe fits, visibility, Bell
//! correlations, and the dephasing-time bound.

mod chsh;
mod dephasing;
mod fringe;
mod lorentz;

pub use chsh::{chsh_correlation, chsh_s, correlation_from_probabilities, ChshResult};
pub use dephasing::{dephasing_bound, DephasingBound};
pub use fringe::{fit_fringe, visibility, visibility_at_beta, FringeFit, VisibilityEstimate};
pub use lorentz::{lorentzian_lifetime, LorentzianFit};

use thiserror::Error;

use crate::counting::{ChshAngles, CountRecord};

#[derive(Debug, Error, PartialEq)]
pub enum EstimationError {
    #[error("need at least 4 distinct analyzer angles, got {0}")]
    TooFewAngles(usize),
    #[error("records mix beta angles or integration times within one fringe")]
    MixedFringe,
    #[error("design matrix is rank deficient (analyzer angles degenerate modulo 180 degrees)")]
    DegenerateDesign,
    #[error("invalid fit: offset coefficient must be positive, got {0}")]
    NonPositiveOffset(f64),
    #[error("zero total counts: correlation undefined")]
    ZeroCounts,
    #[error("records do not form one analyzer pair with its orthogonal complements")]
    BadCorrelationSet,
    #[error("visibility lower bound {0} is not positive: no dephasing bound derivable")]
    NoBoundDerivable(f64),
    #[error("propagation time must be positive, got {0}")]
    BadPropagationTime(f64),
    #[error("visibility {0} outside the trusted range [0, 1.2]")]
    VisibilityOutOfRange(f64),
    #[error("no resonance peak found in the spectrum")]
    NoPeak,
    #[error("spectrum needs at least {min} samples, got {got}")]
    SpectrumTooShort { min: usize, got: usize },
    #[error("resonance fit failed to converge")]
    FitDiverged,
    #[error("no records at beta = {0} degrees")]
    MissingBeta(f64),
    #[error("missing count record at alpha = {alpha_deg}, beta = {beta_deg} degrees")]
    MissingSetting { alpha_deg: f64, beta_deg: f64 },
}

/// Analysis choices: which fringe carries the headline visibility, the Bell
/// angle set, and the dephasing-bound inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisPlan {
    pub beta_list_deg: Vec<f64>,
    pub visibility_beta_deg: f64,
    pub chsh: ChshAngles,
    /// Bell violation is claimed when S - 2 exceeds this many sigma.
    pub violation_n_sigma: f64,
    /// Plasmon propagation time fed to the dephasing bound (fs).
    pub t_p_fs: f64,
    /// How many sigma below the visibility estimate the bound uses.
    pub bound_n_sigma: f64,
}

impl Default for AnalysisPlan {
    fn default() -> Self {
        Self {
            beta_list_deg: vec![0.0, 45.0, 90.0, 135.0],
            visibility_beta_deg: 45.0,
            chsh: ChshAngles::default(),
            violation_n_sigma: 3.0,
            t_p_fs: 80.0,
            bound_n_sigma: 1.0,
        }
    }
}

/// Everything the analysis extracts from one set of count records.
#[derive(Debug, Clone)]
pub struct AnalysisSummary {
    /// Per-beta fringe fits, in the order of `beta_list_deg`.
    pub fits: Vec<(f64, FringeFit)>,
    pub visibility: VisibilityEstimate,
    pub chsh: ChshResult,
    pub bell_violation: bool,
    /// None when the visibility is too low for any dephasing bound.
    pub dephasing: Option<DephasingBound>,
}

fn angle_close(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(360.0);
    !(1e-6..=360.0 - 1e-6).contains(&d)
}

fn find_record(records: &[CountRecord], alpha_deg: f64, beta_deg: f64) -> Option<&CountRecord> {
    records
        .iter()
        .find(|r| angle_close(r.alpha_deg, alpha_deg) && angle_close(r.beta_deg, beta_deg))
}

/// Run the full estimation chain on a set of count records.
pub fn analyze_counts(
    records: &[CountRecord],
    plan: &AnalysisPlan,
) -> Result<AnalysisSummary, EstimationError> {
    let mut fits = Vec::new();
    for &beta in &plan.beta_list_deg {
        let group: Vec<CountRecord> = records
            .iter()
            .filter(|r| angle_close(r.beta_deg, beta))
            .copied()
            .collect();
        if group.is_empty() {
            return Err(EstimationError::MissingBeta(beta));
        }
        fits.push((beta, fit_fringe(&group)?));
    }

    let headline = fits
        .iter()
        .find(|(beta, _)| angle_close(*beta, plan.visibility_beta_deg))
        .ok_or(EstimationError::MissingBeta(plan.visibility_beta_deg))?;
    let visibility = visibility_at_beta(&headline.1, plan.visibility_beta_deg)?;

    let mut correlations = Vec::with_capacity(4);
    let mut used_angles = Vec::with_capacity(4);
    for &a in &plan.chsh.a_deg {
        for &b in &plan.chsh.b_deg {
            let quad = [(a, b), (a + 90.0, b), (a, b + 90.0), (a + 90.0, b + 90.0)];
            let mut set = Vec::with_capacity(4);
            for (alpha, beta) in quad {
                let rec = find_record(records, alpha, beta).ok_or(
                    EstimationError::MissingSetting {
                        alpha_deg: alpha,
                        beta_deg: beta,
                    },
                )?;
                set.push(*rec);
            }
            let four: [CountRecord; 4] = set.try_into().expect("four records");
            correlations.push(chsh_correlation(&four)?);
            used_angles.push((a, b));
        }
    }
    // Order from the double loop is (a1,b1), (a1,b2), (a2,b1), (a2,b2).
    let chsh = chsh_s(
        correlations.try_into().expect("four correlations"),
        plan.chsh,
    );
    let bell_violation = chsh.violates_lhv(plan.violation_n_sigma);

    // A visibility consistent with total decoherence supports no bound; that
    // is a result, not a failure.
    let dephasing = match dephasing_bound(&visibility, plan.t_p_fs, plan.bound_n_sigma) {
        Ok(bound) => Some(bound),
        Err(EstimationError::NoBoundDerivable(_)) => None,
        Err(e) => return Err(e),
    };

    Ok(AnalysisSummary {
        fits,
        visibility,
        chsh,
        bell_violation,
        dephasing,
    })
}
