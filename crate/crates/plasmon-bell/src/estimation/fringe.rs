//! Weighted least-squares fringe fitting and visibility extraction.
//!
//! Coincidence fringes versus the analyzer angle alpha are fitted in the
//! linear basis {1, cos 2a, sin 2a}, which contains the model exactly and
//! keeps the problem convex; amplitude and phase are derived afterwards.
//! Weights are 1/max(N, 1), the Poisson variance with a floor that keeps
//! empty bins from acquiring infinite weight.

use nalgebra::{Cholesky, Matrix3, Vector3};

use super::EstimationError;
use crate::counting::CountRecord;

/// Coefficients of N(a) = c0 + c1 cos 2a + c2 sin 2a with their covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeFit {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Covariance of (c0, c1, c2) from the weighted normal equations.
    pub covariance: Matrix3<f64>,
    /// Weighted sum of squared residuals.
    pub chi2: f64,
    pub n_points: usize,
}

impl FringeFit {
    /// Model prediction at analyzer angle `alpha` (radians).
    pub fn predict(&self, alpha: f64) -> f64 {
        self.c0 + self.c1 * (2.0 * alpha).cos() + self.c2 * (2.0 * alpha).sin()
    }
}

/// Fringe visibility with its propagated standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityEstimate {
    pub v: f64,
    pub sigma_v: f64,
    /// The fixed analyzer angle of the fitted fringe (degrees).
    pub beta_fixed_deg: f64,
}

/// Weighted least-squares fit of one fringe.
///
/// All records must share the fixed analyzer angle and integration time, and
/// at least four distinct sweep angles are required.
pub fn fit_fringe(records: &[CountRecord]) -> Result<FringeFit, EstimationError> {
    let mut distinct: Vec<f64> = Vec::new();
    for r in records {
        if !distinct.iter().any(|a| (a - r.alpha_deg).abs() < 1e-9) {
            distinct.push(r.alpha_deg);
        }
    }
    if distinct.len() < 4 {
        return Err(EstimationError::TooFewAngles(distinct.len()));
    }
    let beta0 = records[0].beta_deg;
    let time0 = records[0].time_s;
    if records
        .iter()
        .any(|r| (r.beta_deg - beta0).abs() > 1e-9 || (r.time_s - time0).abs() > 1e-12)
    {
        return Err(EstimationError::MixedFringe);
    }

    let mut normal = Matrix3::<f64>::zeros();
    let mut rhs = Vector3::<f64>::zeros();
    for r in records {
        let alpha = r.alpha_deg.to_radians();
        let row = Vector3::new(1.0, (2.0 * alpha).cos(), (2.0 * alpha).sin());
        let w = 1.0 / (r.counts as f64).max(1.0);
        normal += w * row * row.transpose();
        rhs += w * (r.counts as f64) * row;
    }

    let chol = Cholesky::new(normal).ok_or(EstimationError::DegenerateDesign)?;
    // Angles that collapse modulo 180 degrees leave the normal matrix
    // singular up to rounding noise; Cholesky can still "succeed" on such a
    // matrix, so check its conditioning through the factor diagonal.
    let diag = chol.l().diagonal();
    let d_max = diag.max();
    let d_min = diag.min();
    if !(d_min > 0.0) || (d_min / d_max).powi(2) < 1e-12 {
        return Err(EstimationError::DegenerateDesign);
    }
    let coeffs = chol.solve(&rhs);
    let covariance = chol.inverse();

    let fit = FringeFit {
        c0: coeffs[0],
        c1: coeffs[1],
        c2: coeffs[2],
        covariance,
        chi2: 0.0,
        n_points: records.len(),
    };
    let chi2 = records
        .iter()
        .map(|r| {
            let w = 1.0 / (r.counts as f64).max(1.0);
            w * (r.counts as f64 - fit.predict(r.alpha_deg.to_radians())).powi(2)
        })
        .sum();
    Ok(FringeFit { chi2, ..fit })
}

/// Visibility V = sqrt(c1^2 + c2^2) / c0 with first-order error propagation
/// through the fit covariance.
pub fn visibility(fit: &FringeFit) -> Result<VisibilityEstimate, EstimationError> {
    visibility_at_beta(fit, f64::NAN)
}

/// Same as [`visibility`], recording the fixed angle of the fitted fringe.
pub fn visibility_at_beta(
    fit: &FringeFit,
    beta_fixed_deg: f64,
) -> Result<VisibilityEstimate, EstimationError> {
    if !(fit.c0 > 0.0) {
        return Err(EstimationError::NonPositiveOffset(fit.c0));
    }
    let amp = fit.c1.hypot(fit.c2);
    let v = amp / fit.c0;
    let sigma_v = if amp > 0.0 {
        let grad = Vector3::new(-amp / (fit.c0 * fit.c0), fit.c1 / (amp * fit.c0), fit.c2 / (amp * fit.c0));
        (grad.transpose() * fit.covariance * grad)[(0, 0)].max(0.0).sqrt()
    } else {
        // Gradient is singular at zero amplitude; quote the quadrature sum of
        // the two amplitude errors instead.
        (fit.covariance[(1, 1)] + fit.covariance[(2, 2)]).max(0.0).sqrt() / fit.c0
    };
    Ok(VisibilityEstimate {
        v,
        sigma_v,
        beta_fixed_deg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(alpha_deg: f64, counts: u64) -> CountRecord {
        CountRecord {
            alpha_deg,
            beta_deg: 45.0,
            time_s: 1.0,
            counts,
        }
    }

    /// Counts generated exactly from a model inside the fit span are
    /// recovered exactly. Angles are multiples of 30 degrees so the model
    /// values are integers.
    #[test]
    fn exact_recovery_of_in_span_model() {
        let records: Vec<CountRecord> = (0..12)
            .map(|i| {
                let alpha = 30.0 * i as f64;
                let n = 1000.0 + 500.0 * (2.0 * alpha.to_radians()).cos();
                record(alpha, n.round() as u64)
            })
            .collect();
        let fit = fit_fringe(&records).unwrap();
        assert!((fit.c0 - 1000.0).abs() / 1000.0 < 1e-9, "c0 = {}", fit.c0);
        assert!((fit.c1 - 500.0).abs() / 500.0 < 1e-9, "c1 = {}", fit.c1);
        assert!(fit.c2.abs() < 1e-6, "c2 = {}", fit.c2);
        assert!(fit.chi2 < 1e-12);

        let vis = visibility(&fit).unwrap();
        assert!((vis.v - 0.5).abs() < 1e-9);
    }

    #[test]
    fn flat_counts_give_zero_amplitude() {
        let records: Vec<CountRecord> =
            (0..8).map(|i| record(45.0 * i as f64, 777)).collect();
        let fit = fit_fringe(&records).unwrap();
        assert!((fit.c0 - 777.0).abs() < 1e-9);
        assert!(fit.c1.abs() < 1e-9);
        assert!(fit.c2.abs() < 1e-9);
        let vis = visibility(&fit).unwrap();
        assert!(vis.v < 1e-12);
        assert!(vis.sigma_v > 0.0);
    }

    #[test]
    fn too_few_distinct_angles_is_rejected() {
        let records = vec![record(0.0, 10), record(0.0, 11), record(90.0, 9), record(45.0, 10)];
        assert_eq!(
            fit_fringe(&records).unwrap_err(),
            EstimationError::TooFewAngles(3)
        );
    }

    #[test]
    fn degenerate_angles_modulo_pi_are_rejected() {
        // Four distinct raw angles that collapse to two basis rows.
        let records = vec![
            record(0.0, 10),
            record(180.0, 11),
            record(90.0, 9),
            record(270.0, 10),
        ];
        assert_eq!(
            fit_fringe(&records).unwrap_err(),
            EstimationError::DegenerateDesign
        );
    }

    #[test]
    fn mixed_beta_is_rejected() {
        let mut records: Vec<CountRecord> =
            (0..6).map(|i| record(30.0 * i as f64, 100)).collect();
        records[3].beta_deg = 135.0;
        assert_eq!(fit_fringe(&records).unwrap_err(), EstimationError::MixedFringe);
    }

    #[test]
    fn visibility_rejects_non_positive_offset() {
        let fit = FringeFit {
            c0: 0.0,
            c1: 1.0,
            c2: 0.0,
            covariance: Matrix3::identity(),
            chi2: 0.0,
            n_points: 8,
        };
        assert!(matches!(
            visibility(&fit),
            Err(EstimationError::NonPositiveOffset(_))
        ));
    }
}
