//! Lorentzian resonance fit for the lifetime estimate.
//!
//! Fits T(E) = A * (G/2)^2 / ((E - E0)^2 + (G/2)^2) + B to a transmission
//! spectrum in energy space with Levenberg-Marquardt, then converts the
//! linewidth to a lifetime via tau = hbar / Gamma.

use nalgebra::{Cholesky, Matrix4, Vector4};

use super::EstimationError;
use crate::constants::{energy_ev, HBAR_MEV_FS};

/// Fitted resonance parameters.
#[derive(Debug, Clone, Copy)]
pub struct LorentzianFit {
    /// Peak amplitude above the baseline.
    pub amplitude: f64,
    /// Resonance center (eV).
    pub center_ev: f64,
    /// Full width at half maximum (meV).
    pub gamma_mev: f64,
    /// Constant baseline.
    pub baseline: f64,
    /// Lifetime hbar / Gamma (fs).
    pub lifetime_fs: f64,
}

const MIN_SAMPLES: usize = 8;
const MAX_ITERATIONS: usize = 200;

/// Fit a single Lorentzian resonance to (wavelength nm, transmission) samples
/// and return the implied lifetime.
pub fn lorentzian_lifetime(spectrum: &[(f64, f64)]) -> Result<LorentzianFit, EstimationError> {
    if spectrum.len() < MIN_SAMPLES {
        return Err(EstimationError::SpectrumTooShort {
            min: MIN_SAMPLES,
            got: spectrum.len(),
        });
    }
    let mut points: Vec<(f64, f64)> = spectrum
        .iter()
        .map(|&(wl, t)| (energy_ev(wl), t))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));

    let t_max = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let t_min = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let span = t_max - t_min;
    if !(span > 1e-12 * t_max.abs().max(1.0)) {
        return Err(EstimationError::NoPeak);
    }

    // Initial guesses: baseline at the minimum, center at the maximum, width
    // from the half-maximum crossings.
    let peak_idx = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let e0 = points[peak_idx].0;
    let half = t_min + 0.5 * span;
    let mut left = points[0].0;
    for w in points[..=peak_idx].windows(2) {
        if w[0].1 <= half && w[1].1 >= half {
            let t = (half - w[0].1) / (w[1].1 - w[0].1);
            left = w[0].0 + t * (w[1].0 - w[0].0);
        }
    }
    let mut right = points[points.len() - 1].0;
    for w in points[peak_idx..].windows(2) {
        if w[0].1 >= half && w[1].1 <= half {
            let t = (w[0].1 - half) / (w[0].1 - w[1].1);
            right = w[0].0 + t * (w[1].0 - w[0].0);
            break;
        }
    }
    let span_e = points[points.len() - 1].0 - points[0].0;
    let mut gamma = (right - left).abs();
    if !(gamma > 0.0) || gamma > span_e {
        gamma = span_e / 4.0;
    }

    let mut params = Vector4::new(span, e0, gamma, t_min);
    let mut lambda = 1e-3;
    let mut chi2 = chi_squared(&points, &params);

    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let (jtj, jtr) = normal_equations(&points, &params);
        let mut step = None;
        // Grow the damping until a step actually reduces chi^2.
        for _ in 0..40 {
            let mut damped = jtj;
            for i in 0..4 {
                damped[(i, i)] *= 1.0 + lambda;
            }
            if let Some(chol) = Cholesky::new(damped) {
                let delta = chol.solve(&jtr);
                let trial = params + delta;
                if trial[2] > 0.0 {
                    let trial_chi2 = chi_squared(&points, &trial);
                    if trial_chi2.is_finite() && trial_chi2 <= chi2 {
                        step = Some((trial, trial_chi2));
                        break;
                    }
                }
            }
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
        let Some((trial, trial_chi2)) = step else {
            break;
        };
        let improvement = chi2 - trial_chi2;
        params = trial;
        chi2 = trial_chi2;
        lambda = (lambda * 0.3).max(1e-12);
        if improvement <= 1e-12 * (chi2 + 1e-30) {
            converged = true;
            break;
        }
    }
    if !converged && chi2.is_nan() {
        return Err(EstimationError::FitDiverged);
    }

    let amplitude = params[0];
    let center_ev = params[1];
    let gamma_ev = params[2];
    let baseline = params[3];
    // A fit that wandered outside the data or collapsed its width found no
    // usable resonance.
    if !(amplitude > 0.0)
        || !(gamma_ev > 0.0)
        || !gamma_ev.is_finite()
        || center_ev < points[0].0 - span_e
        || center_ev > points[points.len() - 1].0 + span_e
    {
        return Err(EstimationError::FitDiverged);
    }

    let gamma_mev = gamma_ev * 1e3;
    Ok(LorentzianFit {
        amplitude,
        center_ev,
        gamma_mev,
        baseline,
        lifetime_fs: HBAR_MEV_FS / gamma_mev,
    })
}

fn model(e: f64, p: &Vector4<f64>) -> f64 {
    let hw = p[2] / 2.0;
    p[0] * hw * hw / ((e - p[1]).powi(2) + hw * hw) + p[3]
}

fn chi_squared(points: &[(f64, f64)], p: &Vector4<f64>) -> f64 {
    points.iter().map(|&(e, t)| (t - model(e, p)).powi(2)).sum()
}

fn normal_equations(points: &[(f64, f64)], p: &Vector4<f64>) -> (Matrix4<f64>, Vector4<f64>) {
    let mut jtj = Matrix4::zeros();
    let mut jtr = Vector4::zeros();
    let hw = p[2] / 2.0;
    for &(e, t) in points {
        let de = e - p[1];
        let denom = de * de + hw * hw;
        let shape = hw * hw / denom;
        // Analytic partial derivatives of the model.
        let d_a = shape;
        let d_e0 = p[0] * hw * hw * 2.0 * de / (denom * denom);
        let d_gamma = p[0] * (hw * de * de) / (denom * denom); // d/dGamma with hw = Gamma/2
        let d_b = 1.0;
        let jac = Vector4::new(d_a, d_e0, d_gamma, d_b);
        let residual = t - model(e, p);
        jtj += jac * jac.transpose();
        jtr += jac * residual;
    }
    (jtj, jtr)
}
