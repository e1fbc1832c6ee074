//! Lower bound on the pure dephasing time from the measured visibility.
//!
//! Under an exponential overlap decay |<E_V|E_H>| = exp(-t_p / T2*), a
//! visibility lower bound V_low translates into T2* >= t_p / (-ln V_low).
//! The exponential form is a modeling assumption; alongside the model bound
//! we also report the order-of-magnitude convention "no decoherence observed
//! over t_p implies T2* of at least t_p", rounded to the nearest power of
//! ten.

use serde::Serialize;

use super::{EstimationError, VisibilityEstimate};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DephasingBound {
    /// Model bound t_p / (-ln V_low) in fs; infinite when V_low >= 1.
    pub t2star_model_fs: f64,
    /// Order-of-magnitude statement: T2* is at least this many fs.
    pub t2star_order_of_magnitude_fs: f64,
    /// The visibility lower bound the model inverted.
    pub v_low: f64,
    /// Propagation time used (fs).
    pub t_p_fs: f64,
}

/// Compute the dephasing-time lower bound from a visibility estimate.
///
/// `n_sigma` controls how far below the estimate the bound is taken:
/// V_low = v - n_sigma * sigma_v.
pub fn dephasing_bound(
    v: &VisibilityEstimate,
    t_p_fs: f64,
    n_sigma: f64,
) -> Result<DephasingBound, EstimationError> {
    if !(t_p_fs > 0.0) || !t_p_fs.is_finite() {
        return Err(EstimationError::BadPropagationTime(t_p_fs));
    }
    if !(0.0..=1.2).contains(&v.v) {
        return Err(EstimationError::VisibilityOutOfRange(v.v));
    }
    let v_low = v.v - n_sigma * v.sigma_v;
    if v_low <= 0.0 {
        return Err(EstimationError::NoBoundDerivable(v_low));
    }
    let t2star_model_fs = if v_low >= 1.0 {
        f64::INFINITY
    } else {
        t_p_fs / (-v_low.ln())
    };
    Ok(DephasingBound {
        t2star_model_fs,
        t2star_order_of_magnitude_fs: order_of_magnitude(t_p_fs),
        v_low,
        t_p_fs,
    })
}

/// Nearest power of ten: 80 fs rounds to 100 fs, 30 fs to 10 fs.
fn order_of_magnitude(t_fs: f64) -> f64 {
    10f64.powf(t_fs.log10().round())
}
