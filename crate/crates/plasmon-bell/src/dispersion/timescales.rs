//! Propagation and decay timescales of the plasmonic channel.
//!
//! The propagation time is the hop distance between coupled holes divided by
//! the group velocity; the amplitude decay time T1 follows from the
//! absorption length the same way, and the total dephasing time from decay
//! alone is T2 = 2 T1.

use serde::Serialize;
use thiserror::Error;

use crate::constants::C_UM_PER_FS;

#[derive(Debug, Error, PartialEq)]
pub enum TimescaleError {
    #[error("timescale inputs must be positive: v_g = {v_g}, hop = {hop_um}, L_abs = {l_abs_um}")]
    NonPositiveInput {
        v_g: f64,
        hop_um: f64,
        l_abs_um: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timescales {
    /// Propagation time over the hop distance (fs).
    pub t_p_fs: f64,
    /// Amplitude decay time from the absorption length (fs).
    pub t1_fs: f64,
    /// T2 = 2 T1 (fs).
    pub t2_fs: f64,
}

/// Timescales from a group velocity (units of c), a hop distance and an
/// absorption length (um).
pub fn timescales(v_g: f64, hop_um: f64, l_abs_um: f64) -> Result<Timescales, TimescaleError> {
    if !(v_g > 0.0) || !(hop_um > 0.0) || !(l_abs_um > 0.0) {
        return Err(TimescaleError::NonPositiveInput {
            v_g,
            hop_um,
            l_abs_um,
        });
    }
    let speed = v_g * C_UM_PER_FS; // um/fs
    let t1_fs = l_abs_um / speed;
    let out = Timescales {
        t_p_fs: hop_um / speed,
        t1_fs,
        t2_fs: 2.0 * t1_fs,
    };
    debug_assert_eq!(out.t2_fs, 2.0 * out.t1_fs);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slow_plasmon_hop_time() {
        let t = timescales(0.05, 1.2, 0.15).unwrap();
        assert!((t.t_p_fs - 80.0).abs() / 80.0 < 0.01, "t_p = {}", t.t_p_fs);
        assert!((t.t2_fs - 20.0).abs() / 20.0 < 0.01, "t2 = {}", t.t2_fs);
        assert_eq!(t.t2_fs, 2.0 * t.t1_fs);
    }

    #[test]
    fn light_speed_hop() {
        let t = timescales(1.0, 0.2998, 0.2998).unwrap();
        assert!((t.t_p_fs - 1.0).abs() < 1e-3);
    }

    #[test]
    fn t2_bounded_by_absorption_length() {
        for l_abs in [0.01, 0.05, 0.1, 0.15, 0.2] {
            let t = timescales(0.05, 1.2, l_abs).unwrap();
            assert!(t.t2_fs <= 26.7, "L = {l_abs}: t2 = {}", t.t2_fs);
        }
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert!(timescales(0.0, 1.0, 1.0).is_err());
        assert!(timescales(0.5, -1.0, 1.0).is_err());
        assert!(timescales(0.5, 1.0, 0.0).is_err());
    }
}
