//! Surface plasmon polariton dispersion at a single metal/dielectric
//! interface: complex wavevector, group velocity and propagation length.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use super::material::{MaterialError, MaterialModel};
use crate::constants::energy_ev;

#[derive(Debug, Error, PartialEq)]
pub enum DispersionError {
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error("eps_m + eps_d = 0 at this wavelength: surface plasmon resonance singularity")]
    ResonanceSingularity,
    #[error("Re k is not monotonic over the stencil at {wavelength_nm} nm; shrink delta")]
    StencilFailure { wavelength_nm: f64 },
    #[error("mode is lossless (Im k <= 0): propagation length undefined")]
    LosslessMode,
    #[error("group velocity {0} outside (0, 1): not a bound forward mode")]
    UnphysicalGroupVelocity(f64),
}

/// One dispersion sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SppPoint {
    /// Photon energy (eV).
    pub energy_ev: f64,
    /// Complex wavevector (rad/um).
    pub k: Complex64,
    /// Group velocity in units of c.
    pub v_g: f64,
    /// Intensity 1/e propagation length (um).
    pub l_prop_um: f64,
}

/// Bound-mode SPP wavevector k = (w/c) sqrt(eps_m eps_d / (eps_m + eps_d))
/// in rad/um, on the branch with Re k > 0 and Im k >= 0 (forward propagating
/// and decaying).
pub fn spp_wavevector(
    eps_m: Complex64,
    eps_d: Complex64,
    wavelength_nm: f64,
) -> Result<Complex64, DispersionError> {
    let sum = eps_m + eps_d;
    if sum.norm() == 0.0 {
        return Err(DispersionError::ResonanceSingularity);
    }
    let mut root = (eps_m * eps_d / sum).sqrt();
    // The principal square root has Re >= 0; for passive media flipping the
    // sign when Im < 0 selects the decaying forward branch.
    if root.im < 0.0 {
        root = -root;
    }
    let k0 = 2.0 * PI / (wavelength_nm * 1e-3);
    Ok(root * k0)
}

/// SPP wavevector for a metal/dielectric material pair at a wavelength.
pub fn spp_wavevector_for(
    metal: &MaterialModel,
    dielectric: &MaterialModel,
    wavelength_nm: f64,
) -> Result<Complex64, DispersionError> {
    let eps_m = metal.permittivity(wavelength_nm)?;
    let eps_d = dielectric.permittivity(wavelength_nm)?;
    spp_wavevector(eps_m, eps_d, wavelength_nm)
}

/// Group velocity d(omega)/d(Re k) in units of c, by central difference over
/// wavelength +/- delta (nm).
pub fn group_velocity(
    metal: &MaterialModel,
    dielectric: &MaterialModel,
    wavelength_nm: f64,
    delta_nm: f64,
) -> Result<f64, DispersionError> {
    let k_minus = spp_wavevector_for(metal, dielectric, wavelength_nm - delta_nm)?.re;
    let k_plus = spp_wavevector_for(metal, dielectric, wavelength_nm + delta_nm)?.re;
    if k_minus <= k_plus {
        // Shorter wavelength means higher energy; a bound branch must gain
        // wavevector with energy.
        return Err(DispersionError::StencilFailure { wavelength_nm });
    }
    // omega/c in rad/um equals 2 pi / lambda(um), so the ratio is already in
    // units of c.
    let w_minus = 2.0 * PI / ((wavelength_nm - delta_nm) * 1e-3);
    let w_plus = 2.0 * PI / ((wavelength_nm + delta_nm) * 1e-3);
    let v_g = (w_minus - w_plus) / (k_minus - k_plus);
    // Bound modes come out strictly below 1; the perfect-conductor limit may
    // round onto the light line exactly.
    if !(v_g > 0.0 && v_g <= 1.0 + 1e-9) {
        return Err(DispersionError::UnphysicalGroupVelocity(v_g));
    }
    Ok(v_g.min(1.0))
}

/// Intensity 1/e propagation length L = 1 / (2 Im k), with k in rad/um.
pub fn propagation_length(k: Complex64) -> Result<f64, DispersionError> {
    if k.im <= 0.0 {
        return Err(DispersionError::LosslessMode);
    }
    Ok(1.0 / (2.0 * k.im))
}

/// Assemble a full dispersion sample at one wavelength.
pub fn spp_point(
    metal: &MaterialModel,
    dielectric: &MaterialModel,
    wavelength_nm: f64,
    delta_nm: f64,
) -> Result<SppPoint, DispersionError> {
    let k = spp_wavevector_for(metal, dielectric, wavelength_nm)?;
    let v_g = group_velocity(metal, dielectric, wavelength_nm, delta_nm)?;
    let l_prop_um = propagation_length(k)?;
    Ok(SppPoint {
        energy_ev: energy_ev(wavelength_nm),
        k,
        v_g,
        l_prop_um,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_conductor_limit_is_the_light_line() {
        let k = spp_wavevector(
            Complex64::new(-1.0e6, 0.0),
            Complex64::ONE,
            1000.0,
        )
        .unwrap();
        let light = 2.0 * PI; // rad/um at 1 um
        assert!((k.re - light).abs() / light < 1e-3);
        assert!(k.im.abs() < 1e-9);
    }

    #[test]
    fn lossless_bound_mode_arithmetic() {
        // eps_m = -2, eps_d = 1: sqrt(-2 / -1) = sqrt(2).
        let k = spp_wavevector(Complex64::new(-2.0, 0.0), Complex64::ONE, 1000.0).unwrap();
        assert!((k.re - 2f64.sqrt() * 2.0 * PI).abs() < 1e-9);
        assert!((k.re - 8.886).abs() < 1e-3);
    }

    #[test]
    fn resonance_singularity_detected() {
        assert_eq!(
            spp_wavevector(Complex64::new(-1.0, 0.0), Complex64::ONE, 800.0).unwrap_err(),
            DispersionError::ResonanceSingularity
        );
    }

    #[test]
    fn gold_interfaces_at_812_nm() {
        let gold = MaterialModel::gold();
        let air = MaterialModel::constant(1.0).unwrap();
        let k_air = spp_wavevector_for(&gold, &air, 812.0).unwrap();
        // Bound SPP sits right of the light line.
        assert!(k_air.re > 2.0 * PI / 0.812);
        assert!(k_air.im > 0.0);

        let silicon = MaterialModel::constant(15.75).unwrap();
        let k_si = spp_wavevector_for(&gold, &silicon, 812.0).unwrap();
        let ratio = k_si.re / k_air.re;
        assert!(
            (ratio - 6.0).abs() / 6.0 < 0.25,
            "wavevector ratio = {ratio}"
        );
    }

    #[test]
    fn group_velocities_at_812_nm() {
        let gold = MaterialModel::gold();
        let air = MaterialModel::constant(1.0).unwrap();
        let v_air = group_velocity(&gold, &air, 812.0, 1.0).unwrap();
        // Free gold/air SPP in the near infrared is photon-like.
        assert!(v_air > 0.85 && v_air < 1.0, "v_g = {v_air}");

        let silicon = MaterialModel::constant(15.75).unwrap();
        let v_si = group_velocity(&gold, &silicon, 812.0, 1.0).unwrap();
        assert!((v_si - 0.05).abs() / 0.05 < 0.30, "v_g = {v_si}");
    }

    #[test]
    fn perfect_conductor_group_velocity_reaches_c() {
        let pc = MaterialModel::perfect_conductor();
        let vacuum = MaterialModel::constant(1.0).unwrap();
        let v = group_velocity(&pc, &vacuum, 812.0, 1.0).unwrap();
        assert!((1.0 - v) < 5e-3, "v_g = {v}");
    }

    #[test]
    fn halving_delta_barely_moves_group_velocity() {
        let gold = MaterialModel::gold();
        let silicon = MaterialModel::constant(15.75).unwrap();
        let coarse = group_velocity(&gold, &silicon, 812.0, 1.0).unwrap();
        let fine = group_velocity(&gold, &silicon, 812.0, 0.5).unwrap();
        assert!((coarse - fine).abs() / fine < 0.01);
    }

    #[test]
    fn propagation_length_arithmetic() {
        let l = propagation_length(Complex64::new(10.0, 2.5)).unwrap();
        assert!((l - 0.2).abs() < 1e-12);
        let l = propagation_length(Complex64::new(10.0, 0.05)).unwrap();
        assert!((l - 10.0).abs() < 1e-12);
        assert_eq!(
            propagation_length(Complex64::new(10.0, 0.0)).unwrap_err(),
            DispersionError::LosslessMode
        );
    }

    #[test]
    fn spp_point_collects_all_quantities() {
        let gold = MaterialModel::gold();
        let silicon = MaterialModel::constant(15.75).unwrap();
        let point = spp_point(&gold, &silicon, 812.0, 1.0).unwrap();
        assert!((point.energy_ev - 1.527).abs() < 1e-3);
        assert!(point.k.re > 0.0 && point.k.im > 0.0);
        assert!(point.v_g > 0.0 && point.v_g < 1.0);
        assert!((point.l_prop_um - 1.0 / (2.0 * point.k.im)).abs() < 1e-12);
    }

    #[test]
    fn dispersive_interface_absorbs_within_300_nm() {
        let gold = MaterialModel::gold();
        let silicon = MaterialModel::constant(15.75).unwrap();
        let k = spp_wavevector_for(&gold, &silicon, 812.0).unwrap();
        let l = propagation_length(k).unwrap();
        assert!(l <= 0.3, "L = {l} um");
        assert!(l > 0.05, "L = {l} um");
    }

    #[test]
    fn spp_sits_right_of_the_light_line() {
        let gold = MaterialModel::gold();
        for eps_d in [1.0, 2.25, 15.75] {
            let dielectric = MaterialModel::constant(eps_d).unwrap();
            for wl in [700.0, 750.0, 812.0, 850.0] {
                let eps_m = gold.permittivity(wl).unwrap();
                if eps_m.re >= -eps_d {
                    continue;
                }
                let k = spp_wavevector_for(&gold, &dielectric, wl).unwrap();
                let light = 2.0 * PI / (wl * 1e-3) * eps_d.sqrt();
                assert!(k.re > light, "eps_d {eps_d} wl {wl}");
            }
        }
    }

    #[test]
    fn wavevector_diverges_and_group_velocity_vanishes_toward_resonance() {
        // Lossless Drude approaching eps_m -> -eps_d from below.
        let metal = MaterialModel::drude(1.0, 4.0, 0.0).unwrap();
        let vacuum = MaterialModel::constant(1.0).unwrap();
        // eps_m = 1 - (4/E)^2 = -1 at E = 2 sqrt(2) eV; approach from lower energy.
        let mut last_k = 0.0;
        let mut last_v = 1.0;
        for energy in [2.0, 2.3, 2.5, 2.6, 2.7, 2.75, 2.8] {
            let wl = crate::constants::wavelength_nm(energy);
            let k = spp_wavevector_for(&metal, &vacuum, wl).unwrap().re;
            let v = group_velocity(&metal, &vacuum, wl, 0.05).unwrap();
            assert!(k > last_k, "k not increasing at {energy} eV");
            assert!(v < last_v, "v_g not decreasing at {energy} eV");
            last_k = k;
            last_v = v;
        }
        assert!(last_v < 0.2);
    }
}
