//! Hole-array band structure in the empty-lattice approximation and the
//! extraordinary-transmission resonance condition.
//!
//! The array only folds the single-interface dispersion into the first
//! Brillouin zone of its square lattice; band gaps at the crossings are not
//! modeled. Resonant transmission orders (i, j) satisfy
//! Re k_spp(lambda) = (2 pi / P) sqrt(i^2 + j^2).

use std::f64::consts::PI;

use super::material::MaterialModel;
use super::spp::{spp_wavevector_for, DispersionError};
use crate::constants::wavelength_nm;

/// Square-lattice hole array on a metal film.
#[derive(Debug, Clone, PartialEq)]
pub struct HoleArraySpec {
    pub period_nm: f64,
    pub metal: MaterialModel,
    pub dielectric: MaterialModel,
    /// Highest diffraction order index considered, i^2 + j^2 <= max_order^2.
    pub max_order: u32,
}

/// One folded band-structure sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPoint {
    pub energy_ev: f64,
    /// Re k_spp folded into [0, G/2] (rad/um).
    pub k_folded_rad_per_um: f64,
    /// Fold count: how many reciprocal lattice vectors were removed.
    pub branch: i32,
    /// Light line omega = c k / sqrt(eps_d), folded the same way (rad/um).
    pub light_line_rad_per_um: f64,
}

/// A resonant transmission order and the wavelength satisfying its matching
/// condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EotResonance {
    pub order: (u32, u32),
    pub wavelength_nm: f64,
}

/// Fold a wavevector into the irreducible zone [0, G/2].
///
/// Returns the folded value and the number of reciprocal lattice vectors
/// removed. Folding an already-folded value is the identity, including the
/// zone boundary (ties round to the even multiple).
pub fn fold_wavevector(k: f64, g: f64) -> (f64, i32) {
    let n = (k / g).round_ties_even();
    ((k - n * g).abs(), n as i32)
}

impl HoleArraySpec {
    /// Reciprocal lattice constant G = 2 pi / P in rad/um.
    pub fn reciprocal_g(&self) -> f64 {
        2.0 * PI / (self.period_nm * 1e-3)
    }

    /// Folded dispersion samples over an energy grid (eV), one per energy.
    pub fn band_structure(&self, energies_ev: &[f64]) -> Result<Vec<BandPoint>, DispersionError> {
        let g = self.reciprocal_g();
        energies_ev
            .iter()
            .map(|&energy| {
                let wl = wavelength_nm(energy);
                let k = spp_wavevector_for(&self.metal, &self.dielectric, wl)?;
                let eps_d = self.dielectric.permittivity(wl)?;
                let light = 2.0 * PI / (wl * 1e-3) * eps_d.re.max(0.0).sqrt();
                let (k_folded, branch) = fold_wavevector(k.re, g);
                let (light_folded, _) = fold_wavevector(light, g);
                Ok(BandPoint {
                    energy_ev: energy,
                    k_folded_rad_per_um: k_folded,
                    branch,
                    light_line_rad_per_um: light_folded,
                })
            })
            .collect()
    }

    /// Wavelengths where a diffraction order matches the SPP wavevector,
    /// found by bracketed bisection within `search_nm`. Orders whose matching
    /// condition has no sign change in the range are skipped.
    ///
    /// Only the bound branch is searched: wavelengths where
    /// Re eps_m >= -Re eps_d carry no surface mode and cannot mediate
    /// resonant transmission.
    pub fn eot_resonances(
        &self,
        search_nm: (f64, f64),
    ) -> Result<Vec<EotResonance>, DispersionError> {
        let g = self.reciprocal_g();
        let mut out = Vec::new();
        for i in 1..=self.max_order {
            for j in 0..=i {
                let norm2 = i * i + j * j;
                if norm2 > self.max_order * self.max_order {
                    continue;
                }
                let target = g * (norm2 as f64).sqrt();
                if let Some(wl) = self.solve_order(target, search_nm)? {
                    out.push(EotResonance {
                        order: (i, j),
                        wavelength_nm: wl,
                    });
                }
            }
        }
        out.sort_by(|a, b| a.wavelength_nm.total_cmp(&b.wavelength_nm));
        Ok(out)
    }

    fn mismatch(&self, wavelength: f64, target: f64) -> Result<f64, DispersionError> {
        Ok(spp_wavevector_for(&self.metal, &self.dielectric, wavelength)?.re - target)
    }

    fn is_bound(&self, wavelength: f64) -> Result<bool, DispersionError> {
        let eps_m = self.metal.permittivity(wavelength)?;
        let eps_d = self.dielectric.permittivity(wavelength)?;
        Ok(eps_m.re < -eps_d.re)
    }

    fn solve_order(
        &self,
        target: f64,
        (lo_nm, hi_nm): (f64, f64),
    ) -> Result<Option<f64>, DispersionError> {
        // Tolerance chosen so the residual |dk|/k stays below 1e-6 even on
        // the steep dispersive branch.
        const SCAN_STEP_NM: f64 = 1.0;
        const TOL_NM: f64 = 1e-5;
        let mut prev: Option<(f64, f64)> = None;
        let mut wl = lo_nm;
        loop {
            if self.is_bound(wl)? {
                let f = self.mismatch(wl, target)?;
                if f == 0.0 {
                    return Ok(Some(wl));
                }
                if let Some((prev_wl, prev_f)) = prev {
                    if prev_f * f < 0.0 {
                        let (mut a, mut b, mut fa) = (prev_wl, wl, prev_f);
                        while b - a > TOL_NM {
                            let mid = 0.5 * (a + b);
                            let fm = self.mismatch(mid, target)?;
                            if fa * fm <= 0.0 {
                                b = mid;
                            } else {
                                a = mid;
                                fa = fm;
                            }
                        }
                        return Ok(Some(0.5 * (a + b)));
                    }
                }
                prev = Some((wl, f));
            } else {
                prev = None;
            }
            if wl >= hi_nm {
                return Ok(None);
            }
            wl = (wl + SCAN_STEP_NM).min(hi_nm);
        }
    }
}
