//! Physical constants in the unit system used throughout the crate
//! (nm and um for lengths, eV for photon energies, fs for times).

/// Photon energy times wavelength, hc (eV nm).
pub const HC_EV_NM: f64 = 1239.842;

/// Reduced Planck constant (meV fs).
pub const HBAR_MEV_FS: f64 = 658.2119569;

/// Speed of light in vacuum (um/fs).
pub const C_UM_PER_FS: f64 = 0.299792458;

/// Photon energy (eV) for a vacuum wavelength in nm.
pub fn energy_ev(wavelength_nm: f64) -> f64 {
    HC_EV_NM / wavelength_nm
}

/// Vacuum wavelength (nm) for a photon energy in eV.
pub fn wavelength_nm(energy_ev: f64) -> f64 {
    HC_EV_NM / energy_ev
}
