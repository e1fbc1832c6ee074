//! Dispersive plasmon physics: material permittivities, single-interface SPP
//! dispersion, hole-array band folding, transmission resonances and the
//! derived timescales.
//!
//! The hole array's top and bottom interfaces are treated as identical,
//! uncoupled single interfaces; the film is thick enough that coupled-film
//! modes are not modeled.

mod band;
mod material;
mod spp;
mod timescales;

pub use band::{fold_wavevector, BandPoint, EotResonance, HoleArraySpec};
pub use material::{MaterialError, MaterialModel, OpticalTable};
pub use spp::{
    group_velocity, propagation_length, spp_point, spp_wavevector, spp_wavevector_for,
    DispersionError, SppPoint,
};
pub use timescales::{timescales, TimescaleError, Timescales};
