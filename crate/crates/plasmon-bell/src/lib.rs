//! Simulation and analysis toolkit for polarization-entangled photon pairs
//! sent through a lossy, dephasing plasmonic channel.
//!
//! The crate covers the full numerical experiment:
//!
//! * [`quantum`] holds the two-photon state, the dephasing channel and
//!   coincidence probabilities, with an independent brute-force oracle.
//! * [`counting`] turns probabilities into Poisson-sampled detector counts
//!   for reproducible, seeded measurement scenarios.
//! * [`estimation`] recovers fringe visibility, CHSH correlations and the
//!   Bell parameter with propagated uncertainties, plus the dephasing-time
//!   bound and a Lorentzian resonance lifetime fit.
//! * [`dispersion`] computes surface plasmon dispersion for metal/dielectric
//!   interfaces and hole arrays: wavevectors, group velocities, propagation
//!   lengths, folded band structures, transmission resonances and channel
//!   timescales.
//! * [`config`], [`io`] and [`pipeline`] provide the JSON config schema, the
//!   CSV file formats and the batch pipelines behind the CLI.
//!
//! All simulation is deterministic for a fixed seed: each polarizer setting
//! draws from its own counter-derived generator stream, so results do not
//! depend on evaluation order or thread count.

// Negated comparisons like `!(x > 0.0)` are used on purpose throughout the
// validation paths: they reject NaN, which `x <= 0.0` lets through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod constants;
pub mod counting;
pub mod dispersion;
pub mod estimation;
pub mod io;
pub mod pipeline;
pub mod quantum;

pub use config::{ExperimentConfig, LoadedConfig};
pub use counting::{CountRecord, ScenarioKind, SourceParams};
pub use pipeline::{run_analyze, run_dispersion, run_simulate, PipelineError, SummaryReport};
pub use quantum::{ChannelParams, PolarizerPair};
