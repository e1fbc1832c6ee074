//! Two-photon polarization state and the dephasing channel.
//!
//! The source emits the superposition (|HH> + e^{i dphi_c}|VV>)/sqrt(2). One
//! photon then crosses a lossy channel that transmits the two polarizations
//! with complex amplitudes `h` and `v` while entangling them with environment
//! states |E_H> and |E_V>. Conditioning on both photons surviving and tracing
//! over the environment leaves a two-qubit density matrix whose coherence is
//! scaled by the environment overlap <E_V|E_H>; a unit overlap preserves the
//! entangled state, a vanishing overlap leaves an equal statistical mixture
//! of |HH> and |VV>.
//!
//! Coincidence probabilities behind two polarizers come either from the
//! closed-form expression ([`coincidence_probability`]) or from an explicit
//! construction of the photon x photon x environment state followed by
//! projection ([`coincidence_probability_oracle`]). The two routes are
//! independent and agree to machine precision; the oracle exists for
//! verification and is not used on the hot path.

use nalgebra::{Matrix4, SVector};
use num_complex::Complex64;
use thiserror::Error;

/// Error conditions for channel construction and state computation.
#[derive(Debug, Error, PartialEq)]
pub enum QuantumError {
    /// The environment overlap is an inner product of normalized states.
    #[error("environment overlap magnitude {0} exceeds 1")]
    OverlapTooLarge(f64),
    /// A passive channel cannot amplify either polarization.
    #[error("transmission amplitude |{which}| = {magnitude} exceeds 1")]
    GainChannel { which: char, magnitude: f64 },
    /// At least one polarization must survive for coincidences to exist.
    #[error("both transmission amplitudes are zero")]
    DeadChannel,
    /// Non-finite parameter.
    #[error("non-finite channel parameter")]
    NonFinite,
}

/// Small slack for magnitude checks on values that arrive through arithmetic.
const MAGNITUDE_SLACK: f64 = 1e-9;

/// Lossy, dephasing channel acting on one photon of the pair.
///
/// `h` and `v` are the complex amplitude transmissions for horizontal and
/// vertical polarization; `env_overlap` is the inner product <E_V|E_H> of the
/// environment states entangled with the two polarizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    h: Complex64,
    v: Complex64,
    env_overlap: Complex64,
}

impl ChannelParams {
    /// Validating constructor. Rejects overlaps above unit magnitude,
    /// amplifying transmissions and the all-dead channel.
    pub fn new(h: Complex64, v: Complex64, env_overlap: Complex64) -> Result<Self, QuantumError> {
        for z in [h, v, env_overlap] {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(QuantumError::NonFinite);
            }
        }
        if env_overlap.norm_sqr() > 1.0 + MAGNITUDE_SLACK {
            return Err(QuantumError::OverlapTooLarge(env_overlap.norm()));
        }
        if h.norm_sqr() > 1.0 + MAGNITUDE_SLACK {
            return Err(QuantumError::GainChannel { which: 'h', magnitude: h.norm() });
        }
        if v.norm_sqr() > 1.0 + MAGNITUDE_SLACK {
            return Err(QuantumError::GainChannel { which: 'v', magnitude: v.norm() });
        }
        if h == Complex64::ZERO && v == Complex64::ZERO {
            return Err(QuantumError::DeadChannel);
        }
        Ok(Self { h, v, env_overlap })
    }

    /// Identity channel: unit transmissions, no decoherence.
    pub fn identity() -> Self {
        Self {
            h: Complex64::ONE,
            v: Complex64::ONE,
            env_overlap: Complex64::ONE,
        }
    }

    /// Balanced channel (h = v = 1) with a real environment overlap.
    /// This is the configuration the fringe visibility probes directly.
    pub fn balanced(env_overlap: f64) -> Result<Self, QuantumError> {
        Self::new(Complex64::ONE, Complex64::ONE, Complex64::new(env_overlap, 0.0))
    }

    pub fn h(&self) -> Complex64 {
        self.h
    }

    pub fn v(&self) -> Complex64 {
        self.v
    }

    pub fn env_overlap(&self) -> Complex64 {
        self.env_overlap
    }

    /// Phase difference between the transmitted polarizations, arg(v/h).
    /// Zero when either amplitude vanishes.
    pub fn delta_phi(&self) -> f64 {
        if self.h == Complex64::ZERO || self.v == Complex64::ZERO {
            0.0
        } else {
            (self.v / self.h).arg()
        }
    }

    /// Phase of the environment overlap, arg(<E_V|E_H>).
    pub fn delta_phi_e(&self) -> f64 {
        self.env_overlap.arg()
    }
}

/// Analyzer angles for the two polarizers, measured from the vertical axis.
///
/// A polarizer is pi-periodic, so angles are meaningful modulo pi;
/// [`PolarizerPair::canonical`] reduces them to [0, pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizerPair {
    /// Angle of the analyzer on the channel arm (radians from vertical).
    pub alpha: f64,
    /// Angle of the analyzer on the reference arm (radians from vertical).
    pub beta: f64,
}

impl PolarizerPair {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    pub fn from_degrees(alpha_deg: f64, beta_deg: f64) -> Self {
        Self {
            alpha: alpha_deg.to_radians(),
            beta: beta_deg.to_radians(),
        }
    }

    /// Both angles reduced modulo pi into [0, pi).
    pub fn canonical(&self) -> Self {
        Self {
            alpha: self.alpha.rem_euclid(std::f64::consts::PI),
            beta: self.beta.rem_euclid(std::f64::consts::PI),
        }
    }
}

/// Two-qubit polarization density matrix in the {|HH>, |HV>, |VH>, |VV>} basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: Matrix4<Complex64>,
}

/// Tolerance for Hermiticity and unit-trace checks.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Tolerance below zero allowed for eigenvalues of a positive matrix.
pub const EIGENVALUE_TOL: f64 = -1e-10;

impl DensityMatrix {
    /// Wrap a raw matrix, checking Hermiticity, unit trace and positivity.
    pub fn from_matrix(m: Matrix4<Complex64>) -> Result<Self, String> {
        let dm = Self { m };
        dm.validate()?;
        Ok(dm)
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    /// Tr(rho^2); equals 1 exactly for a pure state.
    pub fn purity(&self) -> f64 {
        (self.m * self.m).trace().re
    }

    /// Checks Hermiticity to 1e-12, unit trace to 1e-12 and eigenvalues
    /// above -1e-10.
    pub fn validate(&self) -> Result<(), String> {
        let herm = (self.m - self.m.adjoint()).norm();
        if herm > HERMITICITY_TOL {
            return Err(format!("not Hermitian: deviation {herm:.3e}"));
        }
        let tr = self.m.trace();
        if (tr - Complex64::ONE).norm() > HERMITICITY_TOL {
            return Err(format!("trace {tr} differs from 1"));
        }
        let eig = self.m.symmetric_eigen();
        for lambda in eig.eigenvalues.iter() {
            if *lambda < EIGENVALUE_TOL {
                return Err(format!("negative eigenvalue {lambda:.3e}"));
            }
        }
        Ok(())
    }

    /// Expectation value <alpha, beta| rho |alpha, beta> of the projector onto
    /// the product state selected by the two polarizers.
    pub fn project(&self, setting: &PolarizerPair) -> f64 {
        let u = projector_amplitudes(setting);
        let mut p = Complex64::ZERO;
        for (j, uj) in u.iter().enumerate() {
            for (k, uk) in u.iter().enumerate() {
                p += Complex64::new(uj * uk, 0.0) * self.m[(j, k)];
            }
        }
        p.re
    }
}

/// Real overlap amplitudes <j|alpha,beta> for the four basis states, with the
/// polarizer state |alpha> = cos(alpha)|V> + sin(alpha)|H>.
fn projector_amplitudes(setting: &PolarizerPair) -> [f64; 4] {
    let (sa, ca) = setting.alpha.sin_cos();
    let (sb, cb) = setting.beta.sin_cos();
    // basis order HH, HV, VH, VV
    [sa * sb, sa * cb, ca * sb, ca * cb]
}

/// Density matrix of the source state (|HH> + e^{i dphi_c}|VV>)/sqrt(2).
pub fn initial_state(delta_phi_c: f64) -> DensityMatrix {
    let mut m = Matrix4::zeros();
    let half = Complex64::new(0.5, 0.0);
    let phase = Complex64::from_polar(0.5, -delta_phi_c);
    m[(0, 0)] = half;
    m[(3, 3)] = half;
    m[(0, 3)] = phase;
    m[(3, 0)] = phase.conj();
    DensityMatrix { m }
}

/// Post-selected two-photon density matrix after the channel, normalized to
/// the surviving pairs.
///
/// Diagonal weights are |h|^2 and |v|^2 over their sum; the |HH><VV|
/// coherence carries the environment overlap and the channel phases.
pub fn reduced_density_matrix(channel: &ChannelParams, delta_phi_c: f64) -> DensityMatrix {
    let h2 = channel.h.norm_sqr();
    let v2 = channel.v.norm_sqr();
    let norm = h2 + v2;
    let coherence = channel.h * channel.v.conj() * Complex64::from_polar(1.0, -delta_phi_c)
        * channel.env_overlap
        / norm;
    let mut m = Matrix4::zeros();
    m[(0, 0)] = Complex64::new(h2 / norm, 0.0);
    m[(3, 3)] = Complex64::new(v2 / norm, 0.0);
    m[(0, 3)] = coherence;
    m[(3, 0)] = coherence.conj();
    DensityMatrix { m }
}

/// Coincidence probability behind polarizers at (alpha, beta), conditioned on
/// both photons surviving.
///
/// Uses the closed form in the transmission ratio |v|/|h| when |h| > 0 and
/// falls back to projecting the reduced density matrix when the horizontal
/// amplitude vanishes. The result is clamped to [0, 1] against rounding.
pub fn coincidence_probability(
    channel: &ChannelParams,
    delta_phi_c: f64,
    setting: &PolarizerPair,
) -> f64 {
    let h_mag = channel.h.norm();
    if h_mag == 0.0 {
        return reduced_density_matrix(channel, delta_phi_c)
            .project(setting)
            .clamp(0.0, 1.0);
    }
    let r = channel.v.norm() / h_mag;
    let (sa, ca) = setting.alpha.sin_cos();
    let (sb, cb) = setting.beta.sin_cos();
    let sin2a = (2.0 * setting.alpha).sin();
    let sin2b = (2.0 * setting.beta).sin();
    let overlap_mag = channel.env_overlap.norm();
    let phase = channel.delta_phi_e() - channel.delta_phi() - delta_phi_c;
    let p = ((sa * sb).powi(2)
        + r * r * (ca * cb).powi(2)
        + 0.5 * sin2a * sin2b * r * overlap_mag * phase.cos())
        / (1.0 + r * r);
    p.clamp(0.0, 1.0)
}

/// Brute-force coincidence probability from the explicit state in the
/// 8-dimensional photon x photon x environment space.
///
/// The environment is realized in two dimensions with |E_H> = (1, 0) and
/// |E_V> = (conj(c), sqrt(1 - |c|^2)) for c = <E_V|E_H>, the minimal dilation
/// producing the requested overlap. Verification path only; the production
/// route is [`coincidence_probability`].
pub fn coincidence_probability_oracle(
    channel: &ChannelParams,
    delta_phi_c: f64,
    setting: &PolarizerPair,
) -> f64 {
    let psi = full_state(channel, delta_phi_c);
    let u = projector_amplitudes(setting);
    // Project onto |alpha, beta> x identity on the environment and sum the
    // squared amplitudes of the two environment components.
    let mut p = 0.0;
    for env in 0..2 {
        let mut amp = Complex64::ZERO;
        for pol in 0..4 {
            amp += Complex64::new(u[pol], 0.0) * psi[2 * pol + env];
        }
        p += amp.norm_sqr();
    }
    p
}

/// Normalized state h|HH>|E_H> + v e^{i dphi_c}|VV>|E_V> in the basis
/// |pol1, pol2, env_k> with index 2 * (2 * pol1 + pol2) + k.
pub(crate) fn full_state(channel: &ChannelParams, delta_phi_c: f64) -> SVector<Complex64, 8> {
    let c = channel.env_overlap;
    let env_h = [Complex64::ONE, Complex64::ZERO];
    let env_v = [c.conj(), Complex64::new((1.0 - c.norm_sqr()).max(0.0).sqrt(), 0.0)];
    let mut psi = SVector::<Complex64, 8>::zeros();
    let v_phase = channel.v * Complex64::from_polar(1.0, delta_phi_c);
    for k in 0..2 {
        psi[k] = channel.h * env_h[k]; // |HH>
        psi[6 + k] = v_phase * env_v[k]; // |VV>
    }
    psi / Complex64::new(psi.norm(), 0.0)
}
