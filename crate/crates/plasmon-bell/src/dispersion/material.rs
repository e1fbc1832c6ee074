//! Optical material models: Drude metals, tabulated (wavelength, n, k)
//! optical constants, and constant dielectrics.
//!
//! A gold table from Johnson & Christy, Phys. Rev. B 6, 4370 (1972) is
//! bundled; a Drude parameterization fitted to the same data in the
//! near infrared is available as a fallback.

use num_complex::Complex64;
use thiserror::Error;

use crate::constants::HC_EV_NM;

#[derive(Debug, Error, PartialEq)]
pub enum MaterialError {
    #[error("wavelength {wavelength_nm} nm outside the tabulated range [{min_nm}, {max_nm}] nm")]
    OutOfRange {
        wavelength_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },
    #[error("optical constants table needs at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("table wavelengths must be strictly increasing (row {0})")]
    NotIncreasing(usize),
    #[error("negative or non-finite optical constant in row {0}")]
    BadValue(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("Drude parameters invalid: omega_p must be positive and gamma non-negative")]
    BadDrude,
    #[error("constant permittivity must be positive and finite, got {0}")]
    BadConstant(f64),
}

/// Tabulated optical constants, linearly interpolated in wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalTable {
    rows: Vec<(f64, f64, f64)>, // (wavelength nm, n, k)
}

impl OpticalTable {
    pub fn new(rows: Vec<(f64, f64, f64)>) -> Result<Self, MaterialError> {
        if rows.len() < 2 {
            return Err(MaterialError::TooFewRows(rows.len()));
        }
        for (i, &(wl, n, k)) in rows.iter().enumerate() {
            if !wl.is_finite() || wl <= 0.0 || !n.is_finite() || n < 0.0 || !k.is_finite() || k < 0.0
            {
                return Err(MaterialError::BadValue(i));
            }
            if i > 0 && wl <= rows[i - 1].0 {
                return Err(MaterialError::NotIncreasing(i));
            }
        }
        Ok(Self { rows })
    }

    /// Parse the `wavelength_nm,n,k` CSV schema. Never panics on malformed
    /// input; errors carry the offending line number.
    pub fn parse_csv(bytes: &[u8]) -> Result<Self, MaterialError> {
        let text = std::str::from_utf8(bytes).map_err(|e| MaterialError::Parse {
            line: 0,
            message: format!("not valid UTF-8: {e}"),
        })?;
        let mut rows = Vec::new();
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim_end() == "wavelength_nm,n,k" => {}
            Some((_, header)) => {
                return Err(MaterialError::Parse {
                    line: 1,
                    message: format!("expected header `wavelength_nm,n,k`, got `{header}`"),
                })
            }
            None => {
                return Err(MaterialError::Parse {
                    line: 1,
                    message: "empty file".into(),
                })
            }
        }
        for (idx, line) in lines {
            let line_no = idx + 1;
            let trimmed = line.trim_end();
            if trimmed.is_empty() {
                continue;
            }
            let mut fields = trimmed.split(',');
            let mut next_f64 = |name: &str| -> Result<f64, MaterialError> {
                let raw = fields.next().ok_or_else(|| MaterialError::Parse {
                    line: line_no,
                    message: format!("missing field `{name}`"),
                })?;
                raw.trim().parse::<f64>().map_err(|e| MaterialError::Parse {
                    line: line_no,
                    message: format!("field `{name}`: {e}"),
                })
            };
            let wl = next_f64("wavelength_nm")?;
            let n = next_f64("n")?;
            let k = next_f64("k")?;
            if fields.next().is_some() {
                return Err(MaterialError::Parse {
                    line: line_no,
                    message: "too many fields".into(),
                });
            }
            rows.push((wl, n, k));
        }
        Self::new(rows)
    }

    pub fn wavelength_range(&self) -> (f64, f64) {
        (self.rows[0].0, self.rows[self.rows.len() - 1].0)
    }

    /// Complex permittivity (n + ik)^2 with n and k interpolated linearly.
    pub fn permittivity(&self, wavelength_nm: f64) -> Result<Complex64, MaterialError> {
        let (min_nm, max_nm) = self.wavelength_range();
        if !wavelength_nm.is_finite() || wavelength_nm < min_nm || wavelength_nm > max_nm {
            return Err(MaterialError::OutOfRange {
                wavelength_nm,
                min_nm,
                max_nm,
            });
        }
        let pos = self
            .rows
            .partition_point(|&(wl, _, _)| wl < wavelength_nm)
            .min(self.rows.len() - 1)
            .max(1);
        let (wl0, n0, k0) = self.rows[pos - 1];
        let (wl1, n1, k1) = self.rows[pos];
        let t = (wavelength_nm - wl0) / (wl1 - wl0);
        let nk = Complex64::new(n0 + t * (n1 - n0), k0 + t * (k1 - k0));
        Ok(nk * nk)
    }
}

/// Material model for the permittivity entering the dispersion relation.
#[derive(Debug, Clone, PartialEq)]
pub enum MaterialModel {
    /// eps(w) = eps_inf - omega_p^2 / (omega^2 + i gamma omega), energies in eV.
    Drude {
        eps_inf: f64,
        omega_p_ev: f64,
        gamma_ev: f64,
    },
    /// Interpolated (wavelength, n, k) table.
    Tabulated(OpticalTable),
    /// Non-dispersive dielectric with real permittivity.
    Constant(f64),
}

impl MaterialModel {
    pub fn drude(eps_inf: f64, omega_p_ev: f64, gamma_ev: f64) -> Result<Self, MaterialError> {
        if !(omega_p_ev > 0.0) || !(gamma_ev >= 0.0) || !eps_inf.is_finite() {
            return Err(MaterialError::BadDrude);
        }
        Ok(Self::Drude {
            eps_inf,
            omega_p_ev,
            gamma_ev,
        })
    }

    pub fn constant(eps: f64) -> Result<Self, MaterialError> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(MaterialError::BadConstant(eps));
        }
        Ok(Self::Constant(eps))
    }

    /// Bundled gold optical constants (Johnson & Christy 1972, 188-892 nm).
    pub fn gold() -> Self {
        let table = OpticalTable::parse_csv(GOLD_JOHNSON_CHRISTY_CSV.as_bytes())
            .expect("bundled gold table is valid");
        Self::Tabulated(table)
    }

    /// Drude parameters fitted to the bundled gold table around 800 nm.
    /// Useful when queries outside the tabulated range are needed.
    pub fn gold_drude() -> Self {
        Self::drude(9.84, 9.01, 0.069).expect("valid gold Drude parameters")
    }

    /// Nearly perfect electric conductor; the dispersion relation collapses
    /// onto the light line. Used for analytic limits in tests.
    pub fn perfect_conductor() -> Self {
        Self::drude(1.0, 1.0e6, 0.0).expect("valid conductor parameters")
    }

    /// Complex permittivity at a vacuum wavelength in nm.
    pub fn permittivity(&self, wavelength_nm: f64) -> Result<Complex64, MaterialError> {
        match self {
            Self::Drude {
                eps_inf,
                omega_p_ev,
                gamma_ev,
            } => {
                let omega = HC_EV_NM / wavelength_nm;
                let denom = Complex64::new(omega * omega, gamma_ev * omega);
                Ok(Complex64::new(*eps_inf, 0.0)
                    - Complex64::new(omega_p_ev * omega_p_ev, 0.0) / denom)
            }
            Self::Tabulated(table) => table.permittivity(wavelength_nm),
            Self::Constant(eps) => Ok(Complex64::new(*eps, 0.0)),
        }
    }
}

/// Johnson & Christy 1972 gold data, converted from the published
/// (lambda, n, k) values.
const GOLD_JOHNSON_CHRISTY_CSV: &str = include_str!("../../data/gold_johnson_christy.csv");
