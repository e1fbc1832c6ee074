//! File formats: counts CSV, fringe-model CSV, band-structure CSV and the
//! transmission-spectrum CSV.
//!
//! All parsers are strict about headers and column counts, never panic on
//! malformed input, and report the offending line number.

use std::fmt::Write as _;
use thiserror::Error;

use crate::counting::CountRecord;
use crate::dispersion::{BandPoint, EotResonance};
use crate::estimation::FringeFit;

pub const COUNTS_HEADER: &str = "alpha_deg,beta_deg,time_s,counts";
pub const SPECTRUM_HEADER: &str = "wavelength_nm,transmission";
pub const BAND_HEADER: &str = "energy_ev,k_folded_rad_per_um,branch,light_line_rad_per_um";
pub const FRINGE_HEADER: &str = "beta_deg,alpha_deg,model_counts";
pub const EOT_HEADER: &str = "order_i,order_j,wavelength_nm";

#[derive(Debug, Error, PartialEq)]
pub enum CsvError {
    #[error("line 1: expected header `{expected}`, got `{got}`")]
    BadHeader { expected: &'static str, got: String },
    #[error("file is empty")]
    Empty,
    #[error("file is not valid UTF-8")]
    NotUtf8,
    #[error("line {line}: {message}")]
    Field { line: usize, message: String },
    #[error("no data rows")]
    NoRows,
}

fn split_header<'a>(
    bytes: &'a [u8],
    expected: &'static str,
) -> Result<std::iter::Enumerate<std::str::Lines<'a>>, CsvError> {
    let text = std::str::from_utf8(bytes).map_err(|_| CsvError::NotUtf8)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        None => Err(CsvError::Empty),
        Some((_, header)) if header.trim_end() == expected => Ok(lines),
        Some((_, header)) => Err(CsvError::BadHeader {
            expected,
            got: header.trim_end().to_string(),
        }),
    }
}

fn parse_field<T: std::str::FromStr>(
    raw: Option<&str>,
    name: &str,
    line: usize,
) -> Result<T, CsvError>
where
    T::Err: std::fmt::Display,
{
    let raw = raw.ok_or_else(|| CsvError::Field {
        line,
        message: format!("missing field `{name}`"),
    })?;
    raw.trim().parse::<T>().map_err(|e| CsvError::Field {
        line,
        message: format!("field `{name}`: {e}"),
    })
}

fn reject_extra(fields: &mut std::str::Split<'_, char>, line: usize) -> Result<(), CsvError> {
    if fields.next().is_some() {
        return Err(CsvError::Field {
            line,
            message: "too many fields".into(),
        });
    }
    Ok(())
}

/// Parse the `alpha_deg,beta_deg,time_s,counts` schema.
pub fn parse_counts_csv(bytes: &[u8]) -> Result<Vec<CountRecord>, CsvError> {
    let lines = split_header(bytes, COUNTS_HEADER)?;
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let trimmed = line.trim_end();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.split(',');
        let alpha_deg: f64 = parse_field(fields.next(), "alpha_deg", line_no)?;
        let beta_deg: f64 = parse_field(fields.next(), "beta_deg", line_no)?;
        let time_s: f64 = parse_field(fields.next(), "time_s", line_no)?;
        let counts: u64 = parse_field(fields.next(), "counts", line_no)?;
        reject_extra(&mut fields, line_no)?;
        if !alpha_deg.is_finite() || !beta_deg.is_finite() {
            return Err(CsvError::Field {
                line: line_no,
                message: "angles must be finite".into(),
            });
        }
        if !(time_s > 0.0) || !time_s.is_finite() {
            return Err(CsvError::Field {
                line: line_no,
                message: format!("integration time must be positive, got {time_s}"),
            });
        }
        records.push(CountRecord {
            alpha_deg,
            beta_deg,
            time_s,
            counts,
        });
    }
    if records.is_empty() {
        return Err(CsvError::NoRows);
    }
    Ok(records)
}

pub fn write_counts_csv(records: &[CountRecord]) -> String {
    let mut out = String::with_capacity(32 * (records.len() + 1));
    out.push_str(COUNTS_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{},{},{},{}", r.alpha_deg, r.beta_deg, r.time_s, r.counts);
    }
    out
}

/// Parse the `wavelength_nm,transmission` schema.
pub fn parse_spectrum_csv(bytes: &[u8]) -> Result<Vec<(f64, f64)>, CsvError> {
    let lines = split_header(bytes, SPECTRUM_HEADER)?;
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let trimmed = line.trim_end();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.split(',');
        let wl: f64 = parse_field(fields.next(), "wavelength_nm", line_no)?;
        let t: f64 = parse_field(fields.next(), "transmission", line_no)?;
        reject_extra(&mut fields, line_no)?;
        if !wl.is_finite() || wl <= 0.0 || !t.is_finite() {
            return Err(CsvError::Field {
                line: line_no,
                message: "wavelength must be positive and transmission finite".into(),
            });
        }
        rows.push((wl, t));
    }
    if rows.is_empty() {
        return Err(CsvError::NoRows);
    }
    Ok(rows)
}

/// Per-beta model curves for plotting, `beta_deg,alpha_deg,model_counts`.
pub fn write_fringes_csv(fits: &[(f64, FringeFit)], alpha_step_deg: f64) -> String {
    let mut out = String::new();
    out.push_str(FRINGE_HEADER);
    out.push('\n');
    for (beta, fit) in fits {
        let mut alpha: f64 = 0.0;
        while alpha < 360.0 - 1e-9 {
            let model = fit.predict(alpha.to_radians());
            let _ = writeln!(out, "{beta},{alpha},{model}");
            alpha += alpha_step_deg;
        }
    }
    out
}

pub fn write_band_csv(points: &[BandPoint]) -> String {
    let mut out = String::new();
    out.push_str(BAND_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.energy_ev, p.k_folded_rad_per_um, p.branch, p.light_line_rad_per_um
        );
    }
    out
}

pub fn write_eot_csv(resonances: &[EotResonance]) -> String {
    let mut out = String::new();
    out.push_str(EOT_HEADER);
    out.push('\n');
    for r in resonances {
        let _ = writeln!(out, "{},{},{}", r.order.0, r.order.1, r.wavelength_nm);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_roundtrip_is_exact() {
        let records = vec![
            CountRecord {
                alpha_deg: 12.5,
                beta_deg: 45.0,
                time_s: 10.0,
                counts: 4821,
            },
            CountRecord {
                alpha_deg: 350.0,
                beta_deg: 135.0,
                time_s: 0.25,
                counts: 0,
            },
        ];
        let text = write_counts_csv(&records);
        let parsed = parse_counts_csv(text.as_bytes()).unwrap();
        assert_eq!(parsed, records);
    }

    #[test]
    fn counts_parser_rejects_malformed_input() {
        assert_eq!(parse_counts_csv(b"").unwrap_err(), CsvError::Empty);
        assert!(matches!(
            parse_counts_csv(b"alpha,beta,time,counts\n").unwrap_err(),
            CsvError::BadHeader { .. }
        ));
        let text = format!("{COUNTS_HEADER}\n10,45,1.0,-3\n");
        assert!(matches!(
            parse_counts_csv(text.as_bytes()).unwrap_err(),
            CsvError::Field { line: 2, .. }
        ));
        let text = format!("{COUNTS_HEADER}\n10,45,0,5\n");
        assert!(matches!(
            parse_counts_csv(text.as_bytes()).unwrap_err(),
            CsvError::Field { line: 2, .. }
        ));
        let text = format!("{COUNTS_HEADER}\n10,45,1.0,5,9\n");
        assert!(matches!(
            parse_counts_csv(text.as_bytes()).unwrap_err(),
            CsvError::Field { line: 2, .. }
        ));
        let text = format!("{COUNTS_HEADER}\n");
        assert_eq!(parse_counts_csv(text.as_bytes()).unwrap_err(), CsvError::NoRows);
    }

    #[test]
    fn counts_parser_skips_blank_lines_and_crlf() {
        let text = format!("{COUNTS_HEADER}\r\n10,45,1.0,5\r\n\r\n20,45,1.0,6\r\n");
        let parsed = parse_counts_csv(text.as_bytes()).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[1].counts, 6);
    }

    #[test]
    fn spectrum_parser_basics() {
        let text = format!("{SPECTRUM_HEADER}\n800,0.1\n801,0.2\n");
        let rows = parse_spectrum_csv(text.as_bytes()).unwrap();
        assert_eq!(rows, vec![(800.0, 0.1), (801.0, 0.2)]);
        let bad = format!("{SPECTRUM_HEADER}\n-5,0.1\n");
        assert!(parse_spectrum_csv(bad.as_bytes()).is_err());
    }

    #[test]
    fn fringe_csv_covers_every_beta() {
        use nalgebra::Matrix3;
        let fit = FringeFit {
            c0: 100.0,
            c1: 50.0,
            c2: 0.0,
            covariance: Matrix3::identity(),
            chi2: 0.0,
            n_points: 36,
        };
        let text = write_fringes_csv(&[(45.0, fit.clone()), (135.0, fit)], 10.0);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], FRINGE_HEADER);
        assert_eq!(lines.len(), 1 + 2 * 36);
        assert!(lines[1].starts_with("45,0,150"));
    }
}
