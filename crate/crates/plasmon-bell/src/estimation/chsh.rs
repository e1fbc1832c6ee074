//! Bell-test statistics in CHSH form.
//!
//! Each correlation value E(a, b) comes from the four coincidence counts at
//! one analyzer pair and its orthogonal complements; the Bell parameter S
//! combines four such correlations. |S| <= 2 for any local hidden variable
//! theory, while quantum mechanics allows up to 2 sqrt(2).

use serde::Serialize;

use super::EstimationError;
use crate::counting::{ChshAngles, CountRecord};

/// Bell parameter with the four correlation values that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct ChshResult {
    /// E at (a1,b1), (a1,b2), (a2,b1), (a2,b2).
    pub e_values: [f64; 4],
    pub s: f64,
    pub sigma_s: f64,
    /// The analyzer angles the correlations were measured at (degrees).
    pub angles: ChshAngles,
}

impl ChshResult {
    /// True when S - 2 exceeds `n_sigma` standard errors.
    pub fn violates_lhv(&self, n_sigma: f64) -> bool {
        self.s - 2.0 > n_sigma * self.sigma_s
    }
}

fn angle_matches(actual: f64, expected: f64) -> bool {
    let d = (actual - expected).rem_euclid(360.0);
    !(1e-6..=360.0 - 1e-6).contains(&d)
}

/// Correlation value and its Poisson standard error from the four counts at
/// (a,b), (a+90,b), (a,b+90), (a+90,b+90), in that order.
///
/// E = [N(a,b) + N(a_perp,b_perp) - N(a_perp,b) - N(a,b_perp)] / (sum of all
/// four); the error propagates var(N) = N through the ratio.
pub fn chsh_correlation(records: &[CountRecord; 4]) -> Result<(f64, f64), EstimationError> {
    let a = records[0].alpha_deg;
    let b = records[0].beta_deg;
    let expected = [(a, b), (a + 90.0, b), (a, b + 90.0), (a + 90.0, b + 90.0)];
    for (rec, (ea, eb)) in records.iter().zip(expected) {
        if !angle_matches(rec.alpha_deg, ea) || !angle_matches(rec.beta_deg, eb) {
            return Err(EstimationError::BadCorrelationSet);
        }
    }
    let n = records.map(|r| r.counts as f64);
    let agree = n[0] + n[3];
    let disagree = n[1] + n[2];
    let total = agree + disagree;
    if total <= 0.0 {
        return Err(EstimationError::ZeroCounts);
    }
    let e = (agree - disagree) / total;
    // dE/dN is 2*disagree/total^2 for agreeing counts and -2*agree/total^2
    // for disagreeing ones; variance of each N is N itself.
    let d_agree = 2.0 * disagree / (total * total);
    let d_disagree = -2.0 * agree / (total * total);
    let var = d_agree * d_agree * agree + d_disagree * d_disagree * disagree;
    Ok((e, var.max(0.0).sqrt()))
}

/// Correlation value from four coincidence probabilities in the same order
/// as [`chsh_correlation`]. Noise-free path for closed-form checks.
pub fn correlation_from_probabilities(p: [f64; 4]) -> f64 {
    let total = p[0] + p[1] + p[2] + p[3];
    (p[0] + p[3] - p[1] - p[2]) / total
}

/// Combine four correlations at (a1,b1), (a1,b2), (a2,b1), (a2,b2) into the
/// Bell parameter S = E11 - E12 + E21 + E22.
pub fn chsh_s(correlations: [(f64, f64); 4], angles: ChshAngles) -> ChshResult {
    let e_values = correlations.map(|(e, _)| e);
    let s = e_values[0] - e_values[1] + e_values[2] + e_values[3];
    let sigma_s = correlations
        .iter()
        .map(|(_, sig)| sig * sig)
        .sum::<f64>()
        .sqrt();
    ChshResult {
        e_values,
        s,
        sigma_s,
        angles,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{coincidence_probability, ChannelParams, PolarizerPair};

    fn rec(alpha_deg: f64, beta_deg: f64, counts: u64) -> CountRecord {
        CountRecord {
            alpha_deg,
            beta_deg,
            time_s: 1.0,
            counts,
        }
    }

    fn quad(a: f64, b: f64, n: [u64; 4]) -> [CountRecord; 4] {
        [
            rec(a, b, n[0]),
            rec(a + 90.0, b, n[1]),
            rec(a, b + 90.0, n[2]),
            rec(a + 90.0, b + 90.0, n[3]),
        ]
    }

    #[test]
    fn perfect_correlation() {
        let (e, sigma) = chsh_correlation(&quad(0.0, 0.0, [500, 0, 0, 500])).unwrap();
        assert_eq!(e, 1.0);
        assert_eq!(sigma, 0.0);
    }

    #[test]
    fn equal_counts_mean_no_correlation() {
        let (e, sigma) = chsh_correlation(&quad(0.0, 22.5, [250, 250, 250, 250])).unwrap();
        assert_eq!(e, 0.0);
        assert!(sigma > 0.0);
    }

    #[test]
    fn zero_counts_are_undefined() {
        assert_eq!(
            chsh_correlation(&quad(0.0, 0.0, [0, 0, 0, 0])).unwrap_err(),
            EstimationError::ZeroCounts
        );
    }

    #[test]
    fn mismatched_complement_angles_rejected() {
        let bad = [
            rec(0.0, 22.5, 10),
            rec(80.0, 22.5, 10),
            rec(0.0, 112.5, 10),
            rec(90.0, 112.5, 10),
        ];
        assert_eq!(
            chsh_correlation(&bad).unwrap_err(),
            EstimationError::BadCorrelationSet
        );
    }

    fn ideal_probabilities(a_deg: f64, b_deg: f64) -> [f64; 4] {
        let channel = ChannelParams::identity();
        [
            (a_deg, b_deg),
            (a_deg + 90.0, b_deg),
            (a_deg, b_deg + 90.0),
            (a_deg + 90.0, b_deg + 90.0),
        ]
        .map(|(a, b)| {
            coincidence_probability(&channel, 0.0, &PolarizerPair::from_degrees(a, b))
        })
    }

    #[test]
    fn ideal_state_correlation_at_canonical_pair() {
        let e = correlation_from_probabilities(ideal_probabilities(0.0, 22.5));
        assert!((e - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12, "E = {e}");
    }

    #[test]
    fn orthogonal_complement_flips_correlation_sign() {
        let e = correlation_from_probabilities(ideal_probabilities(0.0, 22.5));
        let e_flipped = correlation_from_probabilities(ideal_probabilities(0.0, 112.5));
        assert!((e + e_flipped).abs() < 1e-12);
    }

    #[test]
    fn ideal_state_saturates_tsirelson_bound() {
        let angles = ChshAngles::default();
        let mut correlations = Vec::new();
        for &a in &angles.a_deg {
            for &b in &angles.b_deg {
                correlations.push((correlation_from_probabilities(ideal_probabilities(a, b)), 0.0));
            }
        }
        let result = chsh_s(correlations.try_into().unwrap(), angles);
        assert!((result.s - 2.0 * 2f64.sqrt()).abs() < 1e-12, "S = {}", result.s);
        assert!(result.violates_lhv(3.0));
    }

    /// The decohered family keeps its basis-aligned correlations at unity,
    /// so at the canonical angles S = sqrt(2) (1 + V): total decoherence
    /// lands at sqrt(2), below the classical bound but far from zero.
    #[test]
    fn decohered_family_s_follows_one_plus_v() {
        let angles = ChshAngles::default();
        for overlap in [0.0, 0.3, 0.7, 0.98, 1.0] {
            let channel = ChannelParams::balanced(overlap).unwrap();
            let mut correlations = Vec::new();
            for &a in &angles.a_deg {
                for &b in &angles.b_deg {
                    let p = [
                        (a, b),
                        (a + 90.0, b),
                        (a, b + 90.0),
                        (a + 90.0, b + 90.0),
                    ]
                    .map(|(alpha, beta)| {
                        coincidence_probability(
                            &channel,
                            0.0,
                            &PolarizerPair::from_degrees(alpha, beta),
                        )
                    });
                    correlations.push((correlation_from_probabilities(p), 0.0));
                }
            }
            let result = chsh_s(correlations.try_into().unwrap(), angles);
            let expected = std::f64::consts::SQRT_2 * (1.0 + overlap);
            assert!(
                (result.s - expected).abs() < 1e-12,
                "overlap {overlap}: S = {}, expected {expected}",
                result.s
            );
        }
        // Total decoherence stays below the classical bound.
        let channel = ChannelParams::balanced(0.0).unwrap();
        let p = [(0.0, 22.5), (90.0, 22.5), (0.0, 112.5), (90.0, 112.5)].map(|(alpha, beta)| {
            coincidence_probability(&channel, 0.0, &PolarizerPair::from_degrees(alpha, beta))
        });
        assert!(correlation_from_probabilities(p).abs() <= 1.0);
    }

    #[test]
    fn sigma_s_adds_in_quadrature() {
        let corr = [(0.7, 0.01), (-0.7, 0.02), (0.7, 0.02), (0.7, 0.04)];
        let result = chsh_s(corr, ChshAngles::default());
        assert!((result.s - 2.8).abs() < 1e-12);
        let expected = (0.01f64.powi(2) + 0.02f64.powi(2) + 0.02f64.powi(2) + 0.04f64.powi(2)).sqrt();
        assert!((result.sigma_s - expected).abs() < 1e-15);
        assert!(result.violates_lhv(3.0));
    }
}
