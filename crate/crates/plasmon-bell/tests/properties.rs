//! Property tests for the structural invariants.

use num_complex::Complex64;
use proptest::prelude::*;

use plasmon_bell::counting::CountRecord;
use plasmon_bell::dispersion::fold_wavevector;
use plasmon_bell::io::{parse_counts_csv, write_counts_csv};
use plasmon_bell::quantum::{
    coincidence_probability, coincidence_probability_oracle, reduced_density_matrix,
    ChannelParams, PolarizerPair,
};

fn channel_strategy() -> impl Strategy<Value = (ChannelParams, f64)> {
    (
        1e-3..=1.0f64,
        0.0..std::f64::consts::TAU,
        1e-3..=1.0f64,
        0.0..std::f64::consts::TAU,
        0.0..=1.0f64,
        0.0..std::f64::consts::TAU,
        -10.0..10.0f64,
    )
        .prop_map(|(hm, hp, vm, vp, om, op, dphi_c)| {
            let channel = ChannelParams::new(
                Complex64::from_polar(hm, hp),
                Complex64::from_polar(vm, vp),
                Complex64::from_polar(om, op),
            )
            .expect("strategy yields valid channels");
            (channel, dphi_c)
        })
}

proptest! {
    #[test]
    fn probability_stays_in_unit_interval(
        (channel, dphi_c) in channel_strategy(),
        alpha in -20.0..20.0f64,
        beta in -20.0..20.0f64,
    ) {
        let p = coincidence_probability(&channel, dphi_c, &PolarizerPair::new(alpha, beta));
        prop_assert!((0.0..=1.0).contains(&p), "p = {p}");
    }

    #[test]
    fn four_projector_probabilities_sum_to_one(
        (channel, dphi_c) in channel_strategy(),
        alpha in -20.0..20.0f64,
        beta in -20.0..20.0f64,
    ) {
        let half = std::f64::consts::FRAC_PI_2;
        let sum: f64 = [
            (alpha, beta),
            (alpha + half, beta),
            (alpha, beta + half),
            (alpha + half, beta + half),
        ]
        .iter()
        .map(|&(a, b)| coincidence_probability(&channel, dphi_c, &PolarizerPair::new(a, b)))
        .sum();
        prop_assert!((sum - 1.0).abs() < 1e-12, "sum = {sum}");
    }

    #[test]
    fn closed_form_agrees_with_oracle(
        (channel, dphi_c) in channel_strategy(),
        alpha in -20.0..20.0f64,
        beta in -20.0..20.0f64,
    ) {
        let setting = PolarizerPair::new(alpha, beta);
        let closed = coincidence_probability(&channel, dphi_c, &setting);
        let oracle = coincidence_probability_oracle(&channel, dphi_c, &setting);
        prop_assert!((closed - oracle).abs() < 1e-12);
    }

    #[test]
    fn reduced_matrix_is_a_density_matrix((channel, dphi_c) in channel_strategy()) {
        let rho = reduced_density_matrix(&channel, dphi_c);
        prop_assert!(rho.validate().is_ok(), "{:?}", rho.validate());
    }

    #[test]
    fn folding_lands_in_the_zone_and_is_idempotent(
        k in 0.0..1e4f64,
        g in 0.1..1e3f64,
    ) {
        let (folded, _) = fold_wavevector(k, g);
        prop_assert!((0.0..=g / 2.0 + 1e-9).contains(&folded));
        let (refolded, branch) = fold_wavevector(folded, g);
        prop_assert_eq!(branch, 0);
        prop_assert!((refolded - folded).abs() < 1e-12);
    }

    #[test]
    fn counts_csv_roundtrip(
        records in proptest::collection::vec(
            (
                -360.0..720.0f64,
                -360.0..720.0f64,
                1e-6..1e5f64,
                0u64..u64::MAX / 2,
            )
                .prop_map(|(alpha_deg, beta_deg, time_s, counts)| CountRecord {
                    alpha_deg,
                    beta_deg,
                    time_s,
                    counts,
                }),
            1..40,
        )
    ) {
        let text = write_counts_csv(&records);
        let parsed = parse_counts_csv(text.as_bytes()).unwrap();
        prop_assert_eq!(parsed, records);
    }

    #[test]
    fn canonical_angles_live_in_half_turn(alpha in -1e3..1e3f64, beta in -1e3..1e3f64) {
        let canonical = PolarizerPair::new(alpha, beta).canonical();
        prop_assert!((0.0..std::f64::consts::PI).contains(&canonical.alpha));
        prop_assert!((0.0..std::f64::consts::PI).contains(&canonical.beta));
    }

    #[test]
    fn correlation_magnitude_never_exceeds_one(
        counts in proptest::array::uniform4(0u64..1_000_000),
        a in 0.0..180.0f64,
        b in 0.0..180.0f64,
    ) {
        prop_assume!(counts.iter().sum::<u64>() > 0);
        let records = [
            CountRecord { alpha_deg: a, beta_deg: b, time_s: 1.0, counts: counts[0] },
            CountRecord { alpha_deg: a + 90.0, beta_deg: b, time_s: 1.0, counts: counts[1] },
            CountRecord { alpha_deg: a, beta_deg: b + 90.0, time_s: 1.0, counts: counts[2] },
            CountRecord { alpha_deg: a + 90.0, beta_deg: b + 90.0, time_s: 1.0, counts: counts[3] },
        ];
        let (e, sigma) = plasmon_bell::estimation::chsh_correlation(&records).unwrap();
        prop_assert!(e.abs() <= 1.0, "E = {e}");
        prop_assert!(sigma >= 0.0);
    }
}
