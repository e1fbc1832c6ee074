#![no_main]

use libfuzzer_sys::fuzz_target;

// The counts parser must never panic on arbitrary bytes; a successful parse
// must satisfy the schema invariants it promises.
fuzz_target!(|data: &[u8]| {
    if let Ok(records) = plasmon_bell::io::parse_counts_csv(data) {
        assert!(!records.is_empty());
        for r in &records {
            assert!(r.alpha_deg.is_finite());
            assert!(r.beta_deg.is_finite());
            assert!(r.time_s > 0.0);
        }
    }
});
