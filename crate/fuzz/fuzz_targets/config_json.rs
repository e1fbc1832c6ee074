#![no_main]

use libfuzzer_sys::fuzz_target;
use plasmon_bell::config::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    // Parsing includes semantic validation; resolution exercises the
    // scenario-default overlay without touching the filesystem.
    if let Ok(config) = ExperimentConfig::from_slice(data) {
        let _ = config.resolve_scenario(Some(0));
        let _ = config.analysis_plan();
    }
});
