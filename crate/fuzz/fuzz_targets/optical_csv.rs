#![no_main]

use libfuzzer_sys::fuzz_target;
use plasmon_bell::dispersion::OpticalTable;

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = OpticalTable::parse_csv(data) {
        // Exercise the interpolation path on an accepted table.
        let (lo, hi) = table.wavelength_range();
        let _ = table.permittivity(0.5 * (lo + hi));
        let _ = table.permittivity(lo);
        let _ = table.permittivity(hi);
    }
});
