#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(spectrum) = plasmon_bell::io::parse_spectrum_csv(data) {
        // Drive the resonance fit on parsed spectra of sane size; it may
        // reject the data but must not panic or hang.
        if spectrum.len() <= 2048 {
            let _ = plasmon_bell::estimation::lorentzian_lifetime(&spectrum);
        }
    }
});
