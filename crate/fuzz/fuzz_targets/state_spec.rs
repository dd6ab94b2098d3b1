#![no_main]
use libfuzzer_sys::fuzz_target;
use phasespace::{PhysicalConstants, StateSpec};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let c = PhysicalConstants::default();
        if let Ok(spec) = StateSpec::parse(s, c) {
            // the canonical form parses back to the same state
            let again = StateSpec::parse(&spec.variant.to_string(), c).unwrap();
            assert_eq!(again, spec);
        }
    }
});
