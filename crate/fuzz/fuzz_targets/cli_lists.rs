#![no_main]
use libfuzzer_sys::fuzz_target;
use phasespace::PolynomialPotential;
use phasespace_cli::lists::{parse_coefficients, parse_grid};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(g) = parse_grid(s) {
            let _ = g.to_grid();
        }
        if let Ok(c) = parse_coefficients(s) {
            let _ = PolynomialPotential::new(c.0);
        }
    }
});
