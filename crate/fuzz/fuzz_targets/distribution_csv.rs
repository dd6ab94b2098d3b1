#![no_main]
use libfuzzer_sys::fuzz_target;
use phasespace_cli::csvio::{read_distribution, write_distribution};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(d) = read_distribution(s) {
            let text = write_distribution(&d);
            assert_eq!(read_distribution(&text).unwrap(), d);
        }
    }
});
