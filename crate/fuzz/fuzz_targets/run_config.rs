#![no_main]
use libfuzzer_sys::fuzz_target;
use phasespace_cli::manifest::{ConfigFile, RunManifest};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = ConfigFile::parse(s);
        if let Ok(m) = RunManifest::from_json(s) {
            assert_eq!(RunManifest::from_json(&m.to_json()).unwrap(), m);
        }
    }
});
