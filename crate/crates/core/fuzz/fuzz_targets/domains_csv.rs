#![no_main]

use libfuzzer_sys::fuzz_target;
use svcnet::community::parse_domains_csv;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(map) = parse_domains_csv(text) {
        assert!(map.iter().all(|(k, v)| !k.is_empty() && !v.is_empty()));
    }
});
