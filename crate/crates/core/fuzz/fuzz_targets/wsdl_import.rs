#![no_main]

use libfuzzer_sys::fuzz_target;
use svcnet::model::{import_wsdl, Collection};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(imported) = import_wsdl(text, "fuzz") {
        let _ = Collection::new(imported.services);
    }
});
