#![no_main]

use libfuzzer_sys::fuzz_target;
use svcnet::model::Collection;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(coll) = Collection::from_json(text) {
        let again = Collection::from_json(&coll.to_json()).expect("serialized collection re-parses");
        assert_eq!(again.to_json(), coll.to_json());
    }
});
