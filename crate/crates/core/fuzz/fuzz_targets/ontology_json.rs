#![no_main]

use libfuzzer_sys::fuzz_target;
use svcnet::ontology::Ontology;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ont) = Ontology::from_json(text) {
        let again = Ontology::from_json(&ont.to_json()).expect("serialized ontology re-parses");
        assert_eq!(again.to_json(), ont.to_json());
    }
});
