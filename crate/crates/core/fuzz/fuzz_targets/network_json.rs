#![no_main]

use libfuzzer_sys::fuzz_target;
use svcnet::network::InteractionNetwork;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(net) = InteractionNetwork::from_json(text) {
        let json = net.to_json();
        let again = InteractionNetwork::from_json(&json).expect("serialized network re-parses");
        assert_eq!(again.to_json(), json);
        let _ = net.to_tsv();
        let _ = net.to_dot();
    }
});
