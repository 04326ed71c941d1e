#![no_main]

use libfuzzer_sys::fuzz_target;
use sofic::presentations::parse_presentation;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_presentation(text) {
        // whatever parses must survive its own serialization
        let back = parse_presentation(&p.to_value().to_string()).expect("round trip");
        assert_eq!(back.to_value(), p.to_value());
    }
});
