#![no_main]

use libfuzzer_sys::fuzz_target;
use sofic::codec::parse_embedding_code;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(code) = parse_embedding_code(text) {
        let again = parse_embedding_code(&code.to_json()).expect("round trip");
        assert_eq!(again.to_json(), code.to_json());
    }
});
