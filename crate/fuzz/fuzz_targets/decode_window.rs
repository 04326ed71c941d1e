#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use sofic::codec::{decode_point, parse_embedding_code, EmbeddingCode};
use sofic::presentations::Word;

fn code() -> &'static EmbeddingCode {
    static C: OnceLock<EmbeddingCode> = OnceLock::new();
    C.get_or_init(|| parse_embedding_code(include_str!("../codes/golden_full2.json")).expect("bundled code"))
}

// Bytes are read as symbols of the full 2-shift.
fuzz_target!(|data: &[u8]| {
    let c = code();
    let y = Word::with_origin(data.iter().map(|b| u32::from(b & 1)).collect(), 0);
    if let Ok(x) = decode_point(c, &y) {
        let m = c.decode_window() as i64;
        assert_eq!((x.origin, x.end()), (m, y.end() - m));
        assert!(!x.symbols.windows(2).any(|p| p == [1, 1]), "decoded word leaves the golden mean shift");
    }
});
