#![no_main]

use libfuzzer_sys::fuzz_target;
use sofic::presentations::Alphabet;

// The first line declares the alphabet, the rest is the word.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let (head, word) = text.split_once('\n').unwrap_or((text, ""));
    let Ok(alphabet) = Alphabet::new(head.split_whitespace()) else { return };
    if let Ok(w) = alphabet.tokenize(word) {
        assert!(w.iter().all(|&s| (s as usize) < alphabet.len()));
        let rendered = alphabet.render(&w);
        assert_eq!(alphabet.tokenize(&rendered).ok().as_deref(), if w.is_empty() { Some(&[][..]) } else { Some(&w[..]) });
    }
});
