#![no_main]

use libfuzzer_sys::fuzz_target;
use udm_core::dataset::{tokenize, Language};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        for tok in tokenize(s, &Language::default()) {
            assert!(!tok.is_empty());
            assert!(!tok.chars().any(char::is_whitespace));
        }
    }
});
