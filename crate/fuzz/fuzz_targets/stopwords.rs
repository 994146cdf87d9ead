#![no_main]

use libfuzzer_sys::fuzz_target;
use udm_core::dataset::{parse_stopwords, Language};

fuzz_target!(|data: &[u8]| {
    let _ = parse_stopwords(data, &Language::new("es"));
});
