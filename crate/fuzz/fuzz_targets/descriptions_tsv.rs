#![no_main]

use libfuzzer_sys::fuzz_target;
use udm_core::dataset::{build_vocabulary, DescriptionCorpus, Language};

fuzz_target!(|data: &[u8]| {
    let Ok(corpus) = DescriptionCorpus::from_bytes(data, &Language::default()) else {
        return;
    };
    let vocab = build_vocabulary(&corpus, 1, &Default::default()).unwrap();
    for c in vocab.concepts() {
        assert!(!c.positive_objects.is_empty());
    }
});
