#![no_main]

use libfuzzer_sys::fuzz_target;
use udm_core::dataset::parse_concept_categories;

fuzz_target!(|data: &[u8]| {
    if let Ok(map) = parse_concept_categories(data) {
        let again = parse_concept_categories(map.to_tsv().as_bytes()).unwrap();
        assert_eq!(again.pairs().count(), map.pairs().count());
    }
});
