#![no_main]

use libfuzzer_sys::fuzz_target;
use udm_core::dataset::CategorySlices;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(slices) = CategorySlices::from_json_str(text) {
            for (_, r) in slices.iter() {
                assert!(r.start < r.end);
            }
        }
    }
});
