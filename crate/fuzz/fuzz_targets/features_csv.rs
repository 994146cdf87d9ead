#![no_main]

use libfuzzer_sys::fuzz_target;
use udm_core::dataset::FeatureTable;

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = FeatureTable::from_reader(data) {
        // Whatever parses must write back out and parse to the same table.
        let mut out = Vec::new();
        table.write_csv(&mut out).unwrap();
        let again = FeatureTable::from_reader(out.as_slice()).unwrap();
        assert_eq!(again.len(), table.len());
        assert_eq!(again.dim(), table.dim());
    }
});
