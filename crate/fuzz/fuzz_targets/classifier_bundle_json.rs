#![no_main]

use libfuzzer_sys::fuzz_target;
use udm_core::classifier::ClassifierBundle;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(bundle) = ClassifierBundle::from_json(text) {
        for clf in bundle.iter() {
            let p = clf.predict_proba(&vec![0.0; clf.input_dim()]).unwrap();
            assert!(p > 0.0 && p < 1.0);
        }
    }
});
