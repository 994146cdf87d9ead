#![no_main]

use libfuzzer_sys::fuzz_target;
use udm_core::vae::VaeModel;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(model) = VaeModel::from_json(text) {
        let x = vec![0.0; model.config().input_dim];
        let _ = model.embed(&x);
    }
});
