#![no_main]

use gptcap::gpt::ValidationOptions;
use gptcap::io::{emit_model, parse_model_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if data.len() > 4096 {
        return;
    }
    let opts = ValidationOptions {
        trials: 8,
        ..ValidationOptions::default()
    };
    if let Ok(loaded) = parse_model_json(data, &opts) {
        let again = parse_model_json(&emit_model(&loaded.model, &loaded.states), &opts).unwrap();
        assert_eq!(again.model.primal_rays(), loaded.model.primal_rays());
        assert_eq!(again.model.dual_rays(), loaded.model.dual_rays());
    }
});
