#![no_main]

use std::path::Path;

use gptcap::gpt::ValidationOptions;
use gptcap::io::parse_channel_json;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if data.len() > 4096 {
        return;
    }
    let opts = ValidationOptions {
        trials: 8,
        ..ValidationOptions::default()
    };
    // file references resolve against a directory that does not exist
    let _ = parse_channel_json(data, Path::new("/nonexistent"), &opts);
});
