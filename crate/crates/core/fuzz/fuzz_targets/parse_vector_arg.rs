#![no_main]

use gptcap::io::{format_vector, parse_vector_arg};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(v) = parse_vector_arg(data) {
        let text = format_vector(&v.0).replace(' ', ",");
        assert_eq!(parse_vector_arg(&text).unwrap(), v);
    }
});
