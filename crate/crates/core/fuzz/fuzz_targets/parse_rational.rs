#![no_main]

use gptcap::rational::{format_rational, parse_rational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(r) = parse_rational(data) {
        // canonical output parses back to the same value
        assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }
});
