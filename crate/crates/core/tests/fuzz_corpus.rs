//! Replays the checked-in fuzz corpus through the same entry points and
//! round-trip properties as the fuzz targets.

use std::path::{Path, PathBuf};

use gptcap::gpt::ValidationOptions;
use gptcap::io::{emit_model, format_vector, parse_channel_json, parse_model_json, parse_vector_arg};
use gptcap::rational::{format_rational, parse_rational};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            let text = std::fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

fn opts() -> ValidationOptions {
    ValidationOptions {
        trials: 8,
        ..ValidationOptions::default()
    }
}

#[test]
fn rational_seeds() {
    for (_, text) in seeds("parse_rational") {
        if let Ok(r) = parse_rational(&text) {
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }
    assert!(parse_rational("1/0").is_err());
}

#[test]
fn vector_seeds() {
    for (_, text) in seeds("parse_vector_arg") {
        if let Ok(v) = parse_vector_arg(&text) {
            assert_eq!(parse_vector_arg(&format_vector(&v.0).replace(' ', ",")).unwrap(), v);
        }
    }
}

#[test]
fn model_seeds() {
    let mut accepted = 0;
    for (path, text) in seeds("parse_model_json") {
        if let Ok(loaded) = parse_model_json(&text, &opts()) {
            let again = parse_model_json(&emit_model(&loaded.model, &loaded.states), &opts()).unwrap();
            assert_eq!(again.model.primal_rays(), loaded.model.primal_rays(), "{}", path.display());
            accepted += 1;
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn channel_seeds() {
    let mut accepted = 0;
    for (_, text) in seeds("parse_channel_json") {
        accepted += parse_channel_json(&text, Path::new("/nonexistent"), &opts()).is_ok() as usize;
    }
    assert!(accepted >= 3);
}
