//! The example files shipped in `corpus/` must match regeneration exactly.

use std::fs;
use std::path::PathBuf;

use wdk_core::corpus::{example, example_json, EXAMPLE_IDS};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

#[test]
fn shipped_corpus_files_match_regeneration() {
    for id in EXAMPLE_IDS {
        let path = corpus_dir().join(format!("{id}.json"));
        let text = fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
        let shipped: serde_json::Value = serde_json::from_str(&text).unwrap();
        let regenerated = example_json(&example(id).unwrap()).unwrap();
        assert_eq!(shipped, regenerated, "drift in {id}.json");
    }
}

#[test]
fn corpus_directory_has_exactly_the_known_examples() {
    let mut found: Vec<String> = fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    found.sort();
    let mut expected: Vec<String> = EXAMPLE_IDS.iter().map(|id| format!("{id}.json")).collect();
    expected.sort();
    assert_eq!(found, expected);
}
