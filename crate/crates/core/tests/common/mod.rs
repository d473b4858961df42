#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use dissect_core::corpus::{dissect_patch, CorpusManifest};
use dissect_core::diff::{parse_unified_diff, PatchDiff};
use dissect_core::record::PatchRecord;
use serde::Deserialize;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/corpus")
}

pub fn manifest() -> CorpusManifest {
    CorpusManifest::load(&corpus_dir().join("manifest.json")).expect("fixture manifest")
}

#[derive(Debug, Deserialize)]
pub struct Expected {
    pub actions: Vec<String>,
    pub patterns: Vec<String>,
}

/// Hand-written tags per fixture id.
pub fn expected_tags() -> BTreeMap<String, Expected> {
    let text = std::fs::read_to_string(corpus_dir().join("expected_tags.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn fixture_patch(id: &str) -> PatchDiff {
    let text = std::fs::read_to_string(corpus_dir().join(format!("{id}.diff"))).unwrap();
    parse_unified_diff(&text).unwrap()
}

pub fn dissect_fixture(id: &str) -> PatchRecord {
    let m = manifest();
    let e = m.entries.iter().find(|e| e.id() == id).unwrap_or_else(|| panic!("no fixture {id}"));
    dissect_patch(e, &m.language()).unwrap()
}

pub fn sorted(mut v: Vec<String>) -> Vec<String> {
    v.sort();
    v
}
pub mod synth;
