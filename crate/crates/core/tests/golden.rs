//! Fixture corpus: every mini-patch against its hand-written tags and its
//! frozen record.
//!
//! `DISSECT_BLESS=1 cargo test --test golden` rewrites the frozen records;
//! review the diff before committing.

mod common;

use std::time::Instant;

use common::*;
use dissect_core::corpus::dissect_patch;
use dissect_core::record::PatchRecord;

#[test]
fn tags_match_hand_written_expectations() {
    let start = Instant::now();
    let expected = expected_tags();
    let m = manifest();
    assert_eq!(expected.len(), m.entries.len());
    let mut wrong = Vec::new();
    for e in &m.entries {
        let r = dissect_patch(e, &m.language()).unwrap();
        let want = &expected[&e.id()];
        let got_a = sorted(r.actions.acronyms());
        let got_p = sorted(r.patterns.variant_names());
        if got_a != sorted(want.actions.clone()) || got_p != sorted(want.patterns.clone()) {
            wrong.push(format!("{}: got {got_a:?} {got_p:?}, want {:?} {:?}", e.id(), want.actions, want.patterns));
        }
    }
    assert!(wrong.is_empty(), "{} of {} fixtures disagree:\n{}", wrong.len(), m.entries.len(), wrong.join("\n"));
    assert!(start.elapsed().as_secs_f64() < 5.0, "took {:?}", start.elapsed());
}

#[test]
fn records_match_golden_files() {
    let dir = corpus_dir().join("golden");
    let bless = std::env::var_os("DISSECT_BLESS").is_some();
    if bless {
        std::fs::create_dir_all(&dir).unwrap();
    }
    let m = manifest();
    for e in &m.entries {
        let r = dissect_patch(e, &m.language()).unwrap();
        let path = dir.join(format!("{}.json", e.id()));
        if bless {
            std::fs::write(&path, serde_json::to_string_pretty(&r).unwrap() + "\n").unwrap();
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
        let golden: PatchRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(r, golden, "{} drifted from its golden record", e.id());
    }
}

#[test]
fn closure_40_listing() {
    let start = Instant::now();
    let r = dissect_fixture("Closure-40");
    let m = r.metrics;
    assert_eq!((m.added, m.removed, m.modified, m.patch_size), (0, 2, 1, 3));
    assert_eq!((m.chunks, m.spreading), (2, 2));
    assert!(r.actions.contains("mcM") && r.actions.contains("cndR"));
    let p = r.patterns.variant_names();
    assert!(p.contains(&"constChange".to_string()), "{p:?}");
    assert!(p.iter().any(|v| v.starts_with("unwrap")), "{p:?}");
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn figure_snippets() {
    let has = |id: &str, v: &str| dissect_fixture(id).patterns.variant_names().contains(&v.to_string());
    assert!(has("Time-3", "wrapsIf"));
    assert!(has("Chart-11", "wrongVarRef") && has("Chart-11", "singleLine"));
    assert!(has("Closure-13", "codeMove") && has("Closure-13", "singleLine"));
    assert_eq!(dissect_fixture("Chart-1").actions.acronyms(), ["cndM"]);
}
