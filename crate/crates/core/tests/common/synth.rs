//! Synthetic patches and the property checks shared by the property suite
//! and the acceptance run.

use dissect_core::context::PatchContext;
use dissect_core::corpus::dissect_diff;
use dissect_core::diff::{detect_chunks, diff_file_pair, parse_unified_diff, PatchDiff};
use dissect_core::metrics::{chunk_spreading, size_metrics, PatchMetrics};
use dissect_core::record::{parse_reference_json, PatchRecord, RecordsDocument};
use dissect_core::scan::LanguageConfig;
use dissect_core::stats::percentile_table;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Op {
    Ctx,
    Add,
    Rem,
}

pub fn ops() -> impl Strategy<Value = Vec<Op>> {
    proptest::collection::vec(prop_oneof![2 => Just(Op::Ctx), 1 => Just(Op::Add), 1 => Just(Op::Rem)], 1..40)
}

/// Unified diff text of one file with a single hunk made of `ops`; every
/// line is a distinct code line.
pub fn diff_text(ops: &[Op]) -> String {
    let old_len = ops.iter().filter(|o| **o != Op::Add).count();
    let new_len = ops.iter().filter(|o| **o != Op::Rem).count();
    let mut s = format!("--- a/A.java\n+++ b/A.java\n@@ -1,{old_len} +1,{new_len} @@\n");
    for (i, o) in ops.iter().enumerate() {
        let c = match o {
            Op::Ctx => ' ',
            Op::Add => '+',
            Op::Rem => '-',
        };
        s.push_str(&format!("{c}s{i}();\n"));
    }
    s
}

pub fn java() -> LanguageConfig {
    LanguageConfig::java()
}

/// Record of a one-file patch with both full texts available.
pub fn record_of(old: &str, new: &str) -> PatchRecord {
    let fd = diff_file_pair("p/A.java", old, new, 3);
    let patch = PatchDiff {
        file_diffs: vec![fd],
        ..Default::default()
    };
    let dir = tempfile::tempdir().unwrap();
    for (side, text) in [("b", old), ("f", new)] {
        std::fs::create_dir_all(dir.path().join(side).join("p")).unwrap();
        std::fs::write(dir.path().join(side).join("p/A.java"), text).unwrap();
    }
    let (b, f) = (dir.path().join("b"), dir.path().join("f"));
    dissect_diff("Synth", "0", &patch, (Some(&b), Some(&f)), &java())
}

// Statement templates for synthetic method bodies; each entry is one
// balanced group of lines.
pub const BLOCKS: [&[&str]; 10] = [
    &["x = foo(a);"],
    &["bar(b, c);"],
    &["int y = 3;"],
    &["if (a == null) {", "    return;", "}"],
    &["if (b > 2) {", "    count++;", "} else {", "    count--;", "}"],
    &["for (int i = 0; i < n; i++) {", "    sum += i;", "}"],
    &["try {", "    load();", "} catch (IOException e) {", "    log(e);", "}"],
    &["throw new IllegalStateException(\"x\");"],
    &["list.add(new Item(x));"],
    &["return total;"],
];

/// A class with one method whose body is `lines`.
pub fn body(lines: &[String]) -> String {
    let mut s = String::from("package p;\n\nclass A {\n    void run() {\n");
    for l in lines {
        s.push_str("        ");
        s.push_str(l);
        s.push('\n');
    }
    s.push_str("    }\n}\n");
    s
}

pub fn base_lines(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("step{i}(state);")).collect()
}

/// Base body with template blocks `(position, block)` inserted.
pub fn with_insertions(n: usize, inserts: &[(usize, usize)]) -> Vec<String> {
    let mut out = Vec::new();
    for (i, l) in base_lines(n).into_iter().enumerate() {
        for &(pos, b) in inserts {
            if pos % (n + 1) == i {
                out.extend(BLOCKS[b % BLOCKS.len()].iter().map(|s| s.to_string()));
            }
        }
        out.push(l);
    }
    out
}

pub fn check_conservation(ops: &[Op]) -> Result<(), TestCaseError> {
    let p = parse_unified_diff(&diff_text(ops)).unwrap();
    let m = size_metrics(&p);
    let raw_added = ops.iter().filter(|o| **o == Op::Add).count();
    let raw_removed = ops.iter().filter(|o| **o == Op::Rem).count();
    prop_assert_eq!(raw_added, m.modified + m.added);
    prop_assert_eq!(raw_removed, m.modified + m.removed);
    prop_assert_eq!(m.patch_size, m.added + m.removed + m.modified);
    Ok(())
}

pub fn check_chunk_partition(ops: &[Op]) -> Result<(), TestCaseError> {
    let p = parse_unified_diff(&diff_text(ops)).unwrap();
    for f in &p.file_diffs {
        let chunks = detect_chunks(f);
        let flat: Vec<_> = chunks.iter().flat_map(|c| c.lines.clone()).collect();
        prop_assert_eq!(&flat, &f.changed_lines());
        prop_assert!(chunks.iter().all(|c| !c.lines.is_empty()));
    }
    // maximal: one chunk per run of changed lines
    let runs = ops
        .iter()
        .enumerate()
        .filter(|&(i, o)| *o != Op::Ctx && (i == 0 || ops[i - 1] == Op::Ctx))
        .count();
    let total: usize = p.file_diffs.iter().map(|f| detect_chunks(f).len()).sum();
    prop_assert_eq!(total, runs);
    Ok(())
}

pub fn check_spreading_iff_one_chunk(ops: &[Op]) -> Result<(), TestCaseError> {
    let p = parse_unified_diff(&diff_text(ops)).unwrap();
    let ctx = PatchContext::from_diff(&p, &java());
    let s = chunk_spreading(&ctx).value;
    let chunks: usize = p.file_diffs.iter().map(|f| detect_chunks(f).len()).sum();
    prop_assert_eq!(s == 0, chunks <= 1);
    Ok(())
}

pub fn noise_case() -> impl Strategy<Value = (usize, usize, usize, Vec<usize>)> {
    (6usize..20, 0usize..20, 2usize..5, proptest::collection::vec(0usize..4, 1..5))
}

/// Blank and comment lines inserted between two chunks change neither
/// the chunk count nor the spreading.
pub fn check_noise_invariance((n, a, gap, noise): (usize, usize, usize, Vec<usize>)) -> Result<(), TestCaseError> {
    let a = a % (n - gap);
    let b = a + gap;
    let old = base_lines(n);
    let mut new = old.clone();
    new[a] = format!("changedA{a}(state);");
    new[b] = format!("changedB{b}(state);");
    let metrics = |old: &[String], new: &[String]| record_of(&body(old), &body(new)).metrics;
    let before = metrics(&old, &new);
    let junk: Vec<&str> = noise.iter().map(|k| ["", "// note", "/* block */", "/** doc */"][*k]).collect();
    let insert = |v: &[String]| {
        let mut v = v.to_vec();
        for (i, j) in junk.iter().enumerate() {
            v.insert(a + 1 + i, j.to_string());
        }
        v
    };
    let after = metrics(&insert(&old), &insert(&new));
    prop_assert_eq!(before.chunks, 2);
    prop_assert_eq!(before.spreading, gap - 1);
    prop_assert_eq!(after.chunks, before.chunks);
    prop_assert_eq!(after.spreading, before.spreading);
    Ok(())
}

pub fn shuffled_sizes() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    proptest::collection::vec(0usize..500, 1..60).prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle()))
}

pub fn check_percentile_permutation((a, b): (Vec<usize>, Vec<usize>)) -> Result<(), TestCaseError> {
    let table = |xs: &[usize]| {
        let ms: Vec<PatchMetrics> = xs
            .iter()
            .map(|&x| PatchMetrics {
                patch_size: x,
                spreading: x * 7 % 13,
                ..Default::default()
            })
            .collect();
        percentile_table(&ms).unwrap()
    };
    prop_assert_eq!(table(&a), table(&b));
    Ok(())
}

pub fn edit_case() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, usize)> {
    (2usize..6, proptest::collection::vec((0usize..9, 0usize..10), 0..3), 0usize..6)
}

pub fn edited_record((n, inserts, edit): (usize, Vec<(usize, usize)>, usize)) -> PatchRecord {
    let old_lines = base_lines(n);
    let mut new_lines = with_insertions(n, &inserts);
    let last = new_lines.len() - 1;
    new_lines[edit.min(last)] = "changed(state, 1);".into();
    record_of(&body(&old_lines), &body(&new_lines))
}

/// Emitting, loading and emitting again gives the same bytes.
pub fn check_round_trip(records: Vec<PatchRecord>) -> Result<(), TestCaseError> {
    let doc = RecordsDocument::new(records, Vec::new());
    let text = doc.to_json();
    let back = parse_reference_json(&text).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&back, &doc);
    prop_assert_eq!(back.to_json(), text);
    Ok(())
}
