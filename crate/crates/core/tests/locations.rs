//! File, class and method counts from pairs of source trees.

use std::path::Path;

use dissect_core::corpus::{dissect_patch, ManifestEntry};
use dissect_core::record::PatchRecord;
use dissect_core::scan::LanguageConfig;

fn write(root: &Path, rel: &str, text: &str) {
    let p = root.join(rel);
    std::fs::create_dir_all(p.parent().unwrap()).unwrap();
    std::fs::write(p, text).unwrap();
}

fn dissect(files: &[(&str, &str, &str)]) -> PatchRecord {
    let dir = tempfile::tempdir().unwrap();
    let (b, f) = (dir.path().join("buggy"), dir.path().join("fixed"));
    for (rel, old, new) in files {
        write(&b, rel, old);
        write(&f, rel, new);
    }
    let entry = ManifestEntry {
        project: "Loc".into(),
        bug_id: "1".into(),
        diff: None,
        buggy: Some(b),
        fixed: Some(f),
    };
    dissect_patch(&entry, &LanguageConfig::java()).unwrap()
}

fn class_with_method(name: &str, body: &str) -> String {
    format!("package p;\n\npublic class {name} {{\n    int run(int x) {{\n        {body}\n    }}\n}}\n")
}

#[test]
fn seven_files() {
    let files: Vec<(String, String, String)> = (0..7)
        .map(|i| {
            let n = format!("C{i}");
            (format!("src/p/{n}.java"), class_with_method(&n, "return x;"), class_with_method(&n, "return x + 1;"))
        })
        .collect();
    let refs: Vec<(&str, &str, &str)> = files.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
    let r = dissect(&refs);
    assert_eq!(r.metrics.files, 7);
    assert_eq!(r.metrics.classes, 7);
    assert_eq!(r.metrics.methods, 7);
    assert_eq!(r.metrics.chunks, 7);
    assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
}

#[test]
fn field_only_change_touches_no_method() {
    let old = "package p;\n\nclass F {\n    static final int LIMIT = 10;\n\n    int get() {\n        return LIMIT;\n    }\n}\n";
    let new = old.replace("LIMIT = 10", "LIMIT = 20");
    let r = dissect(&[("p/F.java", old, &new)]);
    assert_eq!((r.metrics.files, r.metrics.classes, r.metrics.methods), (1, 1, 0));
    assert!(r.patterns.variant_names().contains(&"constChange".to_string()));
}

#[test]
fn two_classes_in_one_file() {
    let old = "package p;\n\nclass A {\n    void a() {\n        f(1);\n    }\n}\n\nclass B {\n    void b() {\n        g(1);\n    }\n}\n";
    let new = old.replace("f(1)", "f(2)").replace("g(1)", "g(2)");
    let r = dissect(&[("p/A.java", old, &new)]);
    assert_eq!((r.metrics.files, r.metrics.classes, r.metrics.methods), (1, 2, 2));
    assert_eq!(r.metrics.chunks, 2);
    // two closers and two headers lie between the calls, the blank line does not count
    assert_eq!(r.metrics.spreading, 4);
}

#[test]
fn comments_between_chunks_do_not_spread() {
    let old = "class A {\n    void a() {\n        f(1);\n        // note\n\n        /* block\n           comment */\n        g(1);\n    }\n}\n";
    let new = old.replace("f(1)", "f(2)").replace("g(1)", "g(2)");
    let r = dissect(&[("A.java", old, &new)]);
    assert_eq!(r.metrics.chunks, 2);
    assert_eq!(r.metrics.spreading, 0);
}
