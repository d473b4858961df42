//! End-to-end runs of the `dissect` binary.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dissect"))
}

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/corpus")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn corpus_run_writes_records_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("records.json");
    let reports = dir.path().join("reports");
    let manifest = corpus().join("manifest.json");
    let o = run(&["run", path(&manifest), "--out", path(&out), "--reports", path(&reports), "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let records = doc["records"].as_array().unwrap();
    assert_eq!(records.len(), 33);
    assert_eq!(doc["schemaVersion"], 1);
    assert!(doc["aggregates"]["summary"].is_object());
    assert!(doc["aggregates"]["venn"].is_object());
    // sorted by project, then numeric bug id
    let ids: Vec<(String, String)> = records
        .iter()
        .map(|r| (r["project"].as_str().unwrap().to_string(), r["bugId"].as_str().unwrap().to_string()))
        .collect();
    assert_eq!(ids[0], ("Chart".into(), "1".into()));
    assert_eq!(ids[1], ("Chart".into(), "5".into()));
    let c40 = records.iter().find(|r| r["project"] == "Closure" && r["bugId"] == "40").unwrap();
    assert_eq!(c40["metrics"]["patchSize"], 3);
    assert_eq!(c40["changeProfile"], "RM");
    for f in ["table2.txt", "table2.csv", "venn.csv", "rank-actions.txt", "rank-patterns.csv", "distributions.txt", "composition.csv", "aggregates.json"] {
        assert!(reports.join(f).is_file(), "missing report {f}");
    }
}

#[test]
fn runs_are_byte_identical_across_job_counts() {
    let manifest = corpus().join("manifest.json");
    let a = run(&["run", path(&manifest), "--jobs", "1"]);
    let b = run(&["run", path(&manifest), "--jobs", "8"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn empty_manifest_omits_aggregates() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    std::fs::write(&m, "[]").unwrap();
    let o = run(&["run", path(&m)]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    assert_eq!(doc["records"].as_array().unwrap().len(), 0);
    assert!(doc.get("aggregates").is_none());
}

#[test]
fn unreadable_entry_is_isolated() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    let c = corpus();
    let manifest = serde_json::json!([
        {"project": "Closure", "bugId": "40", "diff": c.join("Closure-40.diff")},
        {"project": "Chart", "bugId": "1", "diff": c.join("Chart-1.diff")},
        {"project": "Gone", "bugId": "1", "diff": dir.path().join("missing.diff")},
    ]);
    std::fs::write(&m, manifest.to_string()).unwrap();
    let o = run(&["run", path(&m)]);
    assert_eq!(o.status.code(), Some(1));
    let doc = json(&o);
    assert_eq!(doc["records"].as_array().unwrap().len(), 2);
    assert_eq!(doc["errors"][0]["project"], "Gone");

    // the surviving records equal those of a clean run
    let clean = dir.path().join("clean.json");
    std::fs::write(&clean, serde_json::json!([manifest[0], manifest[1]]).to_string()).unwrap();
    let o2 = run(&["run", path(&clean)]);
    assert_eq!(json(&o2)["records"], doc["records"]);
}

#[test]
fn manifest_and_usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    std::fs::write(&m, "{not json").unwrap();
    assert_eq!(run(&["run", path(&m)]).status.code(), Some(2));
    assert_eq!(run(&["run", path(&dir.path().join("absent.json"))]).status.code(), Some(2));
    std::fs::write(&m, r#"[{"project": "A", "bugId": 1, "diff": "x"}, {"project": "A", "bugId": "1", "diff": "y"}]"#).unwrap();
    assert_eq!(run(&["run", path(&m)]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["one"]).status.code(), Some(2));
}

#[test]
fn one_diff() {
    let o = run(&["one", "--diff", path(&corpus().join("Chart-11.diff")), "--project", "Chart", "--bug-id", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["bugId"], "11");
    assert_eq!(r["actions"][0]["acronym"], "varM");
    let variants: Vec<&str> = r["patterns"]["tags"].as_array().unwrap().iter().map(|t| t["variant"].as_str().unwrap()).collect();
    assert!(variants.contains(&"wrongVarRef"));
}

#[test]
fn one_tree_pair() {
    let dir = tempfile::tempdir().unwrap();
    let (b, f) = (dir.path().join("b"), dir.path().join("f"));
    std::fs::create_dir_all(&b).unwrap();
    std::fs::create_dir_all(&f).unwrap();
    let old = "class A {\n    void f(Object o) {\n        o.run();\n    }\n}\n";
    std::fs::write(b.join("A.java"), old).unwrap();
    std::fs::write(f.join("A.java"), old).unwrap();
    let o = run(&["one", "--buggy", path(&b), "--fixed", path(&f)]);
    assert_eq!(o.status.code(), Some(1), "identical trees have nothing to dissect");

    let new = old.replace("        o.run();\n", "        if (o != null) {\n            o.run();\n        }\n");
    std::fs::write(f.join("A.java"), new).unwrap();
    let o = run(&["one", "--buggy", path(&b), "--fixed", path(&f)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert!(r["diagnostics"].as_array().unwrap().is_empty());
    let variants: Vec<&str> = r["patterns"]["tags"].as_array().unwrap().iter().map(|t| t["variant"].as_str().unwrap()).collect();
    assert!(variants.contains(&"wrapsIf") && variants.contains(&"missNullCheckN"), "{variants:?}");
}

fn records_file(dir: &Path) -> PathBuf {
    let out = dir.join("records.json");
    let o = run(&["run", path(&corpus().join("manifest.json")), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    out
}

#[test]
fn stats_sections() {
    let dir = tempfile::tempdir().unwrap();
    let rec = records_file(dir.path());
    let o = run(&["stats", path(&rec), "--table2", "--venn"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("patchSize"), "{text}");
    assert!(text.contains("total"), "{text}");
    assert!(!text.contains("singleLine"));

    let o = run(&["stats", path(&rec), "--rank-patterns", "--csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("pattern,patches\nsingleLine,20\n"), "{text}");

    let o = run(&["stats", path(&rec)]);
    let text = String::from_utf8(o.stdout).unwrap();
    for s in ["patchSize", "ARM", "mcA", "conditionalBlock", "actionsPerPatch"] {
        assert!(text.contains(s), "{s} missing from\n{text}");
    }

    let o = run(&["stats", path(&rec), "--json"]);
    assert_eq!(json(&o)["venn"]["total"], 33);
}

#[test]
fn stats_on_published_layout() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("published.json");
    std::fs::write(
        &p,
        r#"[{"bugId": 3, "project": "Time", "metrics": {"addedLines": 2, "removedLines": 0, "modifiedLines": 1, "sizeInLines": 3, "chunks": 1, "spreadingCodeOnly": 0, "files": 1, "classes": 1, "methods": 1}, "repairActions": ["condBranIfAdd"], "repairPatterns": ["wrapsIf"]}]"#,
    )
    .unwrap();
    let o = run(&["stats", path(&p), "--rank-actions"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8(o.stdout).unwrap().contains("cndA"));

    std::fs::write(&p, r#"[{"bugId": 3, "project": "Time", "mystery": 1}]"#).unwrap();
    let o = run(&["stats", path(&p)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`mystery`"));

    std::fs::write(&p, r#"[{"bugId": 3, "proj"#).unwrap();
    assert_eq!(run(&["stats", path(&p)]).status.code(), Some(2));
}

fn http_get(addr: &str, target: &str) -> (String, String) {
    let mut s = TcpStream::connect(addr).unwrap();
    write!(s, "GET {target} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n").unwrap();
    let mut buf = String::new();
    s.read_to_string(&mut buf).unwrap();
    let (head, body) = buf.split_once("\r\n\r\n").unwrap();
    (head.to_string(), body.to_string())
}

#[test]
fn serve_records_and_static_files() {
    let dir = tempfile::tempdir().unwrap();
    let rec = records_file(dir.path());
    let site = dir.path().join("site");
    std::fs::create_dir_all(&site).unwrap();
    std::fs::write(site.join("index.html"), "<html>explorer</html>").unwrap();

    let mut child = bin()
        .args(["serve", path(&rec), "--port", "0", "--static", path(&site)])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().strip_prefix("listening on http://").unwrap_or_else(|| panic!("{line}")).to_string();

    let (head, body) = http_get(&addr, "/records.json");
    assert!(head.starts_with("HTTP/1.1 200"), "{head}");
    assert!(head.to_ascii_lowercase().contains("application/json"));
    let doc: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(doc["records"].as_array().unwrap().len(), 33);

    let (head, body) = http_get(&addr, "/");
    assert!(head.starts_with("HTTP/1.1 200"), "{head}");
    assert_eq!(body, "<html>explorer</html>");
    let (head, _) = http_get(&addr, "/nothing-here.js");
    assert!(head.starts_with("HTTP/1.1 404"), "{head}");

    child.kill().unwrap();
    child.wait().unwrap();
}
