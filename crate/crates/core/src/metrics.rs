//! Size, spreading and location metrics of a patch.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::context::{Diagnostic, FileContext, PatchContext};
use crate::diff::{detect_chunks, ChangeKind, PatchDiff};
use crate::scan::{lex, syntax, LineKind};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SizeMetrics {
    pub added: usize,
    pub removed: usize,
    pub modified: usize,
    pub patch_size: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PatchMetrics {
    pub added: usize,
    pub removed: usize,
    pub modified: usize,
    pub patch_size: usize,
    pub chunks: usize,
    pub spreading: usize,
    pub files: usize,
    pub classes: usize,
    pub methods: usize,
}

impl PatchMetrics {
    pub fn size(&self) -> SizeMetrics {
        SizeMetrics {
            added: self.added,
            removed: self.removed,
            modified: self.modified,
            patch_size: self.patch_size,
        }
    }

    /// Value of a metric by its serialized name.
    pub fn get(&self, name: &str) -> Option<usize> {
        Some(match name {
            "added" => self.added,
            "removed" => self.removed,
            "modified" => self.modified,
            "patchSize" => self.patch_size,
            "chunks" => self.chunks,
            "spreading" => self.spreading,
            "files" => self.files,
            "classes" => self.classes,
            "methods" => self.methods,
            _ => return None,
        })
    }

    pub const NAMES: [&'static str; 9] = [
        "added", "removed", "modified", "patchSize", "chunks", "spreading", "files", "classes", "methods",
    ];
}

/// Counts classified lines over all file diffs; a MODIFIED pair counts once.
pub fn size_metrics(patch: &PatchDiff) -> SizeMetrics {
    let mut m = SizeMetrics::default();
    for f in &patch.file_diffs {
        for l in f.changed_lines() {
            match l.kind {
                ChangeKind::Added => m.added += 1,
                ChangeKind::Removed => m.removed += 1,
                ChangeKind::Modified => m.modified += 1,
            }
        }
    }
    m.patch_size = m.added + m.removed + m.modified;
    m
}

/// Which of added/removed/modified lines a patch has.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChangeProfile {
    A,
    R,
    M,
    AR,
    AM,
    RM,
    ARM,
}

impl ChangeProfile {
    pub const ALL: [ChangeProfile; 7] = [
        ChangeProfile::A,
        ChangeProfile::R,
        ChangeProfile::M,
        ChangeProfile::AR,
        ChangeProfile::AM,
        ChangeProfile::RM,
        ChangeProfile::ARM,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChangeProfile::A => "A",
            ChangeProfile::R => "R",
            ChangeProfile::M => "M",
            ChangeProfile::AR => "AR",
            ChangeProfile::AM => "AM",
            ChangeProfile::RM => "RM",
            ChangeProfile::ARM => "ARM",
        }
    }
}

impl fmt::Display for ChangeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChangeProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ChangeProfile::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown change profile `{s}`"))
    }
}

impl Serialize for ChangeProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ChangeProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// None for an empty patch.
pub fn change_profile(m: &SizeMetrics) -> Option<ChangeProfile> {
    use ChangeProfile::*;
    match (m.added > 0, m.removed > 0, m.modified > 0) {
        (true, false, false) => Some(A),
        (false, true, false) => Some(R),
        (false, false, true) => Some(M),
        (true, true, false) => Some(AR),
        (true, false, true) => Some(AM),
        (false, true, true) => Some(RM),
        (true, true, true) => Some(ARM),
        (false, false, false) => None,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Spreading {
    pub value: usize,
    /// Files where some interleaving line had no mask and counted as code.
    pub fallback_files: Vec<String>,
}

/// Code lines strictly between consecutive chunks of each file, counted in
/// the fixed version (a removal-only chunk sits where its lines used to be).
pub fn chunk_spreading(ctx: &PatchContext) -> Spreading {
    let mut out = Spreading::default();
    for f in &ctx.files {
        let (v, fallback) = file_spreading(f);
        out.value += v;
        if fallback {
            out.fallback_files.push(f.path().to_string());
        }
    }
    out
}

fn file_spreading(f: &FileContext) -> (usize, bool) {
    let chunks = detect_chunks(&f.diff);
    let mut total = 0;
    let mut fallback = false;
    for w in chunks.windows(2) {
        for n in w[0].new_range.1..w[1].new_range.0 {
            match f.new.kind(n) {
                Some(LineKind::Code) => total += 1,
                Some(_) => {}
                None => {
                    total += 1;
                    fallback = true;
                }
            }
        }
    }
    (total, fallback)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Locations {
    pub files: usize,
    pub classes: usize,
    pub methods: usize,
}

/// Files, classes and methods holding at least one changed line. Lines are
/// attributed to the innermost enclosing class and method; added and
/// modified lines are located in the fixed version, removed lines in the
/// buggy one.
pub fn location_counts(ctx: &PatchContext) -> Locations {
    let mut files = 0;
    let mut classes = BTreeSet::new();
    let mut methods = BTreeSet::new();
    for f in &ctx.files {
        if f.changed.is_empty() {
            continue;
        }
        files += 1;
        let stem = std::path::Path::new(f.path())
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        for l in &f.changed {
            let (line, decls) = match l.kind {
                ChangeKind::Removed => (l.old_line.expect("removed line has old number"), &f.old_decls),
                _ => (l.new_line.expect("added line has new number"), &f.new_decls),
            };
            match decls.innermost_class(line) {
                Some(c) => {
                    classes.insert((f.path().to_string(), decls.class_path(c)));
                }
                // heuristic: an excerpt that shows no class header belongs to
                // the file's primary class
                None if f.excerpt => {
                    classes.insert((f.path().to_string(), stem.clone()));
                }
                None => {}
            }
            match decls.innermost_method(line) {
                Some(m) => {
                    methods.insert((f.path().to_string(), decls.method_key(m)));
                }
                None if f.excerpt => {
                    if let Some(sig) = heading_method(f, l.new_line.or(l.old_line).unwrap_or(0), &ctx.cfg) {
                        methods.insert((f.path().to_string(), format!("{stem}#{sig}")));
                    }
                }
                None => {}
            }
        }
    }
    Locations {
        files,
        classes: classes.len(),
        methods: methods.len(),
    }
}

// heuristic: in diff-only mode the hunk heading (text after the second `@@`)
// names the enclosing method when the method header itself is out of view.
fn heading_method(f: &FileContext, new_line: u32, cfg: &crate::scan::LanguageConfig) -> Option<String> {
    let h = f
        .diff
        .hunks
        .iter()
        .find(|h| h.new_cursor() <= new_line && new_line <= h.new_cursor() + h.new_len)
        .or_else(|| f.diff.hunks.first())?;
    if h.section.is_empty() {
        return None;
    }
    let toks = lex(&h.section, 1, cfg).tokens;
    let p = syntax::parse_statement(&toks, cfg);
    let m = p.elements.iter().find(|e| e.kind == syntax::ElementKind::MethodDecl)?;
    let args = m.args.as_ref()?;
    let types: Vec<String> = args
        .iter()
        .map(|a| {
            let end = a.end.saturating_sub(1).max(a.start);
            toks[a.start..end].iter().map(|t| t.text.as_str()).collect::<String>()
        })
        .collect();
    Some(format!("{}({})", m.name.clone().unwrap_or_default(), types.join(",")))
}

/// All metrics plus the diagnostics raised while computing them.
pub fn compute_metrics(patch: &PatchDiff, ctx: &PatchContext) -> (PatchMetrics, Vec<Diagnostic>) {
    let size = size_metrics(patch);
    let spreading = chunk_spreading(ctx);
    let loc = location_counts(ctx);
    let chunks = patch.file_diffs.iter().map(|f| detect_chunks(f).len()).sum();
    let diags = spreading
        .fallback_files
        .iter()
        .map(|f| Diagnostic::SpreadingFallback { file: f.clone() })
        .collect();
    (
        PatchMetrics {
            added: size.added,
            removed: size.removed,
            modified: size.modified,
            patch_size: size.patch_size,
            chunks,
            spreading: spreading.value,
            files: loc.files,
            classes: loc.classes,
            methods: loc.methods,
        },
        diags,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::parse_unified_diff;
    use crate::scan::LanguageConfig;

    fn metrics(d: &str) -> PatchMetrics {
        let p = parse_unified_diff(d).unwrap();
        let ctx = PatchContext::from_diff(&p, &LanguageConfig::java());
        compute_metrics(&p, &ctx).0
    }

    #[test]
    fn all_added_run() {
        let m = metrics("--- a/A.java\n+++ b/A.java\n@@ -1,1 +1,4 @@\n x();\n+a();\n+b();\n+c();\n");
        assert_eq!(m.size(), SizeMetrics { added: 3, removed: 0, modified: 0, patch_size: 3 });
        assert_eq!(change_profile(&m.size()), Some(ChangeProfile::A));
    }

    #[test]
    fn three_removed_two_added() {
        let m = metrics("--- a/A.java\n+++ b/A.java\n@@ -1,3 +1,2 @@\n-a\n-b\n-c\n+d\n+e\n");
        assert_eq!(m.size(), SizeMetrics { added: 0, removed: 1, modified: 2, patch_size: 3 });
    }

    #[test]
    fn comment_between_chunks_is_not_spreading() {
        let d = "--- a/A.java\n+++ b/A.java\n@@ -1,5 +1,5 @@\n-a();\n+b();\n // note\n\n x();\n-c();\n+d();\n";
        let m = metrics(d);
        assert_eq!(m.chunks, 2);
        assert_eq!(m.spreading, 1);
    }

    #[test]
    fn one_chunk_per_file_has_no_spreading() {
        let d = "--- a/A.java\n+++ b/A.java\n@@ -1 +1 @@\n-a\n+b\n--- a/B.java\n+++ b/B.java\n@@ -1 +1 @@\n-a\n+b\n";
        let m = metrics(d);
        assert_eq!((m.files, m.chunks, m.spreading), (2, 2, 0));
    }

    #[test]
    fn profiles() {
        let s = |a, r, m| SizeMetrics { added: a, removed: r, modified: m, patch_size: a + r + m };
        assert_eq!(change_profile(&s(0, 0, 4)), Some(ChangeProfile::M));
        assert_eq!(change_profile(&s(0, 2, 1)), Some(ChangeProfile::RM));
        assert_eq!(change_profile(&s(0, 0, 0)), None);
        assert_eq!("ARM".parse::<ChangeProfile>(), Ok(ChangeProfile::ARM));
    }

    #[test]
    fn excerpt_locations_fall_back_to_primary_class() {
        let d = "--- a/p/Foo.java\n+++ b/p/Foo.java\n@@ -10,3 +10,3 @@ public int size(int a) {\n   a();\n-  b();\n+  c();\n   d();\n";
        let m = metrics(d);
        assert_eq!((m.files, m.classes, m.methods), (1, 1, 1));
    }

    #[test]
    fn full_source_locations() {
        let old = "class A {\n  int f;\n  void m() {\n    x();\n  }\n  class B {\n    void n() {\n      y();\n    }\n  }\n}\n";
        let new = old.replace("x();", "x(1);").replace("y();", "y(1);").replace("int f;", "int f = 2;");
        let fd = crate::diff::diff_file_pair("A.java", old, &new, 3);
        let patch = PatchDiff { patch_id: "t".into(), file_diffs: vec![fd], warnings: vec![] };
        let ctx = PatchContext::with_sources(&patch, &LanguageConfig::java(), |_| (Some(old.to_string()), Some(new.clone())));
        let (m, diags) = compute_metrics(&patch, &ctx);
        assert!(diags.is_empty());
        assert_eq!((m.files, m.classes, m.methods), (1, 2, 2));
    }
}
