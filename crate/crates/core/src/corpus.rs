//! Manifests and the per-entry pipeline: diff, scan, metrics, actions and
//! patterns, run over a corpus in parallel.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Deserializer};
use thiserror::Error;
use walkdir::WalkDir;

use crate::actions::detect_actions_in;
use crate::analysis::PatchAnalysis;
use crate::context::{Diagnostic, PatchContext};
use crate::diff::{diff_file_pair, parse_unified_diff, render_unified, FileDiff, PatchDiff};
use crate::metrics::{change_profile, compute_metrics};
use crate::patterns::{detect_patterns_in, PatternConfig};
use crate::record::{is_duplicate, EntryError, PatchRecord, RecordsDocument, SCHEMA_VERSION};
use crate::scan::LanguageConfig;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid manifest: {0}")]
    Json(#[from] serde_json::Error),
    #[error("duplicate entry {project}-{bug_id}")]
    Duplicate { project: String, bug_id: String },
    #[error("entry {project}-{bug_id} needs a diff or both buggy and fixed roots")]
    NoInput { project: String, bug_id: String },
}

fn id_string<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Id {
        S(String),
        N(u64),
    }
    Ok(match Id::deserialize(d)? {
        Id::S(s) => s,
        Id::N(n) => n.to_string(),
    })
}

/// One patch of a corpus: a diff file, a pair of source trees, or both
/// (the trees then only supply full file texts).
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ManifestEntry {
    pub project: String,
    #[serde(deserialize_with = "id_string")]
    pub bug_id: String,
    #[serde(default)]
    pub diff: Option<PathBuf>,
    #[serde(default)]
    pub buggy: Option<PathBuf>,
    #[serde(default)]
    pub fixed: Option<PathBuf>,
}

impl ManifestEntry {
    pub fn id(&self) -> String {
        format!("{}-{}", self.project, self.bug_id)
    }

    fn resolve(&mut self, base: &Path) {
        for p in [&mut self.diff, &mut self.buggy, &mut self.fixed].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    fn error(&self, message: impl Into<String>) -> EntryError {
        EntryError {
            project: self.project.clone(),
            bug_id: self.bug_id.clone(),
            message: message.into(),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ManifestRepr {
    List(Vec<ManifestEntry>),
    Full(FullManifest),
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct FullManifest {
    #[serde(default)]
    source_extension: Option<String>,
    entries: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
    pub source_extension: String,
}

impl CorpusManifest {
    /// Parses a manifest; relative paths are taken from `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, ManifestError> {
        let (mut entries, ext) = match serde_json::from_str(text)? {
            ManifestRepr::List(e) => (e, None),
            ManifestRepr::Full(f) => (f.entries, f.source_extension),
        };
        let mut seen = HashSet::new();
        for e in &mut entries {
            if !seen.insert((e.project.clone(), e.bug_id.clone())) {
                return Err(ManifestError::Duplicate {
                    project: e.project.clone(),
                    bug_id: e.bug_id.clone(),
                });
            }
            if e.diff.is_none() && (e.buggy.is_none() || e.fixed.is_none()) {
                return Err(ManifestError::NoInput {
                    project: e.project.clone(),
                    bug_id: e.bug_id.clone(),
                });
            }
            e.resolve(base);
        }
        let ext = ext.unwrap_or_else(|| "java".into());
        Ok(CorpusManifest {
            entries,
            source_extension: format!(".{}", ext.trim_start_matches('.')),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn language(&self) -> LanguageConfig {
        LanguageConfig {
            source_extension: self.source_extension.clone(),
            ..LanguageConfig::java()
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn source_files(root: &Path, ext: &str) -> Result<BTreeSet<String>, String> {
    if !root.is_dir() {
        return Err(format!("not a directory: {}", root.display()));
    }
    let ext = ext.trim_start_matches('.');
    let mut out = BTreeSet::new();
    for e in WalkDir::new(root).sort_by_file_name() {
        let e = e.map_err(|e| e.to_string())?;
        if e.file_type().is_file() && e.path().extension().is_some_and(|x| x.eq_ignore_ascii_case(ext)) {
            let rel = e.path().strip_prefix(root).expect("walk stays under root");
            out.insert(rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/"));
        }
    }
    Ok(out)
}

/// Line diff of every source file of two trees.
pub fn diff_trees(buggy: &Path, fixed: &Path, ext: &str) -> Result<PatchDiff, String> {
    let old = source_files(buggy, ext)?;
    let new = source_files(fixed, ext)?;
    let mut patch = PatchDiff::default();
    for rel in old.union(&new) {
        let o = if old.contains(rel) { read(&buggy.join(rel))? } else { String::new() };
        let n = if new.contains(rel) { read(&fixed.join(rel))? } else { String::new() };
        let fd = diff_file_pair(rel, &o, &n, 3);
        if !fd.hunks.is_empty() {
            patch.file_diffs.push(fd);
        }
    }
    Ok(patch)
}

fn tree_text(root: Option<&Path>, rel: &str) -> Option<String> {
    let p = root?.join(rel);
    std::fs::read_to_string(p).ok()
}

/// Record of a parsed patch; `roots` supply full texts when present.
pub fn dissect_diff(
    project: &str,
    bug_id: &str,
    patch: &PatchDiff,
    roots: (Option<&Path>, Option<&Path>),
    lang: &LanguageConfig,
) -> PatchRecord {
    let patch = patch.source_only(&lang.source_extension);
    let ctx = PatchContext::with_sources(&patch, lang, |fd: &FileDiff| {
        (tree_text(roots.0, &fd.old_path), tree_text(roots.1, &fd.path))
    });
    let (metrics, metric_diags) = compute_metrics(&patch, &ctx);
    let pa = PatchAnalysis::new(&ctx);
    let actions = detect_actions_in(&pa);
    let patterns = detect_patterns_in(&pa, lang, &PatternConfig::default());
    let mut diagnostics: Vec<Diagnostic> = ctx.files.iter().flat_map(|f| f.diagnostics()).chain(metric_diags).collect();
    diagnostics.extend(patch.warnings.iter().map(|w| Diagnostic::SkippedFile {
        file: String::new(),
        reason: w.clone(),
    }));
    diagnostics.sort();
    diagnostics.dedup();
    PatchRecord {
        schema_version: SCHEMA_VERSION,
        project: project.to_string(),
        bug_id: bug_id.to_string(),
        change_profile: change_profile(&metrics.size()),
        metrics,
        actions,
        patterns,
        diagnostics,
        diff: Some(patch.file_diffs.iter().map(render_unified).collect()),
    }
}

/// Runs the whole pipeline for one entry.
pub fn dissect_patch(entry: &ManifestEntry, lang: &LanguageConfig) -> Result<PatchRecord, EntryError> {
    let patch = match (&entry.diff, &entry.buggy, &entry.fixed) {
        (Some(d), _, _) => {
            let text = read(d).map_err(|m| entry.error(m))?;
            parse_unified_diff(&text).map_err(|e| entry.error(format!("{}: {e}", d.display())))?
        }
        (None, Some(b), Some(f)) => diff_trees(b, f, &lang.source_extension).map_err(|m| entry.error(m))?,
        _ => return Err(entry.error("no input")),
    };
    if patch.source_only(&lang.source_extension).file_diffs.is_empty() {
        return Err(entry.error("empty diff: no source file changed"));
    }
    Ok(dissect_diff(
        &entry.project,
        &entry.bug_id,
        &patch,
        (entry.buggy.as_deref(), entry.fixed.as_deref()),
        lang,
    ))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub dedup: bool,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
}

/// Dissects every entry; results are merged in manifest order whatever
/// the completion order, then sorted.
pub fn dissect_corpus(manifest: &CorpusManifest, opts: RunOptions) -> RecordsDocument {
    let lang = manifest.language();
    let entries: Vec<&ManifestEntry> = manifest
        .entries
        .iter()
        .filter(|e| !(opts.dedup && is_duplicate(&e.project, &e.bug_id)))
        .collect();
    let work = || -> Vec<Result<PatchRecord, EntryError>> {
        entries.par_iter().map(|e| dissect_patch(e, &lang)).collect()
    };
    let results = match rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build() {
        Ok(pool) => pool.install(work),
        Err(e) => {
            log::warn!("thread pool unavailable ({e}), running on the global pool");
            work()
        }
    };
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => {
                log::warn!("{}-{}: {}", e.project, e.bug_id, e.message);
                errors.push(e);
            }
        }
    }
    RecordsDocument::new(records, errors)
}

/// Records keyed by id, for lookups in tests and tools.
pub fn by_id(doc: &RecordsDocument) -> BTreeMap<String, &PatchRecord> {
    doc.records.iter().map(|r| (r.id(), r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_forms() {
        let list = r#"[{"project": "Chart", "bugId": 1, "diff": "a.diff"}]"#;
        let m = CorpusManifest::parse(list, Path::new("/base")).unwrap();
        assert_eq!(m.entries[0].bug_id, "1");
        assert_eq!(m.entries[0].diff.as_deref(), Some(Path::new("/base/a.diff")));
        assert_eq!(m.source_extension, ".java");

        let full = r#"{"sourceExtension": "kt", "entries": []}"#;
        assert_eq!(CorpusManifest::parse(full, Path::new(".")).unwrap().source_extension, ".kt");
    }

    #[test]
    fn manifest_errors() {
        let dup = r#"[{"project": "A", "bugId": "1", "diff": "x"}, {"project": "A", "bugId": 1, "diff": "y"}]"#;
        assert!(matches!(CorpusManifest::parse(dup, Path::new(".")), Err(ManifestError::Duplicate { .. })));
        let none = r#"[{"project": "A", "bugId": "1", "buggy": "x"}]"#;
        assert!(matches!(CorpusManifest::parse(none, Path::new(".")), Err(ManifestError::NoInput { .. })));
        assert!(CorpusManifest::parse("[{", Path::new(".")).is_err());
    }

    #[test]
    fn identical_trees_are_an_error() {
        let dir = tempfile::tempdir().unwrap();
        for side in ["b", "f"] {
            std::fs::create_dir_all(dir.path().join(side).join("p")).unwrap();
            std::fs::write(dir.path().join(side).join("p/A.java"), "class A {}\n").unwrap();
        }
        let entry = ManifestEntry {
            project: "X".into(),
            bug_id: "1".into(),
            diff: None,
            buggy: Some(dir.path().join("b")),
            fixed: Some(dir.path().join("f")),
        };
        let e = dissect_patch(&entry, &LanguageConfig::java()).unwrap_err();
        assert!(e.message.contains("empty diff"));
    }

    #[test]
    fn tree_pair_is_diffed() {
        let dir = tempfile::tempdir().unwrap();
        let b = dir.path().join("b");
        let f = dir.path().join("f");
        std::fs::create_dir_all(b.join("p")).unwrap();
        std::fs::create_dir_all(f.join("p")).unwrap();
        let old = "class A {\n  int f(int x) {\n    return x;\n  }\n}\n";
        std::fs::write(b.join("p/A.java"), old).unwrap();
        std::fs::write(f.join("p/A.java"), old.replace("return x;", "return x + 1;")).unwrap();
        std::fs::write(f.join("p/notes.txt"), "ignored").unwrap();
        let entry = ManifestEntry {
            project: "X".into(),
            bug_id: "2".into(),
            diff: None,
            buggy: Some(b),
            fixed: Some(f),
        };
        let r = dissect_patch(&entry, &LanguageConfig::java()).unwrap();
        assert_eq!((r.metrics.modified, r.metrics.patch_size, r.metrics.methods), (1, 1, 1));
        assert!(r.actions.contains("retM"), "{:?}", r.actions.acronyms());
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
    }
}
