//! Per-file view of a patch shared by metrics, actions and patterns: the
//! classified lines, both scanned sides and the old/new line mapping.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::diff::{detect_chunks, ChangeKind, ChangedLine, Chunk, FileDiff, FileStatus, LineOp, PatchDiff};
use crate::scan::{declarations_of, Declarations, LanguageConfig, SideScan, SideText};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Old,
    New,
}

/// Evidence location of a tag: a line of the buggy (old) or fixed (new)
/// version of a file.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub file: String,
    pub line: u32,
    pub side: Side,
}

/// Non-fatal observations attached to a record.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", rename_all_fields = "camelCase")]
pub enum Diagnostic {
    /// Only diff excerpts were available; masks and spans are approximate.
    MissingSources { file: String },
    UnbalancedBraces { file: String, side: Side },
    UnterminatedComment { file: String, side: Side },
    /// Some interleaving lines had no mask and were counted as code.
    SpreadingFallback { file: String },
    SkippedFile { file: String, reason: String },
}

#[derive(Debug, Clone)]
pub struct FileContext {
    pub diff: FileDiff,
    pub changed: Vec<ChangedLine>,
    pub chunks: Vec<Chunk>,
    pub old: SideScan,
    pub new: SideScan,
    pub old_decls: Declarations,
    pub new_decls: Declarations,
    pub old_changed: BTreeSet<u32>,
    pub new_changed: BTreeSet<u32>,
    /// Context lines seen in hunks, old -> new and new -> old.
    ctx_old_new: BTreeMap<u32, u32>,
    ctx_new_old: BTreeMap<u32, u32>,
    pub excerpt: bool,
}

impl FileContext {
    /// Builds the context. Missing texts fall back to the lines the hunks
    /// show; an added (deleted) file has an empty old (new) side.
    pub fn new(diff: &FileDiff, old_text: Option<&str>, new_text: Option<&str>, cfg: &LanguageConfig) -> Self {
        let changed = diff.changed_lines();
        let chunks = detect_chunks(diff);
        let mut old_ex = BTreeMap::new();
        let mut new_ex = BTreeMap::new();
        let mut ctx_old_new = BTreeMap::new();
        let mut ctx_new_old = BTreeMap::new();
        for h in &diff.hunks {
            for l in &h.lines {
                if let Some(o) = l.old_line {
                    old_ex.insert(o, l.text.clone());
                }
                if let Some(n) = l.new_line {
                    new_ex.insert(n, l.text.clone());
                }
                if let (LineOp::Context, Some(o), Some(n)) = (l.op, l.old_line, l.new_line) {
                    ctx_old_new.insert(o, n);
                    ctx_new_old.insert(n, o);
                }
            }
        }
        let side = |text: Option<&str>, ex: BTreeMap<u32, String>, empty: bool| match text {
            Some(t) => SideText::full(t),
            None if empty => SideText::full(""),
            None => SideText::excerpt(ex),
        };
        let old_side = side(old_text, old_ex, diff.status == FileStatus::Added);
        let new_side = side(new_text, new_ex, diff.status == FileStatus::Deleted);
        let excerpt = !old_side.complete || !new_side.complete;
        let old = SideScan::new(old_side, cfg);
        let new = SideScan::new(new_side, cfg);
        let old_decls = declarations_of(&old, cfg);
        let new_decls = declarations_of(&new, cfg);
        let old_changed = changed
            .iter()
            .filter(|c| c.kind != ChangeKind::Added)
            .filter_map(|c| c.old_line)
            .collect();
        let new_changed = changed
            .iter()
            .filter(|c| c.kind != ChangeKind::Removed)
            .filter_map(|c| c.new_line)
            .collect();
        FileContext {
            diff: diff.clone(),
            changed,
            chunks,
            old,
            new,
            old_decls,
            new_decls,
            old_changed,
            new_changed,
            ctx_old_new,
            ctx_new_old,
            excerpt,
        }
    }

    pub fn path(&self) -> &str {
        &self.diff.path
    }

    /// New line number of an unchanged old line.
    pub fn old_to_new(&self, o: u32) -> Option<u32> {
        if self.old_changed.contains(&o) {
            return None;
        }
        if let Some(&n) = self.ctx_old_new.get(&o) {
            return Some(n);
        }
        let mut delta: i64 = 0;
        for h in &self.diff.hunks {
            let oc = h.old_cursor();
            if o < oc {
                break;
            }
            if o < oc + h.old_len {
                return None;
            }
            delta = (h.new_cursor() + h.new_len) as i64 - (oc + h.old_len) as i64;
        }
        u32::try_from(o as i64 + delta).ok()
    }

    /// Old line number of an unchanged new line.
    pub fn new_to_old(&self, n: u32) -> Option<u32> {
        if self.new_changed.contains(&n) {
            return None;
        }
        if let Some(&o) = self.ctx_new_old.get(&n) {
            return Some(o);
        }
        let mut delta: i64 = 0;
        for h in &self.diff.hunks {
            let nc = h.new_cursor();
            if n < nc {
                break;
            }
            if n < nc + h.new_len {
                return None;
            }
            delta = (h.old_cursor() + h.old_len) as i64 - (nc + h.new_len) as i64;
        }
        u32::try_from(n as i64 + delta).ok()
    }

    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let file = self.path().to_string();
        let mut out = Vec::new();
        if self.excerpt {
            out.push(Diagnostic::MissingSources { file: file.clone() });
        }
        for (side, scan, decls) in [(Side::Old, &self.old, &self.old_decls), (Side::New, &self.new, &self.new_decls)] {
            if decls.unbalanced {
                out.push(Diagnostic::UnbalancedBraces { file: file.clone(), side });
            }
            if scan.unterminated_comment {
                out.push(Diagnostic::UnterminatedComment { file: file.clone(), side });
            }
        }
        out
    }
}

/// All source files of a patch.
#[derive(Debug, Clone)]
pub struct PatchContext {
    pub files: Vec<FileContext>,
    pub cfg: LanguageConfig,
}

impl PatchContext {
    /// Context from the diff alone.
    pub fn from_diff(patch: &PatchDiff, cfg: &LanguageConfig) -> Self {
        Self::with_sources(patch, cfg, |_| (None, None))
    }

    /// Context with full texts where `sources` can provide them.
    pub fn with_sources<F>(patch: &PatchDiff, cfg: &LanguageConfig, sources: F) -> Self
    where
        F: Fn(&FileDiff) -> (Option<String>, Option<String>),
    {
        let files = patch
            .file_diffs
            .iter()
            .map(|fd| {
                let (o, n) = sources(fd);
                FileContext::new(fd, o.as_deref(), n.as_deref(), cfg)
            })
            .collect();
        PatchContext {
            files,
            cfg: cfg.clone(),
        }
    }

    pub fn file(&self, path: &str) -> Option<&FileContext> {
        self.files.iter().find(|f| f.path() == path)
    }
}
