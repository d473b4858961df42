//! Unified diffs: parsing, generation from file pairs, line classification
//! and chunk detection.

mod chunk;
mod classify;
mod pair;
mod parse;

use serde::{Deserialize, Serialize};

pub use chunk::detect_chunks;
pub use classify::classify_lines;
pub use pair::{diff_file_pair, render_unified};
pub use parse::{parse_unified_diff, DiffError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum LineOp {
    Context,
    Added,
    Removed,
}

/// One raw line of a hunk body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HunkLine {
    pub op: LineOp,
    pub old_line: Option<u32>,
    pub new_line: Option<u32>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hunk {
    pub old_start: u32,
    pub old_len: u32,
    pub new_start: u32,
    pub new_len: u32,
    /// Text after the second `@@`, usually an enclosing declaration.
    pub section: String,
    pub lines: Vec<HunkLine>,
}

impl Hunk {
    /// First old line number at or after the hunk position. With an empty
    /// old side, git writes the line *before* the insertion point.
    pub fn old_cursor(&self) -> u32 {
        if self.old_len == 0 {
            self.old_start + 1
        } else {
            self.old_start
        }
    }

    pub fn new_cursor(&self) -> u32 {
        if self.new_len == 0 {
            self.new_start + 1
        } else {
            self.new_start
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ChangeKind {
    Added,
    Removed,
    Modified,
}

/// A classified changed line. MODIFIED lines carry both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChangedLine {
    pub kind: ChangeKind,
    pub old_line: Option<u32>,
    pub new_line: Option<u32>,
    pub old_text: Option<String>,
    pub new_text: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FileStatus {
    Modified,
    Added,
    Deleted,
    Renamed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDiff {
    /// Path in the fixed version (old path for deletions).
    pub path: String,
    pub old_path: String,
    pub status: FileStatus,
    pub hunks: Vec<Hunk>,
}

impl FileDiff {
    pub fn new(path: impl Into<String>) -> Self {
        let path = path.into();
        FileDiff {
            old_path: path.clone(),
            path,
            status: FileStatus::Modified,
            hunks: Vec::new(),
        }
    }

    pub fn changed_lines(&self) -> Vec<ChangedLine> {
        classify_lines(self)
    }

    pub fn has_extension(&self, ext: &str) -> bool {
        let ext = ext.trim_start_matches('.');
        let matches = |p: &str| {
            std::path::Path::new(p)
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case(ext))
        };
        matches(&self.path) || matches(&self.old_path)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchDiff {
    pub patch_id: String,
    pub file_diffs: Vec<FileDiff>,
    /// Non-fatal parse notes, e.g. skipped binary files.
    pub warnings: Vec<String>,
}

impl PatchDiff {
    /// Keeps only files whose path carries the given extension.
    pub fn source_only(&self, ext: &str) -> PatchDiff {
        PatchDiff {
            patch_id: self.patch_id.clone(),
            file_diffs: self
                .file_diffs
                .iter()
                .filter(|f| f.has_extension(ext))
                .cloned()
                .collect(),
            warnings: self.warnings.clone(),
        }
    }
}

/// A maximal run of changed lines inside one hunk.
///
/// `old_range` and `new_range` are half-open line ranges of the run in each
/// version; a pure insertion has an empty old range positioned where the
/// lines were inserted, and vice versa.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Chunk {
    pub file: String,
    pub lines: Vec<ChangedLine>,
    pub old_range: (u32, u32),
    pub new_range: (u32, u32),
}

/// Maximal runs of non-context lines in a hunk, with the old/new cursor
/// positions at the start of each run.
pub(crate) struct Run<'a> {
    pub lines: &'a [HunkLine],
    pub old_at: u32,
    pub new_at: u32,
}

pub(crate) fn change_runs(hunk: &Hunk) -> Vec<Run<'_>> {
    let mut runs = Vec::new();
    let mut old_at = hunk.old_cursor();
    let mut new_at = hunk.new_cursor();
    let mut i = 0;
    let lines = &hunk.lines;
    while i < lines.len() {
        if lines[i].op == LineOp::Context {
            old_at += 1;
            new_at += 1;
            i += 1;
            continue;
        }
        let start = i;
        let (o, n) = (old_at, new_at);
        while i < lines.len() && lines[i].op != LineOp::Context {
            match lines[i].op {
                LineOp::Removed => old_at += 1,
                LineOp::Added => new_at += 1,
                LineOp::Context => unreachable!(),
            }
            i += 1;
        }
        runs.push(Run {
            lines: &lines[start..i],
            old_at: o,
            new_at: n,
        });
    }
    runs
}
