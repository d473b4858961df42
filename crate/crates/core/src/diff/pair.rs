use std::fmt::Write as _;

use super::{FileDiff, FileStatus, Hunk, HunkLine, LineOp};
use crate::lcs::{self, Edit};
use crate::text::split_lines;

/// Line diff of two versions of one file, with `context` lines of context
/// around each hunk (3 matches the usual tools).
pub fn diff_file_pair(path: &str, old_text: &str, new_text: &str, context: usize) -> FileDiff {
    let old: Vec<&str> = split_lines(old_text);
    let new: Vec<&str> = split_lines(new_text);
    let edits = lcs::diff(&old, &new);

    let mut fd = FileDiff::new(path);
    if old.is_empty() && !new.is_empty() {
        fd.status = FileStatus::Added;
    } else if new.is_empty() && !old.is_empty() {
        fd.status = FileStatus::Deleted;
    }

    let changes: Vec<usize> = edits
        .iter()
        .enumerate()
        .filter(|(_, e)| !matches!(e, Edit::Equal { .. }))
        .map(|(i, _)| i)
        .collect();
    if changes.is_empty() {
        return fd;
    }

    // Group change positions whose separating equal run is short enough to
    // share context.
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for &c in &changes {
        match groups.last_mut() {
            Some((_, last)) if c - *last <= 2 * context + 1 => *last = c,
            _ => groups.push((c, c)),
        }
    }

    // Old/new lines consumed before each edit index.
    let mut before = Vec::with_capacity(edits.len() + 1);
    let (mut o, mut n) = (0u32, 0u32);
    for e in &edits {
        before.push((o, n));
        match e {
            Edit::Equal { .. } => {
                o += 1;
                n += 1;
            }
            Edit::Delete { .. } => o += 1,
            Edit::Insert { .. } => n += 1,
        }
    }
    before.push((o, n));

    for (first, last) in groups {
        let start = first.saturating_sub(context);
        let end = (last + context + 1).min(edits.len());
        let mut lines = Vec::new();
        for e in &edits[start..end] {
            lines.push(match *e {
                Edit::Equal { old: i, new: j } => HunkLine {
                    op: LineOp::Context,
                    old_line: Some(i as u32 + 1),
                    new_line: Some(j as u32 + 1),
                    text: old[i].to_string(),
                },
                Edit::Delete { old: i } => HunkLine {
                    op: LineOp::Removed,
                    old_line: Some(i as u32 + 1),
                    new_line: None,
                    text: old[i].to_string(),
                },
                Edit::Insert { new: j } => HunkLine {
                    op: LineOp::Added,
                    old_line: None,
                    new_line: Some(j as u32 + 1),
                    text: new[j].to_string(),
                },
            });
        }
        let old_len = lines.iter().filter(|l| l.op != LineOp::Added).count() as u32;
        let new_len = lines.iter().filter(|l| l.op != LineOp::Removed).count() as u32;
        let (ob, nb) = before[start];
        fd.hunks.push(Hunk {
            old_start: if old_len == 0 { ob } else { ob + 1 },
            old_len,
            new_start: if new_len == 0 { nb } else { nb + 1 },
            new_len,
            section: String::new(),
            lines,
        });
    }
    fd
}

/// Renders a file diff back to unified diff text.
pub fn render_unified(fd: &FileDiff) -> String {
    let mut s = String::new();
    let old = if fd.status == FileStatus::Added { "/dev/null".to_string() } else { format!("a/{}", fd.old_path) };
    let new = if fd.status == FileStatus::Deleted { "/dev/null".to_string() } else { format!("b/{}", fd.path) };
    let _ = writeln!(s, "--- {old}");
    let _ = writeln!(s, "+++ {new}");
    for h in &fd.hunks {
        let _ = write!(s, "@@ -{},{} +{},{} @@", h.old_start, h.old_len, h.new_start, h.new_len);
        if !h.section.is_empty() {
            let _ = write!(s, " {}", h.section);
        }
        s.push('\n');
        for l in &h.lines {
            s.push(match l.op {
                LineOp::Context => ' ',
                LineOp::Added => '+',
                LineOp::Removed => '-',
            });
            s.push_str(&l.text);
            s.push('\n');
        }
    }
    s
}
