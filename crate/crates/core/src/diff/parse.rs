use thiserror::Error;

use super::{FileDiff, FileStatus, Hunk, HunkLine, LineOp, PatchDiff};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffError {
    #[error("line {line}: malformed hunk header `{text}`")]
    MalformedHunkHeader { line: usize, text: String },
    #[error("line {line}: hunk body does not match its header counts")]
    HunkCountMismatch { line: usize },
    #[error("line {line}: hunk appears before any file header")]
    OrphanHunk { line: usize },
    #[error("file `{path}`: hunks overlap")]
    OverlappingHunks { path: String },
}

#[derive(Default)]
struct Pending {
    old_path: Option<String>,
    new_path: Option<String>,
    git_paths: Option<(String, String)>,
    header_seen: bool,
    rename: bool,
    binary: bool,
    hunks: Vec<Hunk>,
}

/// Parses a unified diff (plain or git flavoured) into per-file hunks.
///
/// Binary file sections are skipped with a warning; files without hunks
/// (pure renames, mode changes) are dropped. Sections touching the same
/// path are merged.
pub fn parse_unified_diff(text: &str) -> Result<PatchDiff, DiffError> {
    let lines: Vec<&str> = crate::text::split_lines(text);
    let mut patch = PatchDiff::default();
    let mut cur: Option<Pending> = None;
    let mut i = 0;
    while i < lines.len() {
        let l = lines[i];
        if let Some(rest) = l.strip_prefix("diff --git ") {
            flush(cur.take(), &mut patch)?;
            cur = Some(Pending {
                git_paths: split_git_paths(rest),
                ..Pending::default()
            });
            i += 1;
            continue;
        }
        if l.starts_with("--- ") && lines.get(i + 1).is_some_and(|n| n.starts_with("+++ ")) {
            let fresh = cur.as_ref().is_none_or(|c| c.header_seen || !c.hunks.is_empty());
            if fresh {
                flush(cur.take(), &mut patch)?;
                cur = Some(Pending::default());
            }
            let c = cur.as_mut().expect("pending file");
            c.old_path = header_path(&l[4..]);
            c.new_path = header_path(&lines[i + 1][4..]);
            c.header_seen = true;
            i += 2;
            continue;
        }
        if l.starts_with("@@") {
            let Some(c) = cur.as_mut() else {
                return Err(DiffError::OrphanHunk { line: i + 1 });
            };
            let (hunk, used) = parse_hunk(&lines, i)?;
            c.hunks.push(hunk);
            i += used;
            continue;
        }
        if let Some(c) = cur.as_mut() {
            if let Some(p) = l.strip_prefix("rename from ") {
                c.rename = true;
                c.old_path = Some(p.to_string());
            } else if let Some(p) = l.strip_prefix("rename to ") {
                c.rename = true;
                c.new_path = Some(p.to_string());
            } else if l.starts_with("Binary files ") || l == "GIT binary patch" {
                c.binary = true;
            }
        }
        i += 1;
    }
    flush(cur, &mut patch)?;
    Ok(patch)
}

fn flush(p: Option<Pending>, patch: &mut PatchDiff) -> Result<(), DiffError> {
    let Some(p) = p else { return Ok(()) };
    let (git_old, git_new) = p.git_paths.clone().unzip();
    let old = if p.header_seen { p.old_path.clone() } else { p.old_path.clone().or(git_old) };
    let new = if p.header_seen { p.new_path.clone() } else { p.new_path.clone().or(git_new) };
    let display = new.clone().or(old.clone()).unwrap_or_default();
    if p.binary {
        patch.warnings.push(format!("skipped binary file {display}"));
        return Ok(());
    }
    if p.hunks.is_empty() {
        return Ok(());
    }
    let status = match (&old, &new) {
        (None, Some(_)) => FileStatus::Added,
        (Some(_), None) => FileStatus::Deleted,
        (Some(o), Some(n)) if o != n || p.rename => FileStatus::Renamed,
        _ => FileStatus::Modified,
    };
    if let Some(existing) = patch.file_diffs.iter_mut().find(|f| f.path == display) {
        existing.hunks.extend(p.hunks);
        existing.hunks.sort_by_key(|h| h.old_cursor());
        check_overlap(existing)?;
        return Ok(());
    }
    let mut fd = FileDiff {
        old_path: old.unwrap_or_else(|| display.clone()),
        path: display,
        status,
        hunks: p.hunks,
    };
    fd.hunks.sort_by_key(|h| h.old_cursor());
    check_overlap(&fd)?;
    patch.file_diffs.push(fd);
    Ok(())
}

fn check_overlap(f: &FileDiff) -> Result<(), DiffError> {
    for w in f.hunks.windows(2) {
        if w[0].old_cursor() + w[0].old_len > w[1].old_cursor() {
            return Err(DiffError::OverlappingHunks { path: f.path.clone() });
        }
    }
    Ok(())
}

fn split_git_paths(rest: &str) -> Option<(String, String)> {
    let rest = rest.trim();
    let idx = rest.find(" b/")?;
    let old = rest[..idx].strip_prefix("a/").unwrap_or(&rest[..idx]);
    Some((old.to_string(), rest[idx + 3..].to_string()))
}

fn header_path(raw: &str) -> Option<String> {
    let raw = raw.split('\t').next().unwrap_or("").trim_end();
    let raw = raw.trim_matches('"');
    if raw == "/dev/null" {
        return None;
    }
    let p = raw
        .strip_prefix("a/")
        .or_else(|| raw.strip_prefix("b/"))
        .unwrap_or(raw);
    Some(p.to_string())
}

fn parse_range(s: &str) -> Option<(u32, u32)> {
    match s.split_once(',') {
        Some((a, b)) => Some((a.parse().ok()?, b.parse().ok()?)),
        None => Some((s.parse().ok()?, 1)),
    }
}

fn parse_header(l: &str) -> Option<(u32, u32, u32, u32, String)> {
    let rest = l.strip_prefix("@@ ")?;
    let end = rest.find(" @@")?;
    let mut parts = rest[..end].split_whitespace();
    let old = parse_range(parts.next()?.strip_prefix('-')?)?;
    let new = parse_range(parts.next()?.strip_prefix('+')?)?;
    if parts.next().is_some() {
        return None;
    }
    let section = rest[end + 3..].trim().to_string();
    Some((old.0, old.1, new.0, new.1, section))
}

fn parse_hunk(lines: &[&str], at: usize) -> Result<(Hunk, usize), DiffError> {
    let (old_start, old_len, new_start, new_len, section) =
        parse_header(lines[at]).ok_or_else(|| DiffError::MalformedHunkHeader {
            line: at + 1,
            text: lines[at].to_string(),
        })?;
    let mut hunk = Hunk {
        old_start,
        old_len,
        new_start,
        new_len,
        section,
        lines: Vec::new(),
    };
    let mut old_no = hunk.old_cursor();
    let mut new_no = hunk.new_cursor();
    let (mut old_left, mut new_left) = (old_len, new_len);
    let mut j = at + 1;
    let mismatch = |j: usize| DiffError::HunkCountMismatch { line: j + 1 };
    while old_left > 0 || new_left > 0 {
        let Some(&l) = lines.get(j) else {
            return Err(mismatch(j));
        };
        let (op, text) = match l.chars().next() {
            Some(' ') => (LineOp::Context, &l[1..]),
            None => (LineOp::Context, ""),
            Some('-') => (LineOp::Removed, &l[1..]),
            Some('+') => (LineOp::Added, &l[1..]),
            Some('\\') => {
                j += 1;
                continue;
            }
            _ => return Err(mismatch(j)),
        };
        let (o, n) = match op {
            LineOp::Context if old_left > 0 && new_left > 0 => {
                old_left -= 1;
                new_left -= 1;
                (Some(old_no), Some(new_no))
            }
            LineOp::Removed if old_left > 0 => {
                old_left -= 1;
                (Some(old_no), None)
            }
            LineOp::Added if new_left > 0 => {
                new_left -= 1;
                (None, Some(new_no))
            }
            _ => return Err(mismatch(j)),
        };
        if o.is_some() {
            old_no += 1;
        }
        if n.is_some() {
            new_no += 1;
        }
        hunk.lines.push(HunkLine {
            op,
            old_line: o,
            new_line: n,
            text: text.to_string(),
        });
        j += 1;
    }
    while lines.get(j).is_some_and(|l| l.starts_with('\\')) {
        j += 1;
    }
    Ok((hunk, j - at))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_has_no_files() {
        let p = parse_unified_diff("").unwrap();
        assert!(p.file_diffs.is_empty());
    }

    #[test]
    fn malformed_header_reports_line() {
        let d = "--- a/A.java\n+++ b/A.java\n@@ -1,x +1 @@\n";
        assert_eq!(
            parse_unified_diff(d),
            Err(DiffError::MalformedHunkHeader {
                line: 3,
                text: "@@ -1,x +1 @@".into()
            })
        );
    }

    #[test]
    fn short_body_is_an_error() {
        let d = "--- a/A.java\n+++ b/A.java\n@@ -1,2 +1,2 @@\n x\n";
        assert!(matches!(
            parse_unified_diff(d),
            Err(DiffError::HunkCountMismatch { .. })
        ));
    }

    #[test]
    fn git_headers_rename_and_binary() {
        let d = "diff --git a/old/A.java b/new/A.java\n\
                 similarity index 90%\n\
                 rename from old/A.java\n\
                 rename to new/A.java\n\
                 --- a/old/A.java\n\
                 +++ b/new/A.java\n\
                 @@ -1 +1 @@\n\
                 -a\n\
                 +b\n\
                 diff --git a/img.png b/img.png\n\
                 Binary files a/img.png and b/img.png differ\n";
        let p = parse_unified_diff(d).unwrap();
        assert_eq!(p.file_diffs.len(), 1);
        let f = &p.file_diffs[0];
        assert_eq!(f.path, "new/A.java");
        assert_eq!(f.old_path, "old/A.java");
        assert_eq!(f.status, FileStatus::Renamed);
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn no_newline_marker_and_crlf() {
        let d = "--- a/A.java\r\n+++ b/A.java\r\n@@ -1 +1 @@\r\n-a\r\n\\ No newline at end of file\r\n+b\r\n\\ No newline at end of file\r\n";
        let p = parse_unified_diff(d).unwrap();
        let h = &p.file_diffs[0].hunks[0];
        assert_eq!(h.lines.len(), 2);
        assert_eq!(h.lines[0].text, "a");
        assert_eq!(h.lines[1].text, "b");
    }

    #[test]
    fn new_and_deleted_files() {
        let d = "--- /dev/null\n+++ b/N.java\n@@ -0,0 +1 @@\n+x\n--- a/D.java\n+++ /dev/null\n@@ -1 +0,0 @@\n-y\n";
        let p = parse_unified_diff(d).unwrap();
        assert_eq!(p.file_diffs[0].status, FileStatus::Added);
        assert_eq!(p.file_diffs[1].status, FileStatus::Deleted);
        assert_eq!(p.file_diffs[1].path, "D.java");
    }

    #[test]
    fn removed_line_that_looks_like_a_header() {
        let d = "--- a/A.java\n+++ b/A.java\n@@ -1,2 +1,2 @@\n--- x\n+++ y\n ctx\n";
        let p = parse_unified_diff(d).unwrap();
        let h = &p.file_diffs[0].hunks[0];
        assert_eq!(h.lines.len(), 3);
        assert_eq!(h.lines[0].text, "-- x");
    }

    #[test]
    fn section_heading_kept() {
        let d = "--- a/A.java\n+++ b/A.java\n@@ -5,1 +5,1 @@ public void foo() {\n-a\n+b\n";
        let p = parse_unified_diff(d).unwrap();
        assert_eq!(p.file_diffs[0].hunks[0].section, "public void foo() {");
    }
}
