use super::{change_runs, ChangeKind, ChangedLine, FileDiff, HunkLine, LineOp, Run};

/// Classifies every non-context line of a file diff as ADDED, REMOVED or
/// MODIFIED.
///
/// Inside a run of changes (no context line in between) the lines form
/// alternating blocks of removals and additions. Adjacent blocks of opposite
/// kind are paired line by line from their start; each pair is one MODIFIED
/// line, whatever is left over keeps its raw kind.
pub fn classify_lines(file: &FileDiff) -> Vec<ChangedLine> {
    let mut out = Vec::new();
    for hunk in &file.hunks {
        for run in change_runs(hunk) {
            out.extend(classify_run(&run));
        }
    }
    out
}

pub(crate) fn classify_run(run: &Run<'_>) -> Vec<ChangedLine> {
    // Blocks of same-op lines as index ranges into run.lines.
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    for (i, l) in run.lines.iter().enumerate() {
        match blocks.last_mut() {
            Some((s, e)) if run.lines[*s].op == l.op => *e = i + 1,
            _ => blocks.push((i, i + 1)),
        }
    }

    // partner[i] = index of the line paired with line i.
    let mut partner: Vec<Option<usize>> = vec![None; run.lines.len()];
    let mut consumed = vec![0usize; blocks.len()];
    for b in 0..blocks.len().saturating_sub(1) {
        let (s1, e1) = blocks[b];
        let (s2, e2) = blocks[b + 1];
        let free1 = (s1 + consumed[b])..e1;
        let n = free1.len().min(e2 - s2);
        for k in 0..n {
            let a = free1.start + k;
            let c = s2 + k;
            partner[a] = Some(c);
            partner[c] = Some(a);
        }
        consumed[b] += n;
        consumed[b + 1] += n;
    }

    // Line numbers by walking the run.
    let mut numbers = Vec::with_capacity(run.lines.len());
    let (mut o, mut n) = (run.old_at, run.new_at);
    for l in run.lines {
        match l.op {
            LineOp::Removed => {
                numbers.push(o);
                o += 1;
            }
            LineOp::Added => {
                numbers.push(n);
                n += 1;
            }
            LineOp::Context => unreachable!("runs hold no context lines"),
        }
    }

    let mut out = Vec::new();
    for (i, l) in run.lines.iter().enumerate() {
        match partner[i] {
            Some(p) if p < i => {}
            Some(p) => {
                let (rem, add) = if l.op == LineOp::Removed { (i, p) } else { (p, i) };
                out.push(modified(&run.lines[rem], numbers[rem], &run.lines[add], numbers[add]));
            }
            None => out.push(single(l, numbers[i])),
        }
    }
    out
}

fn modified(rem: &HunkLine, old_no: u32, add: &HunkLine, new_no: u32) -> ChangedLine {
    ChangedLine {
        kind: ChangeKind::Modified,
        old_line: Some(old_no),
        new_line: Some(new_no),
        old_text: Some(rem.text.clone()),
        new_text: Some(add.text.clone()),
    }
}

fn single(l: &HunkLine, no: u32) -> ChangedLine {
    if l.op == LineOp::Removed {
        ChangedLine {
            kind: ChangeKind::Removed,
            old_line: Some(no),
            new_line: None,
            old_text: Some(l.text.clone()),
            new_text: None,
        }
    } else {
        ChangedLine {
            kind: ChangeKind::Added,
            old_line: None,
            new_line: Some(no),
            old_text: None,
            new_text: Some(l.text.clone()),
        }
    }
}
