use super::{change_runs, classify::classify_run, Chunk, FileDiff, LineOp};

/// Splits a file diff into chunks: maximal runs of changed lines not
/// separated by a context line. Every classified line lands in exactly one
/// chunk, in file order.
pub fn detect_chunks(file: &FileDiff) -> Vec<Chunk> {
    let mut chunks = Vec::new();
    for hunk in &file.hunks {
        for run in change_runs(hunk) {
            let removed = run.lines.iter().filter(|l| l.op == LineOp::Removed).count() as u32;
            let added = run.lines.iter().filter(|l| l.op == LineOp::Added).count() as u32;
            chunks.push(Chunk {
                file: file.path.clone(),
                lines: classify_run(&run),
                old_range: (run.old_at, run.old_at + removed),
                new_range: (run.new_at, run.new_at + added),
            });
        }
    }
    chunks
}
