use std::ops::Range;

use super::{SideScan, Token};

/// A group of whole lines forming one logical statement (or block header).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    /// Lines holding tokens of this statement, ascending.
    pub lines: Vec<u32>,
    /// Range into `SideScan::tokens`.
    pub tokens: Range<usize>,
}

impl Statement {
    pub fn first_line(&self) -> u32 {
        self.lines[0]
    }

    pub fn last_line(&self) -> u32 {
        *self.lines.last().expect("statement has lines")
    }
}

/// Groups the lines of a scanned side into statements.
///
/// A statement ends at a line whose last token is `;`, `{` or `}` with no
/// open parenthesis, at any line ending in `{`, after a `case`/`default`
/// label and after an annotation line. Segment borders always end one.
pub fn group_statements(scan: &SideScan) -> Vec<Statement> {
    let mut out = Vec::new();
    for seg in &scan.segments {
        let toks = &scan.tokens[seg.clone()];
        let mut start = seg.start;
        let mut depth: i32 = 0;
        let mut lines: Vec<u32> = Vec::new();
        let mut i = 0;
        while i < toks.len() {
            let line = toks[i].line;
            let line_start = i;
            while i < toks.len() && toks[i].line == line {
                match toks[i].text.as_str() {
                    "(" | "[" if toks[i].kind == super::TokenKind::Op => depth += 1,
                    ")" | "]" if toks[i].kind == super::TokenKind::Op => depth -= 1,
                    _ => {}
                }
                i += 1;
            }
            lines.push(line);
            let lt = &toks[line_start..i];
            if ends_statement(lt, depth) {
                out.push(Statement {
                    lines: std::mem::take(&mut lines),
                    tokens: start..seg.start + i,
                });
                start = seg.start + i;
                depth = 0;
            }
        }
        if !lines.is_empty() {
            out.push(Statement {
                lines,
                tokens: start..seg.end,
            });
        }
    }
    out
}

fn ends_statement(line: &[Token], depth: i32) -> bool {
    let last = line.last().expect("non-empty line");
    if last.is_op("{") {
        return true;
    }
    if depth <= 0 && (last.is_op(";") || last.is_op("}")) {
        return true;
    }
    let first = &line[0];
    if (first.is_kw("case") || first.is_kw("default")) && last.is_op(":") {
        return true;
    }
    depth <= 0 && is_annotation_line(line)
}

fn is_annotation_line(line: &[Token]) -> bool {
    let mut i = 0;
    let mut any = false;
    while i < line.len() {
        if !line[i].is_op("@") || line.get(i + 1).is_none_or(|t| !t.is_ident()) {
            return false;
        }
        i += 2;
        while i + 1 < line.len() && line[i].is_op(".") && line[i + 1].is_ident() {
            i += 2;
        }
        if i < line.len() && line[i].is_op("(") {
            let mut d = 0;
            while i < line.len() {
                if line[i].is_op("(") {
                    d += 1;
                } else if line[i].is_op(")") {
                    d -= 1;
                    if d == 0 {
                        i += 1;
                        break;
                    }
                }
                i += 1;
            }
        }
        any = true;
    }
    any
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scan::{LanguageConfig, SideText};

    fn groups(src: &str) -> Vec<Vec<u32>> {
        let scan = SideScan::new(SideText::full(src), &LanguageConfig::java());
        group_statements(&scan).into_iter().map(|s| s.lines).collect()
    }

    #[test]
    fn multi_line_call_is_one_statement() {
        let src = "foo(a,\n    b);\nbar();\n";
        assert_eq!(groups(src), vec![vec![1, 2], vec![3]]);
    }

    #[test]
    fn braceless_if_joins_its_body() {
        let src = "if (x)\n  return;\ny = 1;\n";
        assert_eq!(groups(src), vec![vec![1, 2], vec![3]]);
    }

    #[test]
    fn block_openers_and_closers() {
        let src = "if (x) {\n  a();\n} else {\n  b();\n}\n";
        assert_eq!(groups(src), vec![vec![1], vec![2], vec![3], vec![4], vec![5]]);
    }

    #[test]
    fn labels_annotations_and_comments() {
        let src = "switch (c) {\ncase 'a':\n  x(); // hi\n\n@Override\npublic void f() {\n";
        assert_eq!(groups(src), vec![vec![1], vec![2], vec![3], vec![5], vec![6]]);
    }

    #[test]
    fn for_header_semicolons_do_not_split() {
        let src = "for (int i = 0;\n i < n;\n i++) {\n";
        assert_eq!(groups(src), vec![vec![1, 2, 3]]);
    }
}
