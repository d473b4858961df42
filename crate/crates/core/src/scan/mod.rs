//! Lightweight Java scanning: tokens, comment/blank masks, class and method
//! spans, statement grouping and per-statement syntax elements.
//!
//! Everything here works on either a complete file or on the scattered line
//! excerpts visible in a diff. Excerpts are best effort by nature.

mod decl;
mod lang;
mod lexer;
mod statements;
pub mod syntax;

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};

pub use decl::{declarations_of, locate_declarations, ClassKind, ClassSpan, Declarations, MethodKind, MethodSpan};
pub use lang::LanguageConfig;
pub use lexer::{lex, LitKind, Lexed, Token, TokenKind};
pub use statements::{group_statements, Statement};
pub use syntax::{extract_features, LineFeatures};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum LineKind {
    Code,
    Blank,
    Comment,
}

/// Per-line classification of a complete file (index = line - 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseMask {
    pub kinds: Vec<LineKind>,
    pub unterminated_comment: bool,
}

impl NoiseMask {
    pub fn kind(&self, line: u32) -> Option<LineKind> {
        self.kinds.get((line as usize).checked_sub(1)?).copied()
    }
}

/// Marks every line of a file as CODE, BLANK or COMMENT. A line with any
/// code token is CODE, even if it also carries a comment. An unterminated
/// block comment runs to the end of the file and is flagged.
pub fn strip_noise(text: &str, cfg: &LanguageConfig) -> NoiseMask {
    let scan = SideScan::new(SideText::full(text), cfg);
    let n = crate::text::split_lines(text).len();
    NoiseMask {
        kinds: (1..=n as u32)
            .map(|l| scan.line_kinds.get(&l).copied().unwrap_or(LineKind::Blank))
            .collect(),
        unterminated_comment: scan.unterminated_comment,
    }
}

/// The known lines of one version of a file: either the whole file or the
/// lines a diff shows.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SideText {
    pub lines: BTreeMap<u32, String>,
    pub complete: bool,
}

impl SideText {
    pub fn full(text: &str) -> Self {
        SideText {
            lines: crate::text::split_lines(text)
                .into_iter()
                .enumerate()
                .map(|(i, l)| (i as u32 + 1, l.to_string()))
                .collect(),
            complete: true,
        }
    }

    pub fn excerpt(lines: BTreeMap<u32, String>) -> Self {
        SideText {
            lines,
            complete: false,
        }
    }

    pub fn get(&self, line: u32) -> Option<&str> {
        self.lines.get(&line).map(String::as_str)
    }

    /// Maximal runs of consecutive known lines.
    pub fn segments(&self) -> Vec<(u32, Vec<&str>)> {
        let mut out: Vec<(u32, Vec<&str>)> = Vec::new();
        let mut prev: Option<u32> = None;
        for (&no, text) in &self.lines {
            match out.last_mut() {
                Some((_, v)) if prev == Some(no - 1) => v.push(text),
                _ => out.push((no, vec![text])),
            }
            prev = Some(no);
        }
        out
    }
}

/// A lexed side: code tokens, per-line kinds and the token ranges of each
/// contiguous segment.
#[derive(Debug, Clone)]
pub struct SideScan {
    pub text: SideText,
    pub tokens: Vec<Token>,
    pub segments: Vec<Range<usize>>,
    pub line_kinds: BTreeMap<u32, LineKind>,
    pub unterminated_comment: bool,
}

impl SideScan {
    pub fn new(text: SideText, cfg: &LanguageConfig) -> Self {
        let mut tokens = Vec::new();
        let mut segments = Vec::new();
        let mut line_kinds = BTreeMap::new();
        let mut unterminated = false;
        for (first, lines) in text.segments() {
            let comment_like = if text.complete {
                vec![false; lines.len()]
            } else {
                fragment_comment_lines(&lines, cfg)
            };
            let joined: Vec<&str> = lines
                .iter()
                .zip(&comment_like)
                .map(|(l, &c)| if c { "" } else { *l })
                .collect();
            let lexed = lex(&joined.join("\n"), first, cfg);
            let start = tokens.len();
            for (i, l) in lines.iter().enumerate() {
                let no = first + i as u32;
                let kind = if comment_like[i] || lexed.comment_lines.contains(&no) {
                    LineKind::Comment
                } else if l.trim().is_empty() {
                    LineKind::Blank
                } else {
                    LineKind::Code
                };
                line_kinds.insert(no, kind);
            }
            // CODE means "has a token"; a line of stray characters is blank.
            let token_lines: BTreeSet<u32> = lexed.tokens.iter().map(|t| t.line).collect();
            for (i, _) in lines.iter().enumerate() {
                let no = first + i as u32;
                if token_lines.contains(&no) {
                    line_kinds.insert(no, LineKind::Code);
                } else if line_kinds[&no] == LineKind::Code {
                    line_kinds.insert(no, LineKind::Blank);
                }
            }
            if text.complete && lexed.unterminated_comment {
                unterminated = true;
            }
            tokens.extend(lexed.tokens);
            segments.push(start..tokens.len());
        }
        SideScan {
            text,
            tokens,
            segments,
            line_kinds,
            unterminated_comment: unterminated,
        }
    }

    pub fn kind(&self, line: u32) -> Option<LineKind> {
        self.line_kinds.get(&line).copied()
    }

    pub fn is_code(&self, line: u32) -> bool {
        self.kind(line) == Some(LineKind::Code)
    }
}

// In an excerpt we may start inside a block comment. Lines that look like
// comment bodies (`* ...`) and everything up to a dangling `*/` are treated
// as comments.
fn fragment_comment_lines(lines: &[&str], cfg: &LanguageConfig) -> Vec<bool> {
    let open = cfg.block_comment_open.as_str();
    let close = cfg.block_comment_close.as_str();
    let mut out: Vec<bool> = lines
        .iter()
        .map(|l| {
            let t = l.trim_start();
            t.starts_with('*') && !t.starts_with("*=")
        })
        .collect();
    for (i, l) in lines.iter().enumerate() {
        if let Some(pos) = l.find(close) {
            if !l[..pos].contains(open) && !lines[..i].iter().any(|p| p.contains(open)) {
                for o in out.iter_mut().take(i + 1) {
                    *o = true;
                }
            }
            break;
        }
        if l.contains(open) {
            break;
        }
    }
    out
}
