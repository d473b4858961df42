use std::collections::BTreeSet;

use super::LanguageConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LitKind {
    Int,
    Float,
    Str,
    Char,
    Bool,
    Null,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Ident,
    Keyword,
    Literal(LitKind),
    Op,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub line: u32,
}

impl Token {
    pub fn is(&self, s: &str) -> bool {
        self.text == s
    }

    pub fn is_op(&self, s: &str) -> bool {
        self.kind == TokenKind::Op && self.text == s
    }

    pub fn is_kw(&self, s: &str) -> bool {
        self.kind == TokenKind::Keyword && self.text == s
    }

    pub fn is_ident(&self) -> bool {
        self.kind == TokenKind::Ident
    }

    pub fn is_literal(&self) -> bool {
        matches!(self.kind, TokenKind::Literal(_))
    }

    /// Identifiers, keywords and literals; operators and punctuation are not.
    pub fn is_word(&self) -> bool {
        self.kind != TokenKind::Op
    }

    /// Equality ignoring the line number.
    pub fn same(&self, other: &Token) -> bool {
        self.kind == other.kind && self.text == other.text
    }
}

#[derive(Debug, Clone, Default)]
pub struct Lexed {
    pub tokens: Vec<Token>,
    /// Lines touched by a comment.
    pub comment_lines: BTreeSet<u32>,
    pub unterminated_comment: bool,
}

// Longest first; `>>` and `>>>` are deliberately absent so generic closers
// stay single tokens.
const OPS: &[&str] = &[
    ">>>=", "<<=", ">>=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<",
];
const SINGLE: &str = "{}()[];,.@=<>!~?:+-*/&|^%";

/// Tokenizes source text. `first_line` is the line number of the first line.
pub fn lex(text: &str, first_line: u32, cfg: &LanguageConfig) -> Lexed {
    let mut out = Lexed::default();
    let b = text.as_bytes();
    let mut i = 0;
    let mut line = first_line;
    let lc = cfg.line_comment.as_bytes();
    let bo = cfg.block_comment_open.as_bytes();
    let bc = cfg.block_comment_close.as_bytes();

    while i < b.len() {
        let c = b[i];
        if c == b'\n' {
            line += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if !lc.is_empty() && b[i..].starts_with(lc) {
            out.comment_lines.insert(line);
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if !bo.is_empty() && b[i..].starts_with(bo) {
            out.comment_lines.insert(line);
            i += bo.len();
            loop {
                if i >= b.len() {
                    out.unterminated_comment = true;
                    break;
                }
                if b[i..].starts_with(bc) {
                    i += bc.len();
                    break;
                }
                if b[i] == b'\n' {
                    line += 1;
                    out.comment_lines.insert(line);
                }
                i += 1;
            }
            continue;
        }
        let start = i;
        let kind;
        if c == b'"' || c == b'\'' {
            i += 1;
            while i < b.len() && b[i] != c && b[i] != b'\n' {
                if b[i] == b'\\' && i + 1 < b.len() && b[i + 1] != b'\n' {
                    i += 1;
                }
                i += 1;
            }
            if i < b.len() && b[i] == c {
                i += 1;
            }
            kind = TokenKind::Literal(if c == b'"' { LitKind::Str } else { LitKind::Char });
        } else if c.is_ascii_digit() || (c == b'.' && b.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let (end, float) = number(b, i);
            i = end;
            kind = TokenKind::Literal(if float { LitKind::Float } else { LitKind::Int });
        } else if is_ident_start(text, i) {
            while i < b.len() && is_ident_part(text, i) {
                i += char_len(b[i]);
            }
            let word = &text[start..i];
            kind = match word {
                "true" | "false" => TokenKind::Literal(LitKind::Bool),
                "null" => TokenKind::Literal(LitKind::Null),
                w if cfg.is_keyword(w) => TokenKind::Keyword,
                _ => TokenKind::Ident,
            };
        } else if let Some(op) = OPS.iter().find(|op| b[i..].starts_with(op.as_bytes())) {
            i += op.len();
            kind = TokenKind::Op;
        } else if SINGLE.as_bytes().contains(&c) {
            i += 1;
            kind = TokenKind::Op;
        } else {
            // Stray character (backslash, '#', ...): skip it.
            i += char_len(c);
            continue;
        }
        out.tokens.push(Token {
            kind,
            text: text[start..i].to_string(),
            line,
        });
    }
    out
}

fn char_len(first: u8) -> usize {
    match first {
        0x00..=0x7f => 1,
        0xc0..=0xdf => 2,
        0xe0..=0xef => 3,
        _ => 4,
    }
}

fn is_ident_start(text: &str, i: usize) -> bool {
    let c = text[i..].chars().next().unwrap_or(' ');
    c == '_' || c == '$' || c.is_alphabetic()
}

fn is_ident_part(text: &str, i: usize) -> bool {
    let c = text[i..].chars().next().unwrap_or(' ');
    c == '_' || c == '$' || c.is_alphanumeric()
}

fn number(b: &[u8], mut i: usize) -> (usize, bool) {
    let mut float = false;
    if b[i] == b'0' && matches!(b.get(i + 1), Some(b'x' | b'X' | b'b' | b'B')) {
        i += 2;
        while i < b.len() && (b[i].is_ascii_hexdigit() || b[i] == b'_') {
            i += 1;
        }
        if i < b.len() && matches!(b[i], b'l' | b'L') {
            i += 1;
        }
        return (i, false);
    }
    let digits = |b: &[u8], mut i: usize| {
        while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'_') {
            i += 1;
        }
        i
    };
    i = digits(b, i);
    if i < b.len() && b[i] == b'.' && b.get(i + 1).is_none_or(|c| !c.is_ascii_alphabetic() || matches!(c, b'e' | b'E' | b'f' | b'F' | b'd' | b'D')) {
        float = true;
        i = digits(b, i + 1);
    }
    if i < b.len() && matches!(b[i], b'e' | b'E') {
        let mut j = i + 1;
        if j < b.len() && matches!(b[j], b'+' | b'-') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            float = true;
            i = digits(b, j);
        }
    }
    if i < b.len() {
        match b[i] {
            b'f' | b'F' | b'd' | b'D' => {
                float = true;
                i += 1;
            }
            b'l' | b'L' => i += 1,
            _ => {}
        }
    }
    (i, float)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<String> {
        lex(src, 1, &LanguageConfig::java())
            .tokens
            .into_iter()
            .map(|t| t.text)
            .collect()
    }

    #[test]
    fn basic_statement() {
        assert_eq!(
            texts("JsName name = getName(ns.name, true);"),
            vec!["JsName", "name", "=", "getName", "(", "ns", ".", "name", ",", "true", ")", ";"]
        );
    }

    #[test]
    fn generics_close_separately() {
        assert_eq!(texts("Map<K, List<V>>"), vec!["Map", "<", "K", ",", "List", "<", "V", ">", ">"]);
    }

    #[test]
    fn literals() {
        let l = lex(r#"0x1F 1.5e3 2L .5 'c' "a\"b" 3.0f 1_000 x.y"#, 1, &LanguageConfig::java());
        let kinds: Vec<_> = l.tokens.iter().map(|t| t.kind).collect();
        use LitKind::*;
        use TokenKind::*;
        assert_eq!(
            kinds,
            vec![
                Literal(Int),
                Literal(Float),
                Literal(Int),
                Literal(Float),
                Literal(Char),
                Literal(Str),
                Literal(Float),
                Literal(Int),
                Ident,
                Op,
                Ident
            ]
        );
    }

    #[test]
    fn comments_are_dropped_and_recorded() {
        let l = lex("a // x\n/* b\n c */ d\n", 1, &LanguageConfig::java());
        assert_eq!(l.tokens.iter().map(|t| t.text.as_str()).collect::<Vec<_>>(), vec!["a", "d"]);
        assert_eq!(l.tokens[1].line, 3);
        assert_eq!(l.comment_lines.into_iter().collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(!l.unterminated_comment);
    }

    #[test]
    fn unterminated_block_comment() {
        let l = lex("a /* b\nc", 1, &LanguageConfig::java());
        assert!(l.unterminated_comment);
        assert_eq!(l.tokens.len(), 1);
    }

    #[test]
    fn comment_marker_inside_string_is_text() {
        assert_eq!(texts(r#"s = "http://x";"#), vec!["s", "=", "\"http://x\"", ";"]);
    }
}
