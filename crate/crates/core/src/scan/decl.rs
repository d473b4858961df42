use serde::{Deserialize, Serialize};

use super::{LanguageConfig, SideScan, SideText, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassKind {
    Class,
    Interface,
    Enum,
    Annotation,
    Anonymous,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSpan {
    pub name: String,
    pub kind: ClassKind,
    pub start: u32,
    pub end: u32,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MethodKind {
    Method,
    Constructor,
    Initializer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodSpan {
    pub name: String,
    /// Name plus parameter types, e.g. `put(String,int)`.
    pub signature: String,
    pub kind: MethodKind,
    pub start: u32,
    pub end: u32,
    /// Index of the declaring class.
    pub class: usize,
}

/// Class and method spans of one side. Spans nest or are disjoint.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Declarations {
    pub classes: Vec<ClassSpan>,
    pub methods: Vec<MethodSpan>,
    /// Braces did not balance in a complete file.
    pub unbalanced: bool,
}

impl Declarations {
    pub fn innermost_class(&self, line: u32) -> Option<usize> {
        innermost(self.classes.iter().map(|c| (c.start, c.end)), line)
    }

    pub fn innermost_method(&self, line: u32) -> Option<usize> {
        innermost(self.methods.iter().map(|m| (m.start, m.end)), line)
    }

    /// Dotted nesting path of a class, stable across versions of a file.
    pub fn class_path(&self, idx: usize) -> String {
        let mut parts = Vec::new();
        let mut cur = Some(idx);
        while let Some(i) = cur {
            parts.push(self.classes[i].name.as_str());
            cur = self.classes[i].parent;
        }
        parts.reverse();
        parts.join(".")
    }

    pub fn method_key(&self, idx: usize) -> String {
        let m = &self.methods[idx];
        format!("{}#{}", self.class_path(m.class), m.signature)
    }
}

fn innermost(spans: impl Iterator<Item = (u32, u32)>, line: u32) -> Option<usize> {
    let mut best: Option<(usize, u32, u32)> = None;
    for (i, (s, e)) in spans.enumerate() {
        if s <= line && line <= e {
            let better = match best {
                None => true,
                Some((_, bs, be)) => s > bs || (s == bs && e <= be),
            };
            if better {
                best = Some((i, s, e));
            }
        }
    }
    best.map(|b| b.0)
}

/// Finds class and method spans in a complete source file.
pub fn locate_declarations(text: &str, cfg: &LanguageConfig) -> Declarations {
    declarations_of(&SideScan::new(SideText::full(text), cfg), cfg)
}

#[derive(Clone, Copy)]
enum Frame {
    Class(usize),
    Method(usize),
    Block,
}

pub fn declarations_of(scan: &SideScan, cfg: &LanguageConfig) -> Declarations {
    let mut d = Declarations::default();
    for seg in &scan.segments {
        if seg.is_empty() {
            continue;
        }
        let toks = &scan.tokens;
        let seg_last_line = toks[seg.end - 1].line;
        let mut stack: Vec<(Frame, i32)> = Vec::new();
        let mut paren = 0i32;
        let mut header_start = seg.start;
        for i in seg.clone() {
            let t = &toks[i];
            if t.kind != TokenKind::Op {
                continue;
            }
            match t.text.as_str() {
                "(" => paren += 1,
                ")" => paren -= 1,
                ";" if paren <= 0 => header_start = i + 1,
                "{" => {
                    let enclosing = stack.last().map(|f| f.0);
                    let outer_class = stack.iter().rev().find_map(|(f, _)| match *f {
                        Frame::Class(c) => Some(c),
                        Frame::Method(m) => Some(d.methods[m].class),
                        Frame::Block => None,
                    });
                    let frame = open_frame(toks, header_start, i, enclosing, outer_class, &mut d, cfg);
                    stack.push((frame, paren));
                    paren = 0;
                    header_start = i + 1;
                }
                "}" => {
                    match stack.pop() {
                        Some((f, p)) => {
                            close(&mut d, f, t.line);
                            paren = p;
                        }
                        None if scan.text.complete => d.unbalanced = true,
                        None => {}
                    }
                    header_start = i + 1;
                }
                _ => {}
            }
        }
        if scan.text.complete && !stack.is_empty() {
            d.unbalanced = true;
        }
        for (f, _) in stack {
            close(&mut d, f, seg_last_line);
        }
    }
    d
}

fn close(d: &mut Declarations, f: Frame, line: u32) {
    match f {
        Frame::Class(i) => d.classes[i].end = line,
        Frame::Method(i) => d.methods[i].end = line,
        Frame::Block => {}
    }
}

fn skip_annotations(toks: &[Token], mut i: usize, end: usize) -> usize {
    while i + 1 < end && toks[i].is_op("@") && toks[i + 1].is_ident() {
        i += 2;
        while i + 1 < end && toks[i].is_op(".") && toks[i + 1].is_ident() {
            i += 2;
        }
        if i < end && toks[i].is_op("(") {
            i = match matching(toks, i, end) {
                Some(m) => m + 1,
                None => end,
            };
        }
    }
    i
}

/// Index of the bracket closing the one at `open`, searching below `end`.
pub(crate) fn matching(toks: &[Token], open: usize, end: usize) -> Option<usize> {
    let (o, c) = match toks[open].text.as_str() {
        "(" => ("(", ")"),
        "[" => ("[", "]"),
        "{" => ("{", "}"),
        _ => return None,
    };
    let mut depth = 0;
    for (j, t) in toks.iter().enumerate().take(end).skip(open) {
        if t.is_op(o) {
            depth += 1;
        } else if t.is_op(c) {
            depth -= 1;
            if depth == 0 {
                return Some(j);
            }
        }
    }
    None
}

fn matching_back(toks: &[Token], close: usize, start: usize) -> Option<usize> {
    let (o, c) = match toks[close].text.as_str() {
        ")" => ("(", ")"),
        "]" => ("[", "]"),
        ">" => ("<", ">"),
        _ => return None,
    };
    let mut depth = 0;
    let mut j = close + 1;
    while j > start {
        j -= 1;
        if toks[j].is_op(c) {
            depth += 1;
        } else if toks[j].is_op(o) {
            depth -= 1;
            if depth == 0 {
                return Some(j);
            }
        }
    }
    None
}

fn open_frame(
    toks: &[Token],
    hs: usize,
    brace: usize,
    enclosing: Option<Frame>,
    enclosing_class: Option<usize>,
    d: &mut Declarations,
    cfg: &LanguageConfig,
) -> Frame {
    let parent_class = match enclosing {
        Some(Frame::Class(c)) => Some(c),
        _ => None,
    };
    let h = skip_annotations(toks, hs, brace);
    let start_line = toks.get(h).filter(|_| h < brace).map_or(toks[brace].line, |t| t.line);

    // Named type declaration.
    let mut depth = 0;
    for j in h..brace {
        let t = &toks[j];
        if t.is_op("(") || t.is_op("<") {
            depth += 1;
        } else if t.is_op(")") || t.is_op(">") {
            depth -= 1;
        }
        let is_type_kw = t.is_kw("class") || t.is_kw("interface") || t.is_kw("enum");
        if depth == 0 && is_type_kw && (j == hs || !toks[j - 1].is_op(".")) {
            if let Some(name) = toks.get(j + 1).filter(|n| n.is_ident() && j + 1 < brace) {
                let kind = match t.text.as_str() {
                    "class" => ClassKind::Class,
                    "enum" => ClassKind::Enum,
                    _ if j > 0 && toks[j - 1].is_op("@") => ClassKind::Annotation,
                    _ => ClassKind::Interface,
                };
                d.classes.push(ClassSpan {
                    name: name.text.clone(),
                    kind,
                    start: start_line,
                    end: start_line,
                    parent: enclosing_class,
                });
                return Frame::Class(d.classes.len() - 1);
            }
        }
    }

    // Anonymous class: `new Type(...) {`.
    if brace > hs && toks[brace - 1].is_op(")") {
        if let Some(open) = matching_back(toks, brace - 1, hs) {
            let mut j = open;
            let mut type_start = open;
            while j > hs {
                let p = &toks[j - 1];
                if p.is_ident() || p.is_op(".") {
                    j -= 1;
                    type_start = j;
                } else if p.is_op(">") {
                    match matching_back(toks, j - 1, hs) {
                        Some(m) => {
                            j = m;
                        }
                        None => break,
                    }
                } else {
                    break;
                }
            }
            if j > hs && toks[j - 1].is_kw("new") && type_start < open {
                let name: String = toks[type_start..open]
                    .iter()
                    .filter(|t| t.is_ident() || t.is_op("."))
                    .map(|t| t.text.as_str())
                    .collect();
                d.classes.push(ClassSpan {
                    name: format!("new {name}"),
                    kind: ClassKind::Anonymous,
                    start: toks[j - 1].line,
                    end: toks[j - 1].line,
                    parent: enclosing_class,
                });
                return Frame::Class(d.classes.len() - 1);
            }
        }
    }

    let Some(class) = parent_class else {
        return Frame::Block;
    };

    // Initializer block.
    let rest: Vec<&Token> = toks[h..brace].iter().collect();
    if rest.is_empty() || (rest.len() == 1 && rest[0].is_kw("static")) {
        let name = if rest.is_empty() { "<init>" } else { "<clinit>" };
        d.methods.push(MethodSpan {
            name: name.into(),
            signature: format!("{name}()"),
            kind: MethodKind::Initializer,
            start: start_line,
            end: start_line,
            class,
        });
        return Frame::Method(d.methods.len() - 1);
    }

    if let Some(sig) = method_header(toks, h, brace, cfg) {
        let kind = if sig.name == d.classes[class].name || sig.no_return_type {
            MethodKind::Constructor
        } else {
            MethodKind::Method
        };
        d.methods.push(MethodSpan {
            signature: format!("{}({})", sig.name, sig.param_types.join(",")),
            name: sig.name,
            kind,
            start: start_line,
            end: start_line,
            class,
        });
        return Frame::Method(d.methods.len() - 1);
    }
    Frame::Block
}

pub(crate) struct MethodHeader {
    pub name: String,
    pub name_idx: usize,
    pub open: usize,
    pub param_types: Vec<String>,
    pub no_return_type: bool,
}

/// Recognises `[mods] [<T>] [Type] name(params) [throws ...]` in
/// `toks[start..end]` (annotations already skipped).
pub(crate) fn method_header(toks: &[Token], start: usize, end: usize, cfg: &LanguageConfig) -> Option<MethodHeader> {
    let mut stop = end;
    let mut depth = 0;
    for (j, t) in toks.iter().enumerate().take(end).skip(start) {
        if t.is_op("(") {
            depth += 1;
        } else if t.is_op(")") {
            depth -= 1;
        } else if depth == 0 && t.is_kw("throws") {
            stop = j;
            break;
        }
    }
    if stop <= start || !toks[stop - 1].is_op(")") {
        return None;
    }
    let close = stop - 1;
    let open = matching_back(toks, close, start)?;
    if open == start || !toks[open - 1].is_ident() {
        return None;
    }
    let name_idx = open - 1;
    // Everything before the name: modifiers, type parameters, return type.
    let mut j = start;
    while j < name_idx && (toks[j].kind == TokenKind::Keyword && cfg.is_modifier(&toks[j].text)) {
        j += 1;
    }
    if j < name_idx && toks[j].is_op("<") {
        let mut depth = 0;
        while j < name_idx {
            if toks[j].is_op("<") {
                depth += 1;
            } else if toks[j].is_op(">") {
                depth -= 1;
                if depth == 0 {
                    j += 1;
                    break;
                }
            }
            j += 1;
        }
    }
    let ret = &toks[j..name_idx];
    if !ret.is_empty() && !is_type(ret, cfg) {
        return None;
    }
    Some(MethodHeader {
        name: toks[name_idx].text.clone(),
        name_idx,
        open,
        param_types: param_types(&toks[open + 1..close]),
        no_return_type: ret.is_empty(),
    })
}

/// Whether the tokens spell a (possibly generic, qualified or array) type.
pub(crate) fn is_type(toks: &[Token], cfg: &LanguageConfig) -> bool {
    type_len(toks, 0, cfg) == Some(toks.len())
}

/// Length of a type starting at `i`, if there is one.
pub(crate) fn type_len(toks: &[Token], i: usize, cfg: &LanguageConfig) -> Option<usize> {
    let first = toks.get(i)?;
    let mut j = i;
    if first.kind == TokenKind::Keyword && cfg.is_primitive(&first.text) {
        j += 1;
    } else if first.is_ident() {
        j += 1;
        loop {
            if j < toks.len() && toks[j].is_op("<") {
                let mut depth = 0;
                let mut k = j;
                let mut closed = false;
                while k < toks.len() {
                    let t = &toks[k];
                    if t.is_op("<") {
                        depth += 1;
                    } else if t.is_op(">") {
                        depth -= 1;
                        if depth == 0 {
                            closed = true;
                            break;
                        }
                    } else if !(t.is_ident()
                        || t.is_op(",")
                        || t.is_op(".")
                        || t.is_op("?")
                        || t.is_op("[")
                        || t.is_op("]")
                        || t.is_kw("extends")
                        || t.is_kw("super")
                        || (t.kind == TokenKind::Keyword && cfg.is_primitive(&t.text)))
                    {
                        return None;
                    }
                    k += 1;
                }
                if !closed {
                    return None;
                }
                j = k + 1;
            }
            if j + 1 < toks.len() && toks[j].is_op(".") && toks[j + 1].is_ident() {
                j += 2;
                continue;
            }
            break;
        }
    } else {
        return None;
    }
    while j + 1 < toks.len() && toks[j].is_op("[") && toks[j + 1].is_op("]") {
        j += 2;
    }
    if j < toks.len() && toks[j].is_op("...") {
        j += 1;
    }
    Some(j - i)
}

fn param_types(params: &[Token]) -> Vec<String> {
    split_top_level(params, ",")
        .into_iter()
        .filter(|p| !p.is_empty())
        .map(|p| {
            let mut i = skip_annotations(p, 0, p.len());
            while i < p.len() && p[i].is_kw("final") {
                i += 1;
                i = skip_annotations(p, i, p.len());
            }
            let ty = &p[i..p.len().saturating_sub(1).max(i)];
            ty.iter().map(|t| t.text.as_str()).collect::<String>()
        })
        .collect()
}

/// Splits at separator tokens that sit outside any bracket pair.
pub(crate) fn split_top_level<'a>(toks: &'a [Token], sep: &str) -> Vec<&'a [Token]> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut angle = 0;
    let mut start = 0;
    for (i, t) in toks.iter().enumerate() {
        match t.text.as_str() {
            "(" | "[" | "{" if t.kind == TokenKind::Op => depth += 1,
            ")" | "]" | "}" if t.kind == TokenKind::Op => depth -= 1,
            "<" if t.kind == TokenKind::Op => angle += 1,
            ">" if t.kind == TokenKind::Op && angle > 0 => angle -= 1,
            _ => {}
        }
        if depth == 0 && angle == 0 && t.is_op(sep) {
            out.push(&toks[start..i]);
            start = i + 1;
        }
    }
    out.push(&toks[start..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decls(src: &str) -> Declarations {
        locate_declarations(src, &LanguageConfig::java())
    }

    const SRC: &str = "package p;\n\
        \n\
        public class A extends B {\n\
        \x20 private int x = 1;\n\
        \x20 @Override\n\
        \x20 public <T> List<T> get(Map<String, T> m, int... n) throws IOException {\n\
        \x20   Runnable r = new Runnable() {\n\
        \x20     public void run() {\n\
        \x20     }\n\
        \x20   };\n\
        \x20   if (x > 0) {\n\
        \x20     return null;\n\
        \x20   }\n\
        \x20 }\n\
        \x20 A(int y) {\n\
        \x20 }\n\
        \x20 static {\n\
        \x20 }\n\
        \x20 interface I {\n\
        \x20   void f();\n\
        \x20 }\n\
        }\n";

    #[test]
    fn classes_and_methods() {
        let d = decls(SRC);
        assert!(!d.unbalanced);
        let names: Vec<_> = d.classes.iter().map(|c| (c.name.as_str(), c.start, c.end)).collect();
        assert_eq!(names, vec![("A", 3, 22), ("new Runnable", 7, 10), ("I", 19, 21)]);
        let ms: Vec<_> = d.methods.iter().map(|m| (m.signature.as_str(), m.kind, m.start, m.end)).collect();
        assert_eq!(
            ms,
            vec![
                ("get(Map<String,T>,int...)", MethodKind::Method, 6, 14),
                ("run()", MethodKind::Method, 8, 9),
                ("A(int)", MethodKind::Constructor, 15, 16),
                ("<clinit>()", MethodKind::Initializer, 17, 18),
            ]
        );
        assert_eq!(d.methods[1].class, 1);
        assert_eq!(d.class_path(1), "A.new Runnable");
    }

    #[test]
    fn innermost_lookup() {
        let d = decls(SRC);
        assert_eq!(d.innermost_class(8), Some(1));
        assert_eq!(d.innermost_class(11), Some(0));
        assert_eq!(d.innermost_method(12), Some(0));
        assert_eq!(d.innermost_method(8), Some(1));
        assert_eq!(d.innermost_method(4), None);
        assert_eq!(d.innermost_class(1), None);
    }

    #[test]
    fn unbalanced_braces_flagged() {
        assert!(decls("class A {\n void f() {\n").unbalanced);
        assert!(decls("class A {}\n}\n").unbalanced);
    }

    #[test]
    fn class_literal_is_not_a_declaration() {
        let d = decls("class A {\n void f() {\n Object o = A.class;\n if (o != null) {\n }\n }\n}\n");
        assert_eq!(d.classes.len(), 1);
        assert_eq!(d.methods.len(), 1);
    }

    #[test]
    fn control_blocks_are_not_methods() {
        let d = decls("class A {\n void f() {\n while (x) {\n }\n synchronized (this) {\n }\n }\n}\n");
        assert_eq!(d.methods.len(), 1);
    }
}
