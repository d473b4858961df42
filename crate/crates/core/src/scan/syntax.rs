//! Syntax elements of one statement.
//!
//! A statement is parsed into a flat list of elements (calls, conditionals,
//! assignments, ...). Each element has a head token, which identifies it
//! across versions, and a token scope. Scopes nest or are disjoint; a token
//! is *owned* by the innermost element whose scope contains it.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::decl::{method_header, split_top_level, type_len};
use super::{lex, LanguageConfig, LitKind, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKind {
    If,
    Else,
    Case,
    Switch,
    Ternary,
    For,
    ForEach,
    While,
    Do,
    Call,
    New,
    MethodDecl,
    TypeDecl,
    Try,
    Catch,
    Finally,
    Throw,
    Return,
    VarDecl,
    Assignment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Conditional,
    Loop,
    Call,
    New,
    Method,
    Type,
    Exception,
    Return,
    Var,
    Assign,
}

impl ElementKind {
    pub fn category(self) -> Category {
        use ElementKind::*;
        match self {
            If | Else | Case | Switch | Ternary => Category::Conditional,
            For | ForEach | While | Do => Category::Loop,
            Call => Category::Call,
            New => Category::New,
            MethodDecl => Category::Method,
            TypeDecl => Category::Type,
            Try | Catch | Finally | Throw => Category::Exception,
            Return => Category::Return,
            VarDecl => Category::Var,
            Assignment => Category::Assign,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub kind: ElementKind,
    pub head: usize,
    pub scope: Range<usize>,
    /// Callee, declared name, assignment target (without `this.`), type name.
    pub name: Option<String>,
    /// Argument (or parameter) token ranges.
    pub args: Option<Vec<Range<usize>>>,
    /// Condition tokens of conditionals and loops.
    pub cond: Option<Range<usize>>,
    /// Tokens of a braceless body that is part of the same statement.
    pub body: Option<Range<usize>>,
    /// True and false branch of a ternary.
    pub branches: Option<(Range<usize>, Range<usize>)>,
    /// Index of the `{` opening this element's block.
    pub opens_block: Option<usize>,
    /// Declared type (variables), return type (methods), supertypes (types).
    pub decl_type: Option<String>,
    pub modifiers: Vec<String>,
    /// Assignment that initialises a declaration.
    pub decl_init: bool,
}

impl Element {
    fn new(kind: ElementKind, head: usize, scope: Range<usize>) -> Self {
        Element {
            kind,
            head,
            scope,
            name: None,
            args: None,
            cond: None,
            body: None,
            branches: None,
            opens_block: None,
            decl_type: None,
            modifiers: Vec::new(),
            decl_init: false,
        }
    }

    pub fn arg_count(&self) -> usize {
        self.args.as_ref().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    CallHead,
    NewType,
    TypeName,
    DeclName,
    MethodName,
    Reference,
    Other,
}

#[derive(Debug, Clone, Default)]
pub struct Parsed {
    pub elements: Vec<Element>,
    pub roles: Vec<Role>,
    /// Tokens that carry meaning; closing brackets, `;`, `{` and call
    /// parentheses do not.
    pub content: Vec<bool>,
    pub owner: Vec<Option<usize>>,
    pub mate: Vec<Option<usize>>,
}

impl Parsed {
    pub fn owner_kind(&self, i: usize) -> Option<ElementKind> {
        self.owner[i].map(|e| self.elements[e].kind)
    }
}

fn mates(toks: &[Token]) -> Vec<Option<usize>> {
    let mut mate = vec![None; toks.len()];
    let mut stack: Vec<usize> = Vec::new();
    for (i, t) in toks.iter().enumerate() {
        if t.kind != TokenKind::Op {
            continue;
        }
        match t.text.as_str() {
            "(" | "[" | "{" => stack.push(i),
            ")" | "]" | "}" => {
                let want = match t.text.as_str() {
                    ")" => "(",
                    "]" => "[",
                    _ => "{",
                };
                if let Some(pos) = stack.iter().rposition(|&o| toks[o].text == want) {
                    let o = stack[pos];
                    stack.truncate(pos);
                    mate[o] = Some(i);
                    mate[i] = Some(o);
                }
            }
            _ => {}
        }
    }
    mate
}

struct Ctx<'a> {
    t: &'a [Token],
    cfg: &'a LanguageConfig,
    mate: Vec<Option<usize>>,
    elements: Vec<Element>,
    roles: Vec<Role>,
    /// Tokens where assignments and declarations are not elements of their
    /// own (loop headers, parameter lists, annotations, ...).
    quiet: Vec<bool>,
    ignored: Vec<bool>,
    open_parens: Vec<bool>,
}

impl<'a> Ctx<'a> {
    fn op(&self, i: usize, s: &str) -> bool {
        self.t.get(i).is_some_and(|t| t.is_op(s))
    }

    fn kw(&self, i: usize, s: &str) -> bool {
        self.t.get(i).is_some_and(|t| t.is_kw(s))
    }

    /// End (exclusive) of the simple statement starting at `from`: the next
    /// `;` outside brackets, or an unmatched closer, or the end.
    fn stmt_end(&self, from: usize) -> usize {
        let mut depth = 0i32;
        for i in from..self.t.len() {
            let t = &self.t[i];
            if t.kind != TokenKind::Op {
                continue;
            }
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => {
                    depth -= 1;
                    if depth < 0 {
                        return i;
                    }
                }
                ";" if depth == 0 => return i,
                _ => {}
            }
        }
        self.t.len()
    }

    /// End (exclusive) of an expression starting at `from`: stops at `;`,
    /// `,` or `:` outside brackets, or an unmatched closer.
    fn expr_end(&self, from: usize, stop_colon: bool) -> usize {
        let mut depth = 0i32;
        let mut ternary = 0i32;
        for i in from..self.t.len() {
            let t = &self.t[i];
            if t.kind != TokenKind::Op {
                continue;
            }
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => {
                    depth -= 1;
                    if depth < 0 {
                        return i;
                    }
                }
                ";" | "," if depth == 0 => return i,
                "?" if depth == 0 => ternary += 1,
                ":" if depth == 0 => {
                    if ternary > 0 {
                        ternary -= 1;
                    } else if stop_colon {
                        return i;
                    }
                }
                _ => {}
            }
        }
        self.t.len()
    }

    fn args_of(&self, open: usize) -> Option<Vec<Range<usize>>> {
        let close = self.mate[open]?;
        let inner = &self.t[open + 1..close];
        if inner.is_empty() {
            return Some(Vec::new());
        }
        let mut out = Vec::new();
        let mut at = open + 1;
        for part in split_top_level(inner, ",") {
            out.push(at..at + part.len());
            at += part.len() + 1;
        }
        Some(out)
    }

    fn push(&mut self, e: Element) -> usize {
        self.elements.push(e);
        self.elements.len() - 1
    }

    fn set_quiet(&mut self, r: Range<usize>) {
        for q in &mut self.quiet[r] {
            *q = true;
        }
    }

    fn skip_annotation(&mut self, mut i: usize) -> usize {
        while self.op(i, "@") && self.t.get(i + 1).is_some_and(|t| t.is_ident()) {
            let s = i;
            i += 2;
            while self.op(i, ".") && self.t.get(i + 1).is_some_and(|t| t.is_ident()) {
                i += 2;
            }
            if self.op(i, "(") {
                i = self.mate[i].map_or(self.t.len(), |m| m + 1);
            }
            for k in s..i.min(self.t.len()) {
                self.ignored[k] = true;
            }
        }
        i
    }

    fn skip_modifiers(&mut self, mut i: usize) -> (usize, Vec<String>) {
        let mut mods = Vec::new();
        loop {
            i = self.skip_annotation(i);
            match self.t.get(i) {
                Some(t) if t.kind == TokenKind::Keyword && self.cfg.is_modifier(&t.text) => {
                    // `default:` is a label, not a modifier
                    if t.text == "default" && self.op(i + 1, ":") {
                        break;
                    }
                    mods.push(t.text.clone());
                    i += 1;
                }
                _ => break,
            }
        }
        (i, mods)
    }

    fn text(&self, r: Range<usize>) -> String {
        self.t[r].iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ")
    }

    fn compact(&self, r: Range<usize>) -> String {
        self.t[r].iter().map(|t| t.text.as_str()).collect()
    }
}

/// Parses the tokens of one statement.
pub fn parse_statement(toks: &[Token], cfg: &LanguageConfig) -> Parsed {
    let n = toks.len();
    let mut cx = Ctx {
        t: toks,
        cfg,
        mate: mates(toks),
        elements: Vec::new(),
        roles: toks
            .iter()
            .map(|t| if t.is_ident() { Role::Reference } else { Role::Other })
            .collect(),
        quiet: vec![false; n],
        ignored: vec![false; n],
        open_parens: vec![false; n],
    };

    // Positions where a declaration may start.
    let mut starts = vec![0];
    let mut depth = 0i32;
    for i in 0..n {
        let t = &toks[i];
        if t.kind == TokenKind::Op {
            match t.text.as_str() {
                "(" | "[" => depth += 1,
                ")" | "]" => depth -= 1,
                ";" | "{" | "}" if depth <= 0 => starts.push(i + 1),
                _ => {}
            }
        } else if t.is_kw("else") || t.is_kw("do") {
            starts.push(i + 1);
        }
    }
    starts.dedup();
    for s in starts {
        if s < n {
            declaration_at(&mut cx, s);
        }
    }

    let mut i = 0;
    while i < n {
        if cx.ignored[i] {
            i += 1;
            continue;
        }
        if cx.op(i, "@") && toks.get(i + 1).is_some_and(|t| t.is_ident()) {
            i = cx.skip_annotation(i);
            continue;
        }
        scan_token(&mut cx, i);
        i += 1;
    }

    let mut elements = cx.elements;
    elements.sort_by_key(|e| (e.scope.start, std::cmp::Reverse(e.scope.end), e.head));
    let mut content = vec![false; n];
    for (i, t) in toks.iter().enumerate() {
        content[i] = !cx.ignored[i]
            && !(t.kind == TokenKind::Op && matches!(t.text.as_str(), ")" | "]" | "}" | ";" | "{"))
            && !cx.open_parens[i];
    }
    let mut owner = vec![None; n];
    for (i, o) in owner.iter_mut().enumerate() {
        if !content[i] {
            continue;
        }
        let mut best: Option<(usize, usize)> = None;
        for (e, el) in elements.iter().enumerate() {
            if el.scope.contains(&i) {
                let len = el.scope.len();
                if best.is_none_or(|(_, bl)| len <= bl) {
                    best = Some((e, len));
                }
            }
        }
        *o = best.map(|b| b.0);
    }
    Parsed {
        elements,
        roles: cx.roles,
        content,
        owner,
        mate: cx.mate,
    }
}

fn declaration_at(cx: &mut Ctx<'_>, s: usize) {
    let t = cx.t;
    // leading closers of `} else {` style lines are not part of anything
    if cx.kw(s, "import") || cx.kw(s, "package") {
        let end = cx.stmt_end(s);
        for k in s..end.min(t.len()) {
            cx.ignored[k] = true;
        }
        return;
    }
    let (p, mods) = cx.skip_modifiers(s);
    if p >= t.len() {
        return;
    }

    // Type declaration.
    let is_annotation_type = cx.op(p, "@") && cx.kw(p + 1, "interface");
    let kw_at = if is_annotation_type { p + 1 } else { p };
    if cx.kw(kw_at, "class") || cx.kw(kw_at, "interface") || cx.kw(kw_at, "enum") {
        if let Some(name) = t.get(kw_at + 1).filter(|x| x.is_ident()) {
            let brace = (kw_at..t.len()).find(|&k| cx.op(k, "{"));
            let end = brace.unwrap_or_else(|| cx.stmt_end(kw_at));
            let mut e = Element::new(ElementKind::TypeDecl, kw_at, s..end);
            e.name = Some(name.text.clone());
            e.modifiers = mods;
            e.opens_block = brace;
            e.decl_type = Some(cx.text(kw_at + 2..end));
            for k in kw_at + 1..end {
                if t[k].is_ident() {
                    cx.roles[k] = Role::TypeName;
                }
            }
            cx.set_quiet(s..end);
            cx.push(e);
        }
        return;
    }

    // Method or constructor header.
    let header_end = {
        let mut depth = 0i32;
        let mut found = None;
        for k in p..t.len() {
            if t[k].is_op("(") {
                depth += 1;
            } else if t[k].is_op(")") {
                depth -= 1;
            } else if depth == 0 && (t[k].is_op("{") || t[k].is_op(";") || t[k].is_op("=")) {
                found = Some(k);
                break;
            }
        }
        found
    };
    if let Some(he) = header_end.filter(|&he| !cx.op(he, "=")) {
        if let Some(h) = method_header(t, p, he, cx.cfg) {
            let ctor_like = h.no_return_type;
            let plausible = if ctor_like {
                cx.op(he, "{") && t[h.name_idx].text.starts_with(|c: char| c.is_uppercase())
            } else {
                true
            };
            if plausible {
                let mut e = Element::new(ElementKind::MethodDecl, h.name_idx, s..he);
                e.name = Some(h.name.clone());
                e.args = cx.args_of(h.open);
                e.modifiers = mods;
                e.decl_type = Some(cx.compact(p..h.name_idx));
                e.opens_block = cx.op(he, "{").then_some(he);
                cx.roles[h.name_idx] = Role::MethodName;
                for k in p..h.name_idx {
                    if t[k].is_ident() {
                        cx.roles[k] = Role::TypeName;
                    }
                }
                if let Some(args) = e.args.clone() {
                    for a in args {
                        let last = a.end.saturating_sub(1);
                        for k in a.clone() {
                            if t[k].is_ident() {
                                cx.roles[k] = if k == last { Role::DeclName } else { Role::TypeName };
                            }
                        }
                    }
                }
                cx.open_parens[h.open] = true;
                cx.set_quiet(s..he);
                cx.push(e);
                return;
            }
        }
    }

    // Variable declaration(s).
    let Some(tl) = type_len(t, p, cx.cfg) else { return };
    let mut name_at = p + tl;
    if !t.get(name_at).is_some_and(|x| x.is_ident()) {
        return;
    }
    let follows = |k: usize| {
        t.get(k)
            .is_none_or(|x| x.is_op("=") || x.is_op(";") || x.is_op(",") || x.is_op("[") || x.is_op(":"))
    };
    if !follows(name_at + 1) {
        return;
    }
    let ty = cx.compact(p..p + tl);
    for k in p..p + tl {
        if t[k].is_ident() {
            cx.roles[k] = Role::TypeName;
        }
    }
    let mut first = true;
    loop {
        let scope_start = if first { s } else { name_at };
        let mut e = Element::new(ElementKind::VarDecl, name_at, scope_start..name_at + 1);
        e.name = Some(t[name_at].text.clone());
        e.decl_type = Some(ty.clone());
        e.modifiers = mods.clone();
        cx.roles[name_at] = Role::DeclName;
        cx.push(e);
        let mut k = name_at + 1;
        while cx.op(k, "[") && cx.op(k + 1, "]") {
            k += 2;
        }
        if cx.op(k, "=") {
            let end = cx.expr_end(k + 1, false);
            let mut a = Element::new(ElementKind::Assignment, k, k..end);
            a.name = Some(t[name_at].text.clone());
            a.decl_init = true;
            cx.quiet[k] = true;
            cx.push(a);
            k = end;
        }
        if cx.op(k, ",") && t.get(k + 1).is_some_and(|x| x.is_ident()) && follows(k + 2) {
            name_at = k + 1;
            first = false;
            continue;
        }
        break;
    }
}

const CONTROL_PAREN: &[&str] = &["if", "while", "for", "switch", "catch", "synchronized", "try"];

fn scan_token(cx: &mut Ctx<'_>, i: usize) {
    let t = cx.t;
    let tok = &t[i];
    match tok.kind {
        TokenKind::Keyword => keyword(cx, i),
        TokenKind::Ident => {
            if cx.op(i + 1, "(") && !matches!(cx.roles[i], Role::MethodName | Role::NewType | Role::TypeName) {
                call(cx, i);
            }
        }
        TokenKind::Op => match tok.text.as_str() {
            "?" => ternary(cx, i),
            "=" | "+=" | "-=" | "*=" | "/=" | "%=" | "&=" | "|=" | "^=" | "<<=" | ">>=" | ">>>=" => {
                if !cx.quiet[i] {
                    assignment(cx, i);
                }
            }
            "++" | "--" if !cx.quiet[i] => inc_dec(cx, i),
            _ => {}
        },
        TokenKind::Literal(_) => {}
    }
}

fn keyword(cx: &mut Ctx<'_>, i: usize) {
    let t = cx.t;
    let kw = t[i].text.as_str();
    if CONTROL_PAREN.contains(&kw) && cx.op(i + 1, "(") {
        cx.open_parens[i + 1] = true;
    }
    match kw {
        "if" | "while" | "switch" if cx.op(i + 1, "(") => {
            let open = i + 1;
            let Some(close) = cx.mate[open] else { return };
            let kind = match kw {
                "if" => ElementKind::If,
                "while" => ElementKind::While,
                _ => ElementKind::Switch,
            };
            let mut e = Element::new(kind, i, i..close + 1);
            e.cond = Some(open + 1..close);
            if cx.op(close + 1, "{") {
                e.opens_block = Some(close + 1);
            } else if close + 1 < t.len() && !cx.op(close + 1, ";") {
                e.body = Some(close + 1..cx.stmt_end(close + 1));
            }
            cx.push(e);
        }
        "for" if cx.op(i + 1, "(") => {
            let open = i + 1;
            let Some(close) = cx.mate[open] else { return };
            let inner = &t[open + 1..close];
            let colon = split_top_level(inner, ":").len() > 1;
            let mut e = Element::new(if colon { ElementKind::ForEach } else { ElementKind::For }, i, i..close + 1);
            let parts = split_top_level(inner, ";");
            e.cond = if colon || parts.len() != 3 {
                Some(open + 1..close)
            } else {
                let c0 = open + 1 + parts[0].len() + 1;
                Some(c0..c0 + parts[1].len())
            };
            if cx.op(close + 1, "{") {
                e.opens_block = Some(close + 1);
            } else if close + 1 < t.len() && !cx.op(close + 1, ";") {
                e.body = Some(close + 1..cx.stmt_end(close + 1));
            }
            cx.set_quiet(open..close + 1);
            // The loop variable is a declaration name, its type a type name.
            if colon {
                let first = split_top_level(inner, ":")[0];
                let k = open + first.len();
                if k > open + 1 && t[k].is_ident() {
                    cx.roles[k] = Role::DeclName;
                }
            }
            cx.push(e);
        }
        "case" => {
            let end = cx.expr_end(i + 1, true);
            let mut e = Element::new(ElementKind::Case, i, i..(end + 1).min(t.len()));
            e.cond = Some(i + 1..end);
            cx.push(e);
        }
        "default" if cx.op(i + 1, ":") => {
            cx.push(Element::new(ElementKind::Case, i, i..i + 2));
        }
        "else" => {
            let mut e = Element::new(ElementKind::Else, i, i..i + 1);
            if cx.op(i + 1, "{") {
                e.opens_block = Some(i + 1);
            } else if cx.kw(i + 1, "if") {
                e.name = Some("if".into());
            } else if i + 1 < t.len() {
                e.body = Some(i + 1..cx.stmt_end(i + 1));
            }
            cx.push(e);
        }
        "do" => {
            let mut e = Element::new(ElementKind::Do, i, i..i + 1);
            if cx.op(i + 1, "{") {
                e.opens_block = Some(i + 1);
            }
            cx.push(e);
        }
        "try" => {
            let mut end = i + 1;
            if cx.op(i + 1, "(") {
                if let Some(close) = cx.mate[i + 1] {
                    cx.set_quiet(i + 1..close + 1);
                    end = close + 1;
                }
            }
            let mut e = Element::new(ElementKind::Try, i, i..end);
            if cx.op(end, "{") {
                e.opens_block = Some(end);
            }
            cx.push(e);
        }
        "catch" if cx.op(i + 1, "(") => {
            let Some(close) = cx.mate[i + 1] else { return };
            let mut e = Element::new(ElementKind::Catch, i, i..close + 1);
            if cx.op(close + 1, "{") {
                e.opens_block = Some(close + 1);
            }
            cx.set_quiet(i + 1..close + 1);
            for k in i + 2..close {
                if t[k].is_ident() {
                    cx.roles[k] = if k + 1 == close { Role::DeclName } else { Role::TypeName };
                }
            }
            cx.push(e);
        }
        "finally" => {
            let mut e = Element::new(ElementKind::Finally, i, i..i + 1);
            if cx.op(i + 1, "{") {
                e.opens_block = Some(i + 1);
            }
            cx.push(e);
        }
        "throw" | "return" => {
            let end = cx.stmt_end(i + 1);
            let kind = if kw == "throw" { ElementKind::Throw } else { ElementKind::Return };
            cx.push(Element::new(kind, i, i..end));
        }
        "new" => new_expr(cx, i),
        "this" | "super" if cx.op(i + 1, "(") => call(cx, i),
        _ => {}
    }
}

fn call(cx: &mut Ctx<'_>, i: usize) {
    let open = i + 1;
    let Some(close) = cx.mate[open] else { return };
    let mut e = Element::new(ElementKind::Call, i, i..close + 1);
    e.name = Some(cx.t[i].text.clone());
    e.args = cx.args_of(open);
    cx.roles[i] = Role::CallHead;
    cx.open_parens[open] = true;
    cx.push(e);
}

fn new_expr(cx: &mut Ctx<'_>, i: usize) {
    let t = cx.t;
    let mut j = i + 1;
    // explicit type arguments of the constructor
    if cx.op(j, "<") {
        while j < t.len() && !cx.op(j, ">") {
            j += 1;
        }
        j += 1;
    }
    let type_start = j;
    let len = type_len(t, j, cx.cfg).unwrap_or(0);
    // type_len also eats `[]` pairs; stop before an array dimension.
    let mut type_end = j + len;
    while type_end > type_start && (cx.op(type_end - 1, "]") || cx.op(type_end - 1, "[")) {
        type_end -= 1;
    }
    if type_end == type_start {
        return;
    }
    for k in type_start..type_end {
        if t[k].is_ident() {
            cx.roles[k] = Role::NewType;
        }
    }
    let name = cx.compact(type_start..type_end);
    let mut e = Element::new(ElementKind::New, i, i..type_end);
    e.name = Some(name);
    let mut k = type_end;
    if cx.op(k, "(") {
        if let Some(close) = cx.mate[k] {
            e.args = cx.args_of(k);
            cx.open_parens[k] = true;
            e.scope = i..close + 1;
            if cx.op(close + 1, "{") {
                e.opens_block = Some(close + 1);
            }
        }
    } else {
        while cx.op(k, "[") {
            match cx.mate[k] {
                Some(c) => k = c + 1,
                None => break,
            }
        }
        if cx.op(k, "{") {
            if let Some(c) = cx.mate[k] {
                k = c + 1;
            }
        }
        e.scope = i..k;
    }
    cx.push(e);
}

fn ternary(cx: &mut Ctx<'_>, q: usize) {
    let t = cx.t;
    // generic wildcard `<?>`, `<? extends T>`
    if cx.op(q.wrapping_sub(1), "<")
        || cx.op(q + 1, ">")
        || cx.op(q + 1, ",")
        || cx.kw(q + 1, "extends")
        || cx.kw(q + 1, "super")
    {
        return;
    }
    // start: walk back to an expression boundary
    let mut s = q;
    let mut depth = 0i32;
    while s > 0 {
        let p = &t[s - 1];
        if p.kind == TokenKind::Op {
            match p.text.as_str() {
                ")" | "]" => depth += 1,
                "(" | "[" | "{" => {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                }
                "=" | "+=" | "-=" | "*=" | "/=" | "%=" | "&=" | "|=" | "^=" | "," | ";" | "?" | ":" | "->"
                    if depth == 0 =>
                {
                    break
                }
                _ => {}
            }
        } else if depth == 0 && (p.is_kw("return") || p.is_kw("throw") || p.is_kw("case")) {
            break;
        }
        s -= 1;
    }
    // colon: the `:` matching this `?`
    let mut depth = 0i32;
    let mut nested = 0;
    let mut colon = None;
    for k in q + 1..t.len() {
        let x = &t[k];
        if x.kind != TokenKind::Op {
            continue;
        }
        match x.text.as_str() {
            "(" | "[" | "{" => depth += 1,
            ")" | "]" | "}" => {
                depth -= 1;
                if depth < 0 {
                    break;
                }
            }
            "?" if depth == 0 => nested += 1,
            ":" if depth == 0 => {
                if nested == 0 {
                    colon = Some(k);
                    break;
                }
                nested -= 1;
            }
            ";" if depth == 0 => break,
            _ => {}
        }
    }
    let Some(c) = colon else { return };
    let end = cx.expr_end(c + 1, true);
    let mut e = Element::new(ElementKind::Ternary, q, s..end);
    e.cond = Some(s..q);
    e.branches = Some((q + 1..c, c + 1..end));
    cx.push(e);
}

/// Start of the assignable expression ending right before `at`.
fn lvalue_start(cx: &Ctx<'_>, at: usize) -> Option<usize> {
    let t = cx.t;
    let mut s = at;
    loop {
        if s == 0 {
            break;
        }
        let p = &t[s - 1];
        if p.is_op("]") {
            s = cx.mate[s - 1]?;
        } else if p.is_ident() || p.is_kw("this") || p.is_kw("super") {
            s -= 1;
            if s > 0 && t[s - 1].is_op(".") {
                s -= 1;
                continue;
            }
            break;
        } else if p.is_op(")") && s >= 2 && t[s - 2].kind != TokenKind::Op {
            // `foo().x = ...`: include the call
            let o = cx.mate[s - 1]?;
            s = o;
        } else {
            break;
        }
    }
    (s < at).then_some(s)
}

fn target_name(cx: &Ctx<'_>, r: Range<usize>) -> String {
    let t = cx.t;
    let mut out = String::new();
    let mut k = r.start;
    while k < r.end {
        if t[k].is_op("[") {
            k = cx.mate[k].map_or(r.end, |m| m + 1);
            continue;
        }
        out.push_str(&t[k].text);
        k += 1;
    }
    out.strip_prefix("this.").map(str::to_string).unwrap_or(out)
}

fn assignment(cx: &mut Ctx<'_>, i: usize) {
    let Some(s) = lvalue_start(cx, i) else { return };
    let end = cx.expr_end(i + 1, false);
    let mut e = Element::new(ElementKind::Assignment, i, s..end);
    e.name = Some(target_name(cx, s..i));
    cx.push(e);
}

fn inc_dec(cx: &mut Ctx<'_>, i: usize) {
    let t = cx.t;
    let postfix = i > 0 && (t[i - 1].is_ident() || t[i - 1].is_op("]"));
    let (range, scope) = if postfix {
        let Some(s) = lvalue_start(cx, i) else { return };
        (s..i, s..i + 1)
    } else {
        let mut k = i + 1;
        loop {
            if t.get(k).is_some_and(|x| x.is_ident() || x.is_kw("this")) {
                k += 1;
            } else {
                break;
            }
            if cx.op(k, "[") {
                k = cx.mate[k].map_or(t.len(), |m| m + 1);
            }
            if cx.op(k, ".") {
                k += 1;
            } else {
                break;
            }
        }
        if k == i + 1 {
            return;
        }
        (i + 1..k, i..k)
    };
    let mut e = Element::new(ElementKind::Assignment, i, scope);
    e.name = Some(target_name(cx, range));
    cx.push(e);
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CallFeature {
    pub callee: String,
    pub arg_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MethodDeclFeature {
    pub name: String,
    pub param_count: usize,
    pub return_type: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VarDeclFeature {
    pub name: String,
    pub var_type: String,
    pub initialized: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum LiteralKind {
    Int,
    Float,
    Str,
    Char,
    Bool,
    Null,
}

/// Flat summary of the syntax found in a statement.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LineFeatures {
    pub assignment: bool,
    pub increment: bool,
    pub compound_assignment: bool,
    pub conditional: bool,
    pub loop_header: bool,
    pub calls: Vec<CallFeature>,
    pub method_decl: Option<MethodDeclFeature>,
    pub type_decl: Option<String>,
    pub instantiations: Vec<String>,
    pub exception_handling: bool,
    pub throw: bool,
    pub returns: bool,
    pub var_decls: Vec<VarDeclFeature>,
    pub literals: Vec<(LiteralKind, String)>,
    pub identifiers: Vec<String>,
    pub logic_ops: usize,
    pub relational_ops: usize,
    pub arithmetic_ops: usize,
}

/// Extracts syntax features of a statement (one or more lines of code).
/// Imports, package declarations and annotations yield nothing.
pub fn extract_features(stmt: &str, cfg: &LanguageConfig) -> LineFeatures {
    let toks = lex(stmt, 1, cfg).tokens;
    let p = parse_statement(&toks, cfg);
    let mut f = LineFeatures::default();
    for e in &p.elements {
        match e.kind {
            ElementKind::Assignment if !e.decl_init => {
                let op = toks[e.head].text.as_str();
                match op {
                    "++" | "--" => f.increment = true,
                    "=" => f.assignment = true,
                    _ => f.compound_assignment = true,
                }
            }
            ElementKind::If | ElementKind::Else | ElementKind::Case | ElementKind::Switch | ElementKind::Ternary => {
                f.conditional = true
            }
            ElementKind::For | ElementKind::ForEach | ElementKind::While | ElementKind::Do => f.loop_header = true,
            ElementKind::Call => f.calls.push(CallFeature {
                callee: e.name.clone().unwrap_or_default(),
                arg_count: e.arg_count(),
            }),
            ElementKind::New => f.instantiations.push(e.name.clone().unwrap_or_default()),
            ElementKind::MethodDecl => {
                f.method_decl = Some(MethodDeclFeature {
                    name: e.name.clone().unwrap_or_default(),
                    param_count: e.arg_count(),
                    return_type: e.decl_type.clone().unwrap_or_default(),
                })
            }
            ElementKind::TypeDecl => f.type_decl = e.name.clone(),
            ElementKind::Try | ElementKind::Catch | ElementKind::Finally => f.exception_handling = true,
            ElementKind::Throw => f.throw = true,
            ElementKind::Return => f.returns = true,
            ElementKind::VarDecl => f.var_decls.push(VarDeclFeature {
                name: e.name.clone().unwrap_or_default(),
                var_type: e.decl_type.clone().unwrap_or_default(),
                initialized: p
                    .elements
                    .iter()
                    .any(|a| a.decl_init && a.name == e.name && a.head == e.head + 1),
            }),
            _ => {}
        }
    }
    for (i, t) in toks.iter().enumerate() {
        if p.owner[i].is_none() && !p.content[i] && t.is_word() {
            // ignored tokens (annotations, imports)
            continue;
        }
        match t.kind {
            TokenKind::Literal(k) => {
                let kind = match k {
                    LitKind::Int => LiteralKind::Int,
                    LitKind::Float => LiteralKind::Float,
                    LitKind::Str => LiteralKind::Str,
                    LitKind::Char => LiteralKind::Char,
                    LitKind::Bool => LiteralKind::Bool,
                    LitKind::Null => LiteralKind::Null,
                };
                f.literals.push((kind, t.text.clone()));
            }
            TokenKind::Ident if p.content[i] => f.identifiers.push(t.text.clone()),
            TokenKind::Op => match t.text.as_str() {
                "&&" | "||" => f.logic_ops += 1,
                "==" | "!=" | "<=" | ">=" => f.relational_ops += 1,
                "<" | ">" if !looks_generic(&toks, i) => f.relational_ops += 1,
                "+" | "-" | "*" | "/" | "%" => f.arithmetic_ops += 1,
                _ => {}
            },
            _ => {}
        }
    }
    f
}

/// Rough test whether a `<`/`>` belongs to type arguments.
pub fn looks_generic(toks: &[Token], i: usize) -> bool {
    let t = &toks[i];
    if t.is_op("<") {
        // `Name<Upper...` or `<>` diamond
        let prev_type = i > 0 && toks[i - 1].is_ident() && toks[i - 1].text.starts_with(|c: char| c.is_uppercase());
        let next = toks.get(i + 1);
        let next_type = next.is_some_and(|n| {
            n.is_op(">") || n.is_op("?") || (n.is_ident() && n.text.starts_with(|c: char| c.is_uppercase()))
        });
        prev_type && next_type
    } else if t.is_op(">") {
        let mut depth = 0;
        for k in (0..i).rev() {
            if toks[k].is_op(">") {
                depth += 1;
            } else if toks[k].is_op("<") {
                if depth == 0 {
                    return looks_generic(toks, k);
                }
                depth -= 1;
            } else if !(toks[k].is_ident()
                || toks[k].is_op(",")
                || toks[k].is_op(".")
                || toks[k].is_op("?")
                || toks[k].is_op("[")
                || toks[k].is_op("]")
                || toks[k].kind == TokenKind::Keyword)
            {
                return false;
            }
        }
        false
    } else {
        false
    }
}
