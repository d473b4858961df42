use std::collections::BTreeSet;

use super::{PatternReport, PatternVariant};
use crate::actions::constant_like;
use crate::analysis::{ElemId, ElemState, FileAnalysis, PatchAnalysis, TokState};
use crate::context::{FileContext, PatchContext, Side, Site};
use crate::diff::ChangeKind;
use crate::scan::syntax::ElementKind;
use crate::scan::{lex, LanguageConfig, LitKind, Token, TokenKind};
use crate::text::normalize_ws;

/// Minimum 3-gram Jaccard similarity of two chunks that differ in
/// identifiers for them to count as the same change. A heuristic cut-off,
/// tunable through [`PatternConfig`].
pub const COPY_PASTE_JACCARD: f64 = 0.8;

#[derive(Debug, Clone, PartialEq)]
pub struct PatternConfig {
    pub copy_paste_jaccard: f64,
}

impl Default for PatternConfig {
    fn default() -> Self {
        PatternConfig {
            copy_paste_jaccard: COPY_PASTE_JACCARD,
        }
    }
}

/// Repair patterns of a patch.
pub fn detect_patterns(ctx: &PatchContext) -> PatternReport {
    detect_patterns_in(&PatchAnalysis::new(ctx), &ctx.cfg, &PatternConfig::default())
}

/// Repair patterns from an existing analysis.
pub fn detect_patterns_in(pa: &PatchAnalysis<'_>, lang: &LanguageConfig, cfg: &PatternConfig) -> PatternReport {
    let mut out = Vec::new();
    for fa in &pa.files {
        conditional_blocks(fa, &mut out);
        wraps(fa, &mut out);
        expression_fix(fa, &mut out);
        wrong_reference(fa, &mut out);
        missing_null_check(fa, &mut out);
        constant_change(fa, &mut out);
        for &(o, n) in &fa.moves {
            out.push((PatternVariant::CodeMove, fa.site(Side::Old, fa.old.stmts[o].first_line())));
            out.push((PatternVariant::CodeMove, fa.site(Side::New, fa.new.stmts[n].first_line())));
        }
    }
    single_line(pa, &mut out);
    copy_paste(pa, lang, cfg, &mut out);
    PatternReport::from_findings(out)
}

type Out = Vec<(PatternVariant, Site)>;


fn head_changed(fa: &FileAnalysis<'_>, id: ElemId) -> bool {
    let sd = fa.side(id.side);
    sd.changed_tok(sd.head(id.stmt, id.elem))
}

/// Element introduced (new side) or dropped (old side) by the patch.
fn fresh(fa: &FileAnalysis<'_>, id: ElemId) -> bool {
    fa.state(id) == ElemState::Unmatched && head_changed(fa, id)
}

/// Side indices of the `{` an element opens and of its matching `}`.
fn block_of(fa: &FileAnalysis<'_>, id: ElemId) -> Option<(usize, usize)> {
    let sd = fa.side(id.side);
    let open = fa.elem(id).opens_block?;
    let open = sd.stmts[id.stmt].tokens.start + open;
    let close = *sd.brace_mate.get(&open)?;
    Some((open, close))
}

fn line_text(fa: &FileAnalysis<'_>, side: Side, line: u32) -> String {
    normalize_ws(fa.side(side).scan.text.get(line).unwrap_or(""))
}

/// The closing brace line was added (removed), allowing for the diff having
/// attached an identical changed line just before the opener instead.
fn closer_changed(fa: &FileAnalysis<'_>, side: Side, open_line: u32, close_line: u32) -> bool {
    let sd = fa.side(side);
    if sd.line_changed(close_line) {
        return true;
    }
    let before = (1..open_line).rev().find(|&l| sd.scan.is_code(l));
    before.is_some_and(|b| sd.line_changed(b) && line_text(fa, side, b) == line_text(fa, side, close_line))
}

fn code_lines(fa: &FileAnalysis<'_>, side: Side, from: u32, to: u32) -> Vec<u32> {
    let sd = fa.side(side);
    (from..to).filter(|&l| sd.scan.is_code(l)).collect()
}

fn has_keyword(fa: &FileAnalysis<'_>, side: Side, toks: std::ops::Range<usize>, kw: &str) -> bool {
    let sd = fa.side(side);
    toks.into_iter().any(|t| sd.tok(t).is_kw(kw))
}

/// Blocks made entirely of added (removed) lines.
fn conditional_blocks(fa: &FileAnalysis<'_>, out: &mut Out) {
    for id in fa.elements() {
        let el = fa.elem(id);
        if !matches!(el.kind, ElementKind::If | ElementKind::Else) || !fresh(fa, id) {
            continue;
        }
        let side = id.side;
        let sd = fa.side(side);
        let open_line = sd.tok(sd.head(id.stmt, id.elem)).line;
        let body: std::ops::Range<usize> = if let Some((o, c)) = block_of(fa, id) {
            let close_line = sd.tok(c).line;
            let inner = code_lines(fa, side, open_line + 1, close_line);
            if !inner.iter().all(|&l| sd.line_changed(l)) {
                continue;
            }
            let closer_ok = closer_changed(fa, side, open_line, close_line) || {
                let t = line_text(fa, side, close_line);
                ["} else", "} catch", "} finally"].iter().any(|p| t.starts_with(p))
            };
            if !closer_ok {
                continue;
            }
            o..c
        } else if let Some(b) = &el.body {
            let r = sd.abs(id.stmt, b);
            if !r.clone().all(|t| sd.changed_tok(t)) {
                continue;
            }
            r
        } else {
            // `else if`: the `if` speaks for itself
            continue;
        };
        let variant = if side == Side::Old {
            PatternVariant::CondBlockRem
        } else if has_keyword(fa, side, body.clone(), "throw") {
            PatternVariant::CondBlockExcAdd
        } else if has_keyword(fa, side, body, "return") {
            PatternVariant::CondBlockRetAdd
        } else {
            PatternVariant::CondBlockOthersAdd
        };
        out.push((variant, fa.site(side, open_line)));
    }
}

/// Existing code put inside (taken out of) a new (dropped) construct.
fn wraps(fa: &FileAnalysis<'_>, out: &mut Out) {
    for id in fa.elements() {
        let el = fa.elem(id);
        let side = id.side;
        let sd = fa.side(side);
        let unwrap = side == Side::Old;
        if !fresh(fa, id) {
            continue;
        }
        let site = fa.elem_site(id);
        let open_line = site.line;
        match el.kind {
            ElementKind::Call => {
                let wraps_arg = el
                    .args
                    .iter()
                    .flatten()
                    .any(|a| fa.all_equal(side, sd.abs(id.stmt, a)));
                if wraps_arg {
                    let v = if unwrap { PatternVariant::UnwrapMethod } else { PatternVariant::WrapsMethod };
                    out.push((v, site));
                }
            }
            ElementKind::Ternary => {
                let Some((a, b)) = &el.branches else { continue };
                if fa.all_equal(side, sd.abs(id.stmt, a)) || fa.all_equal(side, sd.abs(id.stmt, b)) {
                    let v = if unwrap { PatternVariant::UnwrapIfElse } else { PatternVariant::WrapsIfElse };
                    out.push((v, site));
                }
            }
            ElementKind::If
            | ElementKind::Else
            | ElementKind::Try
            | ElementKind::For
            | ElementKind::ForEach
            | ElementKind::While
            | ElementKind::Do => {
                let wrapped = if let Some((_, c)) = block_of(fa, id) {
                    let close_line = sd.tok(c).line;
                    let kept = code_lines(fa, side, open_line + 1, close_line)
                        .into_iter()
                        .any(|l| !sd.line_changed(l));
                    let closer_ok = closer_changed(fa, side, open_line, close_line) || el.kind == ElementKind::Else;
                    (kept && closer_ok).then_some(Some(c))
                } else if let Some(b) = &el.body {
                    fa.all_equal(side, sd.abs(id.stmt, b)).then_some(None)
                } else {
                    None
                };
                let Some(closer) = wrapped else { continue };
                let v = match (el.kind, unwrap) {
                    (ElementKind::If, false) => {
                        let else_follows = closer.is_some_and(|c| {
                            c + 1 < sd.scan.tokens.len()
                                && sd.tok(c + 1).is_kw("else")
                                && sd.line_changed(sd.tok(c + 1).line)
                        });
                        if else_follows {
                            PatternVariant::WrapsIfElse
                        } else {
                            PatternVariant::WrapsIf
                        }
                    }
                    (ElementKind::Else, false) => {
                        if if_of_else(fa, id).is_some_and(|i| fresh(fa, i)) {
                            PatternVariant::WrapsIfElse
                        } else {
                            PatternVariant::WrapsElse
                        }
                    }
                    (ElementKind::If | ElementKind::Else, true) => PatternVariant::UnwrapIfElse,
                    (ElementKind::Try, false) => PatternVariant::WrapsTryCatch,
                    (ElementKind::Try, true) => PatternVariant::UnwrapTryCatch,
                    (_, false) => PatternVariant::WrapsLoop,
                    // no unwrap variant for loops
                    (_, true) => continue,
                };
                out.push((v, site));
            }
            _ => {}
        }
    }
}

/// The `if` whose block the `} else` of `id` closes.
fn if_of_else(fa: &FileAnalysis<'_>, id: ElemId) -> Option<ElemId> {
    let sd = fa.side(id.side);
    let head = sd.head(id.stmt, id.elem);
    let prev = head.checked_sub(1)?;
    if !sd.tok(prev).is_op("}") {
        return None;
    }
    let open = *sd.brace_mate.get(&prev)?;
    let stmt = sd.tok_stmt[open]?;
    let local = open - sd.stmts[stmt].tokens.start;
    let elem = sd.parsed[stmt]
        .elements
        .iter()
        .position(|e| e.opens_block == Some(local) && matches!(e.kind, ElementKind::If | ElementKind::Else))?;
    Some(ElemId { side: id.side, stmt, elem })
}

const LOGIC_OPS: &[&str] = &["&&", "||", "!", "==", "!=", "<", ">", "<=", ">="];
const ARITH_OPS: &[&str] = &["+", "-", "*", "/", "%"];

fn logic_profile(toks: &[&Token]) -> (usize, Vec<String>) {
    let junctions = toks.iter().filter(|t| t.is_op("&&") || t.is_op("||")).count();
    let mut ops: Vec<String> = toks
        .iter()
        .filter(|t| (t.kind == TokenKind::Op && LOGIC_OPS.contains(&t.text.as_str())) || t.is_kw("instanceof"))
        .map(|t| t.text.clone())
        .collect();
    ops.sort();
    (junctions, ops)
}

fn binary_at(toks: &[&Token], i: usize) -> bool {
    i > 0 && {
        let p = toks[i - 1];
        matches!(p.kind, TokenKind::Ident | TokenKind::Literal(_))
            || p.is_op(")")
            || p.is_op("]")
            || p.is_kw("this")
    }
}

fn arith_profile(toks: &[&Token]) -> (Vec<String>, usize) {
    let mut ops: Vec<String> = (0..toks.len())
        .filter(|&i| toks[i].kind == TokenKind::Op && ARITH_OPS.contains(&toks[i].text.as_str()) && binary_at(toks, i))
        .map(|i| toks[i].text.clone())
        .collect();
    ops.sort();
    // parentheses grouping arithmetic, as opposed to call or control ones
    let mut groups = 0;
    for i in 0..toks.len() {
        if !toks[i].is_op("(") {
            continue;
        }
        let grouping = i == 0 || (toks[i - 1].kind == TokenKind::Op && !toks[i - 1].is_op(")") && !toks[i - 1].is_op("]"))
            || toks[i - 1].is_kw("return");
        if !grouping {
            continue;
        }
        let mut depth = 0;
        for j in i..toks.len() {
            let t = toks[j];
            if t.is_op("(") {
                depth += 1;
            } else if t.is_op(")") {
                depth -= 1;
                if depth == 0 {
                    break;
                }
            } else if depth == 1 && t.kind == TokenKind::Op && ARITH_OPS.contains(&t.text.as_str()) && binary_at(toks, j) {
                groups += 1;
                break;
            }
        }
    }
    (ops, groups)
}

fn expression_fix(fa: &FileAnalysis<'_>, out: &mut Out) {
    for id in fa.elements() {
        if id.side != Side::Old {
            continue;
        }
        let ElemState::Matched(p) = fa.state(id) else { continue };
        let el = fa.elem(id);
        let part = |e: ElemId| -> Option<std::ops::Range<usize>> {
            let x = fa.elem(e);
            let sd = fa.side(e.side);
            match x.kind {
                ElementKind::If | ElementKind::While | ElementKind::For | ElementKind::Ternary => {
                    x.cond.as_ref().map(|c| sd.abs(e.stmt, c))
                }
                ElementKind::Return => Some(sd.abs(e.stmt, &(x.head + 1..x.scope.end))),
                _ => None,
            }
        };
        if !matches!(el.kind, ElementKind::If | ElementKind::While | ElementKind::For | ElementKind::Ternary | ElementKind::Return) {
            continue;
        }
        let (Some(ro), Some(rn)) = (part(id), part(p)) else { continue };
        if !ro.clone().any(|t| fa.old.changed_tok(t)) && !rn.clone().any(|t| fa.new.changed_tok(t)) {
            continue;
        }
        let to: Vec<&Token> = ro.map(|t| fa.old.tok(t)).collect();
        let tn: Vec<&Token> = rn.map(|t| fa.new.tok(t)).collect();
        let (jo, oo) = logic_profile(&to);
        let (jn, on) = logic_profile(&tn);
        let v = if jn > jo {
            PatternVariant::ExpLogicExpand
        } else if jn < jo {
            PatternVariant::ExpLogicReduce
        } else if oo != on {
            PatternVariant::ExpLogicMod
        } else {
            continue;
        };
        out.push((v, fa.elem_site(p)));
    }

    for g in &fa.groups {
        if !g.two_sided() {
            continue;
        }
        let to: Vec<&Token> = g.old_toks.iter().map(|&t| fa.old.tok(t)).collect();
        let tn: Vec<&Token> = g.new_toks.iter().map(|&t| fa.new.tok(t)).collect();
        if arith_profile(&to) != arith_profile(&tn) {
            let line = fa.new.stmts[g.new[0]].first_line();
            out.push((PatternVariant::ExpArithMod, fa.site(Side::New, line)));
        }
    }
}

/// `name(` with no arguments, possibly qualified: `a.b.name()`.
fn simple_call(fa: &FileAnalysis<'_>, side: Side, toks: &[usize]) -> bool {
    let sd = fa.side(side);
    let n = toks.len();
    if n < 3 || !sd.tok(toks[n - 2]).is_op("(") || !sd.tok(toks[n - 1]).is_op(")") {
        return false;
    }
    let head = toks[n - 3];
    if sd.role(head) != Some(crate::scan::syntax::Role::CallHead) {
        return false;
    }
    toks[..n - 3]
        .iter()
        .enumerate()
        .all(|(i, &t)| if i % 2 == 0 { sd.tok(t).is_ident() } else { sd.tok(t).is_op(".") })
        && (n - 3).is_multiple_of(2)
}

fn wrong_reference(fa: &FileAnalysis<'_>, out: &mut Out) {
    use crate::scan::syntax::Role;
    for g in &fa.groups {
        if !g.two_sided() || g.gaps.len() != 1 {
            continue;
        }
        let gap = &fa.gaps[g.gaps[0]];
        let var = |side: Side, toks: &[usize]| -> bool {
            let sd = fa.side(side);
            matches!(toks, [t] if sd.tok(*t).is_ident()
                && sd.role(*t) == Some(Role::Reference)
                && !constant_like(&sd.tok(*t).text))
        };
        let callee = |side: Side, toks: &[usize]| -> bool {
            let sd = fa.side(side);
            matches!(toks, [t] if sd.role(*t) == Some(Role::CallHead))
        };
        // heuristic: `size` -> `size()`, only the parentheses differ, reads
        // as a wrong method reference
        let parens_after = |side: Side, toks: &[usize], role: Role| -> bool {
            let sd = fa.side(side);
            match toks {
                [o, c] if sd.tok(*o).is_op("(") && sd.tok(*c).is_op(")") && *o > 0 => {
                    sd.role(o - 1) == Some(Role::CallHead)
                        && match sd.tok_state[o - 1] {
                            TokState::Equal(p) => fa.side(side.other()).role(p) == Some(role),
                            _ => false,
                        }
                }
                _ => false,
            }
        };
        let v = if gap.old.is_empty() && parens_after(Side::New, &gap.new, Role::Reference) {
            PatternVariant::WrongVarRef
        } else if gap.new.is_empty() && parens_after(Side::Old, &gap.old, Role::Reference) {
            PatternVariant::WrongMethodRef
        } else if var(Side::Old, &gap.old) && (var(Side::New, &gap.new) || simple_call(fa, Side::New, &gap.new)) {
            PatternVariant::WrongVarRef
        } else if callee(Side::Old, &gap.old) && callee(Side::New, &gap.new)
            || simple_call(fa, Side::Old, &gap.old) && var(Side::New, &gap.new)
        {
            PatternVariant::WrongMethodRef
        } else {
            continue;
        };
        let site = match (gap.new.first(), gap.old.first()) {
            (Some(&t), _) => fa.site(Side::New, fa.new.tok(t).line),
            (None, Some(&t)) => fa.site(Side::Old, fa.old.tok(t).line),
            (None, None) => continue,
        };
        out.push((v, site));
    }
}

fn missing_null_check(fa: &FileAnalysis<'_>, out: &mut Out) {
    let sd = &fa.new;
    for id in fa.elements() {
        if id.side != Side::New || fa.moved(Side::New, id.stmt) {
            continue;
        }
        let el = fa.elem(id);
        if !matches!(el.kind, ElementKind::If | ElementKind::Ternary | ElementKind::While) {
            continue;
        }
        let Some(c) = &el.cond else { continue };
        let r = sd.abs(id.stmt, c);
        for t in r.clone() {
            if sd.tok(t).kind != TokenKind::Literal(LitKind::Null) || !sd.changed_tok(t) {
                continue;
            }
            let op = [t.wrapping_sub(1), t + 1]
                .into_iter()
                .filter(|o| r.contains(o))
                .find(|&o| sd.tok(o).is_op("==") || sd.tok(o).is_op("!="));
            let Some(o) = op else { continue };
            if !sd.changed_tok(o) {
                continue;
            }
            let v = if sd.tok(o).is_op("==") {
                PatternVariant::MissNullCheckP
            } else {
                PatternVariant::MissNullCheckN
            };
            out.push((v, fa.site(Side::New, sd.tok(t).line)));
        }
    }
}

fn is_constant_token(t: &Token) -> bool {
    t.is_literal() || (t.is_ident() && constant_like(&t.text))
}

/// A literal (optionally negated) or a constant reference like
/// `Integer.MAX_VALUE`.
fn constant_expr(toks: &[&Token]) -> bool {
    match toks {
        [t] => is_constant_token(t),
        [m, t] => m.is_op("-") && matches!(t.kind, TokenKind::Literal(LitKind::Int | LitKind::Float)),
        _ => {
            toks.len() % 2 == 1
                && toks.iter().enumerate().all(|(i, t)| if i % 2 == 0 { t.is_ident() } else { t.is_op(".") })
                && constant_like(&toks[toks.len() - 1].text)
        }
    }
}

fn constant_change(fa: &FileAnalysis<'_>, out: &mut Out) {
    for (gi, g) in fa.groups.iter().enumerate() {
        if !g.two_sided() {
            continue;
        }
        let seq_o: Vec<&Token> = g.old_toks.iter().map(|&t| fa.old.tok(t)).collect();
        let seq_n: Vec<&Token> = g.new_toks.iter().map(|&t| fa.new.tok(t)).collect();
        let pos = |toks: &[usize], t: usize| toks.iter().position(|&x| x == t).expect("gap token in group");
        let mut dels = Vec::new();
        let mut ins = Vec::new();
        for &k in &g.gaps {
            let gap = &fa.gaps[k];
            debug_assert_eq!(gap.group, gi);
            let o: Vec<&Token> = gap.old.iter().map(|&t| fa.old.tok(t)).collect();
            let n: Vec<&Token> = gap.new.iter().map(|&t| fa.new.tok(t)).collect();
            if !o.is_empty() && !n.is_empty() && constant_expr(&o) && constant_expr(&n) {
                out.push((PatternVariant::ConstChange, fa.site(Side::New, n[0].line)));
            }
            if !gap.old.is_empty() {
                dels.push((pos(&g.old_toks, gap.old[0]), gap.old.len()));
            }
            if !gap.new.is_empty() {
                ins.push((pos(&g.new_toks, gap.new[0]), gap.new.len()));
            }
        }
        // the same code deleted in one place and inserted in another with
        // only constants changed
        for &(ds, dl) in &dels {
            for &(is, il) in &ins {
                if dl != il {
                    continue;
                }
                // heuristic: the diff may cut a moved run anywhere, so any
                // rotation of the deleted run may line up with the inserted
                let b = &seq_n[is..is + il];
                let hit = (0..dl).any(|r| {
                    let mut differs = false;
                    let ok = (0..dl).all(|k| {
                        let x = seq_o[ds + (k + r) % dl];
                        let y = b[k];
                        if x.same(y) {
                            true
                        } else {
                            differs = true;
                            is_constant_token(x) && is_constant_token(y)
                        }
                    });
                    ok && differs
                });
                if hit {
                    out.push((PatternVariant::ConstChange, fa.site(Side::New, seq_n[is].line)));
                }
            }
        }
    }
}

/// One line, or one statement spread over several lines, or one statement
/// moved.
fn single_line(pa: &PatchAnalysis<'_>, out: &mut Out) {
    let size: usize = pa.files.iter().map(|f| f.fc.changed.len()).sum();
    let groups: Vec<(&FileAnalysis<'_>, usize)> = pa
        .files
        .iter()
        .flat_map(|f| (0..f.groups.len()).map(move |g| (f, g)))
        .collect();
    let moves: usize = pa.files.iter().map(|f| f.moves.len()).sum();
    let site_of = |fa: &FileAnalysis<'_>, g: usize| {
        let grp = &fa.groups[g];
        match grp.new.first() {
            Some(&s) => fa.site(Side::New, fa.new.stmts[s].first_line()),
            None => fa.site(Side::Old, fa.old.stmts[grp.old[0]].first_line()),
        }
    };
    let single = match groups.as_slice() {
        [(fa, g)] => fa.groups[*g].old.len() <= 1 && fa.groups[*g].new.len() <= 1,
        [_, _] => moves == 1,
        _ => false,
    };
    if size == 1 || single {
        if let Some(&(fa, g)) = groups.first() {
            out.push((PatternVariant::SingleLine, site_of(fa, g)));
        } else if let Some(fc) = pa.files.iter().map(|f| f.fc).find(|f| !f.changed.is_empty()) {
            let c = &fc.changed[0];
            let site = match c.new_line {
                Some(l) => Site { file: fc.path().into(), line: l, side: Side::New },
                None => Site { file: fc.path().into(), line: c.old_line.unwrap_or(0), side: Side::Old },
            };
            out.push((PatternVariant::SingleLine, site));
        }
    }
}

struct ChunkSig {
    site: Site,
    toks: Vec<String>,
}

fn chunk_sigs(fc: &FileContext, lang: &LanguageConfig) -> Vec<ChunkSig> {
    let mut out = Vec::new();
    for ch in &fc.chunks {
        let removed: Vec<&str> = ch
            .lines
            .iter()
            .filter(|l| l.kind != ChangeKind::Added)
            .filter_map(|l| l.old_text.as_deref())
            .collect();
        let added: Vec<&str> = ch
            .lines
            .iter()
            .filter(|l| l.kind != ChangeKind::Removed)
            .filter_map(|l| l.new_text.as_deref())
            .collect();
        let r = lex(&removed.join("\n"), 1, lang).tokens;
        let a = lex(&added.join("\n"), 1, lang).tokens;
        if r.iter().chain(&a).filter(|t| t.is_word()).count() < 2 {
            continue;
        }
        let mut toks: Vec<String> = r.into_iter().map(|t| t.text).collect();
        toks.push("\u{0}".into());
        toks.extend(a.into_iter().map(|t| t.text));
        let first = &ch.lines[0];
        let site = match first.new_line.filter(|_| first.kind != ChangeKind::Removed) {
            Some(l) => Site { file: fc.path().into(), line: l, side: Side::New },
            None => Site { file: fc.path().into(), line: first.old_line.unwrap_or(0), side: Side::Old },
        };
        out.push(ChunkSig { site, toks });
    }
    out
}

fn trigrams(t: &[String]) -> BTreeSet<&[String]> {
    t.windows(3).collect()
}

fn jaccard(a: &[String], b: &[String]) -> f64 {
    let (x, y) = (trigrams(a), trigrams(b));
    let union = x.union(&y).count();
    if union == 0 {
        return if a == b { 1.0 } else { 0.0 };
    }
    x.intersection(&y).count() as f64 / union as f64
}

fn near_copy(a: &[String], b: &[String], min_jaccard: f64) -> bool {
    if a == b {
        return true;
    }
    let ident = |s: &str| s.starts_with(|c: char| c.is_alphabetic() || c == '_' || c == '$');
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| x == y || (ident(x) && ident(y)))
        && jaccard(a, b) >= min_jaccard
}

/// The same change repeated in several chunks.
fn copy_paste(pa: &PatchAnalysis<'_>, lang: &LanguageConfig, cfg: &PatternConfig, out: &mut Out) {
    let sigs: Vec<ChunkSig> = pa.files.iter().flat_map(|f| chunk_sigs(f.fc, lang)).collect();
    for (i, a) in sigs.iter().enumerate() {
        for b in sigs.iter().skip(i + 1) {
            if near_copy(&a.toks, &b.toks, cfg.copy_paste_jaccard) {
                out.push((PatternVariant::CopyPaste, a.site.clone()));
                out.push((PatternVariant::CopyPaste, b.site.clone()));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::parse_unified_diff;

    fn pats(d: &str) -> Vec<String> {
        let p = parse_unified_diff(d).unwrap();
        let mut v = detect_patterns(&PatchContext::from_diff(&p, &LanguageConfig::java())).variant_names();
        v.sort();
        v
    }

    fn one(old: &str, new: &str) -> Vec<String> {
        pats(&format!("--- a/A.java\n+++ b/A.java\n@@ -1,1 +1,1 @@\n-{old}\n+{new}\n"))
    }

    #[test]
    fn logic_changes() {
        assert_eq!(one("if (a != null) {", "if (a == null) {"), ["expLogicMod", "singleLine"]);
        assert_eq!(one("if (a) {", "if (a && b) {"), ["expLogicExpand", "singleLine"]);
        assert_eq!(one("while (a || b) {", "while (a) {"), ["expLogicReduce", "singleLine"]);
    }

    #[test]
    fn arithmetic_changes() {
        assert_eq!(one("int j = 4 * n - 1;", "int j = 4 * (n - 1);"), ["expArithMod", "singleLine"]);
        assert_eq!(one("x = a + b;", "x = a - b;"), ["expArithMod", "singleLine"]);
        assert_eq!(one("x = f(a + b);", "x = g(a + b);"), ["singleLine", "wrongMethodRef"]);
    }

    #[test]
    fn constants() {
        assert_eq!(one("f(x, false);", "f(x, true);"), ["constChange", "singleLine"]);
        assert_eq!(one("f(Branch.A_B);", "f(Branch.ON_EX);"), ["constChange", "singleLine"]);
        assert_eq!(one("f(0, y);", "f(Integer.MAX_VALUE, y);"), ["constChange", "singleLine"]);
        assert_eq!(
            one("if (a == 1 && b < c - 1) {", "if (b < c - 2 && a == 1) {"),
            ["constChange", "singleLine"]
        );
    }

    #[test]
    fn references() {
        assert_eq!(one("x = p1.get();", "x = p2.get();"), ["singleLine", "wrongVarRef"]);
        assert_eq!(one("return allMatch(n);", "return anyMatch(n);"), ["singleLine", "wrongMethodRef"]);
        assert_eq!(one("return size;", "return size();"), ["singleLine", "wrongVarRef"]);
    }

    #[test]
    fn null_checks_in_ternary() {
        assert_eq!(
            one("f(w.toString());", "f(w == null ? \"null\" : w.toString());"),
            ["missNullCheckP", "singleLine", "wrapsIfElse"]
        );
    }

    #[test]
    fn method_wrap_and_unwrap() {
        assert_eq!(one("x = f(a);", "x = f(g(a));"), ["singleLine", "wrapsMethod"]);
        assert_eq!(one("x = f(g(a));", "x = f(a);"), ["singleLine", "unwrapMethod"]);
    }

    #[test]
    fn block_added_around_code() {
        let d = "--- a/A.java\n+++ b/A.java\n@@ -1,3 +1,5 @@\n a();\n+if (x != null) {\n   b();\n+}\n c();\n";
        assert_eq!(pats(d), ["missNullCheckN", "wrapsIf"]);
        let r = "--- a/A.java\n+++ b/A.java\n@@ -1,5 +1,3 @@\n a();\n-if (x != null) {\n   b();\n-}\n c();\n";
        assert_eq!(pats(r), ["unwrapIfElse"]);
    }

    #[test]
    fn new_blocks() {
        let d = "--- a/A.java\n+++ b/A.java\n@@ -1,2 +1,5 @@\n a();\n+if (x) {\n+  throw new E();\n+}\n c();\n";
        assert_eq!(pats(d), ["condBlockExcAdd"]);
        let r = "--- a/A.java\n+++ b/A.java\n@@ -1,5 +1,2 @@\n a();\n-if (x) {\n-  y();\n-}\n c();\n";
        assert_eq!(pats(r), ["condBlockRem"]);
    }

    #[test]
    fn copies() {
        let a = vec!["if".to_string(), "(".into(), "a".into(), ")".into(), "x".into()];
        let mut b = a.clone();
        b[2] = "c".into();
        assert!(near_copy(&a, &a, 0.8));
        assert!(!near_copy(&a, &b, 0.8));
        assert!(near_copy(&a, &b, 0.0));
    }
}
