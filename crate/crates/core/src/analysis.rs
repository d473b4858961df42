//! Statement-level comparison of the two sides of each file, shared by
//! action and pattern detection.
//!
//! Changed lines are lifted to the statements holding them. Statements are
//! linked across sides when their lines were paired by the diff or when they
//! share an unchanged line; each connected component is a *group*. The
//! tokens of a group's old and new statements are diffed, which yields the
//! equal tokens and the *gaps* (runs of deleted and inserted tokens) that
//! later rules inspect. Syntax elements are matched across sides through
//! their head tokens.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::context::{FileContext, PatchContext, Side, Site};
use crate::diff::{change_runs, LineOp};
use crate::lcs::{self, Edit};
use crate::scan::syntax::{parse_statement, Category, Element, ElementKind, Parsed, Role};
use crate::scan::{group_statements, LanguageConfig, SideScan, Statement, Token, TokenKind};
use crate::text::normalize_ws;

/// Groups linked only through line pairing are split when the word-token
/// similarity of their two sides falls below this value (heuristic).
pub const SIMILARITY_SPLIT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElemId {
    pub side: Side,
    pub stmt: usize,
    pub elem: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElemState {
    /// Same head token on the other side.
    Matched(ElemId),
    /// Head replaced by the head of a same-category element in one gap.
    Replaced(ElemId),
    Unmatched,
    /// Part of a statement moved verbatim.
    Moved,
    /// Another call of a callee the other side of the group already calls.
    Repeated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokState {
    /// Outside every group.
    Outside,
    Equal(usize),
    Changed(usize),
}

#[derive(Debug, Clone)]
pub struct Group {
    pub old: Vec<usize>,
    pub new: Vec<usize>,
    /// Some statement pair shares an unchanged line.
    pub anchored: bool,
    pub old_toks: Vec<usize>,
    pub new_toks: Vec<usize>,
    pub gaps: Vec<usize>,
}

impl Group {
    pub fn two_sided(&self) -> bool {
        !self.old.is_empty() && !self.new.is_empty()
    }

    pub fn stmts(&self, side: Side) -> &[usize] {
        match side {
            Side::Old => &self.old,
            Side::New => &self.new,
        }
    }
}

/// Deleted and inserted tokens between two runs of equal tokens.
#[derive(Debug, Clone)]
pub struct Gap {
    pub group: usize,
    pub old: Vec<usize>,
    pub new: Vec<usize>,
}

impl Gap {
    pub fn toks(&self, side: Side) -> &[usize] {
        match side {
            Side::Old => &self.old,
            Side::New => &self.new,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SideData<'a> {
    pub scan: &'a SideScan,
    pub stmts: Vec<Statement>,
    pub parsed: Vec<Parsed>,
    pub line_stmt: BTreeMap<u32, usize>,
    pub tok_stmt: Vec<Option<usize>>,
    /// Changed lines, whitespace-only edits excluded.
    pub changed: BTreeSet<u32>,
    pub tok_state: Vec<TokState>,
    pub stmt_group: Vec<Option<usize>>,
    pub elem_state: HashMap<(usize, usize), ElemState>,
    /// `{` <-> `}` within each segment.
    pub brace_mate: HashMap<usize, usize>,
}

impl<'a> SideData<'a> {
    fn new(scan: &'a SideScan, changed: BTreeSet<u32>, cfg: &LanguageConfig) -> Self {
        let stmts = group_statements(scan);
        let parsed: Vec<Parsed> = stmts
            .iter()
            .map(|s| parse_statement(&scan.tokens[s.tokens.clone()], cfg))
            .collect();
        let mut line_stmt = BTreeMap::new();
        let mut tok_stmt = vec![None; scan.tokens.len()];
        for (i, s) in stmts.iter().enumerate() {
            for &l in &s.lines {
                line_stmt.entry(l).or_insert(i);
            }
            for t in s.tokens.clone() {
                tok_stmt[t] = Some(i);
            }
        }
        let mut brace_mate = HashMap::new();
        for seg in &scan.segments {
            let mut stack = Vec::new();
            for i in seg.clone() {
                let t = &scan.tokens[i];
                if t.is_op("{") {
                    stack.push(i);
                } else if t.is_op("}") {
                    if let Some(o) = stack.pop() {
                        brace_mate.insert(o, i);
                        brace_mate.insert(i, o);
                    }
                }
            }
        }
        SideData {
            scan,
            stmt_group: vec![None; stmts.len()],
            tok_state: vec![TokState::Outside; scan.tokens.len()],
            stmts,
            parsed,
            line_stmt,
            tok_stmt,
            changed,
            elem_state: HashMap::new(),
            brace_mate,
        }
    }

    pub fn tok(&self, i: usize) -> &Token {
        &self.scan.tokens[i]
    }

    pub fn elem(&self, stmt: usize, elem: usize) -> &Element {
        &self.parsed[stmt].elements[elem]
    }

    /// Side index of an element's head token.
    pub fn head(&self, stmt: usize, elem: usize) -> usize {
        self.stmts[stmt].tokens.start + self.parsed[stmt].elements[elem].head
    }

    pub fn state(&self, stmt: usize, elem: usize) -> ElemState {
        self.elem_state.get(&(stmt, elem)).copied().unwrap_or(ElemState::Unmatched)
    }

    /// Local range of an element part, shifted to side indices.
    pub fn abs(&self, stmt: usize, r: &std::ops::Range<usize>) -> std::ops::Range<usize> {
        let s = self.stmts[stmt].tokens.start;
        s + r.start..s + r.end
    }

    pub fn role(&self, i: usize) -> Option<Role> {
        let s = self.tok_stmt[i]?;
        Some(self.parsed[s].roles[i - self.stmts[s].tokens.start])
    }

    pub fn is_content(&self, i: usize) -> bool {
        self.tok_stmt[i].is_some_and(|s| self.parsed[s].content[i - self.stmts[s].tokens.start])
    }

    /// Innermost element containing token `i`.
    pub fn owner(&self, i: usize) -> Option<(usize, usize)> {
        let s = self.tok_stmt[i]?;
        let local = i - self.stmts[s].tokens.start;
        let p = &self.parsed[s];
        let o = p.owner[local].or_else(|| {
            p.elements
                .iter()
                .enumerate()
                .filter(|(_, e)| e.scope.contains(&local))
                .min_by_key(|(_, e)| e.scope.len())
                .map(|(k, _)| k)
        })?;
        Some((s, o))
    }

    pub fn line_changed(&self, line: u32) -> bool {
        self.changed.contains(&line)
    }

    /// Statement is in a group, i.e. touched by the patch.
    pub fn in_patch(&self, stmt: usize) -> bool {
        self.stmt_group[stmt].is_some()
    }

    pub fn equal(&self, i: usize) -> bool {
        matches!(self.tok_state[i], TokState::Equal(_))
    }

    pub fn changed_tok(&self, i: usize) -> bool {
        matches!(self.tok_state[i], TokState::Changed(_))
    }
}

pub struct FileAnalysis<'a> {
    pub fc: &'a FileContext,
    pub old: SideData<'a>,
    pub new: SideData<'a>,
    pub groups: Vec<Group>,
    pub gaps: Vec<Gap>,
    /// (old stmt, new stmt) pairs moved verbatim.
    pub moves: Vec<(usize, usize)>,
    anchors_on: BTreeMap<u32, u32>,
    anchors_no: BTreeMap<u32, u32>,
}

impl<'a> FileAnalysis<'a> {
    pub fn new(fc: &'a FileContext, cfg: &LanguageConfig) -> Self {
        let (pairs, anchors_on, old_changed, new_changed) = line_links(fc);
        let anchors_no = anchors_on.iter().map(|(&o, &n)| (n, o)).collect();
        let mut fa = FileAnalysis {
            fc,
            old: SideData::new(&fc.old, old_changed, cfg),
            new: SideData::new(&fc.new, new_changed, cfg),
            groups: Vec::new(),
            gaps: Vec::new(),
            moves: Vec::new(),
            anchors_on,
            anchors_no,
        };
        fa.build_groups(&pairs);
        fa.diff_groups();
        fa.find_moves();
        fa.match_elements();
        fa
    }

    pub fn path(&self) -> &str {
        self.fc.path()
    }

    pub fn side(&self, s: Side) -> &SideData<'a> {
        match s {
            Side::Old => &self.old,
            Side::New => &self.new,
        }
    }

    pub fn site(&self, side: Side, line: u32) -> Site {
        Site {
            file: self.path().to_string(),
            line,
            side,
        }
    }

    pub fn elem_site(&self, id: ElemId) -> Site {
        let sd = self.side(id.side);
        self.site(id.side, sd.tok(sd.head(id.stmt, id.elem)).line)
    }

    pub fn elem(&self, id: ElemId) -> &Element {
        self.side(id.side).elem(id.stmt, id.elem)
    }

    pub fn state(&self, id: ElemId) -> ElemState {
        self.side(id.side).state(id.stmt, id.elem)
    }

    /// All elements of statements in groups.
    pub fn elements(&self) -> impl Iterator<Item = ElemId> + '_ {
        [Side::Old, Side::New].into_iter().flat_map(move |side| {
            let sd = self.side(side);
            (0..sd.stmts.len())
                .filter(move |&s| sd.in_patch(s))
                .flat_map(move |s| (0..sd.parsed[s].elements.len()).map(move |e| ElemId { side, stmt: s, elem: e }))
        })
    }

    /// Unchanged counterpart of a line on the other side.
    pub fn counterpart(&self, side: Side, line: u32) -> Option<u32> {
        match side {
            Side::Old => {
                if self.old.changed.contains(&line) {
                    return None;
                }
                self.anchors_on.get(&line).copied().or_else(|| self.fc.old_to_new(line))
            }
            Side::New => {
                if self.new.changed.contains(&line) {
                    return None;
                }
                self.anchors_no.get(&line).copied().or_else(|| self.fc.new_to_old(line))
            }
        }
    }

    fn build_groups(&mut self, pairs: &[(u32, u32)]) {
        let n_old = self.old.stmts.len();
        let node = |side: Side, s: usize| if side == Side::Old { s } else { n_old + s };
        let total = n_old + self.new.stmts.len();
        let mut uf = UnionFind::new(total);
        let mut member = vec![false; total];
        let mut anchored = vec![false; total];
        let mut queue = VecDeque::new();
        for (side, sd) in [(Side::Old, &self.old), (Side::New, &self.new)] {
            for &l in &sd.changed {
                if let Some(&s) = sd.line_stmt.get(&l) {
                    let k = node(side, s);
                    if !member[k] {
                        member[k] = true;
                        queue.push_back((side, s));
                    }
                }
            }
        }
        let mut pair_edges = Vec::new();
        for &(o, n) in pairs {
            if let (Some(&a), Some(&b)) = (self.old.line_stmt.get(&o), self.new.line_stmt.get(&n)) {
                pair_edges.push((node(Side::Old, a), node(Side::New, b)));
            }
        }
        let mut anchor_edges = Vec::new();
        while let Some((side, s)) = queue.pop_front() {
            let (sd, other, oside) = match side {
                Side::Old => (&self.old, &self.new, Side::New),
                Side::New => (&self.new, &self.old, Side::Old),
            };
            for &l in &sd.stmts[s].lines {
                if sd.changed.contains(&l) {
                    continue;
                }
                let Some(m) = self.counterpart(side, l) else { continue };
                let Some(&t) = other.line_stmt.get(&m) else { continue };
                let k = node(oside, t);
                anchor_edges.push((node(side, s), k));
                if !member[k] {
                    member[k] = true;
                    queue.push_back((oside, t));
                }
            }
        }
        for &(a, b) in &anchor_edges {
            uf.union(a, b);
        }
        for &(a, b) in &anchor_edges {
            anchored[a] = true;
            anchored[b] = true;
        }
        // Components linked by anchors stay whole; pairing links are
        // checked for similarity first.
        let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for k in 0..total {
            if member[k] {
                comps.entry(uf.find(k)).or_default().push(k);
            }
        }
        let mut pair_uf = uf.clone();
        for &(a, b) in &pair_edges {
            if member[a] && member[b] {
                pair_uf.union(a, b);
            }
        }
        let mut merged: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
        for (_, c) in comps {
            merged.entry(pair_uf.find(c[0])).or_default().push(c);
        }
        let mut groups: Vec<(Vec<usize>, bool)> = Vec::new();
        for (_, parts) in merged {
            if parts.len() == 1 {
                let is_anchored = parts[0].iter().any(|&k| anchored[k]);
                groups.push((parts[0].clone(), is_anchored));
                continue;
            }
            let all: Vec<usize> = parts.concat();
            // anchored groups are never split
            if all.iter().any(|&k| anchored[k]) || self.similarity(&all, n_old) >= SIMILARITY_SPLIT {
                let is_anchored = all.iter().any(|&k| anchored[k]);
                groups.push((all, is_anchored));
                continue;
            }
            // Re-pair the pieces greedily by pairwise similarity.
            let mut cand = Vec::new();
            for (i, a) in parts.iter().enumerate() {
                for (j, b) in parts.iter().enumerate().skip(i + 1) {
                    let joined = [a.as_slice(), b.as_slice()].concat();
                    let has_both = joined.iter().any(|&k| k < n_old) && joined.iter().any(|&k| k >= n_old);
                    if !has_both {
                        continue;
                    }
                    let sim = self.similarity(&joined, n_old);
                    if sim >= SIMILARITY_SPLIT {
                        cand.push((sim, i, j));
                    }
                }
            }
            cand.sort_by(|x, y| y.0.total_cmp(&x.0).then((x.1, x.2).cmp(&(y.1, y.2))));
            let mut used = vec![false; parts.len()];
            for (_, i, j) in cand {
                if used[i] || used[j] {
                    continue;
                }
                used[i] = true;
                used[j] = true;
                let joined = [parts[i].as_slice(), parts[j].as_slice()].concat();
                let is_anchored = joined.iter().any(|&k| anchored[k]);
                groups.push((joined, is_anchored));
            }
            for (i, p) in parts.into_iter().enumerate() {
                if !used[i] {
                    let is_anchored = p.iter().any(|&k| anchored[k]);
                    groups.push((p, is_anchored));
                }
            }
        }
        let mut out: Vec<Group> = groups
            .into_iter()
            .map(|(mut ks, anchored)| {
                ks.sort_unstable();
                let old: Vec<usize> = ks.iter().filter(|&&k| k < n_old).copied().collect();
                let new: Vec<usize> = ks.iter().filter(|&&k| k >= n_old).map(|&k| k - n_old).collect();
                Group {
                    old,
                    new,
                    anchored,
                    old_toks: Vec::new(),
                    new_toks: Vec::new(),
                    gaps: Vec::new(),
                }
            })
            .collect();
        out.sort_by_key(|g| {
            (
                g.new.first().map(|&s| self.new.stmts[s].first_line()).unwrap_or(u32::MAX),
                g.old.first().map(|&s| self.old.stmts[s].first_line()).unwrap_or(u32::MAX),
            )
        });
        for (gi, g) in out.iter().enumerate() {
            for &s in &g.old {
                self.old.stmt_group[s] = Some(gi);
            }
            for &s in &g.new {
                self.new.stmt_group[s] = Some(gi);
            }
        }
        self.groups = out;
    }

    fn similarity(&self, nodes: &[usize], n_old: usize) -> f64 {
        let words = |side: &SideData<'_>, ks: Vec<usize>| -> Vec<String> {
            ks.into_iter()
                .flat_map(|s| side.stmts[s].tokens.clone())
                .filter(|&t| side.tok(t).is_word())
                .map(|t| side.tok(t).text.clone())
                .collect()
        };
        let mut o: Vec<usize> = nodes.iter().filter(|&&k| k < n_old).copied().collect();
        let mut n: Vec<usize> = nodes.iter().filter(|&&k| k >= n_old).map(|&k| k - n_old).collect();
        o.sort_unstable();
        n.sort_unstable();
        let a = words(&self.old, o);
        let b = words(&self.new, n);
        if a.is_empty() && b.is_empty() {
            return 1.0;
        }
        2.0 * lcs::lcs_len(&a, &b) as f64 / (a.len() + b.len()) as f64
    }

    fn diff_groups(&mut self) {
        let mut gaps = Vec::new();
        for (gi, g) in self.groups.iter_mut().enumerate() {
            g.old_toks = g.old.iter().flat_map(|&s| self.old.stmts[s].tokens.clone()).collect();
            g.new_toks = g.new.iter().flat_map(|&s| self.new.stmts[s].tokens.clone()).collect();
            let key = |sd: &SideData<'_>, t: usize| {
                let tok = sd.tok(t);
                (tok.kind, tok.text.clone())
            };
            let a: Vec<(TokenKind, String)> = g.old_toks.iter().map(|&t| key(&self.old, t)).collect();
            let b: Vec<(TokenKind, String)> = g.new_toks.iter().map(|&t| key(&self.new, t)).collect();
            let mut cur = Gap {
                group: gi,
                old: Vec::new(),
                new: Vec::new(),
            };
            let flush = |cur: &mut Gap, gaps: &mut Vec<Gap>, g: &mut Group| {
                if !cur.old.is_empty() || !cur.new.is_empty() {
                    g.gaps.push(gaps.len());
                    gaps.push(std::mem::replace(
                        cur,
                        Gap {
                            group: gi,
                            old: Vec::new(),
                            new: Vec::new(),
                        },
                    ));
                }
            };
            let mut edits = lcs::diff(&a, &b);
            lcs::slide_left(&mut edits, &a, &b);
            for e in edits {
                match e {
                    Edit::Equal { old, new } => {
                        flush(&mut cur, &mut gaps, g);
                        let (o, n) = (g.old_toks[old], g.new_toks[new]);
                        self.old.tok_state[o] = TokState::Equal(n);
                        self.new.tok_state[n] = TokState::Equal(o);
                    }
                    Edit::Delete { old } => cur.old.push(g.old_toks[old]),
                    Edit::Insert { new } => cur.new.push(g.new_toks[new]),
                }
            }
            flush(&mut cur, &mut gaps, g);
        }
        for (k, gap) in gaps.iter().enumerate() {
            for &t in &gap.old {
                self.old.tok_state[t] = TokState::Changed(k);
            }
            for &t in &gap.new {
                self.new.tok_state[t] = TokState::Changed(k);
            }
        }
        self.gaps = gaps;
    }

    /// Text of a statement with normalized spacing.
    pub fn stmt_text(&self, side: Side, s: usize) -> String {
        let sd = self.side(side);
        sd.stmts[s]
            .tokens
            .clone()
            .map(|t| sd.tok(t).text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn find_moves(&mut self) {
        let single = |g: &Group, side: Side| g.stmts(side).len() == 1 && g.stmts(side.other()).is_empty();
        let removed: Vec<usize> = self.groups.iter().filter(|g| single(g, Side::Old)).map(|g| g.old[0]).collect();
        let added: Vec<usize> = self.groups.iter().filter(|g| single(g, Side::New)).map(|g| g.new[0]).collect();
        let mut used = BTreeSet::new();
        for o in removed {
            if !substantial(&self.old, o) {
                continue;
            }
            let text = self.stmt_text(Side::Old, o);
            if let Some(&n) = added
                .iter()
                .find(|&&n| !used.contains(&n) && self.stmt_text(Side::New, n) == text)
            {
                used.insert(n);
                self.moves.push((o, n));
            }
        }
    }

    pub fn moved(&self, side: Side, s: usize) -> bool {
        self.moves
            .iter()
            .any(|&(o, n)| if side == Side::Old { o == s } else { n == s })
    }

    fn match_elements(&mut self) {
        let mut states: Vec<(Side, usize, usize, ElemState)> = Vec::new();
        for side in [Side::Old, Side::New] {
            let sd = self.side(side);
            let other = self.side(side.other());
            for s in 0..sd.stmts.len() {
                if !sd.in_patch(s) {
                    continue;
                }
                let moved = self.moved(side, s);
                for (e, el) in sd.parsed[s].elements.iter().enumerate() {
                    let st = if moved {
                        ElemState::Moved
                    } else if let TokState::Equal(p) = sd.tok_state[sd.head(s, e)] {
                        other
                            .tok_stmt[p]
                            .and_then(|ps| {
                                let local = p - other.stmts[ps].tokens.start;
                                other.parsed[ps]
                                    .elements
                                    .iter()
                                    .position(|x| x.head == local && x.kind == el.kind)
                                    .map(|pe| ElemState::Matched(ElemId { side: side.other(), stmt: ps, elem: pe }))
                            })
                            .unwrap_or(ElemState::Unmatched)
                    } else {
                        ElemState::Unmatched
                    };
                    states.push((side, s, e, st));
                }
            }
        }
        for (side, s, e, st) in states {
            self.side_mut(side).elem_state.insert((s, e), st);
        }

        // Replacements: unmatched heads of one category in the same gap.
        for gk in 0..self.gaps.len() {
            let heads = |sd: &SideData<'_>, toks: &[usize]| -> Vec<(usize, usize)> {
                let mut v = Vec::new();
                for &t in toks {
                    let Some(s) = sd.tok_stmt[t] else { continue };
                    let local = t - sd.stmts[s].tokens.start;
                    for (e, el) in sd.parsed[s].elements.iter().enumerate() {
                        if el.head == local && sd.state(s, e) == ElemState::Unmatched {
                            v.push((s, e));
                        }
                    }
                }
                v
            };
            let olds = heads(&self.old, &self.gaps[gk].old);
            let news = heads(&self.new, &self.gaps[gk].new);
            let mut taken = BTreeSet::new();
            let mut reps = Vec::new();
            for &(os, oe) in &olds {
                let cat = self.old.elem(os, oe).kind.category();
                if let Some(&(ns, ne)) = news
                    .iter()
                    .find(|&&(ns, ne)| !taken.contains(&(ns, ne)) && self.new.elem(ns, ne).kind.category() == cat)
                {
                    taken.insert((ns, ne));
                    reps.push(((os, oe), (ns, ne)));
                }
            }
            for ((os, oe), (ns, ne)) in reps {
                self.old.elem_state.insert(
                    (os, oe),
                    ElemState::Replaced(ElemId { side: Side::New, stmt: ns, elem: ne }),
                );
                self.new.elem_state.insert(
                    (ns, ne),
                    ElemState::Replaced(ElemId { side: Side::Old, stmt: os, elem: oe }),
                );
            }
        }

        // heuristic: an expression that grows or shrinks by further calls
        // of a callee it already calls is an expression change, not a
        // call addition or removal.
        let mut repeated = Vec::new();
        for g in &self.groups {
            if !g.two_sided() {
                continue;
            }
            for side in [Side::Old, Side::New] {
                let sd = self.side(side);
                let other = self.side(side.other());
                let other_callees: BTreeSet<&str> = g
                    .stmts(side.other())
                    .iter()
                    .flat_map(|&s| other.parsed[s].elements.iter())
                    .filter(|e| e.kind == ElementKind::Call)
                    .filter_map(|e| e.name.as_deref())
                    .collect();
                for &s in g.stmts(side) {
                    for (e, el) in sd.parsed[s].elements.iter().enumerate() {
                        if el.kind == ElementKind::Call
                            && sd.state(s, e) == ElemState::Unmatched
                            && el.name.as_deref().is_some_and(|n| other_callees.contains(n))
                        {
                            repeated.push((side, s, e));
                        }
                    }
                }
            }
        }
        for (side, s, e) in repeated {
            self.side_mut(side).elem_state.insert((s, e), ElemState::Repeated);
        }
    }

    fn side_mut(&mut self, s: Side) -> &mut SideData<'a> {
        match s {
            Side::Old => &mut self.old,
            Side::New => &mut self.new,
        }
    }

    /// The meaningful tokens of an element part are all equal (unchanged)
    /// tokens. Closing brackets are ignored: the diff may pick any of a
    /// run of identical ones.
    pub fn all_equal(&self, side: Side, r: std::ops::Range<usize>) -> bool {
        let sd = self.side(side);
        let mut content = r.filter(|&t| sd.is_content(t)).peekable();
        content.peek().is_some() && content.all(|t| sd.equal(t))
    }

    /// Statements of a side whose first line lies in `lines`.
    pub fn stmts_in(&self, side: Side, lines: std::ops::RangeInclusive<u32>) -> Vec<usize> {
        let sd = self.side(side);
        (0..sd.stmts.len())
            .filter(|&s| lines.contains(&sd.stmts[s].first_line()))
            .collect()
    }
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Old => Side::New,
            Side::New => Side::Old,
        }
    }
}

/// Element categories of the taxonomy group a tag falls into.
pub fn category_of(e: &Element) -> Category {
    e.kind.category()
}

// A statement worth calling "moved": has a word and is not a lone brace.
fn substantial(sd: &SideData<'_>, s: usize) -> bool {
    sd.stmts[s].tokens.clone().any(|t| sd.tok(t).is_word())
}

/// Line pairing inside change runs, with lines equal up to whitespace
/// taken out as unchanged.
///
/// Returns the pairs (old, new) of remaining lines, the whitespace-equal
/// anchors, and the changed lines of each side.
#[allow(clippy::type_complexity)]
fn line_links(fc: &FileContext) -> (Vec<(u32, u32)>, BTreeMap<u32, u32>, BTreeSet<u32>, BTreeSet<u32>) {
    let mut pairs = Vec::new();
    let mut anchors = BTreeMap::new();
    let mut old_changed = BTreeSet::new();
    let mut new_changed = BTreeSet::new();
    for h in &fc.diff.hunks {
        for run in change_runs(h) {
            let removed: Vec<_> = run.lines.iter().filter(|l| l.op == LineOp::Removed).collect();
            let added: Vec<_> = run.lines.iter().filter(|l| l.op == LineOp::Added).collect();
            let a: Vec<String> = removed.iter().map(|l| normalize_ws(&l.text)).collect();
            let b: Vec<String> = added.iter().map(|l| normalize_ws(&l.text)).collect();
            let mut pend_o = Vec::new();
            let mut pend_n = Vec::new();
            let flush = |po: &mut Vec<u32>, pn: &mut Vec<u32>, pairs: &mut Vec<(u32, u32)>| {
                pairs.extend(po.iter().copied().zip(pn.iter().copied()));
                po.clear();
                pn.clear();
            };
            for e in lcs::diff(&a, &b) {
                match e {
                    // a blank line is no evidence of anything
                    Edit::Equal { old, new } if !a[old].is_empty() => {
                        flush(&mut pend_o, &mut pend_n, &mut pairs);
                        anchors.insert(
                            removed[old].old_line.expect("removed line number"),
                            added[new].new_line.expect("added line number"),
                        );
                    }
                    Edit::Equal { old, new } => {
                        let o = removed[old].old_line.expect("removed line number");
                        let n = added[new].new_line.expect("added line number");
                        old_changed.insert(o);
                        new_changed.insert(n);
                    }
                    Edit::Delete { old } => {
                        let o = removed[old].old_line.expect("removed line number");
                        old_changed.insert(o);
                        pend_o.push(o);
                    }
                    Edit::Insert { new } => {
                        let n = added[new].new_line.expect("added line number");
                        new_changed.insert(n);
                        pend_n.push(n);
                    }
                }
            }
            flush(&mut pend_o, &mut pend_n, &mut pairs);
        }
    }
    (pairs, anchors, old_changed, new_changed)
}

#[derive(Debug, Clone)]
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Analyses of every file of a patch.
pub struct PatchAnalysis<'a> {
    pub files: Vec<FileAnalysis<'a>>,
}

impl<'a> PatchAnalysis<'a> {
    pub fn new(ctx: &'a PatchContext) -> Self {
        PatchAnalysis {
            files: ctx.files.iter().map(|f| FileAnalysis::new(f, &ctx.cfg)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::parse_unified_diff;

    fn ctx(d: &str) -> PatchContext {
        PatchContext::from_diff(&parse_unified_diff(d).unwrap(), &LanguageConfig::java())
    }

    #[test]
    fn reindented_line_is_unchanged() {
        let c = ctx("--- a/A.java\n+++ b/A.java\n@@ -1,3 +1,5 @@\n void f() {\n-  g();\n+  if (x) {\n+    g();\n+  }\n }\n");
        let fa = FileAnalysis::new(&c.files[0], &c.cfg);
        assert_eq!(fa.new.changed, BTreeSet::from([2, 4]));
        assert!(fa.old.changed.is_empty());
        assert_eq!(fa.counterpart(Side::New, 3), Some(2));
    }

    #[test]
    fn dissimilar_pair_is_split() {
        let c = ctx("--- a/A.java\n+++ b/A.java\n@@ -1,3 +1,3 @@\n a();\n-this.dataset = dataset;\n+setDataset(dataset);\n b();\n");
        let fa = FileAnalysis::new(&c.files[0], &c.cfg);
        assert_eq!(fa.groups.len(), 2);
        assert!(fa.groups.iter().all(|g| !g.two_sided()));
    }

    #[test]
    fn similar_pair_yields_one_gap() {
        let c = ctx("--- a/A.java\n+++ b/A.java\n@@ -1,1 +1,1 @@\n-x = getName(ns.name, false);\n+x = getName(ns.name, true);\n");
        let fa = FileAnalysis::new(&c.files[0], &c.cfg);
        assert_eq!(fa.groups.len(), 1);
        assert_eq!(fa.gaps.len(), 1);
        let g = &fa.gaps[0];
        assert_eq!(fa.old.tok(g.old[0]).text, "false");
        assert_eq!(fa.new.tok(g.new[0]).text, "true");
        let call = (0..fa.old.parsed[0].elements.len())
            .find(|&e| fa.old.elem(0, e).kind == ElementKind::Call)
            .unwrap();
        assert!(matches!(fa.old.state(0, call), ElemState::Matched(_)));
    }

    #[test]
    fn verbatim_move_is_detected() {
        let c = ctx("--- a/A.java\n+++ b/A.java\n@@ -1,3 +1,3 @@\n-traverse(c);\n Node next = c.getNext();\n+traverse(c);\n c = next;\n");
        let fa = FileAnalysis::new(&c.files[0], &c.cfg);
        assert_eq!(fa.moves.len(), 1);
    }

    #[test]
    fn statement_sharing_a_context_line_is_anchored() {
        let d = "--- a/A.java\n+++ b/A.java\n@@ -1,3 +1,3 @@\n-while(a != b)\n+while(a != b && c)\n {\n   x++;\n";
        let c = ctx(d);
        let fa = FileAnalysis::new(&c.files[0], &c.cfg);
        let g = &fa.groups[0];
        assert!(g.anchored && g.two_sided());
    }
}
