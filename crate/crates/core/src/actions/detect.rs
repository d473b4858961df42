use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::{ActionGroup, ActionKind, ActionReport, RepairAction};
use crate::analysis::{ElemId, ElemState, FileAnalysis, PatchAnalysis, SideData};
use crate::context::{PatchContext, Side, Site};
use crate::scan::syntax::{ElementKind, Role};

/// Repair actions of a patch.
pub fn detect_actions(ctx: &PatchContext) -> ActionReport {
    detect_actions_in(&PatchAnalysis::new(ctx))
}

/// Repair actions from an existing analysis.
pub fn detect_actions_in(pa: &PatchAnalysis<'_>) -> ActionReport {
    let mut out = Vec::new();
    for fa in &pa.files {
        out.extend(file_actions(fa));
    }
    ActionReport::from_findings(out)
}

fn group_of(kind: ElementKind) -> ActionGroup {
    use ElementKind::*;
    match kind {
        If | Else | Case | Switch | Ternary => ActionGroup::Conditional,
        For | ForEach | While | Do => ActionGroup::Loop,
        Call => ActionGroup::MethodCall,
        New => ActionGroup::ObjectInstantiation,
        MethodDecl => ActionGroup::MethodDefinition,
        TypeDecl => ActionGroup::Type,
        Try | Catch | Finally | Throw => ActionGroup::Exception,
        Return => ActionGroup::Return,
        VarDecl => ActionGroup::Variable,
        Assignment => ActionGroup::Assignment,
    }
}

/// Identifiers written in constant style (`MAX_VALUE`, `PI`).
pub fn constant_like(s: &str) -> bool {
    s.len() >= 2
        && s.starts_with(|c: char| c.is_ascii_uppercase())
        && s.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

/// The gap swaps one variable reference for another.
pub fn reference_swap(fa: &FileAnalysis<'_>, gap: usize) -> Option<(usize, usize)> {
    let g = &fa.gaps[gap];
    let ([o], [n]) = (g.old.as_slice(), g.new.as_slice()) else { return None };
    let is_ref = |sd: &SideData<'_>, t: usize| sd.tok(t).is_ident() && sd.role(t) == Some(Role::Reference);
    if !is_ref(&fa.old, *o) || !is_ref(&fa.new, *n) {
        return None;
    }
    if constant_like(&fa.old.tok(*o).text) && constant_like(&fa.new.tok(*n).text) {
        return None;
    }
    Some((*o, *n))
}

/// Innermost element strictly enclosing `e` in its statement.
pub fn parent_of(sd: &SideData<'_>, stmt: usize, e: usize) -> Option<usize> {
    let els = &sd.parsed[stmt].elements;
    let me = &els[e];
    els.iter()
        .enumerate()
        .filter(|&(k, x)| {
            let covers = x.scope.start <= me.scope.start && me.scope.end <= x.scope.end;
            k != e && covers && (x.scope != me.scope || k < e)
        })
        .min_by_key(|(_, x)| x.scope.len())
        .map(|(k, _)| k)
}

/// Elements whose own tokens were edited, per side.
fn touched(fa: &FileAnalysis<'_>) -> [HashSet<(usize, usize)>; 2] {
    let mut out = [HashSet::new(), HashSet::new()];
    for gk in 0..fa.gaps.len() {
        let swap = reference_swap(fa, gk).is_some();
        for (si, side) in [Side::Old, Side::New].into_iter().enumerate() {
            let sd = fa.side(side);
            for &t in fa.gaps[gk].toks(side) {
                if !sd.is_content(t) {
                    continue;
                }
                let Some(stmt) = sd.tok_stmt[t] else { continue };
                let local = t - sd.stmts[stmt].tokens.start;
                let owner = sd.parsed[stmt].owner[local].or_else(|| {
                    // heuristic: a stray qualifier (`a.b.` of `a.b.c()`) belongs
                    // to the next call of the statement
                    sd.parsed[stmt]
                        .elements
                        .iter()
                        .enumerate()
                        .filter(|(_, e)| e.kind == ElementKind::Call && e.head > local)
                        .min_by_key(|(_, e)| e.head)
                        .map(|(k, _)| k)
                });
                let Some(o) = owner else { continue };
                let kind = sd.elem(stmt, o).kind;
                // a swapped reference is a variable change, not a change of
                // the assignment or declaration holding it
                if swap && matches!(kind, ElementKind::Assignment | ElementKind::VarDecl) {
                    continue;
                }
                out[si].insert((stmt, o));
            }
        }
    }
    for (si, side) in [Side::Old, Side::New].into_iter().enumerate() {
        let sd = fa.side(side);
        for (&(s, e), st) in &sd.elem_state {
            if *st == ElemState::Repeated {
                if let Some(p) = parent_of(sd, s, e) {
                    out[si].insert((s, p));
                }
            }
        }
    }
    out
}

struct Finding {
    action: RepairAction,
    sites: Vec<Site>,
    /// Variable name for assignment and declaration reconciliation.
    name: Option<String>,
}

fn file_actions(fa: &FileAnalysis<'_>) -> Vec<(RepairAction, Site)> {
    let dirty = touched(fa);
    let is_dirty = |id: ElemId| dirty[if id.side == Side::Old { 0 } else { 1 }].contains(&(id.stmt, id.elem));
    let mut found: Vec<Finding> = Vec::new();
    let mut push = |group: ActionGroup, kind: ActionKind, sites: Vec<Site>, name: Option<String>| {
        if let Ok(action) = RepairAction::new(group, kind) {
            found.push(Finding { action, sites, name });
        }
    };

    for gk in 0..fa.gaps.len() {
        if let Some((o, n)) = reference_swap(fa, gk) {
            let sites = vec![
                fa.site(Side::Old, fa.old.tok(o).line),
                fa.site(Side::New, fa.new.tok(n).line),
            ];
            push(ActionGroup::Variable, ActionKind::Modification, sites, None);
        }
    }

    for id in fa.elements() {
        let el = fa.elem(id);
        let sd = fa.side(id.side);
        let group = group_of(el.kind);
        let site = fa.elem_site(id);
        match fa.state(id) {
            ElemState::Unmatched => {
                // an element whose head survived was only re-parsed
                if !sd.changed_tok(sd.head(id.stmt, id.elem)) {
                    continue;
                }
                let kind = if id.side == Side::Old { ActionKind::Removal } else { ActionKind::Addition };
                push(group, kind, vec![site], el.name.clone());
            }
            ElemState::Replaced(p) if id.side == Side::Old => {
                let sites = vec![site, fa.elem_site(p)];
                push(group, ActionKind::Modification, sites, None);
            }
            ElemState::Matched(p) if id.side == Side::Old => {
                if !is_dirty(id) && !is_dirty(p) {
                    continue;
                }
                let new_el = fa.elem(p);
                let sites = vec![site, fa.elem_site(p)];
                let kind = match el.kind {
                    ElementKind::Call | ElementKind::MethodDecl => match new_el.arg_count().cmp(&el.arg_count()) {
                        std::cmp::Ordering::Greater => ActionKind::Addition,
                        std::cmp::Ordering::Less => ActionKind::Removal,
                        std::cmp::Ordering::Equal => ActionKind::Modification,
                    },
                    _ => ActionKind::Modification,
                };
                push(group, kind, sites, None);
            }
            // heuristic: a moved call counts as a changed call, nothing
            // else of a moved statement is an action
            ElemState::Moved if el.kind == ElementKind::Call => {
                push(group, ActionKind::Modification, vec![site], None);
            }
            _ => {}
        }
    }
    reconcile(found)
}

// Variables are identified by name within the file: an assignment (or
// declaration) both added and removed is a modified one.
fn reconcile(found: Vec<Finding>) -> Vec<(RepairAction, Site)> {
    let mut by_name: BTreeMap<(ActionGroup, String), BTreeSet<ActionKind>> = BTreeMap::new();
    for f in &found {
        if let Some(n) = &f.name {
            let g = f.action.group();
            if matches!(g, ActionGroup::Assignment | ActionGroup::Variable) {
                by_name.entry((g, n.clone())).or_default().insert(f.action.kind());
            }
        }
    }
    let mut out = Vec::new();
    for f in found {
        let mut action = f.action;
        if let Some(n) = &f.name {
            let g = action.group();
            if let Some(kinds) = by_name.get(&(g, n.clone())) {
                if kinds.contains(&ActionKind::Addition) && kinds.contains(&ActionKind::Removal) {
                    action = RepairAction::new(g, ActionKind::Modification).expect("legal");
                }
            }
        }
        out.extend(f.sites.into_iter().map(|s| (action, s)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::parse_unified_diff;
    use crate::scan::LanguageConfig;

    fn acts(d: &str) -> Vec<String> {
        let p = parse_unified_diff(d).unwrap();
        detect_actions(&PatchContext::from_diff(&p, &LanguageConfig::java())).acronyms()
    }

    fn one(old: &str, new: &str) -> Vec<String> {
        acts(&format!("--- a/A.java\n+++ b/A.java\n@@ -1,1 +1,1 @@\n-{old}\n+{new}\n"))
    }

    #[test]
    fn argument_count_decides_call_action() {
        assert_eq!(one("foo(a);", "foo(a, b);"), ["mcA"]);
        assert_eq!(one("foo(a, b);", "foo(a);"), ["mcR"]);
        assert_eq!(one("foo(a, 1);", "foo(a, 2);"), ["mcM"]);
        assert_eq!(one("foo(a, b);", "bar(a, b);"), ["mcM"]);
    }

    #[test]
    fn changed_condition_is_cnd_m() {
        assert_eq!(one("if (dataset != null) {", "if (dataset == null) {"), ["cndM"]);
    }

    #[test]
    fn wrapped_return_value() {
        assert_eq!(one("return a - b;", "return Math.max(0, a - b);"), ["mcA", "retM"]);
    }

    #[test]
    fn reference_swap_is_var_m_only() {
        assert_eq!(one("Foo x = p1.get(null);", "Foo x = p2.get(null);"), ["varM"]);
        assert_eq!(one("s.getChars(0, len, buf);", "s.getChars(0, width, buf);"), ["mcM", "varM"]);
        assert_eq!(one("x = p1;", "x = p2;"), ["varM"]);
    }

    #[test]
    fn paired_assignment_is_never_both_added_and_removed() {
        let a = one("x = foo();", "x = bar(a, b, c);");
        assert!(a.contains(&"asgnM".to_string()), "{a:?}");
        assert!(!a.contains(&"asgnA".to_string()) && !a.contains(&"asgnR".to_string()));
    }

    #[test]
    fn only_added_lines_means_no_removals() {
        let a = acts("--- a/A.java\n+++ b/A.java\n@@ -1,2 +1,5 @@\n a();\n+if (x == null) {\n+  return;\n+}\n b();\n");
        assert_eq!(a, ["cndA", "retA"]);
    }

    #[test]
    fn declaration_type_change() {
        assert_eq!(one("int x = 1;", "long x = 1;"), ["varM"]);
        assert_eq!(one("void f(int a) {", "void f(int a, int b) {"), ["mdA"]);
        assert_eq!(one("void f(int a) {", "void g(int a) {"), ["mdM"]);
    }

    #[test]
    fn empty_patch_has_no_actions() {
        assert!(detect_actions(&PatchContext::from_diff(&Default::default(), &LanguageConfig::java()))
            .tags
            .is_empty());
    }
}
