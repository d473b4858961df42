//! Repair actions: additions, removals and modifications of code elements.

mod detect;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::context::Site;

pub use detect::{constant_like, detect_actions, detect_actions_in};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActionGroup {
    Assignment,
    Conditional,
    Loop,
    MethodCall,
    MethodDefinition,
    ObjectInstantiation,
    Exception,
    Return,
    Variable,
    Type,
}

impl ActionGroup {
    pub const ALL: [ActionGroup; 10] = [
        ActionGroup::Assignment,
        ActionGroup::Conditional,
        ActionGroup::Loop,
        ActionGroup::MethodCall,
        ActionGroup::MethodDefinition,
        ActionGroup::ObjectInstantiation,
        ActionGroup::Exception,
        ActionGroup::Return,
        ActionGroup::Variable,
        ActionGroup::Type,
    ];

    pub fn prefix(self) -> &'static str {
        match self {
            ActionGroup::Assignment => "asgn",
            ActionGroup::Conditional => "cnd",
            ActionGroup::Loop => "lp",
            ActionGroup::MethodCall => "mc",
            ActionGroup::MethodDefinition => "md",
            ActionGroup::ObjectInstantiation => "obj",
            ActionGroup::Exception => "ex",
            ActionGroup::Return => "ret",
            ActionGroup::Variable => "var",
            ActionGroup::Type => "ty",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActionKind {
    Addition,
    Removal,
    Modification,
}

impl ActionKind {
    pub const ALL: [ActionKind; 3] = [ActionKind::Addition, ActionKind::Removal, ActionKind::Modification];

    pub fn suffix(self) -> char {
        match self {
            ActionKind::Addition => 'A',
            ActionKind::Removal => 'R',
            ActionKind::Modification => 'M',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("no repair action {group:?} {kind:?}")]
    Illegal { group: ActionGroup, kind: ActionKind },
    #[error("unknown repair action acronym `{0}`")]
    UnknownAcronym(String),
}

/// One of the 28 legal (group, kind) combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RepairAction {
    group: ActionGroup,
    kind: ActionKind,
}

impl RepairAction {
    pub fn new(group: ActionGroup, kind: ActionKind) -> Result<Self, ActionError> {
        let illegal = matches!(
            (group, kind),
            (ActionGroup::Exception, ActionKind::Modification) | (ActionGroup::Type, ActionKind::Removal)
        );
        if illegal {
            Err(ActionError::Illegal { group, kind })
        } else {
            Ok(RepairAction { group, kind })
        }
    }

    pub fn group(self) -> ActionGroup {
        self.group
    }

    pub fn kind(self) -> ActionKind {
        self.kind
    }

    /// All legal actions, group by group.
    pub fn all() -> Vec<RepairAction> {
        ActionGroup::ALL
            .iter()
            .flat_map(|&g| ActionKind::ALL.iter().filter_map(move |&k| RepairAction::new(g, k).ok()))
            .collect()
    }

    pub fn acronym(self) -> String {
        format!("{}{}", self.group.prefix(), self.kind.suffix())
    }
}

impl fmt::Display for RepairAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.acronym())
    }
}

impl FromStr for RepairAction {
    type Err = ActionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RepairAction::all()
            .into_iter()
            .find(|a| a.acronym() == s)
            .ok_or_else(|| ActionError::UnknownAcronym(s.to_string()))
    }
}

impl Serialize for RepairAction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.acronym())
    }
}

impl<'de> Deserialize<'de> for RepairAction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An action found in a patch with the lines showing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionTag {
    pub action: RepairAction,
    pub sites: Vec<Site>,
}

#[derive(Serialize, Deserialize)]
struct ActionTagRepr {
    acronym: RepairAction,
    group: ActionGroup,
    action: ActionKind,
    sites: Vec<Site>,
}

impl Serialize for ActionTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ActionTagRepr {
            acronym: self.action,
            group: self.action.group(),
            action: self.action.kind(),
            sites: self.sites.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ActionTag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = ActionTagRepr::deserialize(d)?;
        if r.acronym.group() != r.group || r.acronym.kind() != r.action {
            return Err(serde::de::Error::custom(format!(
                "acronym {} does not match {:?} {:?}",
                r.acronym, r.group, r.action
            )));
        }
        Ok(ActionTag {
            action: r.acronym,
            sites: r.sites,
        })
    }
}

/// Distinct actions of one patch, in taxonomy order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionReport {
    pub tags: Vec<ActionTag>,
}

impl ActionReport {
    /// Builds a report from raw findings, merging sites per action.
    pub fn from_findings(findings: impl IntoIterator<Item = (RepairAction, Site)>) -> Self {
        let mut by: BTreeMap<RepairAction, Vec<Site>> = BTreeMap::new();
        for (a, s) in findings {
            by.entry(a).or_default().push(s);
        }
        let tags = by
            .into_iter()
            .map(|(action, mut sites)| {
                sites.sort();
                sites.dedup();
                ActionTag { action, sites }
            })
            .collect();
        ActionReport { tags }
    }

    pub fn contains(&self, acronym: &str) -> bool {
        self.tags.iter().any(|t| t.action.acronym() == acronym)
    }

    pub fn acronyms(&self) -> Vec<String> {
        self.tags.iter().map(|t| t.action.acronym()).collect()
    }

    /// Number of distinct actions.
    pub fn kind_count(&self) -> usize {
        self.tags.len()
    }
}

/// Patch counts per action, most frequent first; ties in taxonomy order.
/// Actions found in no patch are left out.
pub fn action_rank<'a>(reports: impl IntoIterator<Item = &'a ActionReport>) -> Vec<(RepairAction, usize)> {
    let mut counts: BTreeMap<RepairAction, usize> = BTreeMap::new();
    for r in reports {
        for t in &r.tags {
            *counts.entry(t.action).or_default() += 1;
        }
    }
    let mut out: Vec<_> = counts.into_iter().collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::Side;

    #[test]
    fn taxonomy_has_28_entries() {
        let all = RepairAction::all();
        assert_eq!(all.len(), 28);
        assert!(!all.iter().any(|a| a.acronym() == "exM" || a.acronym() == "tyR"));
        assert_eq!(all[0].acronym(), "asgnA");
    }

    #[test]
    fn acronyms_round_trip() {
        for a in RepairAction::all() {
            assert_eq!(a.acronym().parse::<RepairAction>().unwrap(), a);
        }
        assert!("exM".parse::<RepairAction>().is_err());
        assert!(RepairAction::new(ActionGroup::Type, ActionKind::Removal).is_err());
    }

    #[test]
    fn tag_json_shape() {
        let tag = ActionTag {
            action: "mcM".parse().unwrap(),
            sites: vec![Site { file: "A.java".into(), line: 3, side: Side::New }],
        };
        let v = serde_json::to_value(&tag).unwrap();
        assert_eq!(v["acronym"], "mcM");
        assert_eq!(v["group"], "MethodCall");
        assert_eq!(v["action"], "Modification");
        let back: ActionTag = serde_json::from_value(v.clone()).unwrap();
        assert_eq!(back, tag);
        let mut bad = v;
        bad["group"] = "Loop".into();
        assert!(serde_json::from_value::<ActionTag>(bad).is_err());
    }

    #[test]
    fn rank_counts_patches_not_sites() {
        let s = |l| Site { file: "A.java".into(), line: l, side: Side::New };
        let mc: RepairAction = "mcA".parse().unwrap();
        let cnd: RepairAction = "cndA".parse().unwrap();
        let r1 = ActionReport::from_findings([(mc, s(1)), (mc, s(2)), (cnd, s(3))]);
        let r2 = ActionReport::from_findings([(mc, s(1))]);
        assert_eq!(action_rank([&r1, &r2]), vec![(mc, 2), (cnd, 1)]);
    }
}
