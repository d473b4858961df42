//! Repair patterns: recurring shapes of fixes, each with named variants.

mod rules;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actions::{ActionReport, RepairAction};
use crate::context::Site;

pub use rules::{detect_patterns, detect_patterns_in, PatternConfig, COPY_PASTE_JACCARD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RepairPattern {
    ConditionalBlock,
    ExpressionFix,
    WrapsWith,
    SingleLine,
    WrongReference,
    MissingNullCheck,
    CopyPaste,
    ConstantChange,
    CodeMoving,
}

impl RepairPattern {
    pub const ALL: [RepairPattern; 9] = [
        RepairPattern::ConditionalBlock,
        RepairPattern::ExpressionFix,
        RepairPattern::WrapsWith,
        RepairPattern::SingleLine,
        RepairPattern::WrongReference,
        RepairPattern::MissingNullCheck,
        RepairPattern::CopyPaste,
        RepairPattern::ConstantChange,
        RepairPattern::CodeMoving,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RepairPattern::ConditionalBlock => "conditionalBlock",
            RepairPattern::ExpressionFix => "expressionFix",
            RepairPattern::WrapsWith => "wrapsWith",
            RepairPattern::SingleLine => "singleLine",
            RepairPattern::WrongReference => "wrongReference",
            RepairPattern::MissingNullCheck => "missingNullCheck",
            RepairPattern::CopyPaste => "copyPaste",
            RepairPattern::ConstantChange => "constantChange",
            RepairPattern::CodeMoving => "codeMoving",
        }
    }

    pub fn variants(self) -> Vec<PatternVariant> {
        PatternVariant::ALL.iter().copied().filter(|v| v.pattern() == self).collect()
    }
}

impl fmt::Display for RepairPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("unknown repair pattern `{0}`")]
    UnknownPattern(String),
    #[error("unknown pattern variant `{0}`")]
    UnknownVariant(String),
    #[error("variant {variant} does not belong to pattern {pattern}")]
    Mismatch { pattern: RepairPattern, variant: PatternVariant },
}

impl FromStr for RepairPattern {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RepairPattern::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| PatternError::UnknownPattern(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PatternVariant {
    CondBlockOthersAdd,
    CondBlockRetAdd,
    CondBlockExcAdd,
    CondBlockRem,
    ExpLogicMod,
    ExpLogicExpand,
    ExpLogicReduce,
    ExpArithMod,
    WrapsIf,
    WrapsIfElse,
    WrapsElse,
    WrapsTryCatch,
    WrapsMethod,
    WrapsLoop,
    UnwrapIfElse,
    UnwrapMethod,
    UnwrapTryCatch,
    SingleLine,
    WrongVarRef,
    WrongMethodRef,
    MissNullCheckP,
    MissNullCheckN,
    CopyPaste,
    ConstChange,
    CodeMove,
}

impl PatternVariant {
    pub const ALL: [PatternVariant; 25] = [
        PatternVariant::CondBlockOthersAdd,
        PatternVariant::CondBlockRetAdd,
        PatternVariant::CondBlockExcAdd,
        PatternVariant::CondBlockRem,
        PatternVariant::ExpLogicMod,
        PatternVariant::ExpLogicExpand,
        PatternVariant::ExpLogicReduce,
        PatternVariant::ExpArithMod,
        PatternVariant::WrapsIf,
        PatternVariant::WrapsIfElse,
        PatternVariant::WrapsElse,
        PatternVariant::WrapsTryCatch,
        PatternVariant::WrapsMethod,
        PatternVariant::WrapsLoop,
        PatternVariant::UnwrapIfElse,
        PatternVariant::UnwrapMethod,
        PatternVariant::UnwrapTryCatch,
        PatternVariant::SingleLine,
        PatternVariant::WrongVarRef,
        PatternVariant::WrongMethodRef,
        PatternVariant::MissNullCheckP,
        PatternVariant::MissNullCheckN,
        PatternVariant::CopyPaste,
        PatternVariant::ConstChange,
        PatternVariant::CodeMove,
    ];

    pub fn pattern(self) -> RepairPattern {
        use PatternVariant::*;
        match self {
            CondBlockOthersAdd | CondBlockRetAdd | CondBlockExcAdd | CondBlockRem => RepairPattern::ConditionalBlock,
            ExpLogicMod | ExpLogicExpand | ExpLogicReduce | ExpArithMod => RepairPattern::ExpressionFix,
            WrapsIf | WrapsIfElse | WrapsElse | WrapsTryCatch | WrapsMethod | WrapsLoop | UnwrapIfElse
            | UnwrapMethod | UnwrapTryCatch => RepairPattern::WrapsWith,
            SingleLine => RepairPattern::SingleLine,
            WrongVarRef | WrongMethodRef => RepairPattern::WrongReference,
            MissNullCheckP | MissNullCheckN => RepairPattern::MissingNullCheck,
            CopyPaste => RepairPattern::CopyPaste,
            ConstChange => RepairPattern::ConstantChange,
            CodeMove => RepairPattern::CodeMoving,
        }
    }

    /// Unwrapping variants, the inverse of wrapping.
    pub fn is_unwrap(self) -> bool {
        matches!(
            self,
            PatternVariant::UnwrapIfElse | PatternVariant::UnwrapMethod | PatternVariant::UnwrapTryCatch
        )
    }

    pub fn as_str(self) -> &'static str {
        use PatternVariant::*;
        match self {
            CondBlockOthersAdd => "condBlockOthersAdd",
            CondBlockRetAdd => "condBlockRetAdd",
            CondBlockExcAdd => "condBlockExcAdd",
            CondBlockRem => "condBlockRem",
            ExpLogicMod => "expLogicMod",
            ExpLogicExpand => "expLogicExpand",
            ExpLogicReduce => "expLogicReduce",
            ExpArithMod => "expArithMod",
            WrapsIf => "wrapsIf",
            WrapsIfElse => "wrapsIfElse",
            WrapsElse => "wrapsElse",
            WrapsTryCatch => "wrapsTryCatch",
            WrapsMethod => "wrapsMethod",
            WrapsLoop => "wrapsLoop",
            UnwrapIfElse => "unwrapIfElse",
            UnwrapMethod => "unwrapMethod",
            UnwrapTryCatch => "unwrapTryCatch",
            SingleLine => "singleLine",
            WrongVarRef => "wrongVarRef",
            WrongMethodRef => "wrongMethodRef",
            MissNullCheckP => "missNullCheckP",
            MissNullCheckN => "missNullCheckN",
            CopyPaste => "copyPaste",
            ConstChange => "constChange",
            CodeMove => "codeMove",
        }
    }
}

impl fmt::Display for PatternVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PatternVariant {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PatternVariant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| PatternError::UnknownVariant(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternTag {
    pub variant: PatternVariant,
    pub sites: Vec<Site>,
}

impl PatternTag {
    pub fn pattern(&self) -> RepairPattern {
        self.variant.pattern()
    }
}

#[derive(Serialize, Deserialize)]
struct PatternTagRepr {
    pattern: RepairPattern,
    variant: PatternVariant,
    sites: Vec<Site>,
}

impl Serialize for PatternTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PatternTagRepr {
            pattern: self.pattern(),
            variant: self.variant,
            sites: self.sites.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PatternTag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = PatternTagRepr::deserialize(d)?;
        if r.variant.pattern() != r.pattern {
            return Err(serde::de::Error::custom(PatternError::Mismatch {
                pattern: r.pattern,
                variant: r.variant,
            }));
        }
        Ok(PatternTag {
            variant: r.variant,
            sites: r.sites,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternReport {
    pub tags: Vec<PatternTag>,
    /// False when no pattern was found.
    pub classified: bool,
}

impl PatternReport {
    /// Builds a report from raw findings, merging sites per variant.
    pub fn from_findings(findings: impl IntoIterator<Item = (PatternVariant, Site)>) -> Self {
        let mut by: BTreeMap<PatternVariant, Vec<Site>> = BTreeMap::new();
        for (v, s) in findings {
            by.entry(v).or_default().push(s);
        }
        let tags: Vec<PatternTag> = by
            .into_iter()
            .map(|(variant, mut sites)| {
                sites.sort();
                sites.dedup();
                PatternTag { variant, sites }
            })
            .collect();
        PatternReport {
            classified: !tags.is_empty(),
            tags,
        }
    }

    pub fn has_variant(&self, v: PatternVariant) -> bool {
        self.tags.iter().any(|t| t.variant == v)
    }

    pub fn has_pattern(&self, p: RepairPattern) -> bool {
        self.tags.iter().any(|t| t.pattern() == p)
    }

    pub fn variant_names(&self) -> Vec<String> {
        self.tags.iter().map(|t| t.variant.to_string()).collect()
    }

    /// Distinct patterns, in taxonomy order.
    pub fn patterns(&self) -> Vec<RepairPattern> {
        let mut v: Vec<_> = self.tags.iter().map(PatternTag::pattern).collect();
        v.sort();
        v.dedup();
        v
    }
}

/// Patch counts per pattern, most frequent first; ties in taxonomy order.
pub fn pattern_rank<'a>(reports: impl IntoIterator<Item = &'a PatternReport>) -> Vec<(RepairPattern, usize)> {
    let mut counts: BTreeMap<RepairPattern, usize> = BTreeMap::new();
    for r in reports {
        for p in r.patterns() {
            *counts.entry(p).or_default() += 1;
        }
    }
    let mut out: Vec<_> = counts.into_iter().collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}

/// Row of the composition table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CompositionRow {
    Pattern(RepairPattern),
    NotClassified,
}

impl fmt::Display for CompositionRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompositionRow::Pattern(p) => p.fmt(f),
            CompositionRow::NotClassified => f.write_str("notClassified"),
        }
    }
}

/// For each pattern (and for unclassified patches), how many of the patches
/// showing it contain each action. Every action of such a patch counts,
/// related to the pattern or not. Rows of absent patterns are empty.
pub fn pattern_action_composition<'a>(
    records: impl IntoIterator<Item = (&'a ActionReport, &'a PatternReport)>,
) -> BTreeMap<CompositionRow, BTreeMap<RepairAction, usize>> {
    let mut out: BTreeMap<CompositionRow, BTreeMap<RepairAction, usize>> = RepairPattern::ALL
        .iter()
        .map(|&p| (CompositionRow::Pattern(p), BTreeMap::new()))
        .chain([(CompositionRow::NotClassified, BTreeMap::new())])
        .collect();
    for (actions, patterns) in records {
        let rows: Vec<CompositionRow> = if patterns.classified {
            patterns.patterns().into_iter().map(CompositionRow::Pattern).collect()
        } else {
            vec![CompositionRow::NotClassified]
        };
        for row in rows {
            let e = out.entry(row).or_default();
            for t in &actions.tags {
                *e.entry(t.action).or_default() += 1;
            }
        }
    }
    out
}
