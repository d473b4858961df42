//! Per-patch records, the records document and loading of reference
//! dissection files.

use std::cmp::Ordering;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::actions::{action_rank, ActionReport, ActionTag, RepairAction};
use crate::context::Diagnostic;
use crate::metrics::{change_profile, ChangeProfile, PatchMetrics};
use crate::patterns::{pattern_rank, PatternReport, PatternTag, PatternVariant, RepairPattern};
use crate::stats::{distribution_summary, percentile_table, venn_summary, BoxPlot, StatsError, SummaryTable, VennSummary};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PatchRecord {
    pub schema_version: u32,
    pub project: String,
    pub bug_id: String,
    pub metrics: PatchMetrics,
    pub change_profile: Option<ChangeProfile>,
    pub actions: ActionReport,
    pub patterns: PatternReport,
    pub diagnostics: Vec<Diagnostic>,
    /// Unified diff of the source files, for display.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diff: Option<String>,
}

impl PatchRecord {
    pub fn id(&self) -> String {
        format!("{}-{}", self.project, self.bug_id)
    }

    /// Distinct patterns (not variants) of the record.
    pub fn pattern_count(&self) -> usize {
        self.patterns.patterns().len()
    }
}

/// An entry that produced no record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EntryError {
    pub project: String,
    pub bug_id: String,
    pub message: String,
}

/// Order of bug ids: numeric ids by value, before any non-numeric id.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

pub fn record_order(a: (&str, &str), b: (&str, &str)) -> Ordering {
    a.0.cmp(b.0).then_with(|| natural_cmp(a.1, b.1))
}

pub fn sort_records(records: &mut [PatchRecord]) {
    records.sort_by(|a, b| record_order((&a.project, &a.bug_id), (&b.project, &b.bug_id)));
}

/// Bugs known to duplicate another bug of the benchmark.
pub const DUPLICATE_BUGS: [(&str, &str); 2] = [("Closure", "63"), ("Closure", "93")];

pub fn is_duplicate(project: &str, bug_id: &str) -> bool {
    DUPLICATE_BUGS.iter().any(|&(p, b)| p == project && b == bug_id)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankEntry {
    pub name: String,
    pub patches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Aggregates {
    pub summary: SummaryTable,
    pub venn: VennSummary,
    pub action_rank: Vec<RankEntry>,
    pub pattern_rank: Vec<RankEntry>,
    pub actions_per_patch: BoxPlot,
    pub patterns_per_patch: BoxPlot,
}

impl Aggregates {
    pub fn of(records: &[PatchRecord]) -> Result<Self, StatsError> {
        Ok(Aggregates {
            summary: percentile_table(records.iter().map(|r| &r.metrics))?,
            venn: venn_summary(records.iter().map(|r| r.change_profile)),
            action_rank: action_rank(records.iter().map(|r| &r.actions))
                .into_iter()
                .map(|(a, n)| RankEntry { name: a.acronym(), patches: n })
                .collect(),
            pattern_rank: pattern_rank(records.iter().map(|r| &r.patterns))
                .into_iter()
                .map(|(p, n)| RankEntry { name: p.as_str().to_string(), patches: n })
                .collect(),
            actions_per_patch: distribution_summary(records.iter().map(|r| r.actions.kind_count() as f64))?,
            patterns_per_patch: distribution_summary(records.iter().map(|r| r.pattern_count() as f64))?,
        })
    }
}

/// The document written by a corpus run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RecordsDocument {
    pub schema_version: u32,
    pub records: Vec<PatchRecord>,
    #[serde(default)]
    pub errors: Vec<EntryError>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aggregates: Option<Aggregates>,
}

impl RecordsDocument {
    /// Sorts the records and computes aggregates, left out for an empty
    /// corpus.
    pub fn new(mut records: Vec<PatchRecord>, mut errors: Vec<EntryError>) -> Self {
        sort_records(&mut records);
        errors.sort_by(|a, b| record_order((&a.project, &a.bug_id), (&b.project, &b.bug_id)));
        let aggregates = Aggregates::of(&records).ok();
        RecordsDocument {
            schema_version: SCHEMA_VERSION,
            records,
            errors,
            aggregates,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("records serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("record {index}: unrecognized field `{field}`")]
    UnknownField { index: usize, field: String },
    #[error("record {index}: unrecognized {what} `{name}`")]
    UnknownName { index: usize, what: &'static str, name: String },
    #[error("record {index}: field `{field}` has an unexpected type")]
    BadType { index: usize, field: String },
    #[error("record {index}: missing field `{field}`")]
    Missing { index: usize, field: &'static str },
    #[error("unrecognized document: {0}")]
    Schema(String),
}

/// Loads records from this tool's output or from a published dissection
/// file; the format is detected from the content.
pub fn load_reference_json(path: &Path) -> Result<Vec<PatchRecord>, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_reference_json(&text)?.records)
}

pub fn parse_reference_json(text: &str) -> Result<RecordsDocument, LoadError> {
    let v: Value = serde_json::from_str(text)?;
    match v {
        Value::Object(ref m) if m.contains_key("schemaVersion") => Ok(serde_json::from_value(v)?),
        Value::Object(m) => Err(LoadError::Schema(match m.keys().next() {
            Some(k) => format!("unrecognized field `{k}`"),
            None => "empty object".into(),
        })),
        Value::Array(items) => {
            let mut records = Vec::with_capacity(items.len());
            for (index, item) in items.into_iter().enumerate() {
                let Value::Object(m) = item else {
                    return Err(LoadError::Schema(format!("record {index} is not an object")));
                };
                if m.contains_key("schemaVersion") {
                    records.push(serde_json::from_value(Value::Object(m))?);
                } else {
                    records.push(from_published(index, &m)?);
                }
            }
            Ok(RecordsDocument {
                schema_version: SCHEMA_VERSION,
                records,
                errors: Vec::new(),
                aggregates: None,
            })
        }
        other => Err(LoadError::Schema(format!("top level is {}", type_name(&other)))),
    }
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

// Fields of the published file that carry nothing we aggregate.
const PUBLISHED_IGNORED: [&str; 6] = ["changedFiles", "failingTests", "observations", "program", "repairTools", "revisionId"];

// Published metric names and the metric each feeds. Several names may feed
// one metric; the first present wins.
const PUBLISHED_METRICS: [(&str, Option<&str>); 12] = [
    ("addedLines", Some("added")),
    ("removedLines", Some("removed")),
    ("deletedLines", Some("removed")),
    ("modifiedLines", Some("modified")),
    ("sizeInLines", Some("patchSize")),
    ("patchSize", Some("patchSize")),
    ("chunks", Some("chunks")),
    ("spreadingCodeOnly", Some("spreading")),
    ("spreadingAllLines", None),
    ("files", Some("files")),
    ("classes", Some("classes")),
    ("methods", Some("methods")),
];

/// Published fine-grained action names and their acronym.
pub const PUBLISHED_ACTIONS: [(&str, &str); 52] = [
    ("assignAdd", "asgnA"),
    ("assignRem", "asgnR"),
    ("assignExpChange", "asgnM"),
    ("condBranIfAdd", "cndA"),
    ("condBranIfElseAdd", "cndA"),
    ("condBranElseAdd", "cndA"),
    ("condBranCaseAdd", "cndA"),
    ("condBranRem", "cndR"),
    ("condExpExpand", "cndM"),
    ("condExpRed", "cndM"),
    ("condExpMod", "cndM"),
    ("loopAdd", "lpA"),
    ("loopRem", "lpR"),
    ("loopCondChange", "lpM"),
    ("loopInitChange", "lpM"),
    ("mcAdd", "mcA"),
    ("mcParAdd", "mcA"),
    ("mcRem", "mcR"),
    ("mcParRem", "mcR"),
    ("mcRepl", "mcM"),
    ("mcParSwap", "mcM"),
    ("mcParValChange", "mcM"),
    ("mcMove", "mcM"),
    ("mdAdd", "mdA"),
    ("mdParAdd", "mdA"),
    ("mdRem", "mdR"),
    ("mdParRem", "mdR"),
    ("mdRen", "mdM"),
    ("mdParTyChange", "mdM"),
    ("mdRetTyChange", "mdM"),
    ("mdModChange", "mdM"),
    ("mdOverride", "mdM"),
    ("objInstAdd", "objA"),
    ("objInstRem", "objR"),
    ("objInstMod", "objM"),
    ("exTryCatchAdd", "exA"),
    ("exThrowsAdd", "exA"),
    ("exTryCatchRem", "exR"),
    ("exThrowsRem", "exR"),
    ("retBranchAdd", "retA"),
    ("retAdd", "retA"),
    ("retRem", "retR"),
    ("retExpChange", "retM"),
    ("varAdd", "varA"),
    ("varRem", "varR"),
    ("varReplVar", "varM"),
    ("varReplMc", "varM"),
    ("varTyChange", "varM"),
    ("varModChange", "varM"),
    ("tyAdd", "tyA"),
    ("tyImpInterf", "tyM"),
    ("tyMod", "tyM"),
];

/// Published pattern labels that are not pattern variants.
const PUBLISHED_NON_PATTERNS: [&str; 1] = ["notClassified"];

fn published_action(name: &str) -> Option<RepairAction> {
    PUBLISHED_ACTIONS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, a)| a.parse().expect("table acronyms are legal"))
        .or_else(|| name.parse().ok())
}

fn from_published(index: usize, m: &Map<String, Value>) -> Result<PatchRecord, LoadError> {
    let bad = |field: &str| LoadError::BadType { index, field: field.to_string() };
    for k in m.keys() {
        let known = matches!(k.as_str(), "project" | "bugId" | "metrics" | "repairActions" | "repairPatterns" | "diff")
            || PUBLISHED_IGNORED.contains(&k.as_str());
        if !known {
            return Err(LoadError::UnknownField { index, field: k.clone() });
        }
    }
    let project = m
        .get("project")
        .ok_or(LoadError::Missing { index, field: "project" })?
        .as_str()
        .ok_or_else(|| bad("project"))?
        .to_string();
    let bug_id = match m.get("bugId").ok_or(LoadError::Missing { index, field: "bugId" })? {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(bad("bugId")),
    };

    let mut metrics = PatchMetrics::default();
    if let Some(mv) = m.get("metrics") {
        let mm = mv.as_object().ok_or_else(|| bad("metrics"))?;
        for k in mm.keys() {
            if !PUBLISHED_METRICS.iter().any(|(n, _)| n == k) {
                return Err(LoadError::UnknownField { index, field: format!("metrics.{k}") });
            }
        }
        let mut set = std::collections::BTreeSet::new();
        for (name, target) in PUBLISHED_METRICS {
            let (Some(target), Some(v)) = (target, mm.get(name)) else { continue };
            if !set.insert(target) {
                continue;
            }
            let n = v
                .as_u64()
                .or_else(|| v.as_f64().filter(|f| *f >= 0.0).map(|f| f.round() as u64))
                .ok_or_else(|| bad(&format!("metrics.{name}")))? as usize;
            match target {
                "added" => metrics.added = n,
                "removed" => metrics.removed = n,
                "modified" => metrics.modified = n,
                "patchSize" => metrics.patch_size = n,
                "chunks" => metrics.chunks = n,
                "spreading" => metrics.spreading = n,
                "files" => metrics.files = n,
                "classes" => metrics.classes = n,
                "methods" => metrics.methods = n,
                _ => unreachable!(),
            }
        }
    }

    let names = |field: &str| -> Result<Vec<String>, LoadError> {
        match m.get(field) {
            None | Some(Value::Null) => Ok(Vec::new()),
            Some(Value::Array(a)) => a
                .iter()
                .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad(field)))
                .collect(),
            Some(_) => Err(bad(field)),
        }
    };

    let mut acts = Vec::new();
    for n in names("repairActions")? {
        let a = published_action(&n).ok_or(LoadError::UnknownName { index, what: "repair action", name: n })?;
        acts.push(a);
    }
    acts.sort();
    acts.dedup();
    let actions = ActionReport {
        tags: acts.into_iter().map(|action| ActionTag { action, sites: Vec::new() }).collect(),
    };

    let mut vars: Vec<PatternVariant> = Vec::new();
    for n in names("repairPatterns")? {
        if PUBLISHED_NON_PATTERNS.contains(&n.as_str()) {
            continue;
        }
        let v = n
            .parse::<PatternVariant>()
            .map_err(|_| LoadError::UnknownName { index, what: "repair pattern", name: n })?;
        vars.push(v);
    }
    vars.sort();
    vars.dedup();
    let tags: Vec<PatternTag> = vars.into_iter().map(|variant| PatternTag { variant, sites: Vec::new() }).collect();
    let patterns = PatternReport {
        classified: !tags.is_empty(),
        tags,
    };

    let diff = match m.get("diff") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(bad("diff")),
    };

    Ok(PatchRecord {
        schema_version: SCHEMA_VERSION,
        project,
        bug_id,
        change_profile: change_profile(&metrics.size()),
        metrics,
        actions,
        patterns,
        diagnostics: Vec::new(),
        diff,
    })
}

/// Per-pattern patch counts with every pattern listed, zeros included.
pub fn pattern_counts(records: &[PatchRecord]) -> Vec<(RepairPattern, usize)> {
    RepairPattern::ALL
        .iter()
        .map(|&p| (p, records.iter().filter(|r| r.patterns.has_pattern(p)).count()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bug_ids_sort_naturally() {
        let mut ids = vec!["10", "9", "100", "2b", "1"];
        ids.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(ids, ["1", "9", "10", "100", "2b"]);
        assert_eq!(record_order(("Chart", "26"), ("Closure", "1")), Ordering::Less);
    }

    #[test]
    fn published_entry_translates() {
        let text = r#"[{
            "bugId": 40, "project": "Closure", "program": "closure-compiler",
            "revisionId": "x", "repairTools": [], "failingTests": [], "changedFiles": {},
            "metrics": {"addedLines": 0, "removedLines": 2, "modifiedLines": 1, "sizeInLines": 3,
                        "chunks": 2, "spreadingAllLines": 4, "spreadingCodeOnly": 2,
                        "files": 1, "classes": 1, "methods": 1},
            "repairActions": ["mcParValChange", "condBranRem"],
            "repairPatterns": ["constChange", "unwrapIfElse"]
        }]"#;
        let doc = parse_reference_json(text).unwrap();
        let r = &doc.records[0];
        assert_eq!(r.id(), "Closure-40");
        assert_eq!((r.metrics.removed, r.metrics.modified, r.metrics.patch_size), (2, 1, 3));
        assert_eq!(r.metrics.spreading, 2);
        assert_eq!(r.change_profile, Some(ChangeProfile::RM));
        assert_eq!(r.actions.acronyms(), ["cndR", "mcM"]);
        assert_eq!(r.pattern_count(), 2);
    }

    #[test]
    fn unknown_fields_are_named() {
        let e = parse_reference_json(r#"[{"project": "A", "bugId": 1, "color": "red"}]"#).unwrap_err();
        assert!(e.to_string().contains("`color`"), "{e}");
        let e = parse_reference_json(r#"[{"project": "A", "bugId": 1, "metrics": {"lines": 1}}]"#).unwrap_err();
        assert!(e.to_string().contains("`metrics.lines`"), "{e}");
        let e = parse_reference_json(r#"{"schemaVersion": 1, "records": [], "extra": 0}"#).unwrap_err();
        assert!(e.to_string().contains("`extra`"), "{e}");
        let e = parse_reference_json(r#"{"bugs": []}"#).unwrap_err();
        assert!(e.to_string().contains("`bugs`"), "{e}");
    }

    #[test]
    fn truncated_file_fails() {
        assert!(matches!(parse_reference_json(r#"[{"project": "A", "bu"#), Err(LoadError::Json(_))));
    }

    #[test]
    fn empty_corpus_has_no_aggregates() {
        let d = RecordsDocument::new(Vec::new(), Vec::new());
        assert!(d.aggregates.is_none());
        assert!(!d.to_json().contains("aggregates"));
    }

    #[test]
    fn duplicates() {
        assert!(is_duplicate("Closure", "63"));
        assert!(!is_duplicate("Closure", "62"));
    }
}
