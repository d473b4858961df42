//! Text and CSV reports over a set of records.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use dissect_core::actions::RepairAction;
use dissect_core::patterns::pattern_action_composition;
use dissect_core::record::{Aggregates, PatchRecord};
use dissect_core::stats::{render_csv, render_text_table, BoxPlot, SummaryTable};

#[derive(Debug, Clone, Copy, Default)]
pub struct Selection {
    pub table2: bool,
    pub venn: bool,
    pub rank_actions: bool,
    pub rank_patterns: bool,
    pub distributions: bool,
    pub composition: bool,
}

impl Selection {
    pub fn all() -> Self {
        Selection {
            table2: true,
            venn: true,
            rank_actions: true,
            rank_patterns: true,
            distributions: true,
            composition: true,
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.table2 || self.venn || self.rank_actions || self.rank_patterns || self.distributions || self.composition)
    }
}

pub struct Section {
    pub name: &'static str,
    pub title: &'static str,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Section {
    fn new(name: &'static str, title: &'static str, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        Section {
            name,
            title,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    fn header_refs(&self) -> Vec<&str> {
        self.header.iter().map(String::as_str).collect()
    }

    pub fn text(&self) -> String {
        render_text_table(&self.header_refs(), &self.rows)
    }

    pub fn csv(&self) -> Result<String> {
        Ok(render_csv(&self.header_refs(), &self.rows)?)
    }
}

pub fn sections(records: &[PatchRecord], sel: Selection) -> Result<Vec<Section>> {
    let agg = Aggregates::of(records).context("no records to aggregate")?;
    let mut out = Vec::new();
    if sel.table2 {
        out.push(Section::new("table2", "Patch size and spreading", &SummaryTable::header(), agg.summary.cells()));
    }
    if sel.venn {
        out.push(Section::new("venn", "Change profiles", &["profile", "patches", "%"], agg.venn.cells()));
    }
    if sel.rank_actions {
        let rows = agg.action_rank.iter().map(|e| vec![e.name.clone(), e.patches.to_string()]).collect();
        out.push(Section::new("rank-actions", "Repair actions by patch count", &["action", "patches"], rows));
    }
    if sel.rank_patterns {
        let rows = agg.pattern_rank.iter().map(|e| vec![e.name.clone(), e.patches.to_string()]).collect();
        out.push(Section::new("rank-patterns", "Repair patterns by patch count", &["pattern", "patches"], rows));
    }
    if sel.distributions {
        let rows = vec![
            agg.actions_per_patch.cells("actionsPerPatch"),
            agg.patterns_per_patch.cells("patternsPerPatch"),
        ];
        out.push(Section::new("distributions", "Tags per patch", &BoxPlot::header(), rows));
    }
    if sel.composition {
        let comp = pattern_action_composition(records.iter().map(|r| (&r.actions, &r.patterns)));
        let actions = RepairAction::all();
        let header: Vec<String> = std::iter::once("pattern".to_string()).chain(actions.iter().map(|a| a.acronym())).collect();
        let rows = comp
            .iter()
            .map(|(row, counts)| {
                std::iter::once(row.to_string())
                    .chain(actions.iter().map(|a| counts.get(a).copied().unwrap_or(0).to_string()))
                    .collect()
            })
            .collect();
        out.push(Section {
            name: "composition",
            title: "Actions within each pattern",
            header,
            rows,
        });
    }
    Ok(out)
}

pub fn render_text(sections: &[Section]) -> String {
    let mut s = String::new();
    for (i, sec) in sections.iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        let _ = writeln!(s, "{}", sec.title);
        s.push_str(&sec.text());
    }
    s
}

/// Writes `<name>.txt` and `<name>.csv` per section, plus the aggregates as
/// JSON.
pub fn write_reports(dir: &Path, records: &[PatchRecord]) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for sec in sections(records, Selection::all())? {
        std::fs::write(dir.join(format!("{}.txt", sec.name)), sec.text())?;
        std::fs::write(dir.join(format!("{}.csv", sec.name)), sec.csv()?)?;
    }
    let agg = Aggregates::of(records)?;
    std::fs::write(dir.join("aggregates.json"), serde_json::to_string_pretty(&agg)? + "\n")?;
    Ok(())
}
