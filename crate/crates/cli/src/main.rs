//! `dissect`: measures bug-fix patches and tags their repair actions and
//! repair patterns, one at a time or over a whole corpus.

mod report;
mod serve;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use dissect_core::corpus::{diff_trees, dissect_corpus, dissect_diff, CorpusManifest, RunOptions};
use dissect_core::diff::parse_unified_diff;
use dissect_core::record::{load_reference_json, parse_reference_json, RecordsDocument};
use dissect_core::scan::LanguageConfig;

use report::Selection;

#[derive(Parser)]
#[command(name = "dissect", version, about = "Dissect bug-fix patches into metrics, repair actions and repair patterns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dissect every entry of a manifest.
    Run {
        manifest: PathBuf,
        /// Write the records here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write text and CSV reports into this directory.
        #[arg(long)]
        reports: Option<PathBuf>,
        /// Drop the bugs known to duplicate others.
        #[arg(long)]
        dedup: bool,
        /// Worker threads (default: all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Dissect a single patch and print its record.
    One(OneArgs),
    /// Print corpus statistics of a records file (all sections when none is chosen).
    Stats(StatsArgs),
    /// Serve a records file over HTTP for the explorer.
    Serve {
        records: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory of static files served at `/`.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OneArgs {
    /// Unified diff of the patch.
    #[arg(long, conflicts_with_all = ["buggy", "fixed"], required_unless_present_all = ["buggy", "fixed"])]
    diff: Option<PathBuf>,
    /// Source tree before the fix.
    #[arg(long, requires = "fixed")]
    buggy: Option<PathBuf>,
    /// Source tree after the fix.
    #[arg(long, requires = "buggy")]
    fixed: Option<PathBuf>,
    #[arg(long, default_value = "local")]
    project: String,
    #[arg(long, default_value = "1")]
    bug_id: String,
    /// Source file extension looked at when diffing trees.
    #[arg(long, default_value = "java")]
    extension: String,
}

#[derive(Args)]
struct StatsArgs {
    records: PathBuf,
    /// Percentiles of the size and spreading metrics.
    #[arg(long)]
    table2: bool,
    /// Patch counts per change profile.
    #[arg(long)]
    venn: bool,
    /// Repair actions by number of patches.
    #[arg(long)]
    rank_actions: bool,
    /// Repair patterns by number of patches.
    #[arg(long)]
    rank_patterns: bool,
    /// Box plots of actions and patterns per patch.
    #[arg(long)]
    distributions: bool,
    /// Action counts within the patches of each pattern.
    #[arg(long)]
    composition: bool,
    /// Print CSV instead of aligned tables.
    #[arg(long, conflicts_with = "json")]
    csv: bool,
    /// Print the aggregates as JSON.
    #[arg(long)]
    json: bool,
}

/// Failure classes mapped to exit codes.
enum Failure {
    /// Some entries could not be dissected.
    Entries(usize),
    /// Bad arguments or unusable input documents.
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(manifest: &Path, out: Option<&Path>, reports: Option<&Path>, opts: RunOptions) -> Result<(), Failure> {
    let manifest = CorpusManifest::load(manifest).map_err(anyhow::Error::from)?;
    let doc = dissect_corpus(&manifest, opts);
    write_output(out, &doc.to_json())?;
    if let Some(dir) = reports {
        if doc.records.is_empty() {
            log::warn!("no records, skipping reports");
        } else {
            report::write_reports(dir, &doc.records)?;
        }
    }
    if doc.errors.is_empty() {
        Ok(())
    } else {
        Err(Failure::Entries(doc.errors.len()))
    }
}

fn one(a: &OneArgs) -> Result<(), Failure> {
    let lang = LanguageConfig {
        source_extension: format!(".{}", a.extension.trim_start_matches('.')),
        ..LanguageConfig::java()
    };
    let (patch, roots) = match (&a.diff, &a.buggy, &a.fixed) {
        (Some(d), _, _) => {
            let text = std::fs::read_to_string(d).with_context(|| format!("reading {}", d.display()))?;
            let p = parse_unified_diff(&text).map_err(|e| anyhow::anyhow!("{}: {e}", d.display()))?;
            (p, (None, None))
        }
        (None, Some(b), Some(f)) => {
            let p = diff_trees(b, f, &lang.source_extension).map_err(anyhow::Error::msg)?;
            (p, (Some(b.as_path()), Some(f.as_path())))
        }
        _ => return Err(Failure::Usage(anyhow::anyhow!("give --diff or both --buggy and --fixed"))),
    };
    if patch.source_only(&lang.source_extension).file_diffs.is_empty() {
        eprintln!("error: empty diff: no source file changed");
        return Err(Failure::Entries(1));
    }
    let rec = dissect_diff(&a.project, &a.bug_id, &patch, roots, &lang);
    println!("{}", serde_json::to_string_pretty(&rec).expect("record serializes"));
    Ok(())
}

fn stats(a: &StatsArgs) -> Result<(), Failure> {
    let records = load_reference_json(&a.records).with_context(|| format!("loading {}", a.records.display()))?;
    if records.is_empty() {
        return Err(Failure::Usage(anyhow::anyhow!("{} holds no records", a.records.display())));
    }
    if a.json {
        let doc = RecordsDocument::new(records, Vec::new());
        println!("{}", serde_json::to_string_pretty(&doc.aggregates).expect("aggregates serialize"));
        return Ok(());
    }
    let mut sel = Selection {
        table2: a.table2,
        venn: a.venn,
        rank_actions: a.rank_actions,
        rank_patterns: a.rank_patterns,
        distributions: a.distributions,
        composition: a.composition,
    };
    if sel.is_empty() {
        sel = Selection { composition: false, ..Selection::all() };
    }
    let secs = report::sections(&records, sel)?;
    if a.csv {
        for s in &secs {
            print!("{}", s.csv()?);
        }
    } else {
        print!("{}", report::render_text(&secs));
    }
    Ok(())
}

fn serve_cmd(records: &Path, port: u16, static_dir: Option<PathBuf>) -> Result<(), Failure> {
    let text = std::fs::read_to_string(records).with_context(|| format!("reading {}", records.display()))?;
    // refuse documents the explorer could not read
    let doc = parse_reference_json(&text).with_context(|| format!("loading {}", records.display()))?;
    let json = if doc.aggregates.is_some() || doc.records.is_empty() {
        text
    } else {
        RecordsDocument::new(doc.records, doc.errors).to_json()
    };
    if let Some(d) = static_dir.as_deref().filter(|d| !d.is_dir()) {
        return Err(anyhow::anyhow!("static directory {} does not exist", d.display()).into());
    }
    let rt = tokio::runtime::Runtime::new().context("starting runtime")?;
    rt.block_on(serve::serve(json, static_dir, port))?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            manifest,
            out,
            reports,
            dedup,
            jobs,
        } => run(
            manifest,
            out.as_deref(),
            reports.as_deref(),
            RunOptions {
                dedup: *dedup,
                jobs: *jobs,
            },
        ),
        Command::One(a) => one(a),
        Command::Stats(a) => stats(a),
        Command::Serve {
            records,
            port,
            static_dir,
        } => serve_cmd(records, *port, static_dir.clone()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Entries(n)) => {
            eprintln!("{n} entr{} failed", if n == 1 { "y" } else { "ies" });
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
