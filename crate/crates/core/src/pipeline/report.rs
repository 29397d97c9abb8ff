//! Rendering of a run into Markdown, CSV and GEXF files.
//!
//! All content is rendered in memory first so the content hash can be taken
//! over exactly the bytes that are written. No timestamps are included.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{PipelineError, RunConfig, Stage1, Stage2, Warning};
use crate::concentration::{
    category_stats_csv, hhi_table_csv, hhi_table_markdown, monopoly_flag, MONOPOLY_THRESHOLD,
};
use crate::ingest::{write_filter_report_csv, FilterReport};
use crate::network::{edge_list_csv, gexf_string, graph_stats};
use crate::scoring::{score_table_csv, score_table_markdown};

pub const DISTANCE_CALIBRATION_NOTE: &str = "Distance deciles fall linearly from 10 at the target to 0 at the reference distance. \
The reference is a calibration choice: score tables calibrated elsewhere imply references between roughly 18000 and 19000 km, \
and reproduce under this reference only to within about 0.6 decile.";

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub config_echo: String,
    pub stage1: Stage1,
    pub stage2: Stage2,
    pub reference_distance_km: f64,
    pub top_k: usize,
    /// Hex SHA-256 over every emitted file except `report.md`.
    pub content_hash: String,
}

impl RunReport {
    pub fn new(config: &RunConfig, stage1: Stage1, stage2: Stage2) -> Self {
        let mut report = RunReport {
            config_echo: config.echo(),
            stage1,
            stage2,
            reference_distance_km: config.reference_distance_km,
            top_k: config.top_k,
            content_hash: String::new(),
        };
        report.content_hash = content_hash(&data_files(&report));
        report
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Warning> {
        self.stage1.warnings.iter().chain(&self.stage2.warnings)
    }
}

fn content_hash(files: &BTreeMap<String, String>) -> String {
    let mut h = Sha256::new();
    for (name, body) in files {
        h.update(name.as_bytes());
        h.update([0u8]);
        h.update((body.len() as u64).to_le_bytes());
        h.update(body.as_bytes());
    }
    hex::encode(h.finalize())
}

fn filter_summary_csv(rows: &[(&str, &FilterReport)]) -> String {
    let mut out = String::from("stage,input_count,output_count,rejected_count\n");
    for (name, r) in rows {
        let _ = writeln!(out, "{name},{},{},{}", r.input_count, r.output_count, r.rejected.len());
    }
    out
}

fn data_files(report: &RunReport) -> BTreeMap<String, String> {
    let s1 = &report.stage1;
    let mut files = BTreeMap::new();
    let filters = [
        ("local_registry", &s1.local_filter),
        ("global_revenue", &s1.global_filter),
        ("global_domestic", &s1.domestic_filter),
    ];
    files.insert("filter_summary.csv".into(), filter_summary_csv(&filters));
    for (name, r) in filters {
        files.insert(format!("rejected_{name}.csv"), write_filter_report_csv(r));
    }
    files.insert("local_category_stats.csv".into(), category_stats_csv(&s1.local_stats));
    files.insert("global_category_counts.csv".into(), category_stats_csv(&s1.global_stats));
    for (cat, market) in &s1.markets {
        files.insert(format!("hhi_{}.csv", cat.slug()), hhi_table_csv(market.entries()));
    }
    for r in &report.stage2.rankings {
        files.insert(format!("scores_{}.csv", r.category.slug()), score_table_csv(&r.selected));
    }
    files.insert("industry_graph.gexf".into(), gexf_string(&s1.graph));
    files.insert("industry_graph_edges.csv".into(), edge_list_csv(&s1.graph));
    let mut warnings = String::new();
    for w in report.warnings() {
        let _ = writeln!(warnings, "{w}");
    }
    files.insert("warnings.txt".into(), warnings);
    files
}

fn markdown(report: &RunReport) -> String {
    let s1 = &report.stage1;
    let s2 = &report.stage2;
    let mut md =
        String::from("# Investment target screening report\n\n## Configuration\n\n```text\n");
    md.push_str(&report.config_echo);
    md.push_str("```\n\n## Stage 1: industry suitability\n\n### Filters\n\n");
    md.push_str("| stage | input | kept | rejected |\n|---|---:|---:|---:|\n");
    for (name, r) in [
        ("local registry (year, credit code)", &s1.local_filter),
        ("global dataset (operational, revenue quartile)", &s1.global_filter),
        ("global dataset (domestic excluded)", &s1.domestic_filter),
    ] {
        let _ = writeln!(
            md,
            "| {name} | {} | {} | {} |",
            r.input_count,
            r.output_count,
            r.rejected.len()
        );
    }

    md.push_str("\n### Enterprises per category\n\n");
    md.push_str("| category | local count | local registered capital | foreign count |\n|---|---:|---:|---:|\n");
    for (l, g) in s1.local_stats.iter().zip(&s1.global_stats) {
        let _ = writeln!(
            md,
            "| {} | {} | {:.2} | {} |",
            l.category,
            l.enterprise_count,
            l.total_registered_capital.unwrap_or(0.0),
            g.enterprise_count
        );
    }

    md.push_str("\n### Crosswalk diagnostics\n\n");
    if s1.crosswalk_diagnostics.is_empty() {
        md.push_str("none\n");
    }
    for d in &s1.crosswalk_diagnostics {
        let _ = writeln!(md, "- {d}");
    }

    md.push_str("\n### Co-classification graph\n\n");
    let stats = graph_stats(&s1.graph);
    let _ = writeln!(md, "{} nodes, {} edges.\n", s1.graph.nodes().len(), s1.graph.edges().len());
    if !stats.is_empty() {
        md.push_str("| category | records | degree | weighted degree |\n|---|---:|---:|---:|\n");
        for (cat, st) in &stats {
            let _ = writeln!(
                md,
                "| {cat} | {} | {} | {} |",
                s1.graph.nodes()[cat],
                st.degree,
                st.weighted_degree
            );
        }
    }

    md.push_str("\n### Concentration of focus categories\n");
    for (cat, market) in &s1.markets {
        let top = &market.entries()[0];
        let _ = write!(
            md,
            "\n#### {cat}\n\n{} companies, total market value {:.4}, HHI {:.6} points ({:.8} as a fraction).\n\
             Largest share {:.6} (`{}`), monopoly at >= {:.2}: {}.\n\nTop decile by HHI:\n\n",
            market.len(),
            market.total_market_value(),
            market.hhi_total(),
            market.hhi_fraction(),
            top.share,
            top.company.name,
            MONOPOLY_THRESHOLD,
            if monopoly_flag(top.share, MONOPOLY_THRESHOLD) { "yes" } else { "no" },
        );
        md.push_str(&hhi_table_markdown(&s1.shortlist[cat]));
    }

    md.push_str("\n## Stage 2: proximity scoring\n\n");
    let _ = writeln!(
        md,
        "Target ({:.4}, {:.4}); reference distance {} km; top {} per category.\n",
        s2.target.latitude(),
        s2.target.longitude(),
        report.reference_distance_km,
        report.top_k
    );
    md.push_str(DISTANCE_CALIBRATION_NOTE);
    md.push('\n');
    if s2.rankings.is_empty() {
        md.push_str("\nNo rankings: the shortlist is empty.\n");
    }
    for r in &s2.rankings {
        let _ = writeln!(
            md,
            "\n### {}\n\n{} ranked, {} excluded, {} ungeocodable.\n",
            r.category,
            r.ranked.len(),
            r.excluded.len(),
            r.ungeocodable.len()
        );
        md.push_str(&score_table_markdown(&r.selected));
        if !r.excluded.is_empty() {
            let _ = writeln!(md, "\nExcluded: {}", r.excluded.join("; "));
        }
    }

    let n_warn = report.warnings().count();
    let _ = writeln!(md, "\n## Warnings\n\n{n_warn} warning(s); see `warnings.txt`.");
    let _ = writeln!(md, "\n## Content hash\n\n`sha256:{}`", report.content_hash);
    md
}

/// Every output file keyed by file name.
pub fn render_files(report: &RunReport) -> BTreeMap<String, String> {
    let mut files = data_files(report);
    files.insert("report.md".into(), markdown(report));
    files
}

/// Writes all report files into `dir`, creating it if needed.
pub fn emit_run_report(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    std::fs::create_dir_all(dir)
        .map_err(|source| PipelineError::Io { path: dir.to_path_buf(), source })?;
    let mut written = Vec::new();
    for (name, body) in render_files(report) {
        let path = dir.join(name);
        std::fs::write(&path, body)
            .map_err(|source| PipelineError::Io { path: path.clone(), source })?;
        written.push(path);
    }
    Ok(written)
}
