//! Build the category co-classification graph and write it as GEXF.
//!
//! ```sh
//! cargo run --example cooperation_graph [OUT.gexf]
//! ```

use std::fs::File;
use std::path::PathBuf;

use fdi_screen::crosswalk::{classify_global_company, CrosswalkTable};
use fdi_screen::ingest::parse_global_dataset;
use fdi_screen::network::{build_cooperation_graph, export_gexf, graph_stats};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden/global.csv");
    let companies = parse_global_dataset(File::open(data)?)?.records;
    let table = CrosswalkTable::default_table();
    let assignments: Vec<_> =
        companies.iter().map(|c| classify_global_company(&table, c)).collect();

    let graph = build_cooperation_graph(&assignments);
    for (category, stats) in graph_stats(&graph) {
        println!(
            "{category}: {} records, degree {}, weighted degree {}",
            graph.nodes()[&category],
            stats.degree,
            stats.weighted_degree
        );
    }

    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("industry_graph.gexf"));
    let bytes = export_gexf(&graph, File::create(&out)?)?;
    println!("\nwrote {bytes} bytes to {}", out.display());
    Ok(())
}
