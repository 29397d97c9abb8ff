//! Parse the sample registry and world dataset, then apply the selection filters.
//!
//! ```sh
//! cargo run --example ingest_filters [LOCAL.csv GLOBAL.csv]
//! ```

use std::fs::File;
use std::path::PathBuf;

use fdi_screen::ingest::{
    exclude_domestic, filter_global, filter_local, parse_global_dataset, parse_local_registry,
};
use fdi_screen::Fraction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden");
    let mut args = std::env::args().skip(1);
    let local_path = args.next().map(PathBuf::from).unwrap_or(fixtures.join("local.csv"));
    let global_path = args.next().map(PathBuf::from).unwrap_or(fixtures.join("global.csv"));

    let local = parse_local_registry(File::open(&local_path)?)?;
    let global = parse_global_dataset(File::open(&global_path)?)?;
    for e in local.errors.iter().chain(&global.errors) {
        println!("skipped row: {e}");
    }

    let (kept_local, local_report) = filter_local(&local.records, 2022);
    println!("local registry: {} of {} kept", kept_local.len(), local_report.input_count);

    let (top, revenue_report) = filter_global(&global.records, Fraction::new(0.25)?);
    let (foreign, domestic_report) = exclude_domestic(&top, "CN");
    println!(
        "global dataset: {} operational in top quartile, {} after removing domestic",
        revenue_report.output_count, domestic_report.output_count
    );
    for r in revenue_report.rejected.iter().take(5) {
        println!("  rejected #{} {}: {}", r.index, r.name, r.reason);
    }
    for c in &foreign {
        println!("  {} ({}, SIC {})", c.name, c.city_key(), c.sic_primary);
    }
    Ok(())
}
