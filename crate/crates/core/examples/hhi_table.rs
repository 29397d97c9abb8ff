//! Market shares and HHI for one category of a world dataset.
//!
//! ```sh
//! cargo run --example hhi_table [GLOBAL.csv]
//! ```

use std::fs::File;
use std::path::PathBuf;

use fdi_screen::concentration::{
    hhi_table_markdown, monopoly_flag, top_decile_by_hhi, MONOPOLY_THRESHOLD,
};
use fdi_screen::crosswalk::{classify_global_company, CrosswalkTable, GbCategory};
use fdi_screen::ingest::parse_global_dataset;
use fdi_screen::{Fraction, IndustryMarket};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("tests/fixtures/reference/finance_global.csv")
    });
    let companies = parse_global_dataset(File::open(path)?)?.records;
    let table = CrosswalkTable::default_table();

    let category = GbCategory::Banking;
    let members =
        companies.iter().filter(|c| classify_global_company(&table, c).contains(&category));
    let market = IndustryMarket::build(category, members)?;

    let leader = &market.entries()[0];
    println!(
        "{category}: {} companies, HHI {:.2} points; leader {} with share {:.4} (monopoly: {})\n",
        market.len(),
        market.hhi_total(),
        leader.company.name,
        leader.share,
        monopoly_flag(leader.share, MONOPOLY_THRESHOLD)
    );
    print!("{}", hhi_table_markdown(&top_decile_by_hhi(&market, Fraction::new(0.1)?)));
    Ok(())
}
