//! Look up categories for SIC codes and codes for a category.
//!
//! ```sh
//! cargo run --example crosswalk_lookup [SIC ...]
//! ```

use fdi_screen::crosswalk::{
    gb_to_sic, sic_to_gb, validate_crosswalk, CrosswalkTable, GbCategory, SicPrimary,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = CrosswalkTable::default_table();
    let codes: Vec<i64> = {
        let args: Vec<i64> =
            std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
        if args.is_empty() {
            vec![49, 65, 73, 80, 99]
        } else {
            args
        }
    };
    for code in codes {
        let sic = SicPrimary::new(code)?;
        let cats = sic_to_gb(&table, sic);
        if cats.is_empty() {
            println!("SIC {sic}: unmapped");
        }
        for cat in cats {
            println!("SIC {sic}: {cat}");
        }
    }

    let banking: Vec<String> =
        gb_to_sic(&table, GbCategory::Banking).into_iter().map(|s| s.to_string()).collect();
    println!("\n{}: {}", GbCategory::Banking, banking.join(", "));

    println!("\ndiagnostics:");
    for d in validate_crosswalk(&table) {
        println!("  {d}");
    }
    Ok(())
}
