//! Run both screening stages on the bundled sample and print the shortlist.
//!
//! ```sh
//! cargo run --example full_pipeline [RUN.conf] [OUT_DIR]
//! ```

use std::path::PathBuf;

use fdi_screen::pipeline::{emit_run_report, run, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let config_path = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden/run.conf")
    });
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("fdi-screen-report"));

    let config = RunConfig::load(&config_path)?;
    let report = run(&config)?;

    let s1 = &report.stage1;
    println!(
        "filters: local {} -> {}, global {} -> {} -> {}",
        s1.local_filter.input_count,
        s1.local_filter.output_count,
        s1.global_filter.input_count,
        s1.global_filter.output_count,
        s1.domestic_filter.output_count
    );
    for (category, market) in &s1.markets {
        println!("{category}: HHI {:.2} over {} companies", market.hhi_total(), market.len());
    }
    for ranking in &report.stage2.rankings {
        println!("\n{}", ranking.category);
        for (i, c) in ranking.selected.iter().enumerate() {
            println!(
                "  {}. {} (total {:.2} = HHI {:.2} + distance {:.2})",
                i + 1,
                c.company.name,
                c.total_decile,
                c.hhi_decile,
                c.distance_decile
            );
        }
    }
    for w in report.warnings() {
        println!("warning: {w}");
    }

    let written = emit_run_report(&report, &out)?;
    println!("\n{} files in {}; sha256:{}", written.len(), out.display(), report.content_hash);
    Ok(())
}
