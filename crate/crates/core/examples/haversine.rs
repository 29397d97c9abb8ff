//! Great-circle distances between gazetteer cities.
//!
//! ```sh
//! cargo run --example haversine [FROM_KEY TO_KEY]   # keys like Paris,FR
//! ```

use std::fs::File;
use std::path::PathBuf;

use fdi_screen::geo::{geocode_city, haversine_distance, EarthModel};
use fdi_screen::ingest::load_gazetteer;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden/cities.csv");
    let gazetteer = load_gazetteer(File::open(path)?)?;
    let earth = EarthModel::default();

    let args: Vec<String> = std::env::args().skip(1).collect();
    let from = args.first().map_or("Beijing,CN", String::as_str);
    let origin = geocode_city(&gazetteer, from)?;

    if let Some(to) = args.get(1) {
        let d = haversine_distance(origin, geocode_city(&gazetteer, to)?, &earth);
        println!("{from} -> {to}: {d:.2} km");
        return Ok(());
    }
    let mut rows: Vec<(f64, String)> = gazetteer
        .iter()
        .map(|c| (haversine_distance(origin, c.point, &earth), c.city.clone()))
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (d, city) in rows {
        println!("{from} -> {city}: {d:>9.2} km");
    }
    Ok(())
}
