//! Score and rank a hand-built candidate list, with and without an exclusion.
//!
//! ```sh
//! cargo run --example score_candidates
//! ```

use fdi_screen::crosswalk::SicPrimary;
use fdi_screen::geo::{haversine_distance, EarthModel, GeoPoint};
use fdi_screen::scoring::{
    rank_and_select, score_candidates, score_table_markdown, CandidateInput,
};
use fdi_screen::{GlobalCompany, ScoringConfig};

fn candidate(
    name: &str,
    value: f64,
    share: f64,
    at: (f64, f64),
    target: GeoPoint,
) -> CandidateInput {
    let point = GeoPoint::new(at.0, at.1).expect("valid coordinates");
    CandidateInput {
        company: GlobalCompany {
            name: name.into(),
            registered_city: String::new(),
            country_code: "US".into(),
            sic_primary: SicPrimary::new(60).expect("valid code"),
            market_value: value,
            net_revenue: 0.0,
            operational: true,
        },
        share,
        hhi_points: (100.0 * share).powi(2),
        distance_km: haversine_distance(point, target, &EarthModel::default()),
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let beijing = GeoPoint::new(39.9042, 116.4074)?;
    let inputs = vec![
        candidate("Omaha Holdings", 532_605.9, 0.0638, (41.2565, -95.9345), beijing),
        candidate("Paris Luxury Group", 483_879.3, 0.0580, (48.8566, 2.3522), beijing),
        candidate("Tokyo Index Fund", 16_858.8, 0.0020, (35.6762, 139.6503), beijing),
        candidate("Seoul Securities", 90_000.0, 0.0108, (37.5665, 126.9780), beijing),
    ];

    let config = ScoringConfig::new(beijing).with_top_k(3)?;
    let ranked = rank_and_select(score_candidates(inputs.clone(), &config)?, &config);
    println!("All candidates:\n\n{}", score_table_markdown(&ranked));

    let config = config.with_exclusions(["Paris Luxury Group"]);
    let ranked = rank_and_select(score_candidates(inputs, &config)?, &config);
    println!("\nWith `Paris Luxury Group` excluded:\n\n{}", score_table_markdown(&ranked));
    Ok(())
}
