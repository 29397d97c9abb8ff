//! Generators, independent oracles and property checks shared by the
//! property suite and the acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use fdi_screen::concentration::IndustryMarket;
use fdi_screen::crosswalk::{gb_to_sic, sic_to_gb, CrosswalkTable, GbCategory, SicPrimary};
use fdi_screen::geo::{haversine_distance, EarthModel, GeoPoint};
use fdi_screen::ingest::{
    exclude_domestic, filter_global, parse_global_dataset, write_global_csv, GlobalCompany,
};
use fdi_screen::network::{build_cooperation_graph, gexf_string, graph_stats, parse_gexf};
use fdi_screen::scoring::{rank, score_candidates, CandidateInput, ScoringConfig};
use fdi_screen::Fraction;

// --- generators -------------------------------------------------------------

const CITIES: [(&str, &str); 6] = [
    ("Paris", "FR"),
    ("Beijing", "CN"),
    ("Seattle", "US"),
    ("London", "GB"),
    ("Tokyo", "JP"),
    ("Busan", "KR"),
];

pub fn company() -> impl Strategy<Value = GlobalCompany> {
    (
        "[A-Z][a-z]{1,8}( [A-Z][a-z]{1,6})?",
        0..CITIES.len(),
        1i64..=99,
        0.0f64..1e6,
        0.0f64..1e5,
        any::<bool>(),
    )
        .prop_map(|(name, city, sic, market_value, net_revenue, operational)| GlobalCompany {
            name,
            registered_city: CITIES[city].0.into(),
            country_code: CITIES[city].1.into(),
            sic_primary: SicPrimary::new(sic).unwrap(),
            market_value,
            net_revenue,
            operational,
        })
}

/// Companies with revenues drawn from a small set so ties are common.
pub fn companies_with_tied_revenue() -> impl Strategy<Value = Vec<GlobalCompany>> {
    prop::collection::vec((company(), 0u8..6), 0..40).prop_map(|v| {
        v.into_iter()
            .map(|(mut c, r)| {
                c.net_revenue = f64::from(r) * 100.0;
                c
            })
            .collect()
    })
}

/// Quartiles as exact ratios so the oracle can use integer arithmetic.
pub const RATIOS: [(usize, usize); 6] = [(1, 10), (1, 4), (1, 3), (1, 2), (3, 4), (1, 1)];

pub fn point() -> impl Strategy<Value = GeoPoint> {
    (-90.0f64..=90.0, -180.0f64..=180.0).prop_map(|(lat, lon)| GeoPoint::new(lat, lon).unwrap())
}

pub fn category() -> impl Strategy<Value = GbCategory> {
    prop::sample::select(GbCategory::ALL.to_vec())
}

pub fn category_sets() -> impl Strategy<Value = Vec<BTreeSet<GbCategory>>> {
    prop::collection::vec(prop::collection::btree_set(category(), 0..5), 0..30)
}

pub fn positive_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.001f64..1e6, 1..50)
}

pub fn candidates() -> impl Strategy<Value = Vec<CandidateInput>> {
    prop::collection::vec((0.0f64..1.0, 0.0f64..25_000.0), 1..20).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (share, distance_km))| CandidateInput {
                company: GlobalCompany {
                    name: format!("Candidate {i:02}"),
                    registered_city: "Paris".into(),
                    country_code: "FR".into(),
                    sic_primary: SicPrimary::new(60).unwrap(),
                    market_value: share * 1000.0,
                    net_revenue: 1.0,
                    operational: true,
                },
                share,
                hhi_points: (100.0 * share).powi(2) + 1e-6,
                distance_km,
            })
            .collect()
    })
}

pub fn crosswalk_entries() -> impl Strategy<Value = Vec<(i64, GbCategory)>> {
    prop::collection::vec((1i64..=99, category()), 0..60)
}

// --- oracles ----------------------------------------------------------------

/// HHI points as `10000 * Σv² / (Σv)²`.
pub fn hhi_oracle(values: &[f64]) -> f64 {
    let total: f64 = values.iter().sum();
    let squares: f64 = values.iter().map(|v| v * v).sum();
    10_000.0 * squares / (total * total)
}

/// Central angle from 3-D unit vectors, `atan2(|a×b|, a·b)`; well conditioned
/// at every separation.
pub fn distance_oracle(a: GeoPoint, b: GeoPoint, radius_km: f64) -> f64 {
    let v = |p: GeoPoint| {
        let (lat, lon) = (p.latitude().to_radians(), p.longitude().to_radians());
        [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()]
    };
    let (x, y) = (v(a), v(b));
    let cross = [x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]];
    let sin = (cross[0].powi(2) + cross[1].powi(2) + cross[2].powi(2)).sqrt();
    let cos = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    radius_km * sin.atan2(cos)
}

/// Spherical law of cosines; only trustworthy away from tiny separations.
pub fn law_of_cosines(a: GeoPoint, b: GeoPoint, radius_km: f64) -> f64 {
    let (p1, p2) = (a.latitude().to_radians(), b.latitude().to_radians());
    let dl = (b.longitude() - a.longitude()).to_radians();
    radius_km * (p1.sin() * p2.sin() + p1.cos() * p2.cos() * dl.cos()).clamp(-1.0, 1.0).acos()
}

/// Names kept by the revenue filter: operational, and fewer than
/// `ceil(num/den * n)` operational companies earn strictly more.
pub fn revenue_filter_oracle(records: &[GlobalCompany], (num, den): (usize, usize)) -> Vec<usize> {
    let operational: Vec<f64> =
        records.iter().filter(|r| r.operational).map(|r| r.net_revenue).collect();
    let k = (operational.len() * num).div_ceil(den);
    records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.operational)
        .filter(|(_, r)| operational.iter().filter(|&&o| o > r.net_revenue).count() < k)
        .map(|(i, _)| i)
        .collect()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

fn target() -> ScoringConfig {
    ScoringConfig::new(GeoPoint::new(39.9042, 116.4074).unwrap())
}

// --- checks -----------------------------------------------------------------

pub fn check_ingest_roundtrip(records: &[GlobalCompany]) -> Result<(), TestCaseError> {
    let text = write_global_csv(records);
    let a = parse_global_dataset(text.as_bytes()).unwrap();
    let b = parse_global_dataset(text.as_bytes()).unwrap();
    prop_assert_eq!(&a, &b);
    prop_assert!(a.errors.is_empty());
    prop_assert_eq!(&a.records[..], records);
    Ok(())
}

pub fn check_filter_accounting(
    records: &[GlobalCompany],
    ratio: (usize, usize),
) -> Result<(), TestCaseError> {
    let q = Fraction::new(ratio.0 as f64 / ratio.1 as f64).unwrap();
    let (kept, report) = filter_global(records, q);
    prop_assert!(report.is_balanced());
    prop_assert_eq!(report.input_count, records.len());
    let rejected: BTreeSet<usize> = report.rejected.iter().map(|r| r.index).collect();
    let kept_idx: Vec<usize> = (0..records.len()).filter(|i| !rejected.contains(i)).collect();
    prop_assert_eq!(kept_idx.len(), kept.len());
    for (i, k) in kept_idx.iter().zip(&kept) {
        prop_assert_eq!(&records[*i], k);
    }

    let (foreign, dom) = exclude_domestic(&kept, "CN");
    prop_assert!(dom.is_balanced());
    let (again, dom2) = exclude_domestic(&foreign, "CN");
    prop_assert_eq!(&again, &foreign);
    prop_assert!(dom2.rejected.is_empty());

    let all = Fraction::new(1.0).unwrap();
    let (once, _) = filter_global(records, all);
    let (twice, _) = filter_global(&once, all);
    prop_assert_eq!(once, twice);
    Ok(())
}

pub fn check_revenue_cutoff(
    records: &[GlobalCompany],
    ratio: (usize, usize),
) -> Result<(), TestCaseError> {
    let q = Fraction::new(ratio.0 as f64 / ratio.1 as f64).unwrap();
    let (_, report) = filter_global(records, q);
    let rejected: BTreeSet<usize> = report.rejected.iter().map(|r| r.index).collect();
    let kept: Vec<usize> = (0..records.len()).filter(|i| !rejected.contains(i)).collect();
    prop_assert_eq!(kept, revenue_filter_oracle(records, ratio));
    Ok(())
}

fn market(values: &[f64]) -> IndustryMarket {
    let companies: Vec<GlobalCompany> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| GlobalCompany {
            name: format!("Firm {i:03}"),
            registered_city: "Paris".into(),
            country_code: "FR".into(),
            sic_primary: SicPrimary::new(60).unwrap(),
            market_value: v,
            net_revenue: v,
            operational: true,
        })
        .collect();
    IndustryMarket::build(GbCategory::Banking, &companies).unwrap()
}

pub fn check_hhi(values: &[f64], shuffled: &[f64], scale: f64) -> Result<(), TestCaseError> {
    let m = market(values);
    let h = m.hhi_total();
    prop_assert!(close(h, hhi_oracle(values), 1e-9), "{} vs {}", h, hhi_oracle(values));
    prop_assert!(h > 0.0 && h <= 10_000.0 * (1.0 + 1e-12));
    let share_sum: f64 = m.entries().iter().map(|e| e.share).sum();
    prop_assert!(close(share_sum, 1.0, 1e-9));
    prop_assert!(close(market(shuffled).hhi_total(), h, 1e-9));
    let scaled: Vec<f64> = values.iter().map(|v| v * scale).collect();
    prop_assert!(close(market(&scaled).hhi_total(), h, 1e-9));
    let equal = vec![7.0; values.len()];
    prop_assert!(close(market(&equal).hhi_total(), 10_000.0 / values.len() as f64, 1e-9));
    Ok(())
}

pub fn check_haversine(a: GeoPoint, b: GeoPoint) -> Result<(), TestCaseError> {
    let earth = EarthModel::default();
    let r = earth.radius_km();
    let ab = haversine_distance(a, b, &earth);
    prop_assert_eq!(ab, haversine_distance(b, a, &earth));
    prop_assert!(ab >= 0.0 && ab <= std::f64::consts::PI * r + 1e-9);
    prop_assert_eq!(haversine_distance(a, a, &earth), 0.0);
    let oracle = distance_oracle(a, b, r);
    prop_assert!((ab - oracle).abs() <= 1e-6 * oracle.max(1.0), "{} vs {}", ab, oracle);
    // the cosine form loses ~1e-8 rad of precision near zero separation
    prop_assert!((ab - law_of_cosines(a, b, r)).abs() < 1e-3);
    Ok(())
}

pub fn check_ranking(
    inputs: Vec<CandidateInput>,
    shuffled: Vec<CandidateInput>,
    pick: usize,
) -> Result<(), TestCaseError> {
    let cfg = target();
    let ranked = rank(score_candidates(inputs.clone(), &cfg).unwrap(), &cfg);
    let reranked = rank(score_candidates(shuffled, &cfg).unwrap(), &cfg);
    prop_assert_eq!(&ranked, &reranked);
    for w in ranked.windows(2) {
        prop_assert!(w[0].total_decile >= w[1].total_decile);
    }
    for c in &ranked {
        prop_assert!((0.0..=10.0).contains(&c.hhi_decile));
        prop_assert!((0.0..=10.0).contains(&c.distance_decile));
    }

    // improving one candidate on both indicators never lowers its position
    let pick = pick % inputs.len();
    let name = inputs[pick].company.name.clone();
    let position = |list: &[fdi_screen::ScoredCandidate]| {
        list.iter().position(|c| c.company.name == name).unwrap()
    };
    let mut better = inputs;
    better[pick].hhi_points *= 1.5;
    better[pick].distance_km *= 0.5;
    let improved = rank(score_candidates(better, &cfg).unwrap(), &cfg);
    prop_assert!(position(&improved) <= position(&ranked));
    Ok(())
}

pub fn check_graph(
    sets: &[BTreeSet<GbCategory>],
    shuffled: &[BTreeSet<GbCategory>],
) -> Result<(), TestCaseError> {
    let g = build_cooperation_graph(sets);
    let weighted: u64 = graph_stats(&g).values().map(|s| s.weighted_degree).sum();
    let weights: u64 = g.edges().values().sum();
    prop_assert_eq!(weighted, 2 * weights);
    let pairs: u64 = sets.iter().map(|s| (s.len() * s.len().saturating_sub(1) / 2) as u64).sum();
    prop_assert_eq!(weights, pairs);
    prop_assert_eq!(&build_cooperation_graph(shuffled), &g);
    let text = gexf_string(&g);
    prop_assert_eq!(&parse_gexf(&text).unwrap(), &g);
    prop_assert_eq!(gexf_string(&parse_gexf(&text).unwrap()), text);
    Ok(())
}

pub fn check_crosswalk_inverse(entries: Vec<(i64, GbCategory)>) -> Result<(), TestCaseError> {
    let table = CrosswalkTable::from_entries(entries.clone());
    for code in 1..=99 {
        let sic = SicPrimary::new(code).unwrap();
        for cat in GbCategory::ALL {
            let forward = sic_to_gb(&table, sic).contains(&cat);
            let backward = gb_to_sic(&table, cat).contains(&sic);
            prop_assert_eq!(forward, backward);
            prop_assert_eq!(forward, entries.contains(&(code, cat)));
        }
    }
    Ok(())
}

// --- composite strategies used by both suites --------------------------------

pub fn with_shuffle<T: Clone + std::fmt::Debug>(
    s: impl Strategy<Value = Vec<T>>,
) -> impl Strategy<Value = (Vec<T>, Vec<T>)> {
    s.prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle()))
}

pub fn ratio() -> impl Strategy<Value = (usize, usize)> {
    prop::sample::select(RATIOS.to_vec())
}

/// Multiplying every market value (and so every HHI input) by `scale` leaves
/// shares, HHI, deciles and ranking unchanged.
pub fn check_scale_invariance(values: &[f64], scale: f64) -> Result<(), TestCaseError> {
    let scaled: Vec<f64> = values.iter().map(|v| v * scale).collect();
    let (a, b) = (market(values), market(&scaled));
    for (x, y) in a.entries().iter().zip(b.entries()) {
        prop_assert!(close(x.share, y.share, 1e-9));
    }
    prop_assert!(close(a.hhi_total(), b.hhi_total(), 1e-9));

    let cfg = target();
    let inputs = |factor: f64| -> Vec<CandidateInput> {
        a.entries()
            .iter()
            .enumerate()
            .map(|(i, e)| CandidateInput {
                company: e.company.clone(),
                share: e.share,
                hhi_points: e.hhi_points * factor,
                distance_km: (i as f64 * 1_237.0) % 21_000.0,
            })
            .collect()
    };
    let ra = rank(score_candidates(inputs(1.0), &cfg).unwrap(), &cfg);
    let rb = rank(score_candidates(inputs(scale), &cfg).unwrap(), &cfg);
    for (x, y) in ra.iter().zip(&rb) {
        prop_assert_eq!(&x.company.name, &y.company.name);
        prop_assert!(close(x.hhi_decile, y.hhi_decile, 1e-9));
    }
    Ok(())
}
