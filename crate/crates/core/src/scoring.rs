//! Decile scoring and top-K selection.
//!
//! Both indicators are mapped onto `[0, 10]`:
//!
//! * HHI decile: `10 * h / h_max` over the candidates of one category, so the
//!   most concentrated-share company scores exactly 10.
//! * Distance decile: `10 * (1 - d / d_ref)`, clamped to `[0, 10]`.
//!
//! The total is their unweighted sum. Candidates are ranked by total, then by
//! HHI points (higher first), distance (shorter first) and name.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::geo::GeoPoint;
use crate::ingest::GlobalCompany;

pub const DEFAULT_REFERENCE_DISTANCE_KM: f64 = 20_000.0;
pub const DEFAULT_TOP_K: usize = 5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScoringError {
    #[error("degenerate score set: no candidate has positive HHI")]
    DegenerateScoreSet,
    #[error("reference distance must be positive, got {0}")]
    ReferenceDistance(f64),
    #[error("top_k must be at least 1")]
    TopK,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoringConfig {
    reference_distance_km: f64,
    top_k: usize,
    pub exclusions: BTreeSet<String>,
    pub target_point: GeoPoint,
}

impl ScoringConfig {
    /// Defaults: 20000 km reference, top 5, no exclusions.
    pub fn new(target_point: GeoPoint) -> Self {
        ScoringConfig {
            reference_distance_km: DEFAULT_REFERENCE_DISTANCE_KM,
            top_k: DEFAULT_TOP_K,
            exclusions: BTreeSet::new(),
            target_point,
        }
    }

    pub fn with_reference_distance(mut self, km: f64) -> Result<Self, ScoringError> {
        if !(km > 0.0 && km.is_finite()) {
            return Err(ScoringError::ReferenceDistance(km));
        }
        self.reference_distance_km = km;
        Ok(self)
    }

    pub fn with_top_k(mut self, top_k: usize) -> Result<Self, ScoringError> {
        if top_k == 0 {
            return Err(ScoringError::TopK);
        }
        self.top_k = top_k;
        Ok(self)
    }

    pub fn with_exclusions<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.exclusions = names.into_iter().map(Into::into).collect();
        self
    }

    pub fn reference_distance_km(&self) -> f64 {
        self.reference_distance_km
    }

    pub fn top_k(&self) -> usize {
        self.top_k
    }

    pub fn is_excluded(&self, name: &str) -> bool {
        self.exclusions.contains(name)
    }
}

/// A shortlisted company with its two raw indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateInput {
    pub company: GlobalCompany,
    pub share: f64,
    pub hhi_points: f64,
    pub distance_km: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCandidate {
    pub company: GlobalCompany,
    pub share: f64,
    pub hhi_points: f64,
    pub distance_km: f64,
    pub hhi_decile: f64,
    pub distance_decile: f64,
    pub total_decile: f64,
}

/// `10 * h / max(h)` for each value.
pub fn hhi_deciles(hhi_points: &[f64]) -> Result<Vec<f64>, ScoringError> {
    let max = hhi_points.iter().copied().fold(0.0f64, f64::max);
    if max.is_nan() || max <= 0.0 {
        return Err(ScoringError::DegenerateScoreSet);
    }
    Ok(hhi_points.iter().map(|&h| 10.0 * (h / max)).collect())
}

pub fn distance_decile(distance_km: f64, reference_distance_km: f64) -> f64 {
    (10.0 * (1.0 - distance_km / reference_distance_km)).clamp(0.0, 10.0)
}

pub fn total_score(hhi_decile: f64, distance_decile: f64) -> f64 {
    hhi_decile + distance_decile
}

/// Drops excluded names, then scores the rest. The HHI maximum is taken over
/// the remaining candidates.
pub fn score_candidates(
    inputs: Vec<CandidateInput>,
    config: &ScoringConfig,
) -> Result<Vec<ScoredCandidate>, ScoringError> {
    let inputs: Vec<CandidateInput> =
        inputs.into_iter().filter(|c| !config.is_excluded(&c.company.name)).collect();
    if inputs.is_empty() {
        return Ok(Vec::new());
    }
    let points: Vec<f64> = inputs.iter().map(|c| c.hhi_points).collect();
    let deciles = hhi_deciles(&points)?;
    Ok(inputs
        .into_iter()
        .zip(deciles)
        .map(|(c, hhi_decile)| {
            let distance_decile = distance_decile(c.distance_km, config.reference_distance_km);
            ScoredCandidate {
                company: c.company,
                share: c.share,
                hhi_points: c.hhi_points,
                distance_km: c.distance_km,
                hhi_decile,
                distance_decile,
                total_decile: total_score(hhi_decile, distance_decile),
            }
        })
        .collect())
}

/// Full ranking order.
pub fn compare_candidates(a: &ScoredCandidate, b: &ScoredCandidate) -> Ordering {
    b.total_decile
        .total_cmp(&a.total_decile)
        .then_with(|| b.hhi_points.total_cmp(&a.hhi_points))
        .then_with(|| a.distance_km.total_cmp(&b.distance_km))
        .then_with(|| a.company.name.cmp(&b.company.name))
        .then_with(|| a.company.registered_city.cmp(&b.company.registered_city))
        .then_with(|| a.company.country_code.cmp(&b.company.country_code))
        .then_with(|| a.company.market_value.total_cmp(&b.company.market_value))
}

/// Every non-excluded candidate in rank order.
pub fn rank(mut candidates: Vec<ScoredCandidate>, config: &ScoringConfig) -> Vec<ScoredCandidate> {
    candidates.retain(|c| !config.is_excluded(&c.company.name));
    candidates.sort_by(compare_candidates);
    candidates
}

/// The first `top_k` of [`rank`].
pub fn rank_and_select(
    candidates: Vec<ScoredCandidate>,
    config: &ScoringConfig,
) -> Vec<ScoredCandidate> {
    let mut ranked = rank(candidates, config);
    ranked.truncate(config.top_k);
    ranked
}

pub const SCORE_COLUMNS: [&str; 8] = [
    "company_name",
    "market_value",
    "share",
    "hhi_points",
    "distance_km",
    "hhi_decile",
    "distance_decile",
    "total_decile",
];

fn score_row(c: &ScoredCandidate) -> [String; 8] {
    [
        c.company.name.clone(),
        format!("{:.4}", c.company.market_value),
        format!("{:.6}", c.share),
        format!("{:.6}", c.hhi_points),
        format!("{:.2}", c.distance_km),
        format!("{:.2}", c.hhi_decile),
        format!("{:.2}", c.distance_decile),
        format!("{:.2}", c.total_decile),
    ]
}

pub fn score_table_csv(candidates: &[ScoredCandidate]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SCORE_COLUMNS).expect("in-memory write");
    for c in candidates {
        w.write_record(score_row(c)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

pub fn score_table_markdown(candidates: &[ScoredCandidate]) -> String {
    let mut out = format!("| {} |\n|---|{}\n", SCORE_COLUMNS.join(" | "), "---:|".repeat(7));
    for c in candidates {
        let mut row = score_row(c);
        row[0] = row[0].replace('|', "\\|");
        let _ = writeln!(out, "| {} |", row.join(" | "));
    }
    out
}
