//! Market shares and Herfindahl-Hirschman concentration per industry category.
//!
//! HHI is reported in points: shares are expressed as percentages before
//! squaring, so a single-firm market scores 10000 and `n` equal firms score
//! `10000 / n`. The fractional form (0–1) is available as
//! [`IndustryMarket::hhi_fraction`].

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::crosswalk::GbCategory;
use crate::ingest::{GlobalCompany, LocalEnterprise};
use crate::Fraction;

/// Default share at or above which a company is flagged as a monopolist.
pub const MONOPOLY_THRESHOLD: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConcentrationError {
    #[error("empty market")]
    EmptyMarket,
    #[error("company value {value} outside [0, {total}]")]
    ValueOutOfRange { value: f64, total: f64 },
}

/// `company_value / industry_total`.
pub fn market_share(company_value: f64, industry_total: f64) -> Result<f64, ConcentrationError> {
    if industry_total.is_nan() || industry_total <= 0.0 {
        return Err(ConcentrationError::EmptyMarket);
    }
    if company_value < 0.0 || company_value > industry_total {
        return Err(ConcentrationError::ValueOutOfRange {
            value: company_value,
            total: industry_total,
        });
    }
    Ok(company_value / industry_total)
}

/// HHI points contributed by one share: `(100 * share)^2`.
pub fn hhi_contribution(share: f64) -> f64 {
    let pct = 100.0 * share;
    pct * pct
}

pub fn monopoly_flag(share: f64, threshold: f64) -> bool {
    share >= threshold
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShareEntry {
    pub company: GlobalCompany,
    pub share: f64,
    pub hhi_points: f64,
}

/// Every company assigned to one category, sorted by share descending
/// (ties by name).
#[derive(Debug, Clone, PartialEq)]
pub struct IndustryMarket {
    category: GbCategory,
    total_market_value: f64,
    entries: Vec<ShareEntry>,
    hhi_total: f64,
}

impl IndustryMarket {
    /// Builds the market from its member companies, using market value as size.
    pub fn build<'a, I>(category: GbCategory, companies: I) -> Result<Self, ConcentrationError>
    where
        I: IntoIterator<Item = &'a GlobalCompany>,
    {
        let companies: Vec<&GlobalCompany> = companies.into_iter().collect();
        let total: f64 = companies.iter().map(|c| c.market_value).sum();
        if total.is_nan() || total <= 0.0 {
            return Err(ConcentrationError::EmptyMarket);
        }
        let mut entries = companies
            .into_iter()
            .map(|c| {
                let share = market_share(c.market_value, total)?;
                Ok(ShareEntry { company: c.clone(), share, hhi_points: hhi_contribution(share) })
            })
            .collect::<Result<Vec<_>, ConcentrationError>>()?;
        entries.sort_by(|a, b| {
            b.share
                .total_cmp(&a.share)
                .then_with(|| a.company.name.cmp(&b.company.name))
                .then_with(|| a.company.registered_city.cmp(&b.company.registered_city))
        });
        let hhi_total = entries.iter().map(|e| e.hhi_points).sum();
        Ok(IndustryMarket { category, total_market_value: total, entries, hhi_total })
    }

    pub fn category(&self) -> GbCategory {
        self.category
    }

    pub fn total_market_value(&self) -> f64 {
        self.total_market_value
    }

    pub fn entries(&self) -> &[ShareEntry] {
        &self.entries
    }

    pub fn hhi_total(&self) -> f64 {
        self.hhi_total
    }

    pub fn hhi_fraction(&self) -> f64 {
        self.hhi_total / 10_000.0
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Total HHI of the market in points, in `(0, 10000]`.
pub fn industry_hhi(market: &IndustryMarket) -> Result<f64, ConcentrationError> {
    if market.entries.is_empty() {
        return Err(ConcentrationError::EmptyMarket);
    }
    Ok(market.hhi_total)
}

/// The `ceil(fraction * n)` entries with the most HHI points, plus any entry
/// tied with the last of them.
pub fn top_decile_by_hhi(market: &IndustryMarket, fraction: Fraction) -> Vec<ShareEntry> {
    let k = fraction.count_of(market.entries.len());
    if k == 0 {
        return Vec::new();
    }
    // entries are already sorted by share, hence by hhi_points
    let cutoff = market.entries[k - 1].hhi_points;
    market.entries.iter().filter(|e| e.hhi_points >= cutoff).cloned().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryStats {
    pub category: GbCategory,
    pub enterprise_count: u64,
    /// Summed registered capital; local registry only.
    pub total_registered_capital: Option<f64>,
}

/// Counts per category over records carrying a set of categories. A record in
/// several categories increments each of them. One row per category, in
/// [`GbCategory::ALL`] order.
pub fn category_counts<'a, I>(assignments: I) -> Vec<CategoryStats>
where
    I: IntoIterator<Item = &'a BTreeSet<GbCategory>>,
{
    let mut counts = [0u64; 18];
    for set in assignments {
        for &cat in set {
            counts[cat as usize] += 1;
        }
    }
    GbCategory::ALL
        .into_iter()
        .map(|category| CategoryStats {
            category,
            enterprise_count: counts[category as usize],
            total_registered_capital: None,
        })
        .collect()
}

/// Counts and summed registered capital for the district registry.
pub fn local_category_stats(records: &[LocalEnterprise]) -> Vec<CategoryStats> {
    let mut counts = [0u64; 18];
    let mut capital = [0.0f64; 18];
    for r in records {
        counts[r.gb_category as usize] += 1;
        capital[r.gb_category as usize] += r.registered_capital;
    }
    GbCategory::ALL
        .into_iter()
        .map(|category| CategoryStats {
            category,
            enterprise_count: counts[category as usize],
            total_registered_capital: Some(capital[category as usize]),
        })
        .collect()
}

pub fn category_stats_csv(stats: &[CategoryStats]) -> String {
    let with_capital = stats.iter().any(|s| s.total_registered_capital.is_some());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["gb_category", "enterprise_count"];
    if with_capital {
        header.push("total_registered_capital");
    }
    w.write_record(&header).expect("in-memory write");
    for s in stats {
        let mut row = vec![s.category.name().to_string(), s.enterprise_count.to_string()];
        if with_capital {
            row.push(format!("{:.2}", s.total_registered_capital.unwrap_or(0.0)));
        }
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

/// Share/HHI table with columns `company_name, market_value, share, hhi_points`.
pub fn hhi_table_csv(entries: &[ShareEntry]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["company_name", "market_value", "share", "hhi_points"])
        .expect("in-memory write");
    for e in entries {
        w.write_record([
            e.company.name.clone(),
            format!("{:.4}", e.company.market_value),
            format!("{:.6}", e.share),
            format!("{:.6}", e.hhi_points),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

pub fn hhi_table_markdown(entries: &[ShareEntry]) -> String {
    let mut out = String::from(
        "| company_name | market_value | share | hhi_points |\n|---|---:|---:|---:|\n",
    );
    for e in entries {
        let _ = writeln!(
            out,
            "| {} | {:.4} | {:.6} | {:.6} |",
            e.company.name.replace('|', "\\|"),
            e.company.market_value,
            e.share,
            e.hhi_points
        );
    }
    out
}
