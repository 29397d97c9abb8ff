//! Mapping between two-digit US SIC primary codes and national-standard (GB/T 4754)
//! industry categories.
//!
//! The mapping is many-to-many. A handful of codes (49, 65, 73) belong to more
//! than one category in the default table, and a company carrying such a code is
//! assigned to every matching category.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use crate::ingest::{column_indices, IngestError};

/// Top-level national-standard industry category.
///
/// Variant order follows the district registry count table and is the order
/// used for every per-category report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GbCategory {
    ScientificResearch,
    InformationTechnology,
    LeasingBusiness,
    CultureSportsEntertainment,
    Manufacturing,
    WholesaleRetail,
    Building,
    WaterEnvironment,
    ElectricityHeatGasWater,
    Banking,
    Education,
    HealthSocialWork,
    TransportationPostal,
    Mining,
    ResidentialServices,
    RealEstate,
    Agriculture,
    AccommodationCatering,
}

impl GbCategory {
    pub const ALL: [GbCategory; 18] = [
        GbCategory::ScientificResearch,
        GbCategory::InformationTechnology,
        GbCategory::LeasingBusiness,
        GbCategory::CultureSportsEntertainment,
        GbCategory::Manufacturing,
        GbCategory::WholesaleRetail,
        GbCategory::Building,
        GbCategory::WaterEnvironment,
        GbCategory::ElectricityHeatGasWater,
        GbCategory::Banking,
        GbCategory::Education,
        GbCategory::HealthSocialWork,
        GbCategory::TransportationPostal,
        GbCategory::Mining,
        GbCategory::ResidentialServices,
        GbCategory::RealEstate,
        GbCategory::Agriculture,
        GbCategory::AccommodationCatering,
    ];

    /// Official category name, as printed in the national standard.
    pub fn name(self) -> &'static str {
        match self {
            GbCategory::ScientificResearch => "Scientific research and technical services",
            GbCategory::InformationTechnology => {
                "Information transmission, software and information technology services"
            }
            GbCategory::LeasingBusiness => "Leasing and business services",
            GbCategory::CultureSportsEntertainment => "Culture, sports and entertainment",
            GbCategory::Manufacturing => "Manufacturing industry",
            GbCategory::WholesaleRetail => "Wholesale and retail trade",
            GbCategory::Building => "Building industry",
            GbCategory::WaterEnvironment => "Water, environment and utilities management",
            GbCategory::ElectricityHeatGasWater => {
                "Electricity, heat, gas and water production and supply industry"
            }
            GbCategory::Banking => "Banking industry",
            GbCategory::Education => "Education",
            GbCategory::HealthSocialWork => "Health and social work",
            GbCategory::TransportationPostal => "Transportation, warehousing and postal services",
            GbCategory::Mining => "Mining industry",
            GbCategory::ResidentialServices => "Residential services, repairs and other services",
            GbCategory::RealEstate => "Real estate industry",
            GbCategory::Agriculture => "Agriculture, forestry, animal husbandry and fishery",
            GbCategory::AccommodationCatering => "Accommodation and catering",
        }
    }

    /// Filesystem-safe identifier used for per-category output files.
    pub fn slug(self) -> String {
        let mut out = String::new();
        for word in self.name().split(|c: char| !c.is_ascii_alphanumeric()) {
            if word.is_empty() {
                continue;
            }
            if !out.is_empty() {
                out.push('_');
            }
            out.push_str(&word.to_ascii_lowercase());
        }
        out
    }
}

impl fmt::Display for GbCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown category `{0}`")]
pub struct UnknownCategory(pub String);

impl FromStr for GbCategory {
    type Err = UnknownCategory;

    /// Exact match on the official name after trimming surrounding whitespace.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        GbCategory::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| UnknownCategory(s.to_string()))
    }
}

/// Two-digit US SIC primary code, 01 through 99.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SicPrimary(u8);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SicError {
    #[error("SIC primary code `{0}` is not an integer")]
    NotInteger(String),
    #[error("SIC primary code {0} outside 1..=99")]
    OutOfRange(i64),
}

impl SicPrimary {
    pub fn new(code: i64) -> Result<Self, SicError> {
        if (1..=99).contains(&code) {
            Ok(SicPrimary(code as u8))
        } else {
            Err(SicError::OutOfRange(code))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl FromStr for SicPrimary {
    type Err = SicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let code: i64 = s.parse().map_err(|_| SicError::NotInteger(s.to_string()))?;
        SicPrimary::new(code)
    }
}

impl fmt::Display for SicPrimary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}", self.0)
    }
}

const DEFAULT_TABLE: &str = include_str!("../data/crosswalk_default.csv");

/// Set of (SIC code, category) pairs.
///
/// Codes are held as raw integers so that a hand-edited table with an
/// out-of-range code still loads and can be reported by [`validate_crosswalk`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrosswalkTable {
    entries: Vec<(i64, GbCategory)>,
}

impl CrosswalkTable {
    pub fn from_entries(entries: Vec<(i64, GbCategory)>) -> Self {
        CrosswalkTable { entries }
    }

    /// The bundled table.
    pub fn default_table() -> Self {
        Self::from_csv(DEFAULT_TABLE.as_bytes()).expect("bundled crosswalk table is valid")
    }

    /// Reads a `sic_code,gb_category` CSV. Unknown category names and
    /// non-integer codes are fatal; range problems are left to validation.
    pub fn from_csv<R: Read>(source: R) -> Result<Self, IngestError> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
        let cols = column_indices(reader.headers()?, &["sic_code", "gb_category"])?;
        let mut entries = Vec::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let raw_code = &record[cols[0]];
            let code: i64 = raw_code.parse().map_err(|_| IngestError::InvalidRow {
                line,
                message: format!("sic_code `{raw_code}` is not an integer"),
            })?;
            let category: GbCategory = record[cols[1]].parse().map_err(|e: UnknownCategory| {
                IngestError::InvalidRow { line, message: e.to_string() }
            })?;
            entries.push((code, category));
        }
        Ok(CrosswalkTable { entries })
    }

    pub fn entries(&self) -> &[(i64, GbCategory)] {
        &self.entries
    }

    /// Distinct valid pairs in (code, category) order.
    pub fn pairs(&self) -> BTreeSet<(SicPrimary, GbCategory)> {
        self.entries
            .iter()
            .filter_map(|&(code, cat)| SicPrimary::new(code).ok().map(|s| (s, cat)))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["sic_code", "gb_category"]).expect("in-memory write");
        for (code, cat) in &self.entries {
            w.write_record([format!("{code:02}"), cat.name().to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

impl Default for CrosswalkTable {
    fn default() -> Self {
        Self::default_table()
    }
}

/// All categories mapped from `code`. Empty means unmapped.
pub fn sic_to_gb(table: &CrosswalkTable, code: SicPrimary) -> BTreeSet<GbCategory> {
    table.entries.iter().filter(|(c, _)| *c == i64::from(code.get())).map(|&(_, cat)| cat).collect()
}

pub fn gb_to_sic(table: &CrosswalkTable, category: GbCategory) -> BTreeSet<SicPrimary> {
    table
        .entries
        .iter()
        .filter(|(_, cat)| *cat == category)
        .filter_map(|&(c, _)| SicPrimary::new(c).ok())
        .collect()
}

/// Categories for a company's primary SIC code; empty when the company is unclassified.
pub fn classify_global_company(
    table: &CrosswalkTable,
    company: &crate::ingest::GlobalCompany,
) -> BTreeSet<GbCategory> {
    sic_to_gb(table, company.sic_primary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Info,
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

/// Reports duplicate pairs, codes outside 1..=99, categories with no codes, and
/// (informationally) codes mapped to several categories.
pub fn validate_crosswalk(table: &CrosswalkTable) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut seen = BTreeSet::new();
    for &(code, cat) in &table.entries {
        if !(1..=99).contains(&code) {
            out.push(Diagnostic {
                severity: Severity::Error,
                message: format!("code {code} outside 1..=99 (category `{cat}`)"),
            });
        }
        if !seen.insert((code, cat)) {
            out.push(Diagnostic {
                severity: Severity::Warning,
                message: format!("duplicate pair ({code:02}, `{cat}`)"),
            });
        }
    }

    for cat in GbCategory::ALL {
        if !seen.iter().any(|&(_, c)| c == cat) {
            out.push(Diagnostic {
                severity: Severity::Warning,
                message: format!("zero codes for category `{cat}`"),
            });
        }
    }

    let mut by_code: BTreeMap<i64, BTreeSet<GbCategory>> = BTreeMap::new();
    for &(code, cat) in &seen {
        by_code.entry(code).or_default().insert(cat);
    }
    for (code, cats) in by_code.iter().filter(|(_, c)| c.len() > 1) {
        let names: Vec<&str> = cats.iter().map(|c| c.name()).collect();
        out.push(Diagnostic {
            severity: Severity::Info,
            message: format!("code {code:02} is multi-mapped to: {}", names.join("; ")),
        });
    }

    out
}
