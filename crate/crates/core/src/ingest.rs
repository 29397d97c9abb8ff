//! CSV ingestion and the dataset selection filters.
//!
//! Parsers distinguish two failure levels. Schema problems (a missing column,
//! structurally broken CSV) are fatal and returned as [`IngestError`]. Bad
//! values inside an otherwise well-formed row are collected as [`RowError`]s
//! next to the successfully parsed records so nothing is dropped silently.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;

use crate::crosswalk::{GbCategory, SicPrimary};
use crate::geo::{CityCoordinate, Gazetteer, GeoPoint};
use crate::Fraction;

pub const LOCAL_COLUMNS: [&str; 5] =
    ["name", "credit_code", "gb_category", "registered_capital", "operational_year"];
pub const GLOBAL_COLUMNS: [&str; 7] = [
    "name",
    "registered_city",
    "country_code",
    "sic_primary",
    "market_value",
    "net_revenue",
    "operational",
];
pub const GAZETTEER_COLUMNS: [&str; 4] = ["city", "country_code", "latitude", "longitude"];

/// Length of a unified social credit code.
pub const CREDIT_CODE_LEN: usize = 18;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("missing required column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: {message}")]
    InvalidRow { line: u64, message: String },
    #[error("line {line}: duplicate city key `{key}`")]
    DuplicateCity { line: u64, key: String },
    #[error("line {line}: {field} {value} out of range")]
    CoordinateOutOfRange { line: u64, field: &'static str, value: f64 },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// A value-level problem in one data row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    /// Line number in the source (the header is line 1).
    pub line: u64,
    pub field: String,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}: {}", self.line, self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub records: Vec<T>,
    pub errors: Vec<RowError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalEnterprise {
    pub name: String,
    pub credit_code: Option<String>,
    pub gb_category: GbCategory,
    /// CNY.
    pub registered_capital: f64,
    pub operational_year: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalCompany {
    pub name: String,
    pub registered_city: String,
    /// ISO-3166 alpha-2, upper case.
    pub country_code: String,
    pub sic_primary: SicPrimary,
    /// USD millions.
    pub market_value: f64,
    /// USD millions.
    pub net_revenue: f64,
    pub operational: bool,
}

impl GlobalCompany {
    /// Gazetteer key of the registered city.
    pub fn city_key(&self) -> String {
        city_key(&self.registered_city, &self.country_code)
    }
}

/// Canonical `City,CC` key: both parts trimmed, country code upper-cased.
/// City names stay case-sensitive.
pub fn city_key(city: &str, country_code: &str) -> String {
    format!("{},{}", city.trim(), country_code.trim().to_ascii_uppercase())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    /// Position in the filter's input list.
    pub index: usize,
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FilterReport {
    pub input_count: usize,
    pub output_count: usize,
    pub rejected: Vec<Rejection>,
}

impl FilterReport {
    pub fn is_balanced(&self) -> bool {
        self.output_count + self.rejected.len() == self.input_count
    }
}

pub(crate) fn column_indices(
    headers: &csv::StringRecord,
    required: &[&str],
) -> Result<Vec<usize>, IngestError> {
    required
        .iter()
        .map(|&name| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
        })
        .collect()
}

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source)
}

fn parse_number(field: &str, raw: &str) -> Result<f64, String> {
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("{field} `{raw}` is not a number")),
    }
}

fn row_error(line: u64, field: &str, message: impl Into<String>) -> RowError {
    RowError { line, field: field.to_string(), message: message.into() }
}

fn parse_bool(raw: &str) -> Option<bool> {
    match raw.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "y" => Some(true),
        "false" | "0" | "no" | "n" => Some(false),
        _ => None,
    }
}

/// Parses the district registry.
pub fn parse_local_registry<R: Read>(source: R) -> Result<Parsed<LocalEnterprise>, IngestError> {
    let mut rdr = reader(source);
    let cols = column_indices(rdr.headers()?, &LOCAL_COLUMNS)?;
    let mut out = Parsed { records: Vec::new(), errors: Vec::new() };

    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let get = |i: usize| record.get(cols[i]).unwrap_or("");

        let row = (|| {
            let name = get(0);
            if name.is_empty() {
                return Err(row_error(line, "name", "empty name"));
            }
            let credit_code = Some(get(1)).filter(|c| !c.is_empty()).map(str::to_string);
            let gb_category: GbCategory =
                get(2).parse().map_err(|_| row_error(line, "gb_category", "unknown category"))?;
            let registered_capital = parse_number("registered_capital", get(3))
                .map_err(|m| row_error(line, "registered_capital", m))?;
            if registered_capital < 0.0 {
                return Err(row_error(line, "registered_capital", "negative registered capital"));
            }
            let operational_year: i32 = get(4).parse().map_err(|_| {
                row_error(line, "operational_year", format!("`{}` is not a year", get(4)))
            })?;
            Ok(LocalEnterprise {
                name: name.to_string(),
                credit_code,
                gb_category,
                registered_capital,
                operational_year,
            })
        })();

        match row {
            Ok(r) => out.records.push(r),
            Err(e) => out.errors.push(e),
        }
    }
    Ok(out)
}

/// Parses the world listed-company dataset.
pub fn parse_global_dataset<R: Read>(source: R) -> Result<Parsed<GlobalCompany>, IngestError> {
    let mut rdr = reader(source);
    let cols = column_indices(rdr.headers()?, &GLOBAL_COLUMNS)?;
    let mut out = Parsed { records: Vec::new(), errors: Vec::new() };

    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let get = |i: usize| record.get(cols[i]).unwrap_or("");

        let row = (|| {
            let name = get(0);
            if name.is_empty() {
                return Err(row_error(line, "name", "empty name"));
            }
            let country_code = get(2).to_ascii_uppercase();
            if country_code.len() != 2 || !country_code.bytes().all(|b| b.is_ascii_alphabetic()) {
                return Err(row_error(
                    line,
                    "country_code",
                    format!("`{}` is not an alpha-2 code", get(2)),
                ));
            }
            let sic_primary: SicPrimary =
                get(3).parse().map_err(|e: crate::crosswalk::SicError| {
                    row_error(line, "sic_primary", e.to_string())
                })?;
            let market_value = parse_number("market_value", get(4))
                .map_err(|m| row_error(line, "market_value", m))?;
            if market_value < 0.0 {
                return Err(row_error(line, "market_value", "negative market value"));
            }
            let net_revenue = parse_number("net_revenue", get(5))
                .map_err(|m| row_error(line, "net_revenue", m))?;
            let operational = parse_bool(get(6)).ok_or_else(|| {
                row_error(line, "operational", format!("`{}` is not a boolean", get(6)))
            })?;
            Ok(GlobalCompany {
                name: name.to_string(),
                registered_city: get(1).to_string(),
                country_code,
                sic_primary,
                market_value,
                net_revenue,
                operational,
            })
        })();

        match row {
            Ok(r) => out.records.push(r),
            Err(e) => out.errors.push(e),
        }
    }
    Ok(out)
}

/// Loads the city gazetteer. Every problem here is fatal.
pub fn load_gazetteer<R: Read>(source: R) -> Result<Gazetteer, IngestError> {
    let mut rdr = reader(source);
    let cols = column_indices(rdr.headers()?, &GAZETTEER_COLUMNS)?;
    let mut entries = BTreeMap::new();

    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let get = |i: usize| record.get(cols[i]).unwrap_or("");

        let coord = |i: usize, field: &'static str| {
            parse_number(field, get(i)).map_err(|message| IngestError::InvalidRow { line, message })
        };
        let latitude = coord(2, "latitude")?;
        let longitude = coord(3, "longitude")?;
        if !(-90.0..=90.0).contains(&latitude) {
            return Err(IngestError::CoordinateOutOfRange {
                line,
                field: "latitude",
                value: latitude,
            });
        }
        if !(-180.0..=180.0).contains(&longitude) {
            return Err(IngestError::CoordinateOutOfRange {
                line,
                field: "longitude",
                value: longitude,
            });
        }
        if get(0).is_empty() {
            return Err(IngestError::InvalidRow { line, message: "empty city".into() });
        }
        let key = city_key(get(0), get(1));
        let point = GeoPoint::new(latitude, longitude).expect("range checked above");
        if entries.insert(key.clone(), CityCoordinate { city: key.clone(), point }).is_some() {
            return Err(IngestError::DuplicateCity { line, key });
        }
    }
    Ok(Gazetteer::from_map(entries))
}

/// Keeps records operational in `year` that carry an 18-character credit code.
pub fn filter_local(
    records: &[LocalEnterprise],
    year: i32,
) -> (Vec<LocalEnterprise>, FilterReport) {
    let mut kept = Vec::new();
    let mut rejected = Vec::new();
    for (index, r) in records.iter().enumerate() {
        let reason = match &r.credit_code {
            None => Some("no credit code".to_string()),
            Some(c) if c.chars().count() != CREDIT_CODE_LEN => {
                Some(format!("credit code length {} != {CREDIT_CODE_LEN}", c.chars().count()))
            }
            _ if r.operational_year != year => {
                Some(format!("not operational in {year} (year {})", r.operational_year))
            }
            _ => None,
        };
        match reason {
            Some(reason) => rejected.push(Rejection { index, name: r.name.clone(), reason }),
            None => kept.push(r.clone()),
        }
    }
    let report = FilterReport { input_count: records.len(), output_count: kept.len(), rejected };
    (kept, report)
}

/// Keeps operational companies in the top `quartile` by net revenue.
///
/// With `n` operational companies, the `ceil(quartile * n)` highest revenues are
/// kept along with every company tied with the last of them. Input order is
/// preserved.
pub fn filter_global(
    records: &[GlobalCompany],
    quartile: Fraction,
) -> (Vec<GlobalCompany>, FilterReport) {
    let mut revenues: Vec<f64> =
        records.iter().filter(|r| r.operational).map(|r| r.net_revenue).collect();
    revenues.sort_by(|a, b| b.total_cmp(a));
    let keep_n = quartile.count_of(revenues.len());
    let cutoff = if keep_n == 0 { None } else { Some(revenues[keep_n - 1]) };

    let mut kept = Vec::new();
    let mut rejected = Vec::new();
    for (index, r) in records.iter().enumerate() {
        let reason = if !r.operational {
            Some("not operational".to_string())
        } else if cutoff.is_none_or(|c| r.net_revenue < c) {
            Some(format!("net revenue {} below cutoff", r.net_revenue))
        } else {
            None
        };
        match reason {
            Some(reason) => rejected.push(Rejection { index, name: r.name.clone(), reason }),
            None => kept.push(r.clone()),
        }
    }
    let report = FilterReport { input_count: records.len(), output_count: kept.len(), rejected };
    (kept, report)
}

/// Drops companies registered in `home_country`.
pub fn exclude_domestic(
    records: &[GlobalCompany],
    home_country: &str,
) -> (Vec<GlobalCompany>, FilterReport) {
    let home = home_country.trim().to_ascii_uppercase();
    let mut kept = Vec::new();
    let mut rejected = Vec::new();
    for (index, r) in records.iter().enumerate() {
        if r.country_code == home {
            rejected.push(Rejection {
                index,
                name: r.name.clone(),
                reason: format!("domestic ({home})"),
            });
        } else {
            kept.push(r.clone());
        }
    }
    let report = FilterReport { input_count: records.len(), output_count: kept.len(), rejected };
    (kept, report)
}

pub fn write_local_csv(records: &[LocalEnterprise]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(LOCAL_COLUMNS).expect("in-memory write");
    for r in records {
        w.write_record([
            r.name.clone(),
            r.credit_code.clone().unwrap_or_default(),
            r.gb_category.name().to_string(),
            r.registered_capital.to_string(),
            r.operational_year.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

pub fn write_global_csv(records: &[GlobalCompany]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(GLOBAL_COLUMNS).expect("in-memory write");
    for r in records {
        w.write_record([
            r.name.clone(),
            r.registered_city.clone(),
            r.country_code.clone(),
            r.sic_primary.to_string(),
            r.market_value.to_string(),
            r.net_revenue.to_string(),
            r.operational.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

pub fn write_filter_report_csv(report: &FilterReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "name", "reason"]).expect("in-memory write");
    for r in &report.rejected {
        w.write_record([r.index.to_string(), r.name.clone(), r.reason.clone()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}
