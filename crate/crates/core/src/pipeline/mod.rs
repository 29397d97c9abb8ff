//! End-to-end two-stage run: industry suitability, then proximity scoring.
//!
//! Data-quality problems (bad rows, unclassified SIC codes, cities missing
//! from the gazetteer, empty focus categories) never abort a run. They are
//! collected as [`Warning`]s and written to the report.

mod config;
mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::path::{Path, PathBuf};

pub use config::{parse_exclusion_list, ConfigError, RunConfig, TargetSpec, DEFAULT_FOCUS, KEYS};
pub use report::{emit_run_report, render_files, RunReport, DISTANCE_CALIBRATION_NOTE};

use crate::concentration::{
    category_counts, local_category_stats, top_decile_by_hhi, CategoryStats, IndustryMarket,
    ShareEntry,
};
use crate::crosswalk::{
    classify_global_company, validate_crosswalk, CrosswalkTable, Diagnostic, GbCategory, Severity,
};
use crate::geo::{geocode_city, haversine_distance, EarthModel, Gazetteer, GeoError, GeoPoint};
use crate::ingest::{
    exclude_domestic, filter_global, filter_local, load_gazetteer, parse_global_dataset,
    parse_local_registry, FilterReport, GlobalCompany, IngestError, LocalEnterprise, Parsed,
    RowError,
};
use crate::network::{build_cooperation_graph, IndustryGraph};
use crate::scoring::{rank, score_candidates, CandidateInput, ScoredCandidate, ScoringConfig};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: IngestError },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("target: {0}")]
    Target(GeoError),
}

impl PipelineError {
    /// Whether the failure comes from input data rather than configuration.
    pub fn is_input_error(&self) -> bool {
        matches!(self, PipelineError::Input { .. } | PipelineError::Io { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    LocalRow(RowError),
    GlobalRow(RowError),
    Crosswalk(Diagnostic),
    Unclassified { company: String, sic: String },
    EmptyFocusCategory(GbCategory),
    EmptyShortlist,
    Ungeocodable { category: GbCategory, company: String, key: String },
    DegenerateScores { category: GbCategory, companies: Vec<String> },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::LocalRow(e) => write!(f, "local registry {e}"),
            Warning::GlobalRow(e) => write!(f, "global dataset {e}"),
            Warning::Crosswalk(d) => write!(f, "crosswalk {d}"),
            Warning::Unclassified { company, sic } => {
                write!(f, "unclassified: `{company}` (SIC {sic})")
            }
            Warning::EmptyFocusCategory(c) => write!(f, "empty focus category: `{c}`"),
            Warning::EmptyShortlist => f.write_str("empty shortlist"),
            Warning::Ungeocodable { category, company, key } => {
                write!(f, "ungeocodable: `{company}` city `{key}` (category `{category}`)")
            }
            Warning::DegenerateScores { category, companies } => {
                write!(f, "degenerate score set in `{category}`: {}", companies.join("; "))
            }
        }
    }
}

/// Parsed inputs of one run.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub local: Parsed<LocalEnterprise>,
    pub global: Parsed<GlobalCompany>,
    pub gazetteer: Gazetteer,
    pub crosswalk: CrosswalkTable,
}

fn open(path: &Path) -> Result<File, PipelineError> {
    File::open(path).map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })
}

fn required<'a>(p: &'a Option<PathBuf>, key: &'static str) -> Result<&'a PathBuf, PipelineError> {
    p.as_ref().ok_or(PipelineError::Config(ConfigError::Missing(key)))
}

impl Inputs {
    pub fn load(config: &RunConfig) -> Result<Self, PipelineError> {
        let with_path = |path: PathBuf| move |source| PipelineError::Input { path, source };

        let local_path = config.resolve(required(&config.local, "local")?);
        let local = parse_local_registry(open(&local_path)?).map_err(with_path(local_path))?;

        let global_path = config.resolve(required(&config.global, "global")?);
        let global = parse_global_dataset(open(&global_path)?).map_err(with_path(global_path))?;

        let gaz_path = config.resolve(required(&config.gazetteer, "gazetteer")?);
        let gazetteer = load_gazetteer(open(&gaz_path)?).map_err(with_path(gaz_path))?;

        let crosswalk = match &config.crosswalk {
            Some(p) => {
                let p = config.resolve(p);
                CrosswalkTable::from_csv(open(&p)?).map_err(with_path(p))?
            }
            None => CrosswalkTable::default_table(),
        };
        Ok(Inputs { local, global, gazetteer, crosswalk })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage1 {
    pub local_filter: FilterReport,
    pub global_filter: FilterReport,
    pub domestic_filter: FilterReport,
    pub local_stats: Vec<CategoryStats>,
    pub global_stats: Vec<CategoryStats>,
    pub crosswalk_diagnostics: Vec<Diagnostic>,
    /// Markets of the focus categories that have at least one company.
    pub markets: BTreeMap<GbCategory, IndustryMarket>,
    /// Top-decile entries per focus category.
    pub shortlist: BTreeMap<GbCategory, Vec<ShareEntry>>,
    /// Co-classification graph of the screened foreign companies.
    pub graph: IndustryGraph,
    pub warnings: Vec<Warning>,
}

impl Stage1 {
    pub fn shortlist_len(&self) -> usize {
        self.shortlist.values().map(Vec::len).sum()
    }
}

/// Filters, classifies, counts and measures concentration.
pub fn run_stage1(inputs: &Inputs, config: &RunConfig) -> Stage1 {
    let mut warnings: Vec<Warning> = Vec::new();
    warnings.extend(inputs.local.errors.iter().cloned().map(Warning::LocalRow));
    warnings.extend(inputs.global.errors.iter().cloned().map(Warning::GlobalRow));

    let crosswalk_diagnostics = validate_crosswalk(&inputs.crosswalk);
    warnings.extend(
        crosswalk_diagnostics
            .iter()
            .filter(|d| d.severity != Severity::Info)
            .cloned()
            .map(Warning::Crosswalk),
    );

    let (local, local_filter) = filter_local(&inputs.local.records, config.year);
    let (screened, global_filter) = filter_global(&inputs.global.records, config.quartile);
    let (foreign, domestic_filter) = exclude_domestic(&screened, &config.home_country);

    let assignments: Vec<BTreeSet<GbCategory>> =
        foreign.iter().map(|c| classify_global_company(&inputs.crosswalk, c)).collect();
    for (company, cats) in foreign.iter().zip(&assignments) {
        if cats.is_empty() {
            warnings.push(Warning::Unclassified {
                company: company.name.clone(),
                sic: company.sic_primary.to_string(),
            });
        }
    }

    let local_stats = local_category_stats(&local);
    let global_stats = category_counts(&assignments);
    let graph = build_cooperation_graph(&assignments);

    let mut markets = BTreeMap::new();
    let mut shortlist = BTreeMap::new();
    let mut focus = config.focus_categories.clone();
    focus.sort();
    focus.dedup();
    for category in focus {
        let members = foreign.iter().zip(&assignments).filter(|(_, cats)| cats.contains(&category));
        match IndustryMarket::build(category, members.map(|(c, _)| c)) {
            Ok(market) => {
                shortlist.insert(category, top_decile_by_hhi(&market, config.top_decile_fraction));
                markets.insert(category, market);
            }
            // no companies, or only zero-valued ones
            Err(_) => warnings.push(Warning::EmptyFocusCategory(category)),
        }
    }
    if shortlist.values().all(Vec::is_empty) {
        warnings.push(Warning::EmptyShortlist);
    }

    Stage1 {
        local_filter,
        global_filter,
        domestic_filter,
        local_stats,
        global_stats,
        crosswalk_diagnostics,
        markets,
        shortlist,
        graph,
        warnings,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryRanking {
    pub category: GbCategory,
    /// Every scored candidate, in rank order.
    pub ranked: Vec<ScoredCandidate>,
    /// The first `top_k` of `ranked`.
    pub selected: Vec<ScoredCandidate>,
    pub excluded: Vec<String>,
    pub ungeocodable: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage2 {
    pub target: GeoPoint,
    pub rankings: Vec<CategoryRanking>,
    pub warnings: Vec<Warning>,
}

pub fn resolve_target(
    config: &RunConfig,
    gazetteer: &Gazetteer,
) -> Result<GeoPoint, PipelineError> {
    match config.target_spec()? {
        TargetSpec::City(key) => geocode_city(gazetteer, &key).map_err(PipelineError::Target),
        TargetSpec::Coordinates { latitude, longitude } => {
            GeoPoint::new(latitude, longitude).map_err(PipelineError::Target)
        }
    }
}

pub fn scoring_config(config: &RunConfig, target: GeoPoint) -> ScoringConfig {
    ScoringConfig::new(target)
        .with_reference_distance(config.reference_distance_km)
        .and_then(|s| s.with_top_k(config.top_k))
        .expect("validated by RunConfig")
        .with_exclusions(config.exclusions.iter().cloned())
}

/// Scores one category's shortlist, given a distance for each company (or the
/// reason it has none).
pub fn rank_category<F>(
    category: GbCategory,
    shortlist: &[ShareEntry],
    scoring: &ScoringConfig,
    mut distance: F,
    warnings: &mut Vec<Warning>,
) -> CategoryRanking
where
    F: FnMut(&GlobalCompany) -> Result<f64, String>,
{
    let mut excluded = Vec::new();
    let mut ungeocodable = Vec::new();
    let mut inputs = Vec::new();
    for entry in shortlist {
        if scoring.is_excluded(&entry.company.name) {
            excluded.push(entry.company.name.clone());
            continue;
        }
        match distance(&entry.company) {
            Ok(distance_km) => inputs.push(CandidateInput {
                company: entry.company.clone(),
                share: entry.share,
                hhi_points: entry.hhi_points,
                distance_km,
            }),
            Err(key) => {
                warnings.push(Warning::Ungeocodable {
                    category,
                    company: entry.company.name.clone(),
                    key,
                });
                ungeocodable.push(entry.company.name.clone());
            }
        }
    }
    let names: Vec<String> = inputs.iter().map(|c| c.company.name.clone()).collect();
    let ranked = match score_candidates(inputs, scoring) {
        Ok(scored) => rank(scored, scoring),
        Err(_) => {
            warnings.push(Warning::DegenerateScores { category, companies: names });
            Vec::new()
        }
    };
    let selected = ranked.iter().take(scoring.top_k()).cloned().collect();
    CategoryRanking { category, ranked, selected, excluded, ungeocodable }
}

/// Geocodes the shortlist, scores it and selects the top K per category.
pub fn run_stage2(
    stage1: &Stage1,
    gazetteer: &Gazetteer,
    config: &RunConfig,
) -> Result<Stage2, PipelineError> {
    let target = resolve_target(config, gazetteer)?;
    let scoring = scoring_config(config, target);
    let earth = EarthModel::default();
    let mut warnings = Vec::new();

    let rankings = stage1
        .shortlist
        .iter()
        .map(|(&category, entries)| {
            rank_category(
                category,
                entries,
                &scoring,
                |c| {
                    let key = c.city_key();
                    geocode_city(gazetteer, &key)
                        .map(|p| haversine_distance(p, target, &earth))
                        .map_err(|_| key)
                },
                &mut warnings,
            )
        })
        .collect();
    Ok(Stage2 { target, rankings, warnings })
}

/// Loads inputs, runs both stages and assembles the report.
pub fn run(config: &RunConfig) -> Result<RunReport, PipelineError> {
    let inputs = Inputs::load(config)?;
    run_with_inputs(&inputs, config)
}

pub fn run_with_inputs(inputs: &Inputs, config: &RunConfig) -> Result<RunReport, PipelineError> {
    let stage1 = run_stage1(inputs, config);
    let stage2 = run_stage2(&stage1, &inputs.gazetteer, config)?;
    Ok(RunReport::new(config, stage1, stage2))
}
