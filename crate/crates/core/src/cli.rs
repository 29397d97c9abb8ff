//! Command-line front end.
//!
//! Exit codes: 0 success, 1 warnings promoted by `--strict`, 2 fatal input
//! error, 3 usage error. Human-readable tables go to standard output;
//! machine-readable CSVs are only ever written to files.

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::concentration::{hhi_table_csv, hhi_table_markdown, top_decile_by_hhi, IndustryMarket};
use crate::crosswalk::{classify_global_company, gb_to_sic, CrosswalkTable, GbCategory};
use crate::geo::{geocode_city, haversine_distance, EarthModel};
use crate::ingest::{
    exclude_domestic, filter_global, filter_local, load_gazetteer, parse_global_dataset,
    parse_local_registry, write_filter_report_csv, write_global_csv, write_local_csv,
    GlobalCompany, IngestError, Parsed,
};
use crate::network::{build_cooperation_graph, edge_list_csv, export_gexf};
use crate::pipeline::{
    emit_run_report, parse_exclusion_list, rank_category, run, PipelineError, RunConfig, Warning,
};
use crate::scoring::{
    score_table_csv, score_table_markdown, CandidateInput, ScoringConfig,
    DEFAULT_REFERENCE_DISTANCE_KM, DEFAULT_TOP_K,
};
use crate::{Fraction, GeoPoint, SicPrimary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_WARNINGS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "fdi-screen",
    version,
    about = "Screen and rank foreign-funded investment targets"
)]
struct Cli {
    /// Exit with status 1 when any data warning was produced.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and filter the input datasets, writing the kept rows and rejection lists.
    Ingest(IngestArgs),
    /// Print a category's market-share / HHI table.
    Hhi(HhiArgs),
    /// Score and rank candidates of one category.
    Score(ScoreArgs),
    /// Export the category co-classification graph as GEXF.
    Graph(GraphArgs),
    /// Run the full two-stage pipeline from a config file.
    Run(RunArgs),
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// District registry CSV.
    #[arg(long)]
    local: PathBuf,
    /// World listed-company CSV.
    #[arg(long)]
    global: PathBuf,
    /// City gazetteer CSV (validated only).
    #[arg(long)]
    gazetteer: PathBuf,
    /// Operational year required of local enterprises.
    #[arg(long, default_value_t = 2022)]
    year: i32,
    /// Fraction of operational companies kept by net revenue.
    #[arg(long, default_value_t = 0.25)]
    quartile: f64,
    /// Country whose companies are dropped from the global dataset.
    #[arg(long, default_value = "CN")]
    home_country: String,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct HhiArgs {
    /// Category name (official name or its snake_case slug).
    #[arg(long)]
    category: String,
    /// Number of rows to print.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    top: u64,
    /// Global dataset CSV, typically the output of `ingest`.
    #[arg(long)]
    global: PathBuf,
    /// Crosswalk CSV overriding the bundled table.
    #[arg(long)]
    crosswalk: Option<PathBuf>,
    /// Also write the printed rows as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    /// Category name (official name or its snake_case slug).
    #[arg(long)]
    category: String,
    /// Reference distance in km at which the distance decile reaches 0.
    #[arg(long, default_value_t = DEFAULT_REFERENCE_DISTANCE_KM)]
    dref: f64,
    /// Number of candidates to keep.
    #[arg(long, default_value_t = DEFAULT_TOP_K, value_parser = parse_top_k)]
    top_k: usize,
    /// File listing company names to exclude, one per line.
    #[arg(long)]
    exclude: Option<PathBuf>,
    /// Pre-computed candidates CSV with columns
    /// company_name, market_value, share, hhi_points, distance_km.
    #[arg(long, conflicts_with_all = ["global", "gazetteer", "target"])]
    candidates: Option<PathBuf>,
    /// Global dataset CSV; the category's top HHI decile is scored.
    #[arg(long, requires_all = ["gazetteer", "target"])]
    global: Option<PathBuf>,
    #[arg(long)]
    gazetteer: Option<PathBuf>,
    /// Gazetteer key of the target region, e.g. `Beijing,CN`.
    #[arg(long)]
    target: Option<String>,
    #[arg(long, default_value_t = 0.10)]
    top_decile_fraction: f64,
    #[arg(long)]
    crosswalk: Option<PathBuf>,
    /// Also write the ranked table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GraphArgs {
    /// Global dataset CSV.
    #[arg(long)]
    global: PathBuf,
    #[arg(long)]
    crosswalk: Option<PathBuf>,
    /// GEXF output file.
    #[arg(long)]
    out: PathBuf,
    /// Optional `source,target,weight` edge list.
    #[arg(long)]
    edges_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Config file (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// District registry CSV.
    #[arg(long)]
    local: Option<String>,
    /// World listed-company CSV.
    #[arg(long)]
    global: Option<String>,
    /// City coordinates CSV.
    #[arg(long)]
    gazetteer: Option<String>,
    /// SIC to category crosswalk CSV (default: bundled table).
    #[arg(long)]
    crosswalk: Option<String>,
    /// Registry year a local enterprise must be operational in.
    #[arg(long)]
    year: Option<String>,
    /// Fraction of operational companies kept by net revenue.
    #[arg(long)]
    quartile: Option<String>,
    /// Country code whose companies count as domestic.
    #[arg(long)]
    home_country: Option<String>,
    /// Target city as a gazetteer key, e.g. `Beijing,CN`.
    #[arg(long)]
    target: Option<String>,
    /// Target latitude; with `--target-lon`, overrides `--target`.
    #[arg(long)]
    target_lat: Option<String>,
    /// Target longitude.
    #[arg(long)]
    target_lon: Option<String>,
    /// `;`-separated category names.
    #[arg(long)]
    focus_categories: Option<String>,
    /// Fraction of each focus market shortlisted by HHI.
    #[arg(long)]
    top_decile_fraction: Option<String>,
    /// Reference distance in km at which the distance decile reaches 0.
    #[arg(long)]
    dref: Option<String>,
    /// Candidates selected per category.
    #[arg(long)]
    top_k: Option<String>,
    /// `;`-separated company names.
    #[arg(long)]
    exclusions: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
}

fn parse_top_k(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(format!("`{s}` is not an integer >= 1")),
    }
}

/// Outcome of a subcommand that did not fail outright.
struct Done {
    warnings: usize,
}

enum Failure {
    Usage(String),
    Input(String),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config(_) => Failure::Usage(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn input_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| input_err(path, e))
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| input_err(dir, e))?;
    }
    std::fs::write(path, body).map_err(|e| input_err(path, e))
}

fn parse_category(s: &str) -> Result<GbCategory, Failure> {
    let s = s.trim();
    GbCategory::ALL.into_iter().find(|c| c.name() == s || c.slug() == s).ok_or_else(|| {
        let mut msg = format!("unknown category `{s}`; valid categories:\n");
        for c in GbCategory::ALL {
            msg.push_str(&format!("  {} ({})\n", c.name(), c.slug()));
        }
        Failure::Usage(msg)
    })
}

fn fraction(v: f64, flag: &str) -> Result<Fraction, Failure> {
    Fraction::new(v).map_err(|e| Failure::Usage(format!("--{flag}: {e}")))
}

fn load_crosswalk(path: &Option<PathBuf>) -> Result<CrosswalkTable, Failure> {
    match path {
        Some(p) => CrosswalkTable::from_csv(open(p)?).map_err(|e| input_err(p, e)),
        None => Ok(CrosswalkTable::default_table()),
    }
}

fn load_global(path: &Path, err: &mut dyn Write) -> Result<Parsed<GlobalCompany>, Failure> {
    let parsed = parse_global_dataset(open(path)?).map_err(|e| input_err(path, e))?;
    for e in &parsed.errors {
        let _ = writeln!(err, "warning: {}: {e}", path.display());
    }
    Ok(parsed)
}

fn members<'a>(
    table: &CrosswalkTable,
    companies: &'a [GlobalCompany],
    category: GbCategory,
) -> Vec<&'a GlobalCompany> {
    companies.iter().filter(|c| classify_global_company(table, c).contains(&category)).collect()
}

fn cmd_ingest(a: IngestArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Done, Failure> {
    let quartile = fraction(a.quartile, "quartile")?;
    if a.year <= 0 {
        return Err(Failure::Usage("--year must be positive".into()));
    }
    let local = parse_local_registry(open(&a.local)?).map_err(|e| input_err(&a.local, e))?;
    for e in &local.errors {
        let _ = writeln!(err, "warning: {}: {e}", a.local.display());
    }
    let global = load_global(&a.global, err)?;
    let gazetteer = load_gazetteer(open(&a.gazetteer)?).map_err(|e| input_err(&a.gazetteer, e))?;

    let (kept_local, local_report) = filter_local(&local.records, a.year);
    let (screened, revenue_report) = filter_global(&global.records, quartile);
    let (foreign, domestic_report) = exclude_domestic(&screened, &a.home_country);

    let mut rejected_global = revenue_report.clone();
    rejected_global.rejected.extend(domestic_report.rejected.iter().cloned());

    write_file(&a.out.join("local_filtered.csv"), &write_local_csv(&kept_local))?;
    write_file(&a.out.join("global_filtered.csv"), &write_global_csv(&foreign))?;
    write_file(&a.out.join("local_rejections.csv"), &write_filter_report_csv(&local_report))?;
    write_file(&a.out.join("global_rejections.csv"), &write_filter_report_csv(&rejected_global))?;

    let _ = writeln!(out, "gazetteer: {} cities", gazetteer.len());
    for (name, r) in [
        ("local registry", &local_report),
        ("global revenue filter", &revenue_report),
        ("global domestic filter", &domestic_report),
    ] {
        let _ = writeln!(
            out,
            "{name}: {} in, {} kept, {} rejected",
            r.input_count,
            r.output_count,
            r.rejected.len()
        );
    }
    Ok(Done { warnings: local.errors.len() + global.errors.len() })
}

fn cmd_hhi(a: HhiArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Done, Failure> {
    let category = parse_category(&a.category)?;
    let table = load_crosswalk(&a.crosswalk)?;
    let global = load_global(&a.global, err)?;
    let mut warnings = global.errors.len();

    let rows = match IndustryMarket::build(category, members(&table, &global.records, category)) {
        Ok(market) => {
            let _ = writeln!(
                out,
                "{category}: {} companies, HHI {:.6} points\n",
                market.len(),
                market.hhi_total()
            );
            market.entries().iter().take(a.top as usize).cloned().collect()
        }
        Err(_) => {
            let _ = writeln!(err, "warning: no companies with market value in `{category}`");
            warnings += 1;
            Vec::new()
        }
    };
    let _ = write!(out, "{}", hhi_table_markdown(&rows));
    if let Some(p) = &a.csv {
        write_file(p, &hhi_table_csv(&rows))?;
    }
    Ok(Done { warnings })
}

/// Reads the pre-computed candidates table used by `score --candidates`.
fn read_candidates(
    path: &Path,
    category: GbCategory,
    table: &CrosswalkTable,
) -> Result<Vec<CandidateInput>, Failure> {
    const COLS: [&str; 5] = ["company_name", "market_value", "share", "hhi_points", "distance_km"];
    let sic = gb_to_sic(table, category)
        .into_iter()
        .next()
        .or_else(|| SicPrimary::new(99).ok())
        .expect("99 is a valid code");
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(open(path)?);
    let headers = rdr.headers().map_err(|e| input_err(path, e))?.clone();
    let idx: Vec<usize> = COLS
        .iter()
        .map(|c| {
            headers
                .iter()
                .position(|h| h == *c)
                .ok_or_else(|| input_err(path, IngestError::MissingColumn(c.to_string())))
        })
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| input_err(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |i: usize| -> Result<f64, Failure> {
            rec[idx[i]].parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                input_err(
                    path,
                    format!("line {line}: {} `{}` is not a number", COLS[i], &rec[idx[i]]),
                )
            })
        };
        out.push(CandidateInput {
            company: GlobalCompany {
                name: rec[idx[0]].to_string(),
                registered_city: String::new(),
                country_code: String::new(),
                sic_primary: sic,
                market_value: num(1)?,
                net_revenue: 0.0,
                operational: true,
            },
            share: num(2)?,
            hhi_points: num(3)?,
            distance_km: num(4)?,
        });
    }
    Ok(out)
}

fn cmd_score(a: ScoreArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Done, Failure> {
    let category = parse_category(&a.category)?;
    let table = load_crosswalk(&a.crosswalk)?;
    let exclusions = match &a.exclude {
        Some(p) => parse_exclusion_list(&std::fs::read_to_string(p).map_err(|e| input_err(p, e))?),
        None => Vec::new(),
    };
    let mut warnings = Vec::new();
    let mut row_warnings = 0;

    // Placeholder target; replaced below when scoring from the global dataset.
    let origin = GeoPoint::new(0.0, 0.0).expect("valid");
    let scoring = |target: GeoPoint| -> Result<ScoringConfig, Failure> {
        Ok(ScoringConfig::new(target)
            .with_reference_distance(a.dref)
            .and_then(|s| s.with_top_k(a.top_k))
            .map_err(|e| Failure::Usage(e.to_string()))?
            .with_exclusions(exclusions.iter().cloned()))
    };

    let ranking = if let Some(path) = &a.candidates {
        let cfg = scoring(origin)?;
        let inputs = read_candidates(path, category, &table)?;
        let entries: Vec<_> = inputs
            .iter()
            .map(|c| crate::ShareEntry {
                company: c.company.clone(),
                share: c.share,
                hhi_points: c.hhi_points,
            })
            .collect();
        let distances: std::collections::HashMap<&str, f64> =
            inputs.iter().map(|c| (c.company.name.as_str(), c.distance_km)).collect();
        rank_category(category, &entries, &cfg, |c| Ok(distances[c.name.as_str()]), &mut warnings)
    } else {
        let (Some(global_path), Some(gaz_path), Some(target)) =
            (&a.global, &a.gazetteer, &a.target)
        else {
            return Err(Failure::Usage(
                "either --candidates or --global, --gazetteer and --target is required".into(),
            ));
        };
        let fraction = fraction(a.top_decile_fraction, "top-decile-fraction")?;
        let global = load_global(global_path, err)?;
        row_warnings = global.errors.len();
        let gazetteer = load_gazetteer(open(gaz_path)?).map_err(|e| input_err(gaz_path, e))?;
        let target_point = geocode_city(&gazetteer, target)
            .map_err(|e| Failure::Input(format!("--target: {e}")))?;
        let cfg = scoring(target_point)?;
        let shortlist =
            match IndustryMarket::build(category, members(&table, &global.records, category)) {
                Ok(market) => top_decile_by_hhi(&market, fraction),
                Err(_) => {
                    warnings.push(Warning::EmptyFocusCategory(category));
                    Vec::new()
                }
            };
        let earth = EarthModel::default();
        rank_category(
            category,
            &shortlist,
            &cfg,
            |c| {
                let key = c.city_key();
                geocode_city(&gazetteer, &key)
                    .map(|p| haversine_distance(p, target_point, &earth))
                    .map_err(|_| key)
            },
            &mut warnings,
        )
    };

    for w in &warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let _ = writeln!(out, "{category}\n");
    let _ = write!(out, "{}", score_table_markdown(&ranking.selected));
    if !ranking.excluded.is_empty() {
        let _ = writeln!(out, "\nexcluded: {}", ranking.excluded.join("; "));
    }
    if let Some(p) = &a.csv {
        write_file(p, &score_table_csv(&ranking.selected))?;
    }
    Ok(Done { warnings: warnings.len() + row_warnings })
}

fn cmd_graph(a: GraphArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Done, Failure> {
    let table = load_crosswalk(&a.crosswalk)?;
    let global = load_global(&a.global, err)?;
    let sets: Vec<_> = global.records.iter().map(|c| classify_global_company(&table, c)).collect();
    let graph = build_cooperation_graph(&sets);
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| input_err(dir, e))?;
    }
    let file = File::create(&a.out).map_err(|e| input_err(&a.out, e))?;
    let bytes =
        export_gexf(&graph, std::io::BufWriter::new(file)).map_err(|e| input_err(&a.out, e))?;
    if let Some(p) = &a.edges_csv {
        write_file(p, &edge_list_csv(&graph))?;
    }
    let _ = writeln!(
        out,
        "{} nodes, {} edges, {bytes} bytes written to {}",
        graph.nodes().len(),
        graph.edges().len(),
        a.out.display()
    );
    Ok(Done { warnings: global.errors.len() })
}

fn cmd_run(a: RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Done, Failure> {
    let mut config = RunConfig::load(&a.config)?;
    let overrides = [
        ("local", &a.local),
        ("global", &a.global),
        ("gazetteer", &a.gazetteer),
        ("crosswalk", &a.crosswalk),
        ("year", &a.year),
        ("quartile", &a.quartile),
        ("home_country", &a.home_country),
        ("target", &a.target),
        ("target_lat", &a.target_lat),
        ("target_lon", &a.target_lon),
        ("focus_categories", &a.focus_categories),
        ("top_decile_fraction", &a.top_decile_fraction),
        ("reference_distance_km", &a.dref),
        ("top_k", &a.top_k),
        ("exclusions", &a.exclusions),
        ("out", &a.out),
    ];
    // Paths given on the command line are relative to the working directory,
    // not to the config file.
    let cwd = std::env::current_dir().unwrap_or_default();
    for (key, value) in overrides {
        if let Some(v) = value {
            let v = match key {
                "local" | "global" | "gazetteer" | "crosswalk" | "out" if !v.is_empty() => {
                    cwd.join(v).to_string_lossy().into_owned()
                }
                _ => v.clone(),
            };
            config.set(key, &v).map_err(|e| Failure::Usage(e.to_string()))?;
        }
    }
    let out_dir = config
        .out
        .as_ref()
        .map(|p| config.resolve(p))
        .ok_or_else(|| Failure::Usage("missing output directory (`out`)".into()))?;

    let report = run(&config)?;
    emit_run_report(&report, &out_dir)?;

    for w in report.warnings() {
        let _ = writeln!(err, "warning: {w}");
    }
    for r in &report.stage2.rankings {
        let _ = writeln!(out, "{}\n", r.category);
        let _ = writeln!(out, "{}", score_table_markdown(&r.selected));
    }
    let _ = writeln!(out, "report written to {}", out_dir.display());
    let _ = writeln!(out, "sha256:{}", report.content_hash);
    Ok(Done { warnings: report.warnings().count() })
}

/// Runs the CLI with explicit argument and output streams; returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ =
                if e.use_stderr() { write!(err, "{rendered}") } else { write!(out, "{rendered}") };
            return code;
        }
    };
    let strict = cli.strict;
    let result = match cli.command {
        Command::Ingest(a) => cmd_ingest(a, out, err),
        Command::Hhi(a) => cmd_hhi(a, out, err),
        Command::Score(a) => cmd_score(a, out, err),
        Command::Graph(a) => cmd_graph(a, out, err),
        Command::Run(a) => cmd_run(a, out, err),
    };
    match result {
        Ok(Done { warnings }) if strict && warnings > 0 => {
            let _ = writeln!(err, "{warnings} warning(s) with --strict");
            EXIT_WARNINGS
        }
        Ok(_) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Input(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_INPUT
        }
    }
}
