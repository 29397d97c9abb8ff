//! End-to-end checks of the `fdi-screen` binary: exit codes, outputs, help.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn golden(name: &str) -> PathBuf {
    fixtures().join("golden").join(name)
}

fn reference(name: &str) -> PathBuf {
    fixtures().join("reference").join(name)
}

fn fdi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdi-screen")).args(args).output().expect("spawn binary")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const GLOBAL_HEADER: &str =
    "name,registered_city,country_code,sic_primary,market_value,net_revenue,operational\n";

#[test]
fn ingest_writes_four_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = fdi(&[
        "ingest",
        "--local",
        p(&golden("local.csv")),
        "--global",
        p(&golden("global.csv")),
        "--gazetteer",
        p(&golden("cities.csv")),
        "--quartile",
        "0.5",
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in [
        "local_filtered.csv",
        "global_filtered.csv",
        "local_rejections.csv",
        "global_rejections.csv",
    ] {
        assert!(dir.path().join(f).is_file(), "missing {f}");
    }
    let global = std::fs::read_to_string(dir.path().join("global_filtered.csv")).unwrap();
    assert_eq!(global.lines().count(), 1 + 24);
    assert!(!global.contains(",CN,"));
}

#[test]
fn ingest_without_local_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = fdi(&[
        "ingest",
        "--global",
        p(&golden("global.csv")),
        "--gazetteer",
        p(&golden("cities.csv")),
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn ingest_with_missing_column_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "name,registered_city\nA,Paris\n").unwrap();
    let o = fdi(&[
        "ingest",
        "--local",
        p(&golden("local.csv")),
        "--global",
        p(&bad),
        "--gazetteer",
        p(&golden("cities.csv")),
        "--out",
        p(&dir.path().join("out")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("country_code"), "{}", stderr(&o));
}

#[test]
fn ingest_with_missing_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = fdi(&[
        "ingest",
        "--local",
        p(&dir.path().join("nope.csv")),
        "--global",
        p(&golden("global.csv")),
        "--gazetteer",
        p(&golden("cities.csv")),
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn hhi_top_seven_matches_reference_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let o = fdi(&[
        "hhi",
        "--category",
        "Banking industry",
        "--top",
        "7",
        "--global",
        p(&reference("finance_global.csv")),
        "--csv",
        p(&csv),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let got = std::fs::read_to_string(&csv).unwrap();
    let want = std::fs::read_to_string(reference("finance_hhi_top7.csv")).unwrap();
    assert_eq!(got, want);
    assert!(stdout(&o).contains("| Berkshire Hathaway Inc. | 532605.9000 | 0.063833 | 40.746819 |"));
}

#[test]
fn hhi_accepts_slug_category() {
    let o = fdi(&[
        "hhi",
        "--category",
        "banking_industry",
        "--global",
        p(&reference("finance_global.csv")),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn hhi_unknown_category_lists_valid_names() {
    let o = fdi(&[
        "hhi",
        "--category",
        "Quantum farming",
        "--global",
        p(&reference("finance_global.csv")),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("Banking industry"), "{}", stderr(&o));
}

#[test]
fn hhi_top_zero_is_a_usage_error() {
    let o = fdi(&[
        "hhi",
        "--category",
        "Banking industry",
        "--top",
        "0",
        "--global",
        p(&reference("finance_global.csv")),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn score_candidates_reproduces_deciles() {
    let o = fdi(&[
        "score",
        "--category",
        "Scientific research and technical services",
        "--candidates",
        p(&reference("scientific_candidates.csv")),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    for total in ["| 5.90 |", "| 9.35 |", "| 9.25 |", "| 9.10 |"] {
        assert!(text.contains(total), "missing {total} in\n{text}");
    }
}

#[test]
fn score_exclusion_promotes_next_candidate() {
    let dir = tempfile::tempdir().unwrap();
    let with = dir.path().join("with.csv");
    let without = dir.path().join("without.csv");
    let candidates = reference("finance_candidates.csv");
    let base =
        ["score", "--category", "Banking industry", "--candidates", p(&candidates), "--top-k", "2"];
    let o = fdi(&[&base[..], &["--csv", p(&without)]].concat());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o =
        fdi(&[&base[..], &["--exclude", p(&reference("exclude_lvmc.txt")), "--csv", p(&with)]]
            .concat());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let names = |path: &Path| -> Vec<String> {
        csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()[0].to_string()).collect()
    };
    let before = names(&without);
    let after = names(&with);
    assert_eq!(before.len(), 2);
    assert!(before.iter().any(|n| n == "Lvmc Holdings Co.,Ltd"));
    assert_eq!(after.len(), 2);
    assert_eq!(after[0], "Berkshire Hathaway Inc.");
    assert!(!after.iter().any(|n| n == "Lvmc Holdings Co.,Ltd"));
}

#[test]
fn score_empty_category_warns_but_succeeds() {
    let o = fdi(&[
        "score",
        "--category",
        "Education",
        "--global",
        p(&golden("global.csv")),
        "--gazetteer",
        p(&golden("cities.csv")),
        "--target",
        "Beijing,CN",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));

    let strict = fdi(&[
        "--strict",
        "score",
        "--category",
        "Education",
        "--global",
        p(&golden("global.csv")),
        "--gazetteer",
        p(&golden("cities.csv")),
        "--target",
        "Beijing,CN",
    ]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn graph_of_empty_dataset_is_valid_gexf() {
    let dir = tempfile::tempdir().unwrap();
    let global = dir.path().join("empty.csv");
    std::fs::write(&global, GLOBAL_HEADER).unwrap();
    let out = dir.path().join("g.gexf");
    let o = fdi(&["graph", "--global", p(&global), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = std::fs::read_to_string(&out).unwrap();
    let graph = fdi_screen::network::parse_gexf(&doc).unwrap();
    assert!(graph.nodes().is_empty());
    assert!(graph.edges().is_empty());
}

#[test]
fn graph_links_multi_mapped_codes() {
    let dir = tempfile::tempdir().unwrap();
    let global = dir.path().join("g.csv");
    std::fs::write(
        &global,
        format!("{GLOBAL_HEADER}Utility A,Paris,FR,49,10,5,true\nSoft B,Paris,FR,73,10,5,true\n"),
    )
    .unwrap();
    let out = dir.path().join("g.gexf");
    let edges = dir.path().join("e.csv");
    let o = fdi(&["graph", "--global", p(&global), "--out", p(&out), "--edges-csv", p(&edges)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let graph = fdi_screen::network::parse_gexf(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(graph.edges().len(), 2);
    assert_eq!(std::fs::read_to_string(&edges).unwrap().lines().count(), 3);
}

fn run_into(dir: &Path, extra: &[&str]) -> Output {
    let config = golden("run.conf");
    let mut args = vec!["run", "--config", p(&config), "--out", p(dir)];
    args.extend_from_slice(extra);
    fdi(&args)
}

#[test]
fn run_matches_golden_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_into(dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let expected = golden("expected");
    let mut names: Vec<_> =
        std::fs::read_dir(&expected).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let mut produced: Vec<_> =
        std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    produced.sort();
    assert_eq!(names, produced);
    for name in names {
        let want = std::fs::read(expected.join(&name)).unwrap();
        let got = std::fs::read(dir.path().join(&name)).unwrap();
        assert!(want == got, "{} differs from golden", name.to_string_lossy());
    }
}

#[test]
fn run_twice_prints_same_hash() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let hash =
        |o: &Output| stdout(o).lines().find(|l| l.starts_with("sha256:")).unwrap().to_string();
    let oa = run_into(a.path(), &[]);
    let ob = run_into(b.path(), &[]);
    assert_eq!(hash(&oa), hash(&ob));
}

#[test]
fn run_strict_fails_on_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let o = fdi(&["--strict", "run", "--config", p(&golden("run.conf")), "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(dir.path().join("report.md").is_file());
}

#[test]
fn run_rejects_bad_override() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_into(dir.path(), &["--top-k", "0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn run_with_missing_config_is_an_input_error() {
    let o = fdi(&["run", "--config", "/definitely/not/here.conf"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_and_version_exit_zero() {
    for sub in ["ingest", "hhi", "score", "graph", "run"] {
        let o = fdi(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{sub} --help");
        assert!(stdout(&o).contains("Usage"), "{sub}");
    }
    assert_eq!(fdi(&["--help"]).status.code(), Some(0));
    let v = fdi(&["--version"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(fdi(&["hhi", "--bogus"]).status.code(), Some(3));
    assert_eq!(fdi(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(fdi(&[]).status.code(), Some(3));
}
