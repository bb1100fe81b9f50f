use std::path::Path;
use std::process::{Command, Output};

fn run(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropteich"))
        .args(args)
        .env("TROPTEICH_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn enumerate_uses_and_matches_cache() {
    let dir = tempfile::tempdir().unwrap();
    let first = run(dir.path(), &["enumerate", "--genus", "2"]);
    assert!(first.status.success());
    assert!(stdout(&first).contains("\"count\": 7"));
    let cached = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(cached, 1);
    let second = run(dir.path(), &["enumerate", "--genus", "2"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn unsupported_genus_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["enumerate", "--genus", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("genus"));
}

#[test]
fn spaces_of_genus_two() {
    let dir = tempfile::tempdir().unwrap();
    let mg = run(dir.path(), &["space", "--genus", "2", "--which", "Mg", "--format", "dot"]);
    assert_eq!(stdout(&mg).lines().filter(|l| l.contains("[label=\"0")).count(), 7);
    let cv = run(dir.path(), &["space", "--genus", "2", "--which", "CV"]);
    assert!(stdout(&cv).contains("\"count\": 3"));
    let tg = run(dir.path(), &["space", "--genus", "2", "--which", "Tg-chart"]);
    assert!(tg.status.success());
    assert!(String::from_utf8_lossy(&tg.stderr).contains("cone complex: yes"));
}

#[test]
fn seeds_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let seeds = dir.path().join("seeds.json");
    std::fs::write(&seeds, tropteich_cli::commands::default_seed_document(2).unwrap()).unwrap();
    let from_file = run(dir.path(), &["space", "--genus", "2", "--which", "Tg-chart", "--seeds", seeds.to_str().unwrap()]);
    let default = run(dir.path(), &["space", "--genus", "2", "--which", "Tg-chart"]);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, default.stdout);
}

#[test]
fn verify_exit_codes_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let ok = run(
        dir.path(),
        &["verify", "--genus", "2", "--suite", "quotient", "--samples", "50", "--report", report.to_str().unwrap()],
    );
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(std::fs::read(&report).unwrap(), ok.stdout);
    let empty = run(dir.path(), &["verify", "--genus", "2", "--suite", "markings", "--samples", "0"]);
    assert_eq!(empty.status.code(), Some(0));
    let complex3 = run(dir.path(), &["verify", "--genus", "3", "--suite", "complex", "--samples", "3", "--radius", "1"]);
    assert_eq!(complex3.status.code(), Some(1), "genus-3 charts carry automorphisms");
    assert!(stdout(&complex3).contains("\"passed\": false"));
}

#[test]
fn tropicalize_models() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    std::fs::write(
        &model,
        r#"{"components": [{"id": "E", "genus": 1}],
            "nodes": [{"between": ["E", "E"], "parameter": "ZERO"}],
            "valuation": {"p-adic": {"prime": 3}}}"#,
    )
    .unwrap();
    let o = run(dir.path(), &["tropicalize", "--model", model.to_str().unwrap(), "--locate"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("\"inf\""));
    assert!(text.contains("infinite length"));
    assert!(text.contains("\"face_at_infinity\": [\n      0\n    ]"));

    std::fs::write(&model, r#"{"components": [{"id": "E", "genus": 1}], "valuation": {"p-adic": {"prime": 3}}}"#)
        .unwrap();
    let bad = run(dir.path(), &["tropicalize", "--model", model.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("nodes"));
}

#[test]
fn export_poset() {
    let dir = tempfile::tempdir().unwrap();
    let dot = run(dir.path(), &["export", "--genus", "2"]);
    assert!(stdout(&dot).starts_with("digraph"));
    let doc = run(dir.path(), &["export", "--genus", "2", "--format", "structured"]);
    assert!(stdout(&doc).starts_with('{'));
}
