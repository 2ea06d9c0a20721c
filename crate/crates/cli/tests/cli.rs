use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_outagekg"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn lee_csv() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/lee_county_2022-09-28.csv")
}

fn build(out: &Path) -> Output {
    run(&["build", "--records", lee_csv().to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn digest_tree(root: &Path) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().display().to_string();
                out.push((rel, hex::encode(Sha256::digest(fs::read(&p).unwrap()))));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn build_query_stats_round() {
    let dir = tempfile::tempdir().unwrap();
    let kg = dir.path().join("kg");
    let o = build(&kg);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("OutageRecord: 17 instances, 136 statements"), "{}", stdout(&o));

    let query = dir.path().join("q.rq");
    fs::write(
        &query,
        "SELECT ?n WHERE { ?r geo:customersOut ?n . FILTER(?n > 100000) } ORDER BY DESC(?n)",
    )
    .unwrap();
    let o = run(&["query", "--query", query.to_str().unwrap(), kg.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "n\n120112\n103485\n");

    fs::write(&query, "SELECT ?n WHERE { ?r geo:customersOut ?n . FILTER(?n > 1000000) }").unwrap();
    let o = run(&["query", "--query", query.to_str().unwrap(), kg.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "n\n");

    let o = run(&["stats", kg.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("class,instances,statements,counties,mean_per_county\n"), "{text}");
    assert!(text.contains("OutageRecord,17,136,1,17.00\n"), "{text}");
    assert!(text.contains("NTLImage,0,0,0,0.00\n"), "{text}");

    let o = run(&["stats", "--by-year", kg.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("2022,OutageRecord,17,1,17.00\n"), "{}", stdout(&o));
}

#[test]
fn repeated_builds_hash_identically() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(build(&a).status.success());
    assert!(build(&b).status.success());
    let (ta, tb) = (digest_tree(&a), digest_tree(&b));
    assert!(!ta.is_empty());
    assert_eq!(ta, tb);
    let report: serde_json::Value = serde_json::from_slice(&fs::read(a.join("build-report.json")).unwrap()).unwrap();
    let schema_hash = hex::encode(Sha256::digest(fs::read(a.join("schema.ttl")).unwrap()));
    assert_eq!(report["files"]["schema.ttl"], schema_hash.as_str());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let kg = dir.path().join("kg");
    assert!(build(&kg).status.success());

    // usage problems
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["build", "--out", kg.to_str().unwrap(), "--window-days", "10"]).status.code(), Some(2));
    assert_eq!(run(&["build", "--out", kg.to_str().unwrap(), "--event", "no-date"]).status.code(), Some(2));

    let query = dir.path().join("bad.rq");
    fs::write(&query, "SELECT ?s WHERE { ?s ?p ").unwrap();
    let o = run(&["query", "--query", query.to_str().unwrap(), kg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));

    // data problems
    let o = run(&["build", "--records", "/nonexistent.csv", "--out", kg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let broken = dir.path().join("broken.ttl");
    fs::write(&broken, "<http://a> <http://b> .").unwrap();
    fs::write(&query, "SELECT ?s WHERE { ?s ?p ?o }").unwrap();
    let o = run(&["query", "--query", query.to_str().unwrap(), broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn ingest_records_reports_rejections() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("records.csv");
    let mut text = fs::read_to_string(lee_csv()).unwrap();
    text.push_str("12071,Lee,Florida,-5,2022-09-28 16:15:00\n");
    text.push_str("99999,Nowhere,Florida,5,2022-09-28 16:15:00\n");
    fs::write(&csv, text).unwrap();
    let out = dir.path().join("clean");
    let o = run(&["ingest-records", "--records", csv.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["rows_accepted"], 17);
    assert_eq!(report["rows_rejected"], 2);
    assert_eq!(fs::read_to_string(out.join("records.csv")).unwrap().lines().count(), 18);
}

fn write_grid(path: &Path, date: &str, value: &str) {
    let header = serde_json::json!({
        "fips": "12071", "date": date, "height": 1, "width": 2,
        "min_lon": -82.0, "min_lat": 26.5, "max_lon": -81.9, "max_lat": 26.55, "cell_size": 0.05,
    });
    let text = format!("{header}\n{value},{value}\n");
    fs::write(path, text).unwrap();
}

#[test]
fn outage_maps_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let ntl = dir.path().join("ntl");
    fs::create_dir_all(&ntl).unwrap();
    for back in 1..=3 {
        let d = format!("2022-09-{:02}", 28 - back);
        write_grid(&ntl.join(format!("{d}.ntl.csv")), &d, "40");
    }
    write_grid(&ntl.join("2022-09-28.ntl.csv"), "2022-09-28", "10");
    let maps = dir.path().join("maps");
    let o = run(&[
        "outage-maps",
        "--ntl-dir",
        ntl.to_str().unwrap(),
        "--out",
        maps.to_str().unwrap(),
        "--event",
        "Hurricane Ian:2022-09-28",
        "--min-valid",
        "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let listing = stdout(&o);
    assert!(listing.starts_with("fips,date,event,mean_severity,file\n"), "{listing}");
    assert!(listing.contains("12071,2022-09-28,Hurricane Ian,0.75,maps/12071/2022-09-28.map.csv\n"), "{listing}");

    let pgm = dir.path().join("lee.pgm");
    let o = run(&["export-map", maps.join("maps/12071/2022-09-28.map.csv").to_str().unwrap(), "--out", pgm.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&pgm).unwrap(), "P2\n2 1\n255\n191 191\n");
    assert_eq!(fs::read_to_string(dir.path().join("lee.mask.csv")).unwrap(), "valid,valid\n");
}
