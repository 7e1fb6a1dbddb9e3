use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use semrank_core::{fixtures, Environment};
use tempfile::TempDir;

fn semrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semrank"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_env(dir: &TempDir, name: &str, env: &Environment) -> PathBuf {
    let path = dir.path().join(name);
    env.save(&path).unwrap();
    path
}

fn fixture(dir: &TempDir, name: &str) -> PathBuf {
    write_env(
        dir,
        &format!("{name}.json"),
        &fixtures::by_name(name).unwrap(),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn page_order(listing: &str) -> Vec<String> {
    listing
        .lines()
        .map(|l| l.split_whitespace().nth(1).unwrap().to_owned())
        .collect()
}

#[test]
fn gen_is_byte_identical_per_seed() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = semrank(&["gen", "--seed", "1", "-o", s(path)]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let env = Environment::load(&a).unwrap();
    assert_eq!(env.ontology.concept_count(), 6);
    assert_eq!(env.ontology.pair_count(), 14);
    assert_eq!(env.pages.len(), 10);

    let to_stdout = semrank(&["gen", "--seed", "1"]);
    assert_eq!(to_stdout.stdout, ta);
    let other = semrank(&["gen", "--seed", "2"]);
    assert_ne!(other.stdout, ta);
}

#[test]
fn gen_with_zero_rate_still_ranks() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("empty.json");
    assert_eq!(code(&semrank(&["gen", "--rate", "0", "-o", s(&path)])), 0);
    let out = semrank(&["rank", s(&path), "--method", "nodes"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 10);
}

#[test]
fn gen_rejects_bad_params() {
    let out = semrank(&["gen", "--concepts", "1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("concept_count"));
}

#[test]
fn rank_combined_keeps_travel_order() {
    let dir = TempDir::new().unwrap();
    let path = fixture(&dir, "travel_virtual");
    let out = semrank(&["rank", s(&path), "--method", "combined"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(page_order(&text), ["p1", "p2"]);
    assert!(text.lines().next().unwrap().contains("l=2"));

    let json = stdout(&semrank(&[
        "rank",
        s(&path),
        "--method",
        "combined",
        "--format",
        "json-like",
    ]));
    assert!(json.contains("\"probability\": \"1/6\""));
    assert!(json.contains("\"probability\": \"1/12\""));
}

#[test]
fn rank_eigen_example_order() {
    let dir = TempDir::new().unwrap();
    let path = fixture(&dir, "backlink_1");
    let out = semrank(&["rank", s(&path), "--method", "eigen"]);
    assert_eq!(code(&out), 0);
    assert_eq!(page_order(&stdout(&out)), ["p1", "p4", "p3", "p5", "p2"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("eigenvalue 2.4811"));
}

#[test]
fn old_method_needs_a_query() {
    let dir = TempDir::new().unwrap();
    let mut env = fixtures::travel_forest();
    env.query = None;
    let path = write_env(&dir, "noquery.json", &env);
    let out = semrank(&["rank", s(&path), "--method", "old"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("needs a query"));

    let out = semrank(&[
        "rank",
        s(&path),
        "--method",
        "old",
        "--assoc",
        "Rome=0",
        "--assoc",
        "tour=1",
        "--assoc",
        "hotel=2",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("1  p1  2.16666  l=2"));
}

#[test]
fn bad_assoc_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let path = fixture(&dir, "travel_forest");
    for bad in ["Rome", "Rome=x", "Rome=9"] {
        let out = semrank(&["rank", s(&path), "--method", "old", "--assoc", bad]);
        assert_eq!(code(&out), 2, "{bad}");
    }
    assert_eq!(code(&semrank(&["rank", s(&path), "--method", "bogus"])), 2);
}

#[test]
fn invalid_and_missing_files() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"ontology":{"concepts":["a"],"relations":[{"id":"r","source":0,"target":0}]},"pages":[]}"#).unwrap();
    let out = semrank(&["rank", s(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("self-loop"));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "not json").unwrap();
    assert_eq!(code(&semrank(&["rank", s(&garbage)])), 2);

    assert_eq!(
        code(&semrank(&["rank", s(&dir.path().join("absent.json"))])),
        1
    );
}

#[test]
fn enumeration_cap_exit_code() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("dense.json");
    let out = semrank(&[
        "gen",
        "--concepts",
        "8",
        "--density",
        "1",
        "--rate",
        "1",
        "--pages",
        "1",
        "-o",
        s(&path),
    ]);
    assert_eq!(code(&out), 0);
    let out = semrank(&["rank", s(&path), "--method", "combined"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("enumeration cap"));
}

#[test]
fn non_convergence_exit_code() {
    // Two pages sharing one relation give a swap matrix with eigenvalues +1 and -1.
    let dir = TempDir::new().unwrap();
    let path = fixture(&dir, "travel_joint");
    let out = semrank(&["rank", s(&path), "--method", "eigen"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));

    // The comparison reports the failing column and carries on.
    let out = semrank(&["compare", s(&path)]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("error: power iteration did not converge"));
    assert!(text.contains("PS[p1]"));
}

#[test]
fn compare_is_deterministic_in_every_format() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("env.json");
    semrank(&["gen", "--seed", "7", "-o", s(&path)]);
    for format in ["table", "csv", "json-like"] {
        let a = semrank(&["compare", s(&path), "--format", format]);
        let b = semrank(&["compare", s(&path), "--format", format]);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "{format}");
    }
}

#[test]
fn single_page_columns_agree() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("one.json");
    semrank(&["gen", "--pages", "1", "-o", s(&path)]);
    let csv = stdout(&semrank(&["compare", s(&path), "--format", "csv"]));
    let agreement: Vec<&str> = csv.split("\n\n").nth(1).unwrap().lines().skip(1).collect();
    assert_eq!(agreement.len(), 10);
    assert!(
        agreement.iter().all(|l| l.ends_with(",1,true,true")),
        "{agreement:?}"
    );
}

/// Parses the score section of the comparison CSV into per-method orders.
fn orders_from_csv(csv: &str) -> HashMap<String, Vec<String>> {
    let mut orders: HashMap<String, Vec<String>> = HashMap::new();
    for line in csv.split("\n\n").next().unwrap().lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        if !cols[2].is_empty() {
            orders
                .entry(cols[0].to_owned())
                .or_default()
                .push(cols[2].to_owned());
        }
    }
    orders
}

fn tau_by_pairs(a: &[String], b: &[String]) -> f64 {
    let pos = |o: &[String], id: &str| o.iter().position(|x| x == id).unwrap() as i64;
    let (mut concordant, mut discordant) = (0i64, 0i64);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if (pos(b, &a[i]) - pos(b, &a[j])) * (i as i64 - j as i64) > 0 {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    (concordant - discordant) as f64 / (concordant + discordant) as f64
}

#[test]
fn kendall_tau_matches_pairwise_count() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("env.json");
    semrank(&["gen", "--seed", "7", "-o", s(&path)]);
    let csv = stdout(&semrank(&["compare", s(&path), "--format", "csv"]));
    let orders = orders_from_csv(&csv);
    assert_eq!(orders.len(), 5);
    let reported: f64 = csv
        .lines()
        .find(|l| l.starts_with("nodes,edges,"))
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    let expected = tau_by_pairs(&orders["nodes"], &orders["edges"]);
    assert!(
        (reported - expected).abs() < 1e-12,
        "{reported} vs {expected}"
    );
}

#[test]
fn verify_golden_passes_and_is_stable() {
    let a = semrank(&["verify-golden"]);
    let b = semrank(&["verify-golden"]);
    assert_eq!(code(&a), 0, "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(!text.contains("FAIL"));
    assert!(text.lines().last().unwrap().ends_with("checks passed"));
}

#[test]
fn verify_golden_notices_a_perturbed_fixture() {
    let out = semrank(&["verify-golden", "--perturb", "backlink_1"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL  backlink 1"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("failed: backlink 1"));

    assert_eq!(code(&semrank(&["verify-golden", "--perturb", "nope"])), 2);
}
