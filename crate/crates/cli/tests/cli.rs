use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const WORKED: &str = r#"{
  "version": 1,
  "sources": [[0, 0], [2, 4], [11, 5]],
  "sink": [11, 1],
  "strategy": {"degree_bound": 3},
  "topology": {"steiner_count": 2, "parents": ["s1", "s1", "s2", "s2", "sink"]}
}"#;

fn fqst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fqst")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn solve_topology_reproduces_worked_example() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", WORKED);
    let out = fqst(&["solve-topology", s(&input)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["solver"], "geometric");
    assert_eq!(v["cost"], 102.0);
    assert_eq!(v["steiner_positions"], serde_json::json!([[5.0, 2.0], [9.0, 2.0]]));
    assert_eq!(v["kind"], "local");
    // The instance is echoed unchanged.
    let echoed = fqst::document::InstanceDocument::parse(&v["instance"].to_string()).unwrap();
    assert_eq!(echoed, fqst::document::InstanceDocument::parse(WORKED).unwrap());
}

#[test]
fn solve_topology_without_topology_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", r#"{"version": 1, "sources": [[0, 0]], "sink": [1, 1]}"#);
    assert_eq!(fqst(&["solve-topology", s(&input)]).status.code(), Some(2));
    let missing = dir.path().join("nope.json");
    assert_eq!(fqst(&["solve-topology", s(&missing)]).status.code(), Some(2));
    let broken = write(&dir, "broken.json", "{");
    assert_eq!(fqst(&["solve-topology", s(&broken)]).status.code(), Some(2));
}

#[test]
fn weighted_supplies_use_the_algebraic_solver() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "in.json",
        r#"{"version": 1, "sources": [[0, 0], [2, 4], [11, 5]], "supplies": [2, 0.5, 3], "sink": [11, 1],
            "topology": {"steiner_count": 2, "parents": ["s1", "s1", "s2", "s2", "sink"]}}"#,
    );
    let result = dir.path().join("out.json");
    let out = fqst(&["solve-topology", s(&input), "-o", s(&result)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&result).unwrap()).unwrap();
    assert_eq!(v["solver"], "algebraic");
    assert_eq!(v["certificates"]["centroid_passed"], true);
    assert_eq!(fqst(&["check", s(&result)]).status.code(), Some(0));
}

#[test]
fn check_accepts_solutions_and_rejects_corruption() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", WORKED);
    let result = dir.path().join("out.json");
    assert_eq!(fqst(&["solve-topology", s(&input), "-o", s(&result)]).status.code(), Some(0));
    assert_eq!(fqst(&["check", s(&result)]).status.code(), Some(0));

    let text = std::fs::read_to_string(&result).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["steiner_positions"][0] = serde_json::json!([5.1, 2.0]);
    let bad = write(&dir, "bad.json", &v.to_string());
    let out = fqst(&["check", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("centre-of-mass"));
}

#[test]
fn check_lists_degree_window_failures() {
    let dir = TempDir::new().unwrap();
    // One degree-4 Steiner point under φ = 3, presented as an exact result.
    let input = write(
        &dir,
        "in.json",
        r#"{"version": 1, "sources": [[-1, 0], [1, 0], [0, 3]], "sink": [0, -1], "strategy": {"degree_bound": 3},
            "topology": {"steiner_count": 1, "parents": ["s1", "s1", "s1", "sink"]}}"#,
    );
    let result = dir.path().join("out.json");
    // The window is informational for a locally minimal tree.
    assert_eq!(fqst(&["solve-topology", s(&input), "-o", s(&result)]).status.code(), Some(0));
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&result).unwrap()).unwrap();
    assert_eq!(v["certificates"]["degree_window_violations"].as_array().unwrap().len(), 1);
    v["kind"] = "exact".into();
    let exact = write(&dir, "exact.json", &v.to_string());
    let out = fqst(&["check", s(&exact)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("s1 has degree 4 > 3"));
}

#[test]
fn exact_on_worked_instance_and_single_source() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", WORKED);
    let out = fqst(&["exact", s(&input)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["kind"], "exact");
    assert!(v["objective"].as_f64().unwrap() <= 102.0 + 1e-9);
    assert!(v["bounds"]["lower_bound"].as_f64().unwrap() <= v["objective"].as_f64().unwrap());
    assert!(v["search"]["topologies_examined"].as_u64().unwrap() > 0);

    let one = write(&dir, "one.json", r#"{"version": 1, "sources": [[3, 4]], "sink": [0, 0], "strategy": {"explicit_bound": 0}}"#);
    let v = json(&fqst(&["exact", s(&one)]));
    assert_eq!(v["objective"], 25.0);
    assert_eq!(v["topology"]["parents"], serde_json::json!(["sink"]));
}

#[test]
fn exact_node_weighted_reports_spanning_tree_bound() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "in.json",
        r#"{"version": 1, "sources": [[0, 0], [2, 4], [11, 5]], "sink": [11, 1], "strategy": {"node_weighted": 20}}"#,
    );
    let out = fqst(&["exact", s(&input)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let obj = v["objective"].as_f64().unwrap();
    assert!(obj <= v["bounds"]["spanning_tree_bound"].as_f64().unwrap());
    assert!(v["bounds"]["steiner_count_bound"].as_u64().unwrap() >= v["topology"]["steiner_count"].as_u64().unwrap());
}

#[test]
fn exact_refuses_large_instances() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("nine.json");
    assert_eq!(fqst(&["random", "--n", "9", "--seed", "4", "-o", s(&input)]).status.code(), Some(0));
    let out = fqst(&["exact", s(&input)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("limit of 6"));
    let out = fqst(&["exact", s(&input), "--full-only"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("limit of 8"));
    let out = fqst(&["exact", s(&input), "--guard-n", "4"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("limit of 4"));
}

#[test]
fn random_is_reproducible() {
    let a = fqst(&["random", "--n", "5", "--seed", "7"]);
    let b = fqst(&["random", "--n", "5", "--seed", "7"]);
    let c = fqst(&["random", "--n", "5", "--seed", "8"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(json(&a)["sources"].as_array().unwrap().len(), 5);
}

#[test]
fn render_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", WORKED);
    let result = dir.path().join("out.json");
    fqst(&["solve-topology", s(&input), "-o", s(&result)]);
    let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
    assert_eq!(fqst(&["render", s(&result), "-o", s(&a)]).status.code(), Some(0));
    assert_eq!(fqst(&["render", s(&result), "-o", s(&b)]).status.code(), Some(0));
    let svg = std::fs::read_to_string(&a).unwrap();
    assert_eq!(svg, std::fs::read_to_string(&b).unwrap());
    assert_eq!(svg.matches(r#"class="terminal""#).count(), 4);
    assert_eq!(svg.matches(r#"class="steiner""#).count(), 2);
    assert_eq!(svg.matches("<line").count(), 5);
}

#[test]
fn bounds_for_each_strategy() {
    let dir = TempDir::new().unwrap();
    let base = r#"{"version": 1, "sources": [[0, 0], [2, 4], [11, 5]], "sink": [11, 1], "strategy": "#;
    let explicit = write(&dir, "e.json", &format!("{base}{{\"explicit_bound\": 2}}}}"));
    let v = json(&fqst(&["bounds", s(&explicit)]));
    assert_eq!(v["lower_bound"], 38.0);
    assert_eq!(v["max_steiner"], 2);

    let weighted = write(&dir, "w.json", &format!("{base}{{\"node_weighted\": 5}}}}"));
    let v = json(&fqst(&["bounds", s(&weighted)]));
    assert!(v["spanning_tree_bound"].as_f64().unwrap() > 0.0);
    assert!(v["steiner_count_bound"].is_u64());
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(fqst(&[]).status.code(), Some(2));
    assert_eq!(fqst(&["frobnicate"]).status.code(), Some(2));
}
