use std::path::PathBuf;

use heightlab_cli::report::Report;
use heightlab_cli::{run_args, SystemDescription};
use serde_json::Value;

fn examples_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples")
}

fn example(name: &str) -> String {
    examples_dir().join(name).display().to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut v = vec!["heightlab"];
    v.extend_from_slice(args);
    run_args(v, None)
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn cell<'a>(v: &'a Value, row: usize, col: &str) -> &'a str {
    let j = v["columns"].as_array().unwrap().iter().position(|c| c == col).unwrap();
    v["rows"][row][j].as_str().unwrap()
}

#[test]
fn every_documented_example_runs_and_round_trips() {
    let mut seen = 0;
    for entry in std::fs::read_dir(examples_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        seen += 1;
        let text = std::fs::read_to_string(&path).unwrap();
        let d = SystemDescription::from_json_str(&text).unwrap();
        assert_eq!(SystemDescription::from_json_str(&d.to_json_string()).unwrap(), d);
        let p = path.display().to_string();
        let first = run(&["spectral", "--system", &p]);
        assert_eq!(first.0, 0, "{p}: {}", first.2);
        assert_eq!(run(&["spectral", "--system", &p]), first, "{p} is not deterministic");
    }
    assert!(seen >= 8);
}

#[test]
fn example_one_one_spectral_and_series() {
    let s = json(&["spectral", "--system", &example("example-1.1.json")]);
    assert_eq!(s["metadata"]["delta"], serde_json::json!(["4", "4"]));
    assert_eq!(s["metadata"]["l"], 2);
    let t = json(&["series", "--system", &example("example-1.1.json"), "--point", "0,1", "--steps", "50"]);
    for n in 1..=50usize {
        let expected = num_rational::BigRational::new(9.into(), 4.into())
            + num_rational::BigRational::new(1.into(), ((n * n) as i64).into());
        assert_eq!(cell(&t, n, "a_n_exact"), expected.to_string());
    }
}

#[test]
fn squaring_map_golden_values() {
    let s = json(&["spectral", "--system", &example("z2.json")]);
    assert_eq!(s["metadata"]["delta"], serde_json::json!(["2", "2"]));
    assert_eq!(s["metadata"]["l"], 0);
    let t = json(&["series", "--system", &example("z2.json"), "--point", "2:1", "--steps", "10", "--sig", "12"]);
    for n in 1..=10 {
        assert_eq!(cell(&t, n, "a_n"), "0.69314718056");
    }
    let scan = json(&["scan", "--system", &example("z2.json"), "--bound", "100"]);
    assert_eq!(scan["metadata"]["count"], 4);
    let i = json(&["intersect", "--system", &example("z2.json"), "--point", "2", "--other-point", "16", "--steps", "10"]);
    assert_eq!(i["metadata"]["max_gap"], 2);
    assert_eq!(i["metadata"]["ap_decomposition"].as_array().unwrap().len(), 1);
}

#[test]
fn zf_on_example_one_one() {
    let z = json(&["zf", "--system", &example("example-1.1.json"), "--point", "0,1", "--point", "-3,0"]);
    assert_eq!(cell(&z, 0, "member"), "no");
    assert_eq!(cell(&z, 1, "member"), "yes");
    let c = json(&["canonical", "--system", &example("example-1.1.json"), "--point", "0,1"]);
    assert_eq!(cell(&c, 0, "exact"), "9/4");
    let g = json(&["zf", "--system", &example("golden-mean.json"), "--point", "1,0"]);
    assert_eq!(cell(&g, 0, "member"), "undecided");
}

#[test]
fn csv_and_json_carry_the_same_cells() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("t.csv");
    let csv_arg = csv_path.display().to_string();
    let j = json(&["series", "--system", &example("example-1.1.json"), "--point", "0,1", "--steps", "8", "--csv", &csv_arg]);
    let (header, rows) = Report::parse_csv(&std::fs::read_to_string(&csv_path).unwrap()).unwrap();
    let jh: Vec<String> = serde_json::from_value(j["columns"].clone()).unwrap();
    let jr: Vec<Vec<String>> = serde_json::from_value(j["rows"].clone()).unwrap();
    assert_eq!(header, jh);
    assert_eq!(rows, jr);
    let (code, out, _) = run(&["series", "--system", &example("example-1.1.json"), "--point", "0,1", "--steps", "8", "--output", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out, std::fs::read_to_string(&csv_path).unwrap());
}

#[test]
fn input_errors_exit_two_with_a_path() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"schema": 1, "kind": "lattice", "matrix": [["1", "0"], ["0", "one"]]}"#).unwrap();
    let (code, _, err) = run(&["spectral", "--system", &bad.display().to_string()]);
    assert_eq!(code, 2);
    assert!(err.contains("$.matrix[1][1]"), "{err}");
    std::fs::write(&bad, "{\"schema\": 1, ").unwrap();
    assert_eq!(run(&["spectral", "--system", &bad.display().to_string()]).0, 2);
    let (code, _, err) = run(&["series", "--system", &example("z2.json"), "--point", "1,2,3"]);
    assert_eq!(code, 2);
    assert!(err.contains("--point"));
    assert_eq!(run(&["scan", "--system", &example("example-1.1.json"), "--bound", "5"]).0, 2);
    assert_eq!(run(&["spectral"]).0, 2);
}

#[test]
fn precision_comes_from_flag_then_environment() {
    let args = ["heightlab", "spectral", "--system", &example("golden-mean.json"), "--sig", "40"];
    let default = run_args(args, None);
    let env = run_args(args, Some("40"));
    assert_ne!(default.1, env.1);
    let mut with_flag = args.to_vec();
    with_flag.extend(["--precision-bits", "128"]);
    assert_eq!(run_args(with_flag, Some("40")).1, default.1);
    assert_eq!(run_args(args, Some("many")).0, 2);
}

#[test]
fn jobs_do_not_change_output() {
    let base = ["preperiodic", "--system", &example("basilica.json"), "--point", "0", "--point", "-1", "--point", "inf", "--point", "1/2", "--max-steps", "40", "--budget", "2000"];
    let one = run(&base);
    let mut par = base.to_vec();
    par.extend(["--jobs", "3"]);
    assert_eq!(run(&par), one);
}

#[test]
fn wehler_series_reports_flags_without_crashing() {
    let t = json(&["series", "--system", &example("wehler-xyz.json"), "--point", "1:-1,1:1,0:1", "--steps", "3"]);
    assert!(t["rows"].as_array().unwrap().len() >= 2);
    assert_eq!(t["metadata"]["l"], 0);
}
