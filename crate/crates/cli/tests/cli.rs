use std::path::PathBuf;

use assert_cmd::cargo::cargo_bin_cmd;
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = cargo_bin_cmd!("ttmetric").args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
    )
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("json output")
}

#[test]
fn validate_accepts_fixtures() {
    for name in ["pe1.json", "pe2.json"] {
        let (code, out, _) = run(&["validate", &fixture(name)]);
        assert_eq!(code, 0);
        assert_eq!(json(&out)["ok"], true);
    }
}

#[test]
fn zero_duration_is_a_validation_failure() {
    let (code, out, _) = run(&["validate", &fixture("zero_duration.json")]);
    assert_eq!(code, 2);
    let report = json(&out);
    assert_eq!(report["violations"][0]["rule"], "Positivity");
    assert_eq!(report["violations"][0]["witness"]["fromTick"], 0);
}

#[test]
fn parse_errors_exit_one_with_a_path() {
    let (code, _, err) = run(&["validate", &fixture("unsorted.json")]);
    assert_eq!(code, 1);
    assert!(err.contains("segments[0].profile: unsorted profile"), "{err}");

    let (code, _, err) = run(&["metric", &fixture("malformed.json")]);
    assert_eq!(code, 1);
    assert!(err.contains("EOF"), "{err}");
}

#[test]
fn unregularized_boundary_metric_fails_the_triangle() {
    let (code, out, _) = run(&["metric", &fixture("pe2.json"), "--no-regularize"]);
    assert_eq!(code, 3);
    let body = json(&out);
    assert_eq!(body["matrix"]["values"][0][2], 120);
    let witnesses = body["axioms"]["triangle"]["witnesses"].as_array().unwrap();
    assert!(witnesses.iter().any(|w| w["a"] == "a" && w["b"] == "b" && w["c"] == "c"));
}

#[test]
fn regularized_boundary_metric_passes() {
    let (code, out, err) = run(&["metric", &fixture("pe2.json"), "--out", "csv"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out, "a,b,c\n0,30,60\n30,0,30\n60,30,0\n");
}

#[test]
fn minmin_aggregator_exits_three() {
    let (code, _, err) = run(&["metric", &fixture("pe1.json"), "--aggregator", "minmin", "--out", "csv"]);
    assert_eq!(code, 3);
    assert!(err.contains("m(a,c) = 45 > m(a,b) + m(b,c) = 20"), "{err}");
}

#[test]
fn travel_time_with_walk() {
    let (code, out, _) = run(&["tt", &fixture("pe1.json"), "--from", "a", "--to", "b", "--depart", "1000"]);
    assert_eq!(code, 0);
    let body = json(&out);
    assert_eq!(body["travelTime"], 30);
    assert_eq!(body["walk"][0]["board"], 1020);

    let (_, out, _) = run(&["tt", &fixture("pe1.json"), "--from", "a", "--to", "b", "--depart", "1000", "--no-wait"]);
    assert_eq!(json(&out)["travelTime"], 60);

    let (code, _, err) = run(&["tt", &fixture("pe2.json"), "--from", "a", "--to", "c", "--depart", "500"]);
    assert_eq!(code, 2, "{err}");
    let (code, out, _) =
        run(&["tt", &fixture("pe2.json"), "--from", "a", "--to", "c", "--depart", "500", "--regularize"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["travelTime"], 15);
}

#[test]
fn capacity_scenarios() {
    let pe2 = fixture("pe2.json");
    let (code, out, _) = run(&["capacity", &pe2, "--scenario", &fixture("scenario_ab_full.json"), "--out", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().nth(1), Some("0,150,120"));

    let (_, baseline, _) = run(&["metric", &pe2]);
    let (code, empty, _) = run(&["capacity", &pe2, "--scenario", &fixture("scenario_empty.json")]);
    assert_eq!(code, 0);
    assert_eq!(empty, baseline);

    let (code, out, err) = run(&["capacity", &pe2, "--scenario", &fixture("scenario_isolate_c.json")]);
    assert_eq!(code, 4);
    assert_eq!(json(&out)["ok"], false);
    assert!(err.contains("existence"));
}

#[test]
fn stability_report() {
    let (code, out, _) = run(&["stability", &fixture("pe2.json")]);
    assert_eq!(code, 0);
    let body = json(&out);
    for row in body["delta"].as_array().unwrap() {
        for cell in row.as_array().unwrap() {
            assert!(cell.as_f64().map_or(cell == "inf", |v| v >= 0.0), "{cell}");
        }
    }
}

#[test]
fn rolling_windows() {
    let (code, out, _) = run(&["rolling", &fixture("pe2.json"), "--window", "120", "--stride", "120"]);
    assert_eq!(code, 0);
    let windows = json(&out)["windows"].as_array().unwrap().clone();
    assert_eq!(windows.len(), 4);
    assert!(windows.iter().all(|w| w["axiomsPass"] == true));

    let (code, _, _) = run(&["rolling", &fixture("pe2.json"), "--window", "999", "--stride", "1"]);
    assert_eq!(code, 1);
}

#[test]
fn compare_aggregators_lists_all_three() {
    let (code, out, _) = run(&["compare-aggregators", &fixture("pe1.json")]);
    assert_eq!(code, 0);
    for header in ["== maxmin ==", "== minmin ==", "== integral =="] {
        assert!(out.contains(header), "{out}");
    }
}

#[test]
fn demos_succeed() {
    for demo in ["minmin", "boundary", "integral"] {
        let (code, out, _) = run(&["demo", demo]);
        assert_eq!(code, 0, "{out}");
        assert!(out.ends_with("all expected values reproduced\n"));
    }
}

#[test]
fn output_is_independent_of_worker_count() {
    let pe1 = fixture("pe1.json");
    let (_, one, _) = run(&["--jobs", "1", "metric", &pe1, "--aggregator", "integral"]);
    let (_, four, _) = run(&["metric", &pe1, "--aggregator", "integral", "--jobs", "4"]);
    assert_eq!(one, four);
}

#[test]
fn out_file_receives_the_primary_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    let (code, out, _) = run(&["metric", &fixture("pe2.json"), "--out", "csv", "--out-file", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "a,b,c\n0,30,60\n30,0,30\n60,30,0\n");
}
