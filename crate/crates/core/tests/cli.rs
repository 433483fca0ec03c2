use std::io::Write;
use std::process::{Command, Output, Stdio};

fn chordlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chordlab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn sample_one_chord() {
    let o = chordlab(&["sample", "--n", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1-2\n");
    let a = chordlab(&["sample", "--n", "20", "--count", "3", "--seed", "0x2a"]);
    let b = chordlab(&["sample", "--n", "20", "--count", "3", "--seed", "42"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(stdout(&a).lines().count(), 3);
    let j = chordlab(&["sample", "--n", "2", "--format", "json"]);
    assert!(stdout(&j).starts_with("{\"n\":2"));
}

#[test]
fn analyze_figure_one() {
    let o = chordlab(&["analyze", "1-4 2-7 3-6 5-9 8-10", "--k", "2"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["component_count"], 1);
    assert_eq!(v["monolithic"], true);
    let edges: Vec<(String, String)> = v["edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e[0].as_str().unwrap().into(), e[1].as_str().unwrap().into()))
        .collect();
    let expected = [("1-4", "2-7"), ("1-4", "3-6"), ("2-7", "5-9"), ("3-6", "5-9"), ("5-9", "8-10")];
    assert_eq!(edges, expected.map(|(a, b)| (a.to_string(), b.to_string())));
    assert_eq!(v["lengths"], serde_json::json!([2, 4, 2, 3, 1]));
}

#[test]
fn analyze_reads_standard_input() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_chordlab"))
        .arg("analyze")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"1-2 3-4\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    assert_eq!(json(&o)["monolithic"], false);
}

#[test]
fn exact_and_formulas() {
    let o = chordlab(&["exact", "--n", "3", "--stat", "count"]);
    assert_eq!(json(&o)["diagrams"], 15);
    let o = chordlab(&["exact", "--n", "6", "--stat", "x_c1", "--condition", "c1=<1,6>"]);
    assert!(o.status.success());
    let f = chordlab(&["formulas", "--name", "mean_xk", "--args", "6,4"]);
    assert_eq!(json(&f)["exact"], "2/3");
    let f = chordlab(&["formulas", "--name", "degree_cdf_limit", "--args", "0.375"]);
    assert!((json(&f)["decimal"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn evolve_orient_extremal() {
    let o = chordlab(&["evolve", "--model", "discrete", "--n", "4", "--seed", "5", "--trace", "-"]);
    assert!(o.status.success());
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[3]["model"], "discrete");
    let o = chordlab(&["orient", "1-4 2-5 3-6", "--seed", "1"]);
    let v = json(&o);
    assert!(v["orientation"]["bits"].is_string());
    assert!(v["trivial_count"].as_u64().unwrap() <= 3);
    let o = chordlab(&["extremal", "1-4 2-7 3-6 5-9 8-10"]);
    let v = json(&o);
    assert_eq!((v["omega"].as_u64(), v["alpha"].as_u64(), v["alpha_nest"].as_u64()), (Some(2), Some(3), Some(2)));
}

#[test]
fn exit_codes() {
    assert_eq!(chordlab(&["sample", "--n", "3", "--bogus"]).status.code(), Some(1));
    assert_eq!(chordlab(&["nope"]).status.code(), Some(1));
    assert_eq!(chordlab(&["sample", "--n", "0"]).status.code(), Some(2));
    assert_eq!(chordlab(&["analyze", "1-2 2-3"]).status.code(), Some(2));
    let o = chordlab(&["experiment", "--kind", "scc_trivial", "--n", "100000", "--replicas", "1000"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
    for sub in ["sample", "analyze", "exact", "formulas", "evolve", "orient", "extremal", "experiment"] {
        assert_eq!(chordlab(&[sub, "--help"]).status.code(), Some(0), "{sub}");
    }
}

#[test]
fn experiment_output_ignores_worker_count() {
    let run = |w: &str| {
        let o = chordlab(&[
            "experiment", "--kind", "joint_lengths", "--n", "50", "--replicas", "500", "--seed", "3", "--workers", w,
            "--params", r#"{"k": 3}"#,
        ]);
        assert!(o.status.success());
        let mut v = json(&o);
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    assert_eq!(run("1"), run("4"));
    let csv = chordlab(&["experiment", "--kind", "simple_chords", "--n", "30", "--replicas", "100", "--format", "csv"]);
    assert!(stdout(&csv).starts_with("section,name,value,count,empirical,reference\n"));
}
