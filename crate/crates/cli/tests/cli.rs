use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn nbbd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nbbd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn minimax_reports_exact_level() {
    let v = json(&nbbd(&["minimax", "--n", "3"]));
    assert_eq!(v["eps_star"], "1/2");
    assert_eq!(v["coefficients"], serde_json::json!(["1/2", "1/2"]));
    assert_eq!(v["M"], 5);
    assert_eq!(v["convention"], "residue");
}

#[test]
fn minimax_fractional_coefficients_scale_by_k() {
    let v = json(&nbbd(&[
        "minimax",
        "--n",
        "3",
        "--convention",
        "fractional",
    ]));
    assert_eq!(v["eps_star"], "1/2");
    assert_eq!(v["coefficients"], serde_json::json!(["1", "3/2"]));
}

#[test]
fn minimax_against_projection() {
    let v = json(&nbbd(&["minimax", "--n", "3", "--target", "projected"]));
    assert_eq!(v["target"], "projected");
    assert_eq!(v["eps_star"], "0");
}

#[test]
fn rank_csv_lists_each_n() {
    let out = nbbd(&["rank", "--n-max", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "n,rank,expected,verdict\n2,1,1,holds\n3,2,2,holds\n4,3,3,holds\n"
    );
}

#[test]
fn matrix_text_matches_construction() {
    let out = nbbd(&["matrix", "--n", "3", "--m", "5", "--convention", "residue"]);
    assert_eq!(stdout(&out), "5 2\n1 1\n0 2\n1 0\n0 1\n1 2\n");
}

#[test]
fn projection_json_has_exact_image() {
    let v = json(&nbbd(&["project", "--n", "3", "--m", "5"]));
    assert_eq!(
        v["projected_c"],
        serde_json::json!(["1", "6/7", "4/7", "3/7", "10/7"])
    );
    assert_eq!(
        v["projection"][0],
        serde_json::json!(["1/3", "0", "1/3", "0", "1/3"])
    );
}

#[test]
fn pinv_reports_penrose_identities() {
    let v = json(&nbbd(&["pinv", "--n", "4"]));
    assert_eq!(v["penrose"], serde_json::json!([true, true, true, true]));
}

#[test]
fn distance_encloses_one_minus_ln2() {
    let v = json(&nbbd(&["distance", "--n", "2"]));
    let lo = v["d_sq"]["lo"].as_f64().unwrap();
    let hi = v["d_sq"]["hi"].as_f64().unwrap();
    let expected = 1.0 - std::f64::consts::LN_2;
    assert!(lo <= expected && expected <= hi);
}

#[test]
fn decompose_dominates_distance() {
    let v = json(&nbbd(&["decompose", "--n-max", "4"]));
    assert_eq!(v["claim"], "decomposition");
    assert_eq!(v["verdict"], "holds");
    assert_eq!(v["evidence"]["decompositions"].as_array().unwrap().len(), 3);
}

#[test]
fn probes_report_verdicts() {
    let v = json(&nbbd(&["probe", "--claim", "rank", "--n-max", "5"]));
    assert_eq!(v["verdict"], "holds");
    let v = json(&nbbd(&[
        "probe",
        "--claim",
        "positive-image",
        "--n",
        "3",
        "--m",
        "5",
    ]));
    assert_eq!(v["verdict"], "holds");
    let v = json(&nbbd(&[
        "probe",
        "--claim",
        "strong-convergence",
        "--n-max",
        "4",
    ]));
    assert_eq!(v["verdict"], "measured");
    assert_eq!(v["evidence"]["deviations"][1]["deviation"], "4/7");
    let v = json(&nbbd(&[
        "probe",
        "--claim",
        "projection-norm",
        "--n-max",
        "3",
    ]));
    assert_eq!(v["evidence"]["norms"][1]["inf_norm"], "10/7");
}

#[test]
fn scan_then_plot() {
    let dir = tempfile::tempdir().unwrap();
    let scan = dir.path().join("scan.csv");
    let plot = dir.path().join("scan.dat");
    let out = nbbd(&["scan", "--n-max", "4", "--out", scan.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(&scan).unwrap();
    assert!(csv.starts_with("n,eps_star,d_sq_mid,d_sq_width,tail_mid,pn_inf_norm,pn_2_norm\n"));
    assert_eq!(csv.lines().count(), 4);

    let out = nbbd(&[
        "plot",
        "--input",
        scan.to_str().unwrap(),
        "--out",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&plot).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(
        lines[0],
        "n eps_star d_sq_mid d_sq_width tail_mid pn_inf_norm pn_2_norm"
    );
    assert!(lines[2].starts_with("3 0.5 0.0957477839"));
    assert_eq!(
        fs::read_dir(dir.path()).unwrap().count(),
        2,
        "no temp files left behind"
    );
}

#[test]
fn plot_of_norms_shows_ten_sevenths() {
    let dir = tempfile::tempdir().unwrap();
    let norms = dir.path().join("norms.csv");
    nbbd(&["norms", "--n-max", "3", "--out", norms.to_str().unwrap()]);
    let out = nbbd(&["plot", "--input", norms.to_str().unwrap()]);
    let text = stdout(&out);
    assert!(text.contains("1.42857142857"), "{text}");
    assert!(text.lines().nth(1).unwrap().starts_with("2 1 1 1"));
}

#[test]
fn plot_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    assert_eq!(
        nbbd(&["plot", "--input", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "n,eps_star\n").unwrap();
    assert_eq!(
        nbbd(&["plot", "--input", empty.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(nbbd(&["minimax"]).status.code(), Some(2));
    assert_eq!(nbbd(&["minimax", "--n", "1"]).status.code(), Some(2));
    assert_eq!(nbbd(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(nbbd(&["rank", "--bogus"]).status.code(), Some(2));
    let out = nbbd(&["matrix", "--n", "40"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the cap"));
}
