use std::path::PathBuf;
use std::process::{Command, Output};

fn qqo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qqo"))
        .args(args)
        .output()
        .expect("failed to run qqo")
}

fn operator(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../operators").join(name);
    p.to_string_lossy().into_owned()
}

fn temp_file(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("qqo-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

const FAST: [&str; 2] = ["--samples", "512"];

#[test]
fn check_flagship() {
    let out = qqo(&["check", &operator("flagship.qqo"), FAST[0], FAST[1]]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let abc = &r["family"]["abc"];
    assert_eq!(abc["bb5"]["holds"], true);
    assert_eq!(abc["not_ks"], true);
    let anchor = abc["ks2_at_e1_e2"].as_f64().unwrap();
    assert!((anchor + 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(r["ks"]["violation_found"], true);
    assert!(r["ks"]["ks2"]["margin"].as_f64().unwrap() <= -1.0 / 3.0 + 1e-9);
    assert_eq!(r["config"]["seed"], 0);
    assert_eq!(r["config"]["pair_samples"], 512);
}

#[test]
fn check_zero_and_large() {
    let r = json(&qqo(&["check", &operator("zero.qqo"), FAST[0], FAST[1]]));
    assert_eq!(r["positivity"]["dstar1"]["holds"], true);
    assert_eq!(r["positivity"]["dstar3"]["holds"], true);
    assert_eq!(r["ks"]["violation_found"], false);
    assert_eq!(r["dynamics"]["alfa_contraction"], true);

    let r = json(&qqo(&["check", &operator("large.qqo"), FAST[0], FAST[1]]));
    assert_eq!(r["positivity"]["dstar1"]["holds"], false);
    let worst = r["positivity"]["dstar1"]["worst"].as_f64().unwrap();
    assert!((worst - 2.25).abs() < 1e-9);
}

#[test]
fn check_is_byte_identical_across_runs_and_threads() {
    let f = operator("flagship.qqo");
    let a = qqo(&["check", &f, "--seed", "0"]);
    let b = qqo(&["check", &f, "--seed", "0"]);
    let one = qqo(&["check", &f, "--seed", "0", "--threads", "1"]);
    let four = qqo(&["check", &f, "--seed", "0", "--threads", "4"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, one.stdout);
    assert_eq!(a.stdout, four.stdout);
}

#[test]
fn parse_errors_exit_2_with_line_and_key() {
    let f = temp_file("bad.qqo", "format = \"qqo-tensor/1\"\nb[1][1][1] = nope\n");
    let out = qqo(&["check", &f]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("b[1][1][1]"), "{err}");

    let out = qqo(&["check", "/nonexistent/op.qqo"]);
    assert_eq!(out.status.code(), Some(2));

    let out = qqo(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn iterate_v0_squares() {
    let out = qqo(&["iterate", &operator("v0.qqo"), "--init", "0.5,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "n,f1,f2,f3,norm");
    let f1: Vec<f64> = lines[1..4].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(f1, vec![0.5, 0.25, 0.0625]);
    assert_eq!(*lines.last().unwrap(), "terminal,converged_to_zero,,,");
}

#[test]
fn iterate_case_iii_reaches_fixed_point() {
    let f = temp_file("c1.qqo", "format = \"qqo-abc/1\"\nc = 1\n");
    let s = stdout(&qqo(&["iterate", &f, "--init", "0,0,-1"]));
    let lines: Vec<&str> = s.lines().collect();
    let second: Vec<f64> = lines[2].split(',').skip(1).take(3).map(|v| v.parse().unwrap()).collect();
    assert_eq!(second, vec![0.0, 0.0, 1.0]);
    assert!(lines.last().unwrap().starts_with("terminal,fixed_point,"));
}

#[test]
fn iterate_case_vi_converges_quickly() {
    let s = stdout(&qqo(&["iterate", &operator("case_vi.qqo"), "--init", "0.5,0.5,0.5", "--tol", "1e-9"]));
    let rows = s.lines().count() - 2;
    assert!(rows <= 60, "{rows} rows");
    assert!(s.ends_with("terminal,converged_to_zero,,,\n"));

    let j = json(&qqo(&["iterate", &operator("case_vi.qqo"), "--init", "0.5,0.5,0.5", "--format", "json"]));
    assert_eq!(j["terminal"], "converged_to_zero");
}

#[test]
fn iterate_rejects_init_outside_ball() {
    let out = qqo(&["iterate", &operator("v0.qqo"), "--init", "1,1,0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qqo(&["iterate", &operator("v0.qqo"), "--init", "-0.5,0"]);
    assert_eq!(out.status.code(), Some(2));
}

fn scan_rows(args: &[&str]) -> Vec<Vec<String>> {
    let mut all = vec!["scan-abc"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--samples", "256"]);
    let out = qqo(&all);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn scan_single_points() {
    let s = format!("{:?}", 1.0 / 3f64.sqrt());
    let rows = scan_rows(&["--a", &s, "--b", &s, "--c", "0"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][7], "true");

    let rows = scan_rows(&["--a", "0", "--b", "0", "--c", "0"]);
    assert_eq!((rows[0][3].as_str(), rows[0][7].as_str()), ("true", "false"));
}

#[test]
fn scan_not_ks_flips_above_half() {
    // a and b are scanned along the diagonal by listing the matching points.
    let mut flags = Vec::new();
    for v in ["0.4", "0.5", "0.6", "0.7"] {
        let rows = scan_rows(&["--a", v, "--b", v, "--c", "0"]);
        flags.push(rows[0][7] == "true");
    }
    assert_eq!(flags, vec![false, false, true, true]);
}

#[test]
fn scan_rows_are_a_major_and_empty_grid_rejected() {
    let rows = scan_rows(&["--a", "-0.5:0.5:0.5", "--b", "0:0.5", "--c", "0", "--grid", "2"]);
    assert_eq!(rows.len(), 6);
    let a: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(a, vec![-0.5, -0.5, 0.0, 0.0, 0.5, 0.5]);

    let out = qqo(&["scan-abc", "--a", "1:0", "--b", "0", "--c", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn witness_exit_codes() {
    let out = qqo(&["witness", &operator("flagship.qqo"), FAST[0], FAST[1]]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["found"], true);
    assert!(r["worst"]["dense"]["min_eigenvalue"].as_f64().unwrap() < -1e-3);
    let ks2 = r["channels"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["witness"]["channel"] == "ks2")
        .unwrap();
    let ef = ks2["conditional_expectation"]["min_eigenvalue"].as_f64().unwrap();
    let margin = ks2["witness"]["margin"].as_f64().unwrap();
    assert!((ef - margin).abs() < 1e-9);

    let out = qqo(&["witness", &operator("zero.qqo"), FAST[0], FAST[1]]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["found"], false);
}
