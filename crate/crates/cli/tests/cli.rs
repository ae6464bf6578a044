use std::process::{Command, Output};

fn fuzzsphere(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fuzzsphere"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn wigner3j_prints_exact_and_float() {
    let o = fuzzsphere(&["wigner3j", "--two", "2", "2", "0", "0", "0", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "-(1/3)·√3 ≈ -0.577350269189626");
    assert_eq!(stdout(&fuzzsphere(&["wigner3j", "--two", "2", "2", "2", "2", "0", "0"])).trim(), "0");
    assert_eq!(stdout(&fuzzsphere(&["wigner3j", "--two", "2", "2", "6", "0", "0", "0"])).trim(), "0");
    assert!(!fuzzsphere(&["wigner3j", "--two", "2", "2", "0", "1", "0", "0"]).status.success());
}

#[test]
fn quantize_x3_matches_k_lambda3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x3.json");
    let o = fuzzsphere(&["quantize", "x3", "--two-j", "2", "--two-sigma", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stdout(&o).lines().find(|l| l.starts_with("deviation_from_k_lambda3=")).unwrap().to_string();
    let dev: f64 = line.split('=').nth(1).unwrap().parse().unwrap();
    assert!(dev < 1e-11);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["rows"], 3);
    let diag: Vec<f64> = [0, 4, 8].iter().map(|i| v["entries"][*i][0].as_f64().unwrap()).collect();
    for (d, e) in diag.iter().zip([-0.5, 0.0, 0.5]) {
        assert!((d - e).abs() < 1e-11);
    }
}

#[test]
fn quantize_sigma_zero_warns_and_writes_zeros() {
    let o = fuzzsphere(&["quantize", "x3", "--two-j", "2", "--two-sigma", "0", "--format", "csv"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("degenerate: quantization vanishes"));
    let csv: Vec<String> = stdout(&o).lines().skip_while(|l| *l != "row,col,re,im").map(String::from).collect();
    assert_eq!(csv.len(), 1 + 9);
    assert!(csv[1..].iter().all(|l| l.ends_with(",0,0")));
}

#[test]
fn quantize_above_cutoff_logs_truncation() {
    let o = fuzzsphere(&["quantize", "--ylm", "4", "0", "--two-j", "2", "--two-sigma", "2"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("truncated: l=4 m=0"));
    assert!(stdout(&o).contains("\"entries\": [[0, 0], [0, 0]"));
}

#[test]
fn quantize_expansion_and_quadrature_agree() {
    let a = fuzzsphere(&["quantize", "--expansion", "2:1:1.5", "--two-j", "3", "--two-sigma", "1"]);
    let b = fuzzsphere(&["quantize", "--ylm", "2", "1", "--method", "quadrature", "--two-j", "3", "--two-sigma", "1"]);
    assert!(a.status.success() && b.status.success());
    let parse = |s: String| -> Vec<f64> {
        let json = s.lines().find(|l| l.starts_with('{')).unwrap().to_string();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        v["entries"].as_array().unwrap().iter().flat_map(|z| [z[0].as_f64().unwrap(), z[1].as_f64().unwrap()]).collect()
    };
    for (x, y) in parse(stdout(&a)).iter().zip(parse(stdout(&b))) {
        assert!((x - 1.5 * y).abs() < 1e-10);
    }
}

#[test]
fn parity_is_checked_before_dispatch() {
    let o = fuzzsphere(&["lambda", "--two-j", "2", "--two-sigma", "1"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("error"));
}

#[test]
fn verify_suites_and_exit_codes() {
    let o = fuzzsphere(&["verify", "--suite", "fock"]);
    assert!(o.status.success());
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert!(lines.iter().all(|l| l.starts_with("check=") && l.ends_with("status=pass")));
    assert!(lines.iter().any(|l| l.starts_with("check=fock.commutator_corner")));
    let o = fuzzsphere(&["verify", "--suite", "appendix-b"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 18);
    let o = fuzzsphere(&["verify", "--suite", "fock", "--tol", "fock.a_vs_quadrature=0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!fuzzsphere(&["verify", "--suite", "bogus"]).status.success());
}

#[test]
fn export_round_trip_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let path = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    for name in ["a.json", "b.json"] {
        let o = fuzzsphere(&["export", "--matrix", "ylm:2:1", "--two-j", "3", "--two-sigma", "1", "--out", &path(name)]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let a = std::fs::read(path("a.json")).unwrap();
    assert_eq!(a, std::fs::read(path("b.json")).unwrap());
    let o = fuzzsphere(&["export", "--from", &path("a.json"), "--format", "csv", "--out", &path("a.csv")]);
    assert!(o.status.success());
    let o = fuzzsphere(&["export", "--from", &path("a.csv"), "--from-format", "csv", "--two-sigma", "1", "--out", &path("c.json")]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(path("a.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 16);
    // CSV does not carry σ, so compare entries only
    let entries = |p: &str| serde_json::from_str::<serde_json::Value>(&std::fs::read_to_string(p).unwrap()).unwrap()["entries"].clone();
    assert_eq!(entries(&path("a.json")), entries(&path("c.json")));
    let o = fuzzsphere(&["export", "--matrix", "identity", "--two-j", "2", "--out", "/nonexistent/dir/x.json"]);
    assert!(!o.status.success());
}

#[test]
fn identity_export_json() {
    let o = fuzzsphere(&["export", "--matrix", "identity", "--two-j", "2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["two_j"], 2);
    for (i, z) in v["entries"].as_array().unwrap().iter().enumerate() {
        let expect = if i % 4 == 0 { 1.0 } else { 0.0 };
        assert_eq!(z[0].as_f64().unwrap(), expect);
        assert_eq!(z[1].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn fuzzy_compare_and_limit() {
    let o = fuzzsphere(&["fuzzy-compare", "--two-j", "3", "--two-sigma", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("ell=")).count(), 4);
    let o = fuzzsphere(&["fuzzy-compare", "--two-j", "2", "--two-sigma", "0"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("σ = 0"));
    let o = fuzzsphere(&["classical-limit", "--two-j", "8,16"]);
    let last = stdout(&o).lines().last().unwrap().to_string();
    let ratio: f64 = last.rsplit('=').next().unwrap().parse().unwrap();
    assert!((ratio - 5.0 / 9.0).abs() < 1e-11);
}
