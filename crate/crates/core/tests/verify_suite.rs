use std::time::{Duration, Instant};

use fuzzsphere::verify::{run, Suite, VerifyConfig};

#[test]
fn default_suite_passes_quickly() {
    let start = Instant::now();
    let checks = run(Suite::All, &VerifyConfig::default()).unwrap();
    assert!(start.elapsed() < Duration::from_secs(60));
    assert!(checks.len() > 30);
    for c in &checks {
        assert!(c.passed(), "{c}");
    }
    let mut names: Vec<&str> = checks.iter().map(|c| c.name.as_str()).collect();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), checks.len());
}

#[test]
fn appendix_b_table_has_a_row_per_spin_and_degree() {
    let checks = run(Suite::AppendixB, &VerifyConfig::default()).unwrap();
    assert_eq!(checks.len(), 3 * 6);
    assert!(checks.iter().all(|c| c.name.starts_with("appendix_b.two_j=")));
}

#[test]
fn tightened_tolerance_fails() {
    let mut config = VerifyConfig::default();
    config.tolerances.insert("ssh".into(), -1.0);
    let checks = run(Suite::Ssh, &config).unwrap();
    assert!(checks.iter().all(|c| !c.passed()));
    assert!(checks[0].to_string().ends_with("status=fail"));
}
