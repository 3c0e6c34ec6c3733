use std::fs;
use std::path::Path;

use priority_asep::cli::{run, EXIT_CAP, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_PASS, EXIT_STATISTICS};

fn go(dir: &Path, args: &[&str]) -> u8 {
    let mut v = vec!["priority-asep"];
    v.extend_from_slice(args);
    v.extend_from_slice(&["--out", dir.to_str().unwrap()]);
    run(v)
}

fn read(dir: &Path, f: &str) -> String {
    fs::read_to_string(dir.join(f)).unwrap()
}

#[test]
fn verify_full_suite_passes() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(go(d.path(), &["verify", "--n", "2", "--L", "4", "--q", "3/2", "--checks", "all"]), EXIT_PASS);
    let csv = read(d.path(), "verify.csv");
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "check,n,L,q,status,max_violation");
    assert_eq!(rows.len(), 8);
    assert!(rows[1..].iter().all(|r| r.contains(",pass,0e0")), "{csv}");
    assert!(csv.contains("# q=3/2"));
}

#[test]
fn verify_duality_small() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(go(d.path(), &["verify", "--n", "1", "--L", "2", "--q", "2", "--checks", "duality"]), EXIT_PASS);
    assert!(read(d.path(), "verify.csv").contains("duality,1,2,2,pass,0e0"));
}

#[test]
fn verify_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(go(d.path(), &["verify", "--n", "3", "--L", "12"]), EXIT_CAP);
    assert_eq!(go(d.path(), &["verify", "--n", "1", "--L", "3", "--q", "1.5"]), EXIT_CONFIG);
    assert_eq!(go(d.path(), &["verify", "--n", "1", "--L", "3", "--checks", "nope"]), EXIT_CONFIG);
    assert_eq!(go(d.path(), &["verify", "--L", "3"]), EXIT_CONFIG);
    assert_eq!(go(d.path(), &["simulate-shock", "--q", "3/2"]), EXIT_CONFIG);
    assert_eq!(go(d.path(), &["verify", "--n", "1", "--L", "3", "--bogus", "1"]), EXIT_CONFIG);
    // shock rates are undefined at q = 1
    assert_eq!(go(d.path(), &["report", "--q", "1"]), EXIT_CONFIG);
    // and at w = 0 everything is
    assert_ne!(go(d.path(), &["verify", "--n", "1", "--L", "3", "--w", "0"]), EXIT_PASS);
    let _ = EXIT_CHECK_FAILED;
}

#[test]
fn config_file_with_flag_override() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.cfg");
    fs::write(&cfg, "# small sweep point\nn=2\nL=12\nq=2\nchecks=duality\n").unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(go(d.path(), &["verify", "--config", c]), EXIT_CAP);
    assert_eq!(go(d.path(), &["verify", "--config", c, "--L", "3"]), EXIT_PASS);
    assert!(read(d.path(), "verify.csv").contains("duality,2,3,2,pass"));
}

#[test]
fn shock_simulation_outputs() {
    let d = tempfile::tempdir().unwrap();
    let args = ["simulate-shock", "--K", "1", "--lambda", "1", "--q", "2", "--t-max", "200", "--replicas", "40", "--thinning", "5", "--seed", "3"];
    assert_eq!(go(d.path(), &args), EXIT_PASS);
    let summary = read(d.path(), "summary.csv");
    assert!(summary.contains("# lambda=1") && summary.contains("# seed=3"));
    let v = summary.lines().find(|l| l.starts_with("v,")).unwrap();
    let z: f64 = v.rsplit(',').next().unwrap().parse().unwrap();
    assert!(z.abs() < 4.0, "{summary}");
    assert!(read(d.path(), "trajectory.csv").lines().any(|l| l == "time,x1"));
}

#[test]
fn narrow_window_is_a_statistics_failure() {
    let d = tempfile::tempdir().unwrap();
    let args = ["simulate-shock", "--K", "1", "--lambda", "1", "--t-max", "500", "--replicas", "40", "--window", "-20,20"];
    assert_eq!(go(d.path(), &args), EXIT_STATISTICS);
}

#[test]
fn asep_histogram_against_canonical_measure() {
    let d = tempfile::tempdir().unwrap();
    let args = ["simulate-asep", "--n", "1", "--L", "4", "--particles", "2", "--q", "2", "--events", "200000", "--replicas", "4"];
    assert_eq!(go(d.path(), &args), EXIT_PASS);
    let h = read(d.path(), "histogram.csv");
    assert!(h.lines().any(|l| l == "index,eta,empirical,exact"));
    let rows = h.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(rows, 6);
    let s = read(d.path(), "summary.csv");
    let tv: f64 = s.lines().find(|l| l.starts_with("tv_distance,")).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(tv < 0.02);
}

#[test]
fn theorem_and_report_commands() {
    let d = tempfile::tempdir().unwrap();
    let args = ["shock-theorem", "--n", "1", "--t-max", "2", "--replicas", "300", "--window", "-60,60", "--offsets", "-10:10", "--seed", "1"];
    let code = go(d.path(), &args);
    assert!(code == EXIT_PASS || code == EXIT_CHECK_FAILED);
    assert_eq!(read(d.path(), "profile.csv").lines().filter(|l| !l.starts_with('#')).count(), 22);
    assert_eq!(go(d.path(), &["report", "--K", "2", "--q", "2"]), EXIT_PASS);
    assert_eq!(read(d.path(), "predictions.csv"), "i,rho_i,v_i,D_i,p_i\n1,1/2,9/20,41/40,9/25\n2,4/5,-9/20,41/40,\n");
}
