use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn treemart(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treemart"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn run_dir(o: &Output) -> PathBuf {
    PathBuf::from(String::from_utf8_lossy(&o.stdout).trim())
}

#[test]
fn onestep_example() {
    let tmp = tempfile::tempdir().unwrap();
    let o = treemart(&["verify", "--suite", "onestep", "--z", "0.7", "--seed", "1"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = run_dir(&o);
    let summary = std::fs::read_to_string(dir.join("summary.csv")).unwrap();
    for line in summary.lines().skip(1) {
        let stat: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(stat <= 1e-12, "{line}");
    }
    assert!(dir.join("manifest.json").is_file());
}

#[test]
fn usage_errors_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let o = treemart(&["solve", "--equation", "smoothing", "--z", "3"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("z:"));
    let o = treemart(&["simulate", "--model", "bst", "--stop", "time=1"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("stop:"));
    // Nothing was written.
    assert_eq!(std::fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn config_file_with_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.json");
    std::fs::write(&cfg, r#"{"command":"simulate","model":"bisection","stop":"generation=4","paths":2,"z":0.8}"#).unwrap();
    let o = treemart(&["simulate", "--config", cfg.to_str().unwrap(), "--paths", "3"], &tmp.path().join("runs"));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(run_dir(&o).join("trajectories.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 5 * 2);
    assert!(csv.lines().skip(1).all(|l| l.contains(",0.8,")));

    std::fs::write(&cfg, r#"{"command":"simulate","colour":"red"}"#).unwrap();
    let o = treemart(&["simulate", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));

    std::fs::write(&cfg, r#"{"command":"solve","z":1}"#).unwrap();
    let o = treemart(&["simulate", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn runs_never_overwrite_and_report_checks_integrity() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["simulate", "--model", "yule", "--stop", "leaves=50", "--paths", "4", "--seed", "3"];
    let first = treemart(&args, tmp.path());
    assert_eq!(first.status.code(), Some(0));
    let again = treemart(&args, tmp.path());
    assert_eq!(again.status.code(), Some(2));

    let dir = run_dir(&first);
    let reports = tmp.path().join("reports");
    let r = treemart(&["report", "--input", dir.to_str().unwrap()], &reports);
    assert_eq!(r.status.code(), Some(0));
    let means = std::fs::read_to_string(run_dir(&r).join("trajectory_means.csv")).unwrap();
    assert!(means.starts_with("kind,z,index,paths,mean,se"));

    // A tampered input is reported as a failure.
    std::fs::write(dir.join("trajectories.csv"), "tampered").unwrap();
    let r = treemart(&["report", "--input", dir.to_str().unwrap()], &tmp.path().join("reports2"));
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("integrity"));
}

#[test]
fn failing_suite_names_its_criterion() {
    let tmp = tempfile::tempdir().unwrap();
    // At n = 10^4 the BST martingale is still far from its limit law, so this suite fails.
    let o = treemart(&["verify", "--suite", "quarter_laws", "--paths", "400"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("criterion 5 (quarter_laws)"));
}
