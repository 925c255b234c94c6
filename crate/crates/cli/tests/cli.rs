use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sphere-sapt"));
    c.env_remove("SPHERE_SAPT_OUT");
    c
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gap_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["gap", "--lambdas", "0.5,0.45,0.55", "--thetas", "64"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("gap.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "lambda,theta,distance");
    assert_eq!(lines.len(), 1 + 3 * 64);
    let last = lines.last().unwrap();
    assert!(last.starts_with("0.55,3.141592653589793,"));
    let s = json(&dir.path().join("gap.json"));
    assert_eq!(s["command"], "gap");
    assert_eq!(s["passed"], true);
    assert_eq!(s["seed"], 11);
    assert!(s["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(s["config"]["args"]["thetas"], 64);
    assert!(s["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn chern_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["chern", "--two-s", "1", "--lambda", "0.8", "--grid", "40"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let s = json(&dir.path().join("chern.json"));
    let bands = s["results"]["bands"].as_array().unwrap();
    let plus = bands.iter().find(|b| b["band"] == "+").unwrap();
    assert_eq!(plus["chern"], -1);
    let minus = bands.iter().find(|b| b["band"] == "-").unwrap();
    assert_eq!(minus["chern"], 1);
}

#[test]
fn obstruction_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["obstruction", "--lambda", "0.8", "--two-j", "8"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("obstruction.csv")).unwrap();
    assert_eq!(
        csv,
        "lambda,two_j,band,rank,reference_rank,expected_rank\n0.8,8,+,10,9,10\n0.8,8,-,8,9,8\n"
    );
}

#[test]
fn empty_result_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["gap", "--thetas", "0"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(dir.path().join("gap.csv")).unwrap(),
        "lambda,theta,distance\n"
    );
}

#[test]
fn slope_reports_carry_fit_fields() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["star-slopes", "--product", "berezin", "--pairs", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let s = json(&dir.path().join("star-slopes.json"));
    let fitted: Vec<&serde_json::Value> = s["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c.get("fit").is_some())
        .collect();
    assert!(!fitted.is_empty());
    for c in fitted {
        for key in ["slope", "ci95", "n_points"] {
            assert!(c["fit"].get(key).is_some(), "{c}");
        }
        assert_eq!(c["fit"]["n_points"], 4);
    }
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["star-slopes", "--product", "berezin", "--pairs", "2", "--seed", "5"];
    assert_eq!(run(&args, a.path()).status.code(), Some(0));
    assert_eq!(run(&args, b.path()).status.code(), Some(0));
    let read = |d: &Path| std::fs::read(d.join("star-slopes.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    let strip = |d: &Path| {
        let mut v = json(&d.join("star-slopes.json"));
        v["wall_time_s"] = serde_json::Value::Null;
        v["config"]["out"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip(a.path()), strip(b.path()));
}

#[test]
fn different_seeds_change_the_corpus() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run(
        &["star-slopes", "--product", "berezin", "--pairs", "2", "--seed", "1"],
        a.path(),
    );
    run(
        &["star-slopes", "--product", "berezin", "--pairs", "2", "--seed", "2"],
        b.path(),
    );
    let read = |d: &Path| std::fs::read(d.join("star-slopes.csv")).unwrap();
    assert_ne!(read(a.path()), read(b.path()));
}

#[test]
fn invalid_arguments_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["gap", "--lambda", "1.5"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["gap", "--no-such-flag"], dir.path()).status.code(), Some(2));
    assert_eq!(
        run(&["invariance-slopes", "--lambda", "0.5"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(run(&["bands", "--order", "2"], dir.path()).status.code(), Some(2));
    assert_eq!(
        run(&["chern", "--two-s", "1", "--lambda", "0.5", "--grid", "8"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["egorov", "--two-m", "3"], dir.path()).status.code(), Some(2));
    assert_eq!(
        run(&["star-slopes", "--coefficient-set", "guessed"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(bin().output().unwrap().status.code(), Some(2));
}

#[test]
fn failed_checks_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    // the printed coefficients spoil the first-order truncation
    let o = run(
        &["star-slopes", "--coefficient-set", "printed", "--pairs", "2"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    let s = json(&dir.path().join("star-slopes.json"));
    assert_eq!(s["passed"], false);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL truncation_order_1_slope"));
}

#[test]
fn help_exits_0() {
    let o = bin().arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    for c in [
        "kernel-check",
        "star-slopes",
        "gap",
        "chern",
        "bands",
        "invariance-slopes",
        "obstruction",
        "egorov",
        "calibrate",
    ] {
        assert!(text.contains(c), "{c}");
    }
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# obstruction sweep\nlambdas = 0.8\ntwo_j = 4,6\nseed = 3\n").unwrap();
    let out = dir.path().join("out");
    let o = bin()
        .args(["obstruction", "--config", cfg.to_str().unwrap(), "--two-j", "8"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&out.join("obstruction.json"));
    assert_eq!(s["seed"], 3);
    assert_eq!(s["config"]["args"]["two_j"], serde_json::json!([8]));
    assert_eq!(s["config"]["args"]["lambdas"], serde_json::json!([0.8]));
    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    let o = bin()
        .args(["gap", "--config", cfg.to_str().unwrap()])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["gap", "--thetas", "4"])
        .env("SPHERE_SAPT_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("gap.csv").exists());
    let other = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["gap", "--thetas", "4", "--out"])
        .arg(other.path())
        .env("SPHERE_SAPT_OUT", dir.path().join("unused"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(other.path().join("gap.csv").exists());
    assert!(!dir.path().join("unused").exists());
}

#[test]
fn calibrate_reports_terms() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["calibrate", "--product", "berezin", "--pairs", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let csv = std::fs::read_to_string(dir.path().join("calibrate.csv")).unwrap();
    assert!(csv.starts_with("term,coefficient,std_error\n"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn kernel_check_small() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "kernel-check",
            "--two-j",
            "1,2",
            "--symbol-two-j",
            "3",
            "--lambdas",
            "0.2",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("kernel-check.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 8 + 2);
}
