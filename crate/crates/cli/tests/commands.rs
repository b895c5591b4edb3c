use std::process::{Command, Output};

fn bosonic_bell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bosonic-bell"))
        .args(args)
        .env("RUST_BACKTRACE", "0")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = bosonic_bell(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Data rows of a CSV with `#` comments, split into fields.
fn rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let body = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, body)
}

#[test]
fn lhv_check_reports_attained_bound() {
    let out = stdout(&["lhv-check", "--m", "3"]);
    assert!(out.contains("maximum: 0.125"));
    assert!(out.contains("bound attained: yes"));
}

#[test]
fn expand_lists_eight_words() {
    let out = stdout(&["expand", "--m", "3"]);
    let words: Vec<&str> = out.lines().collect();
    assert_eq!(
        words,
        ["+1 XXX", "+i XXY", "+i XYX", "-1 XYY", "+i YXX", "-1 YXY", "-1 YYX", "-i YYY"]
    );
}

#[test]
fn bound_query_log_and_linear() {
    let out = stdout(&["bound", "--n", "100", "--m", "100"]);
    let log: f64 = out
        .lines()
        .next()
        .unwrap()
        .strip_prefix("log_bound: ")
        .unwrap()
        .parse()
        .unwrap();
    assert!((log - 658.164033).abs() < 1e-5);
    assert!(out.contains("bound: 6.870806898621e285"));
}

#[test]
fn bec_scan_small_system() {
    let out = stdout(&[
        "bec-scan",
        "--n",
        "2",
        "--m",
        "1",
        "--u-min",
        "0",
        "--u-max",
        "0",
        "--u-points",
        "1",
    ]);
    assert!(out.starts_with("# bosonic-bell "));
    assert!(out.contains("# u_points=1"));
    let (header, body) = rows(&out);
    assert_eq!(
        header,
        ["U", "m", "log_correlator", "log_bound", "ratio", "violates"]
    );
    assert_eq!(body.len(), 1);
    let ratio: f64 = body[0][4].parse().unwrap();
    assert!((ratio - 0.5).abs() < 1e-12);
    assert_eq!(body[0][5], "false");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = std::env::temp_dir().join(format!("bosonic-bell-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("scan.cfg");
    std::fs::write(
        &cfg,
        "# small scan\nn=6\nm=2,6\nu_min=-2\nu_max=-1\nu_points=3\n",
    )
    .unwrap();
    let out_path = dir.join("scan.csv");
    let args = [
        "bec-scan",
        "--config",
        cfg.to_str().unwrap(),
        "--m",
        "6",
        "--out",
        out_path.to_str().unwrap(),
    ];
    assert!(stdout(&args).is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let (_, body) = rows(&text);
    assert_eq!(body.len(), 3);
    assert!(body.iter().all(|r| r[1] == "6"));
    assert_eq!(
        body.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(),
        ["-1", "-1.5", "-2"]
    );
    // Same config, same bytes.
    let again = stdout(&["bec-scan", "--config", cfg.to_str().unwrap(), "--m", "6"]);
    assert_eq!(again, text);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn spdc_fixed_n_violation_set() {
    let out = stdout(&["spdc-fixed-n", "--n", "6"]);
    let (header, body) = rows(&out);
    assert_eq!(header, ["N", "m", "ratio", "violates"]);
    let violating: Vec<&str> = body
        .iter()
        .filter(|r| r[3] == "true")
        .map(|r| r[1].as_str())
        .collect();
    assert_eq!(violating, ["5", "6"]);
}

#[test]
fn spdc_full_stays_below_bound() {
    let out = stdout(&["spdc-full", "--m", "2,3", "--t-points", "10"]);
    let (_, body) = rows(&out);
    assert_eq!(body.len(), 20);
    for r in &body {
        assert!(r[4].parse::<f64>().unwrap() < 1.0, "{r:?}");
        assert_eq!(r[5], "false");
    }
}

#[test]
fn guard_violations_are_rejected() {
    for args in [
        &["lhv-check", "--m", "0"][..],
        &["expand", "--m", "25"],
        &["bec-scan", "--n", "10", "--m", "11"],
        &["bec-scan", "--tol", "0"],
        &["lhv-check", "--tol", "1e-3"],
    ] {
        let out = bosonic_bell(args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}
