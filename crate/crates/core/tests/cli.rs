use std::process::{Command, Output};

fn tubelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tubelab"))
        .args(args)
        .output()
        .expect("spawn tubelab")
}

fn write_config(name: &str, body: &str) -> String {
    let dir = std::env::temp_dir().join(format!("tubelab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const BALLS: &str = r#"{"space": "r3", "experiment": "ball-volumes", "radii": [0.5, 1.0]}"#;

#[test]
fn csv_to_stdout() {
    let cfg = write_config("balls.json", BALLS);
    let out = tubelab(&["run", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("experiment,space,r,quantity,value,error,reference,pass")
    );
    assert!(lines.all(|l| l.ends_with(",true")));
    assert!(text.contains(",R3,5.0000000000000000e-1,ball_volume,"));
}

#[test]
fn format_and_out_flags() {
    let cfg = write_config("balls-out.json", BALLS);
    let dest = std::env::temp_dir().join(format!("tubelab-cli-{}-out.json", std::process::id()));
    let out = tubelab(&[
        "run",
        &cfg,
        "--format",
        "json",
        "--out",
        dest.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report = tubelab::cli::from_json(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert_eq!(report.meta.timestamp, "1970-01-01T00:00:00Z");
    assert!(!report.rows.is_empty());

    let plot = tubelab(&["run", &cfg, "--format", "plot"]);
    assert!(String::from_utf8(plot.stdout).unwrap().starts_with("# R3 "));
}

#[test]
fn overrides_change_the_run() {
    let cfg = write_config("balls-ovr.json", BALLS);
    let out = tubelab(&[
        "run",
        &cfg,
        "--override",
        "space=h3",
        "--override",
        "radii=[0.25]",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains(",H3,2.5000000000000000e-1,"));
    assert!(!text.contains("R3"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        tubelab(&["run", "/nonexistent/config.json"]).status.code(),
        Some(2)
    );
    assert_eq!(tubelab(&["frobnicate"]).status.code(), Some(2));
    let unknown = write_config(
        "unknown-key.json",
        r#"{"space": "r3", "experiment": "ball-volumes", "radii": [1], "colour": 1}"#,
    );
    assert_eq!(tubelab(&["run", &unknown]).status.code(), Some(2));
    let bad_radii = write_config(
        "bad-radii.json",
        r#"{"space": "r3", "experiment": "ball-volumes", "radii": [0.5, 0.2]}"#,
    );
    assert_eq!(tubelab(&["run", &bad_radii]).status.code(), Some(2));
    let cfg = write_config("balls-bad-ovr.json", BALLS);
    assert_eq!(
        tubelab(&["run", &cfg, "--override", "no-equals-sign"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn failed_checks_exit_1() {
    let cfg = write_config(
        "tight.json",
        r#"{"space": "s2xr", "experiment": "check-harmonic", "order": 2,
            "random_points": 2, "random_directions": 8, "seed": 4}"#,
    );
    let out = tubelab(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .any(|l| l.ends_with(",false")));
}

#[test]
fn conjugate_point_exits_3_with_diagnostic() {
    let cfg = write_config(
        "conjugate.json",
        r#"{"space": "s2polar", "experiment": "density-profile", "radii": [3.3], "directions": [[0.0, 1.0]]}"#,
    );
    let out = tubelab(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("numerical-failure: conjugate point"), "{text}");
}

#[test]
fn leaving_the_chart_exits_3() {
    let cfg = write_config(
        "escape.json",
        r#"{"space": "s3", "experiment": "ball-volumes", "radii": [3.2], "quadrature": {"rule_level": 2}}"#,
    );
    let out = tubelab(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stdout).unwrap().contains("numerical-failure"));
}
