use super::*;

fn run_json(text: &str) -> Outcome {
    run(&ExperimentConfig::from_json(text).unwrap()).unwrap()
}

#[test]
fn h3_tube_volume_row() {
    let out = run_json(
        r#"{"space": "h3", "experiment": "tube-volume", "radii": [0.5], "quadrature": {"tube": {"t_order": 2, "angular_level": 4}}}"#,
    );
    assert_eq!(out.status, EXIT_OK);
    let row = &out.report.rows[0];
    assert_eq!(row.quantity, "tube_volume");
    assert!((row.value / row.reference.unwrap() - 1.0).abs() < 1e-6);
    assert!((row.reference.unwrap() - std::f64::consts::PI * 0.5f64.sinh().powi(2)).abs() < 1e-12);
    assert_eq!(row.pass, Verdict::Pass);
}

#[test]
fn cosine_of_constant_row() {
    let out = run_json(
        r#"{"space": "r3", "experiment": "transform-cosine", "functions": ["one"], "quadrature": {"rule_level": 4}}"#,
    );
    let row = &out.report.rows[0];
    assert!((row.value - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    assert_eq!(row.pass, Verdict::Pass);
    assert_eq!(out.status, EXIT_OK);
}

#[test]
fn negative_control_is_tagged() {
    let base = r#"{"space": "s2xr", "experiment": "check-harmonic", "order": 2, "random_points": 2, "random_directions": 8, "seed": 4"#;
    let marked = run_json(&format!(
        r#"{base}, "expect_fail": ["a2_variation", "harmonic_up_to"]}}"#
    ));
    assert_eq!(marked.status, EXIT_OK);
    let a2 = marked
        .report
        .rows
        .iter()
        .find(|r| r.quantity == "a2_variation")
        .unwrap();
    assert_eq!(a2.pass, Verdict::ExpectedFail);
    let unmarked = run_json(&format!("{base}}}"));
    assert_eq!(unmarked.status, EXIT_CHECK_FAILED);
}

#[test]
fn chart_escape_gives_diagnostic_row() {
    let out = run_json(
        r#"{"space": "s3", "experiment": "ball-volumes", "radii": [3.2], "quadrature": {"rule_level": 2}}"#,
    );
    assert_eq!(out.status, EXIT_NUMERICAL);
    let last = out.report.rows.last().unwrap();
    assert!(last.quantity.starts_with("numerical-failure"));
    assert_eq!(last.pass, Verdict::Fail);
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = r#"{"space": "ellipsoid", "experiment": "density-profile", "radii": [0.2, 0.6], "random_directions": 5, "seed": 9, "directions": [[1.0, 0.5]]}"#;
    let a = run_json(cfg);
    let b = run_json(cfg);
    assert_eq!(to_json(&a.report).unwrap(), to_json(&b.report).unwrap());
    assert_eq!(to_csv(&a.report.rows), to_csv(&b.report.rows));
    assert_eq!(a.status, EXIT_OK);
}
