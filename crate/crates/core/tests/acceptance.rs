//! Acceptance suite: every checked-in config under `configs/acceptance`, run
//! through the `tubelab` binary, one PASS/FAIL line per criterion.
//!
//! `cargo test --offline -p tubelab --test acceptance -- --nocapture`

use std::path::PathBuf;
use std::process::Command;

use tubelab::cli::{from_json, Report, Verdict};

struct Criterion {
    id: u32,
    title: &'static str,
    configs: &'static [&'static str],
    /// `(quantity prefix, minimum number of rows)`.
    required: &'static [(&'static str, usize)],
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        title: "harmonic tube formula, R3 S3 H3 DR(2,1) DR(4,3), rel 1e-4",
        configs: &["c01_harmonic_tube.json"],
        required: &[("tube_volume", 15)],
    },
    Criterion {
        id: 2,
        title: "S2xR tube volumes differ by > 10x combined error",
        configs: &["c02_s2xr_tube_failure.json"],
        required: &[("tube_volume[", 2), ("tube_volume_spread", 1)],
    },
    Criterion {
        id: 3,
        title: "involution symmetry on ellipsoid and S2xR, 1e-7",
        configs: &["c03_involution.json"],
        required: &[("involution_defect_max", 2)],
    },
    Criterion {
        id: 4,
        title: "mean curvature trace vs radial formula, 1e-5",
        configs: &["c04_mean_curvature.json"],
        required: &[("h_radial", 13 * 8), ("mean_curvature_defect_max", 13)],
    },
    Criterion {
        id: 5,
        title: "cosine transform of 1, odd and even functions, 1e-10",
        configs: &["c05_cosine.json"],
        required: &[("cosine[one]", 3), ("cosine[odd-", 9), ("hemisphere[", 6)],
    },
    Criterion {
        id: 6,
        title: "Stiefel-Fubini, constant 1e-10 and non-symmetric 1e-8",
        configs: &["c06_stiefel_fubini.json"],
        required: &[
            ("fubini_lhs[one]", 1),
            ("fubini_rhs[one]", 1),
            ("fubini[", 2),
        ],
    },
    Criterion {
        id: 7,
        title: "half-ball sum, homogeneity and first-integral defects",
        configs: &["c07_datri.json"],
        required: &[
            ("half_ball_sum_defect", 3),
            ("half_ball_defect", 3),
            ("first_integral_defect", 3),
        ],
    },
    Criterion {
        id: 8,
        title: "series a0 a1 a2 a4, harmonic_up_to(6) and its failures",
        configs: &[
            "c08a_series_fit.json",
            "c08b_harmonicity.json",
            "c08c_ellipsoid_harmonicity.json",
        ],
        required: &[
            ("a0", 9),
            ("a1", 9),
            ("a2", 9),
            ("a4", 1),
            ("harmonic_up_to", 7),
        ],
    },
    Criterion {
        id: 9,
        title: "H3 tube invariants rel 1e-3, R5 C = 12 pi^2 r l rel 1e-4",
        configs: &["c09_closed_forms.json"],
        required: &[
            ("area", 2),
            ("total_mean_curvature", 2),
            ("total_scalar_curvature", 2),
            ("gv_expansion", 1),
        ],
    },
    Criterion {
        id: 10,
        title: "Steiner coefficients vs finite differences, fourth-order residual",
        configs: &["c10_steiner.json"],
        required: &[("steiner_coefficient", 6), ("residual_ratio", 2)],
    },
];

fn config_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/acceptance")
}

struct RunResult {
    status: i32,
    stdout: Vec<u8>,
    stderr: String,
}

fn run_config(name: &str) -> RunResult {
    let out = Command::new(env!("CARGO_BIN_EXE_tubelab"))
        .arg("run")
        .arg(config_dir().join(name))
        .args(["--format", "json"])
        .output()
        .expect("spawn tubelab");
    RunResult {
        status: out.status.code().unwrap_or(-1),
        stdout: out.stdout,
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// Rows tagged in `expect_fail` must show up as expected failures, not silently pass.
fn expected_failures_seen(report: &Report) -> Result<(), String> {
    let tags = report
        .meta
        .config
        .get("expect_fail")
        .and_then(|v| v.as_array())
        .cloned()
        .unwrap_or_default();
    for tag in tags.iter().filter_map(|t| t.as_str()) {
        let (space, quantity) = tag
            .rsplit_once(':')
            .map_or((None, tag), |(s, q)| (Some(s), q));
        let hit = report.rows.iter().any(|r| {
            r.pass == Verdict::ExpectedFail
                && r.quantity.starts_with(quantity)
                && space.is_none_or(|s| r.space == s)
        });
        if !hit {
            return Err(format!("`{tag}` did not fail"));
        }
    }
    Ok(())
}

fn check(c: &Criterion, outputs: &mut Vec<(String, Vec<u8>)>) -> Result<String, String> {
    let mut rows = Vec::new();
    for &name in c.configs {
        let res = run_config(name);
        if res.status != 0 {
            let bad = from_json(&String::from_utf8_lossy(&res.stdout))
                .map(|r| {
                    r.rows
                        .iter()
                        .filter(|row| row.pass == Verdict::Fail)
                        .map(|row| format!("{} {} = {:e}", row.space, row.quantity, row.value))
                        .collect::<Vec<_>>()
                        .join("; ")
                })
                .unwrap_or_else(|_| res.stderr.trim().to_owned());
            return Err(format!("{name}: exit {}: {bad}", res.status));
        }
        let report =
            from_json(&String::from_utf8_lossy(&res.stdout)).map_err(|e| format!("{name}: {e}"))?;
        expected_failures_seen(&report).map_err(|e| format!("{name}: {e}"))?;
        rows.extend(report.rows);
        outputs.push((name.to_owned(), res.stdout));
    }
    for &(prefix, min) in c.required {
        let n = rows
            .iter()
            .filter(|r| r.quantity.starts_with(prefix))
            .count();
        if n < min {
            return Err(format!("{n} `{prefix}` rows, expected at least {min}"));
        }
    }
    let xf = rows
        .iter()
        .filter(|r| r.pass == Verdict::ExpectedFail)
        .count();
    Ok(format!("{} rows, {xf} expected failures", rows.len()))
}

#[test]
fn acceptance() {
    let mut outputs = Vec::new();
    let mut failed = Vec::new();
    for c in CRITERIA {
        match check(c, &mut outputs) {
            Ok(note) => println!("PASS  {:>2}  {}  ({note})", c.id, c.title),
            Err(e) => {
                println!("FAIL  {:>2}  {}  ({e})", c.id, c.title);
                failed.push(c.id);
            }
        }
    }

    let drift: Vec<_> = outputs
        .iter()
        .filter(|(name, first)| run_config(name).stdout != *first)
        .map(|(n, _)| n.clone())
        .collect();
    if drift.is_empty() && !outputs.is_empty() {
        println!(
            "PASS  11  determinism, byte-identical reruns  ({} configs)",
            outputs.len()
        );
    } else {
        println!(
            "FAIL  11  determinism, byte-identical reruns  (differs: {})",
            drift.join(", ")
        );
        failed.push(11);
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
