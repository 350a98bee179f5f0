use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "true")]
    Pass,
    #[serde(rename = "false")]
    Fail,
    #[serde(rename = "expected-fail")]
    ExpectedFail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "true",
            Self::Fail => "false",
            Self::ExpectedFail => "expected-fail",
        }
    }

    /// Passing rows and negative controls that failed as intended.
    pub fn is_ok(self) -> bool {
        self != Self::Fail
    }
}

fn ser17<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        RawValue::from_string(format!("{x:.16e}"))
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    } else {
        s.serialize_none()
    }
}

fn ser17_opt<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => ser17(v, s),
        None => s.serialize_none(),
    }
}

fn de_nan<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// One line of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub space: String,
    #[serde(serialize_with = "ser17_opt")]
    pub r: Option<f64>,
    pub quantity: String,
    #[serde(serialize_with = "ser17", deserialize_with = "de_nan")]
    pub value: f64,
    #[serde(serialize_with = "ser17", deserialize_with = "de_nan")]
    pub error: f64,
    #[serde(serialize_with = "ser17_opt")]
    pub reference: Option<f64>,
    pub pass: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub config: Value,
    pub version: String,
    pub timestamp: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub meta: ReportMeta,
    pub rows: Vec<ReportRow>,
}

pub const CSV_HEADER: &str = "experiment,space,r,quantity,value,error,reference,pass";

fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn to_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            field(&r.experiment),
            field(&r.space),
            r.r.map(num).unwrap_or_default(),
            field(&r.quantity),
            num(r.value),
            num(r.error),
            r.reference.map(num).unwrap_or_default(),
            r.pass.as_str()
        );
    }
    out
}

pub fn to_json(report: &Report) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<Report> {
    Ok(serde_json::from_str(text)?)
}

/// `# space quantity` blocks of `r value reference` lines sorted by `r`.
pub fn to_plot(rows: &[ReportRow]) -> String {
    let mut keys: Vec<(String, String)> = Vec::new();
    for r in rows.iter().filter(|r| r.r.is_some()) {
        let k = (r.space.clone(), r.quantity.clone());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let mut out = String::new();
    for (space, quantity) in keys {
        let mut pts: Vec<&ReportRow> = rows
            .iter()
            .filter(|r| r.r.is_some() && r.space == space && r.quantity == quantity)
            .collect();
        pts.sort_by(|a, b| a.r.unwrap_or(0.0).total_cmp(&b.r.unwrap_or(0.0)));
        let _ = writeln!(out, "# {space} {quantity}");
        for p in pts {
            let _ = writeln!(
                out,
                "{} {} {}",
                num(p.r.unwrap_or(f64::NAN)),
                num(p.value),
                p.reference.map_or_else(|| "NaN".into(), num)
            );
        }
        out.push('\n');
    }
    out
}

pub fn emit(report: &Report, format: super::OutputFormat, path: Option<&str>) -> Result<String> {
    if report.rows.is_empty() {
        return Err(Error::Parameter("report has no rows".into()));
    }
    let text = match format {
        super::OutputFormat::Csv => to_csv(&report.rows),
        super::OutputFormat::Json => to_json(report)?,
        super::OutputFormat::Plot => to_plot(&report.rows),
    };
    if let Some(p) = path {
        std::fs::write(p, &text)?;
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(r: Option<f64>, value: f64) -> ReportRow {
        ReportRow {
            experiment: "tube-volume".into(),
            space: "H3".into(),
            r,
            quantity: "tube_volume".into(),
            value,
            error: 1.25e-11,
            reference: Some(std::f64::consts::PI * 0.5f64.sinh().powi(2)),
            pass: Verdict::Pass,
        }
    }

    #[test]
    fn csv_header_and_line() {
        let csv = to_csv(&[row(Some(0.5), 0.853_073_0)]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("tube-volume,H3,5.0000000000000000e-1,tube_volume,"));
        assert!(lines[1].ends_with(",true"));
    }

    #[test]
    fn json_round_trip() {
        let rep = Report {
            meta: ReportMeta {
                config: serde_json::json!({"space": "h3"}),
                version: "0".into(),
                timestamp: "t".into(),
            },
            rows: vec![
                row(Some(0.1 + 0.2), 1.0 / 3.0),
                row(None, -2.0f64.sqrt()),
                ReportRow {
                    pass: Verdict::ExpectedFail,
                    ..row(Some(1e-300), 5e-324)
                },
            ],
        };
        let back = from_json(&to_json(&rep).unwrap()).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn non_finite_values_become_null() {
        let rep = Report {
            meta: ReportMeta {
                config: Value::Null,
                version: "0".into(),
                timestamp: "t".into(),
            },
            rows: vec![row(Some(0.5), f64::NAN)],
        };
        let s = to_json(&rep).unwrap();
        assert!(s.contains("\"value\": null"));
        assert!(from_json(&s).unwrap().rows[0].value.is_nan());
    }

    #[test]
    fn plot_blocks_sorted_by_radius() {
        let p = to_plot(&[row(Some(0.8), 3.0), row(Some(0.2), 1.0), row(None, 9.0)]);
        let lines: Vec<&str> = p.lines().collect();
        assert_eq!(lines[0], "# H3 tube_volume");
        assert!(lines[1].starts_with("2.0000000000000001e-1 "));
        assert!(lines[2].starts_with("8.0000000000000004e-1 "));
        assert_eq!(lines.len(), 4);
    }
}
