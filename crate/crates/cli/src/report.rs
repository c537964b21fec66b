//! Per-check records and their CSV / JSON forms.
//!
//! CSV columns, in order: `suite,params,lhs,rhs,margin,tolerance,pass`.
//! JSON is an array of objects with the same fields.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::Format;

/// One checked inequality `lhs <= rhs`; `margin = rhs - lhs` and the check
/// passes iff `margin >= -tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub suite: String,
    pub params: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Record {
    pub fn le(suite: &str, params: String, lhs: f64, rhs: f64, tolerance: f64) -> Record {
        let margin = rhs - lhs;
        Record {
            suite: suite.to_owned(),
            params,
            lhs,
            rhs,
            margin,
            tolerance,
            pass: margin >= -tolerance,
        }
    }

    /// `|a - b| <= tolerance`, stored as `lhs = |a - b|`, `rhs = 0`.
    pub fn close(suite: &str, params: String, a: f64, b: f64, tolerance: f64) -> Record {
        Record::le(suite, params, (a - b).abs(), 0.0, tolerance)
    }

    /// A computation that could not be carried out.
    pub fn failure(suite: &str, params: String, error: &dyn std::fmt::Display) -> Record {
        Record {
            suite: suite.to_owned(),
            params: format!(
                "{params} error={}",
                error.to_string().replace([',', '\n'], ";")
            ),
            lhs: 1.0,
            rhs: 0.0,
            margin: -1.0,
            tolerance: 0.0,
            pass: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    /// Largest `-margin` over all records, or 0 when every margin is
    /// non-negative.
    #[serde(rename = "max-violation")]
    pub max_violation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl ExperimentReport {
    /// Sorts records by suite, then params.
    pub fn from_records(mut records: Vec<Record>) -> Self {
        records.sort_by(|a, b| (&a.suite, &a.params).cmp(&(&b.suite, &b.params)));
        let summary = Summary {
            total: records.len(),
            passed: records.iter().filter(|r| r.pass).count(),
            max_violation: records.iter().map(|r| -r.margin).fold(0.0, f64::max),
        };
        ExperimentReport { records, summary }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.records)?;
                writeln!(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                for r in &self.records {
                    w.serialize(r)?;
                }
                if self.records.is_empty() {
                    w.write_record([
                        "suite",
                        "params",
                        "lhs",
                        "rhs",
                        "margin",
                        "tolerance",
                        "pass",
                    ])?;
                }
                w.flush()
            }
        }
    }

    pub fn to_string(&self, format: Format) -> String {
        let mut buf = Vec::new();
        self.write(format, &mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("reports are UTF-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentReport {
        ExperimentReport::from_records(vec![
            Record::le("b", "n=2".into(), 1.0, 2.0, 0.0),
            Record::le("a", "n=9".into(), 3.0, 2.0, 0.5),
            Record::close("a", "n=1".into(), 1.0, 1.0 + 1e-12, 1e-10),
        ])
    }

    #[test]
    fn records_are_sorted_and_summarized() {
        let r = sample();
        let keys: Vec<_> = r
            .records
            .iter()
            .map(|x| (x.suite.as_str(), x.params.as_str()))
            .collect();
        assert_eq!(keys, [("a", "n=1"), ("a", "n=9"), ("b", "n=2")]);
        assert_eq!(r.summary.total, 3);
        assert_eq!(r.summary.passed, 2);
        assert_eq!(r.summary.max_violation, 1.0);
        assert!(!r.all_pass());
    }

    #[test]
    fn csv_header_is_fixed() {
        let text = sample().to_string(Format::Csv);
        assert_eq!(
            text.lines().next().unwrap(),
            "suite,params,lhs,rhs,margin,tolerance,pass"
        );
        assert_eq!(text.lines().count(), 4);
        let empty = ExperimentReport::from_records(vec![]).to_string(Format::Csv);
        assert_eq!(empty.trim(), "suite,params,lhs,rhs,margin,tolerance,pass");
    }

    #[test]
    fn json_is_a_flat_array() {
        let text = sample().to_string(Format::Json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 3);
        assert!(arr
            .iter()
            .all(|r| r.as_object().unwrap().values().all(|x| !x.is_object())));
    }

    #[test]
    fn failures_never_pass() {
        let r = Record::failure("s", "n=1".into(), &"svd, gave up");
        assert!(!r.pass);
        assert!(!r.params.contains(','));
    }
}
