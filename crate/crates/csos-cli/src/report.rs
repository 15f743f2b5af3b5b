//! Run report: JSON document, degeneracy CSV and the stdout table.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::ExperimentConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Flagged,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Residual { residual: f64, scale: f64, tol: f64, vacuous: bool },
    Cluster(LedgerRow),
    Note { text: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub id: String,
    pub anchor: String,
    pub parameters: String,
    #[serde(flatten)]
    pub outcome: Outcome,
    pub status: Status,
    pub wall_time_ms: f64,
}

/// One row of the degeneracy ledger.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerRow {
    #[serde(rename = "Q")]
    pub q: usize,
    pub charge: usize,
    pub cluster: usize,
    #[serde(rename = "R")]
    pub r: Option<usize>,
    #[serde(rename = "Pa")]
    pub pa: Option<usize>,
    #[serde(rename = "Pb")]
    pub pb: Option<usize>,
    #[serde(rename = "m_E")]
    pub m_e: Option<i64>,
    pub multiplicity: usize,
    pub verdict: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub entries: Vec<Entry>,
    pub error: Option<String>,
    pub wall_time_ms: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub flagged: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub suites: Vec<SuiteReport>,
    pub degeneracy: Vec<LedgerRow>,
    pub summary: Summary,
}

impl RunReport {
    pub fn new(config: ExperimentConfig, suites: Vec<SuiteReport>) -> Self {
        let mut summary = Summary::default();
        let mut degeneracy = Vec::new();
        for s in &suites {
            if s.error.is_some() {
                summary.fail += 1;
            }
            for e in &s.entries {
                match e.status {
                    Status::Pass => summary.pass += 1,
                    Status::Fail => summary.fail += 1,
                    Status::Flagged => summary.flagged += 1,
                }
                if let (Outcome::Cluster(row), "degeneracy") = (&e.outcome, s.suite.as_str()) {
                    degeneracy.push(row.clone());
                }
            }
        }
        RunReport { schema_version: SCHEMA_VERSION, config, suites, degeneracy, summary }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_files(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut f = std::fs::File::create(dir.join("report.json"))?;
        f.write_all(self.to_json().as_bytes())?;
        f.write_all(b"\n")?;
        let mut w = csv::Writer::from_path(dir.join("degeneracy.csv"))?;
        w.write_record(["Q", "charge", "cluster", "R", "Pa", "Pb", "m_E", "multiplicity", "verdict"])?;
        let opt = |v: Option<String>| v.unwrap_or_default();
        for r in &self.degeneracy {
            w.write_record([
                r.q.to_string(),
                r.charge.to_string(),
                r.cluster.to_string(),
                opt(r.r.map(|x| x.to_string())),
                opt(r.pa.map(|x| x.to_string())),
                opt(r.pb.map(|x| x.to_string())),
                opt(r.m_e.map(|x| x.to_string())),
                r.multiplicity.to_string(),
                r.verdict.clone(),
            ])?;
        }
        w.flush()
    }

    /// Human-readable table: one line per suite, then every failing or flagged entry.
    pub fn table(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("{:<12} {:>6} {:>6} {:>8} {:>10}\n", "suite", "pass", "fail", "flagged", "ms"));
        for r in &self.suites {
            let c = |st| r.entries.iter().filter(|e| e.status == st).count();
            s.push_str(&format!(
                "{:<12} {:>6} {:>6} {:>8} {:>10.0}\n",
                r.suite,
                c(Status::Pass),
                c(Status::Fail) + usize::from(r.error.is_some()),
                c(Status::Flagged),
                r.wall_time_ms
            ));
        }
        for r in &self.suites {
            if let Some(e) = &r.error {
                s.push_str(&format!("ERROR  {}: {e}\n", r.suite));
            }
            for e in r.entries.iter().filter(|e| e.status != Status::Pass) {
                let tag = if e.status == Status::Fail { "FAIL " } else { "FLAG " };
                let detail = match &e.outcome {
                    Outcome::Residual { residual, tol, .. } => format!("residual {residual:.2e} (tol {tol:.0e})"),
                    Outcome::Cluster(row) => format!(
                        "R={:?} m_E={:?} multiplicity={} {}",
                        row.r, row.m_e, row.multiplicity, row.verdict
                    ),
                    Outcome::Note { text } => text.clone(),
                };
                s.push_str(&format!("{tag} {}: {} [{}] {detail}\n", r.suite, e.id, e.parameters));
            }
        }
        let m = &self.summary;
        s.push_str(&format!("total: {} pass, {} fail, {} flagged\n", m.pass, m.fail, m.flagged));
        s
    }
}

/// The JSON report with every `wall_time_ms` removed.
pub fn strip_timing(json: &str) -> String {
    fn walk(v: &mut serde_json::Value) {
        match v {
            serde_json::Value::Object(m) => {
                m.remove("wall_time_ms");
                m.values_mut().for_each(walk);
            }
            serde_json::Value::Array(a) => a.iter_mut().for_each(walk),
            _ => {}
        }
    }
    let mut v: serde_json::Value = serde_json::from_str(json).expect("valid json");
    walk(&mut v);
    serde_json::to_string_pretty(&v).expect("serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_timing_removes_nested_keys() {
        let s = strip_timing(r#"{"a":1,"wall_time_ms":3.5,"b":[{"wall_time_ms":1,"c":2}]}"#);
        assert!(!s.contains("wall_time_ms"));
        assert!(s.contains("\"c\": 2"));
    }

    #[test]
    fn entry_fields_flatten() {
        let e = Entry {
            id: "bethe cluster 0".into(),
            anchor: "bethe".into(),
            parameters: "N=3".into(),
            outcome: Outcome::Residual { residual: 1e-15, scale: 1.0, tol: 1e-7, vacuous: false },
            status: Status::Pass,
            wall_time_ms: 0.0,
        };
        let v: serde_json::Value = serde_json::to_value(&e).unwrap();
        assert_eq!(v["kind"], "residual");
        assert_eq!(v["status"], "pass");
        assert_eq!(v["anchor"], "bethe");
    }
}
