//! Verification rows and their JSON, CSV and table renderings.

use std::time::Duration;

use serde::Serialize;

use super::CorrectionMode;

/// One prime of a modularity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationRow {
    pub arrangement: String,
    #[serde(rename = "prime")]
    pub p: u64,
    /// Trace computed from the point count.
    pub lhs: i128,
    /// Trace predicted from newform coefficients.
    pub rhs: i128,
    #[serde(rename = "match")]
    pub matched: bool,
    pub correction_mode: CorrectionMode,
    pub provenance: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Table,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "table" => Ok(ReportFormat::Table),
            _ => Err(format!("unknown format `{s}`")),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn format_rows(rows: &[VerificationRow], format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(rows).expect("rows serialize"),
        ReportFormat::Csv => {
            let mut out = String::from("arrangement,prime,lhs,rhs,match,correction_mode,provenance\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    csv_field(&r.arrangement),
                    r.p,
                    r.lhs,
                    r.rhs,
                    r.matched,
                    r.correction_mode,
                    csv_field(&r.provenance.join("; "))
                ));
            }
            out
        }
        ReportFormat::Table => {
            let mut out = format!(
                "{:<12} {:>5} {:>12} {:>12} {:>6} {:>10} {:>9}\n",
                "arrangement", "p", "lhs", "rhs", "match", "mode", "ms"
            );
            for r in rows {
                out.push_str(&format!(
                    "{:<12} {:>5} {:>12} {:>12} {:>6} {:>10} {:>9.1}\n",
                    r.arrangement,
                    r.p,
                    r.lhs,
                    r.rhs,
                    if r.matched { "yes" } else { "NO" },
                    r.correction_mode.to_string(),
                    r.elapsed.as_secs_f64() * 1e3
                ));
            }
            out
        }
    }
}
