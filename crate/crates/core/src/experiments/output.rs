//! Result rows and their CSV / JSON rendering.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// The rule a row's estimate is judged by. Bounds live in the row itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    /// `|estimate - oracle| <= tolerance`
    Within,
    /// `estimate < upper`
    Below,
    /// `estimate > lower`
    Above,
    /// `lower <= estimate <= upper`
    Band,
    /// Reported only.
    Info,
}

impl Check {
    pub fn as_str(self) -> &'static str {
        match self {
            Check::Within => "within",
            Check::Below => "below",
            Check::Above => "above",
            Check::Band => "band",
            Check::Info => "info",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub row: usize,
    /// `key=value` pairs joined by `;`.
    pub params: String,
    pub estimate: f64,
    pub stderr: Option<f64>,
    pub oracle: Option<f64>,
    pub tolerance: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub check: Check,
    pub pass: Option<bool>,
    pub wall_ms: u64,
}

impl ResultRow {
    fn base(params: String, estimate: f64, stderr: Option<f64>, check: Check) -> Self {
        Self {
            experiment: String::new(),
            row: 0,
            params,
            estimate,
            stderr,
            oracle: None,
            tolerance: None,
            lower: None,
            upper: None,
            check,
            pass: None,
            wall_ms: 0,
        }
    }

    pub fn within(params: String, estimate: f64, stderr: Option<f64>, oracle: f64, tolerance: f64) -> Self {
        let mut row = Self::base(params, estimate, stderr, Check::Within);
        row.oracle = Some(oracle);
        row.tolerance = Some(tolerance);
        row.lower = Some(oracle - tolerance);
        row.upper = Some(oracle + tolerance);
        row.pass = Some((estimate - oracle).abs() <= tolerance);
        row
    }

    pub fn below(params: String, estimate: f64, stderr: Option<f64>, upper: f64) -> Self {
        let mut row = Self::base(params, estimate, stderr, Check::Below);
        row.upper = Some(upper);
        row.pass = Some(estimate < upper);
        row
    }

    pub fn above(params: String, estimate: f64, stderr: Option<f64>, lower: f64) -> Self {
        let mut row = Self::base(params, estimate, stderr, Check::Above);
        row.lower = Some(lower);
        row.pass = Some(estimate > lower);
        row
    }

    pub fn band(params: String, estimate: f64, stderr: Option<f64>, lower: f64, upper: f64) -> Self {
        let mut row = Self::base(params, estimate, stderr, Check::Band);
        row.lower = Some(lower);
        row.upper = Some(upper);
        row.pass = Some(lower <= estimate && estimate <= upper);
        row
    }

    pub fn info(params: String, estimate: f64, stderr: Option<f64>) -> Self {
        Self::base(params, estimate, stderr, Check::Info)
    }

    pub fn with_oracle(mut self, oracle: f64) -> Self {
        self.oracle = Some(oracle);
        self
    }

    pub fn timed(mut self, wall_ms: u64) -> Self {
        self.wall_ms = wall_ms;
        self
    }

    pub fn failed(&self) -> bool {
        self.pass == Some(false)
    }
}

pub const CSV_HEADER: [&str; 12] = [
    "experiment",
    "row",
    "params",
    "estimate",
    "stderr",
    "oracle",
    "tolerance",
    "lower",
    "upper",
    "check",
    "pass",
    "wall_ms",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

/// Writes rows as RFC 4180 CSV with a header line.
pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.experiment.clone(),
            r.row.to_string(),
            r.params.clone(),
            format!("{:?}", r.estimate),
            opt(r.stderr),
            opt(r.oracle),
            opt(r.tolerance),
            opt(r.lower),
            opt(r.upper),
            r.check.as_str().to_string(),
            r.pass.map(|p| p.to_string()).unwrap_or_default(),
            r.wall_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_use_recorded_bounds() {
        assert_eq!(ResultRow::within("a".into(), 1.0, None, 1.5, 0.5).pass, Some(true));
        assert_eq!(ResultRow::within("a".into(), 1.0, None, 1.6, 0.5).pass, Some(false));
        assert_eq!(ResultRow::below("a".into(), 0.02, None, 0.02).pass, Some(false));
        assert_eq!(ResultRow::above("a".into(), 0.3, None, 0.2).pass, Some(true));
        assert_eq!(ResultRow::band("a".into(), 1.5, None, 0.5, 1.5).pass, Some(true));
        assert_eq!(ResultRow::info("a".into(), 1.0, None).pass, None);
    }

    #[test]
    fn csv_quotes_fields() {
        let mut row = ResultRow::within("n=1;label=\"a,b\"".into(), 0.5, Some(0.01), 0.5, 0.03);
        row.experiment = "duality".into();
        let mut buf = Vec::new();
        write_csv(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.split("\r\n");
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "duality,0,\"n=1;label=\"\"a,b\"\"\",0.5,0.01,0.5,0.03,0.47,0.53,within,true,0"
        );
    }
}
