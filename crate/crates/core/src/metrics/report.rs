use serde::{Deserialize, Serialize};

use super::{impact_factor, ImpactFactorResult, MetricsQuery, Mode};
use crate::archive::Catalog;
use crate::citegraph::ReferenceDb;
use crate::ids::JournalId;

pub const DASH: &str = "--";
pub const HEADER: [&str; 5] = [
    "journal",
    "integral_citations",
    "integral_if",
    "restricted_citations",
    "restricted_if",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub journal_id: JournalId,
    pub journal: String,
    pub integral: Option<ImpactFactorResult>,
    /// Absent when the journal has no English versions in the window.
    pub restricted: Option<ImpactFactorResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ReportRow {
    pub fn cells(&self) -> [String; 5] {
        if let Some(e) = &self.error {
            return [
                self.journal.clone(),
                format!("error: {e}"),
                DASH.into(),
                DASH.into(),
                DASH.into(),
            ];
        }
        let pair = |r: &Option<ImpactFactorResult>| match r {
            Some(r) => (
                r.citations.to_string(),
                r.rounded.clone().unwrap_or_else(|| DASH.into()),
            ),
            None => (DASH.into(), DASH.into()),
        };
        let (ic, iif) = pair(&self.integral);
        let (rc, rif) = pair(&self.restricted);
        [self.journal.clone(), ic, iif, rc, rif]
    }
}

/// Rows in input order. Unknown journals produce an error row.
pub fn comparison_report(catalog: &Catalog, refs: &ReferenceDb, journals: &[JournalId], year: i32, horizon: u32) -> Table {
    let rows = journals
        .iter()
        .map(|j| {
            let query = |mode| MetricsQuery {
                journal_id: j.clone(),
                year,
                horizon,
                mode,
            };
            let integral = impact_factor(catalog, refs, &query(Mode::Integral));
            let restricted = impact_factor(catalog, refs, &query(Mode::Restricted));
            match (integral, restricted) {
                (Ok(i), Ok(r)) => ReportRow {
                    journal_id: j.clone(),
                    journal: catalog.journal(j).map(|x| x.title.clone()).unwrap_or_default(),
                    integral: Some(i),
                    restricted: (r.citable_items > 0).then_some(r),
                    error: None,
                },
                (Err(e), _) | (_, Err(e)) => ReportRow {
                    journal_id: j.clone(),
                    journal: j.to_string(),
                    integral: None,
                    restricted: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Table { rows }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub rows: Vec<ReportRow>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(HEADER).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.cells()).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    /// Plain-text table; numbers right-aligned, journal names left-aligned.
    pub fn to_text(&self) -> String {
        let rows: Vec<[String; 5]> = std::iter::once(HEADER.map(String::from))
            .chain(self.rows.iter().map(ReportRow::cells))
            .collect();
        let mut widths = [0usize; 5];
        for r in &rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        for r in &rows {
            let mut line = format!("{:<w$}", r[0], w = widths[0]);
            for (c, w) in r.iter().zip(widths).skip(1) {
                line.push_str(&format!("  {c:>w$}"));
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}
