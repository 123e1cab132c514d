//! Citation counts and impact factors in integral and version-restricted
//! modes, and the journal comparison report.

mod report;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::archive::{ArchiveError, Article, Catalog, Language};
use crate::citegraph::{CitingDocument, ReferenceDb};
use crate::ids::{ClusterId, JournalId};

pub use report::{comparison_report, ReportRow, Table, DASH};

pub const HORIZONS: [u32; 3] = [1, 2, 5];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Archive(#[from] ArchiveError),
    #[error("invalid metrics query: {0}")]
    InvalidQuery(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Citations to any language version from any source.
    Integral,
    /// Only English versions cited from ISI-indexed venues.
    Restricted,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "integral" => Ok(Self::Integral),
            "restricted" => Ok(Self::Restricted),
            other => Err(format!("unknown mode `{other}` (expected integral or restricted)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Integral => "integral",
            Self::Restricted => "restricted",
        })
    }
}

/// Publication years `[from, to]`, both inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub from: i32,
    pub to: i32,
}

impl Window {
    /// The `n` years before `year`.
    pub fn before(year: i32, n: u32) -> Self {
        Self {
            from: year - n as i32,
            to: year - 1,
        }
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.from..=self.to).contains(&year)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsQuery {
    pub journal_id: JournalId,
    pub year: i32,
    pub horizon: u32,
    pub mode: Mode,
}

impl MetricsQuery {
    pub fn validate(&self) -> Result<(), MetricsError> {
        if self.year <= 1800 {
            return Err(MetricsError::InvalidQuery(format!("year {} is not after 1800", self.year)));
        }
        if !HORIZONS.contains(&self.horizon) {
            return Err(MetricsError::InvalidQuery(format!("horizon {} is not 1, 2 or 5", self.horizon)));
        }
        Ok(())
    }

    pub fn window(&self) -> Window {
        Window::before(self.year, self.horizon)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactFactorResult {
    pub citations: u64,
    pub citable_items: u64,
    /// C/P as a float, absent when P = 0.
    pub value: Option<f64>,
    /// C/P to three decimals, half away from zero.
    pub rounded: Option<String>,
}

impl ImpactFactorResult {
    pub fn new(citations: u64, citable_items: u64) -> Self {
        let ratio = (citable_items > 0).then(|| Ratio::new(citations, citable_items));
        Self {
            citations,
            citable_items,
            value: ratio.map(|_| citations as f64 / citable_items as f64),
            rounded: ratio.map(round3),
        }
    }

    pub fn ratio(&self) -> Option<Ratio<u64>> {
        (self.citable_items > 0).then(|| Ratio::new(self.citations, self.citable_items))
    }
}

/// Rounds a non-negative ratio to three decimals, half away from zero.
pub fn round3(r: Ratio<u64>) -> String {
    let (n, d) = (u128::from(*r.numer()), u128::from(*r.denom()));
    let thousandths = (2 * 1000 * n + d) / (2 * d);
    format!("{}.{:03}", thousandths / 1000, thousandths % 1000)
}

fn in_window<'a>(catalog: &'a Catalog, journal: &JournalId, window: Window) -> impl Iterator<Item = &'a Article> {
    let journal = journal.clone();
    catalog
        .articles()
        .filter(move |a| a.journal_id == journal && window.contains(a.year))
}

/// Integral: clusters with a citable member in the journal and window.
/// Restricted: English-language articles in the journal and window.
pub fn citable_items(catalog: &Catalog, journal: &JournalId, window: Window, mode: Mode) -> Result<u64, MetricsError> {
    catalog.journal(journal)?;
    Ok(match mode {
        Mode::Integral => {
            let clusters: BTreeSet<&ClusterId> = in_window(catalog, journal, window)
                .filter(|a| a.citable)
                .map(|a| &catalog.cluster_of(&a.article_id).expect("indexed").cluster_id)
                .collect();
            clusters.len() as u64
        }
        Mode::Restricted => in_window(catalog, journal, window)
            .filter(|a| a.language == Language::En)
            .count() as u64,
    })
}

/// Distinct (citing document, cited cluster) pairs with citing year `year`.
/// Restricted mode keeps only links into English versions in the window
/// from ISI-indexed venues.
pub fn citation_count(
    catalog: &Catalog,
    refs: &ReferenceDb,
    journal: &JournalId,
    window: Window,
    year: i32,
    mode: Mode,
) -> Result<u64, MetricsError> {
    catalog.journal(journal)?;
    let cites_in_year = |c: &CitingDocument| -> Option<bool> {
        let (y, isi) = refs.citing_info(catalog, c)?;
        (y == year).then_some(isi)
    };
    let mut total = 0u64;
    match mode {
        Mode::Integral => {
            let clusters: BTreeSet<&ClusterId> = in_window(catalog, journal, window)
                .map(|a| &catalog.cluster_of(&a.article_id).expect("indexed").cluster_id)
                .collect();
            for cl in clusters {
                let members = &catalog.cluster(cl)?.members;
                let citers: BTreeSet<&CitingDocument> = members
                    .iter()
                    .flat_map(|m| refs.citers_of(m))
                    .filter(|c| cites_in_year(c).is_some())
                    .collect();
                total += citers.len() as u64;
            }
        }
        Mode::Restricted => {
            for a in in_window(catalog, journal, window).filter(|a| a.language == Language::En) {
                total += refs
                    .citers_of(&a.article_id)
                    .filter(|c| cites_in_year(c) == Some(true))
                    .count() as u64;
            }
        }
    }
    Ok(total)
}

pub fn impact_factor(catalog: &Catalog, refs: &ReferenceDb, q: &MetricsQuery) -> Result<ImpactFactorResult, MetricsError> {
    q.validate()?;
    let w = q.window();
    let c = citation_count(catalog, refs, &q.journal_id, w, q.year, q.mode)?;
    let p = citable_items(catalog, &q.journal_id, w, q.mode)?;
    Ok(ImpactFactorResult::new(c, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amsbib::{Origin, RawReference};
    use crate::archive::tests::{article, journal, person};
    use crate::citegraph::ExternalDocument;

    #[test]
    fn rounding_half_away_from_zero() {
        assert_eq!(round3(Ratio::new(130, 160)), "0.813");
        assert_eq!(round3(Ratio::new(85, 150)), "0.567");
        assert_eq!(round3(Ratio::new(1, 2000)), "0.001");
        assert_eq!(round3(Ratio::new(1, 2001)), "0.000");
        assert_eq!(round3(Ratio::new(7, 2)), "3.500");
        assert_eq!(round3(Ratio::new(0, 5)), "0.000");
    }

    #[test]
    fn query_validation() {
        let q = |year, horizon| MetricsQuery {
            journal_id: "j".into(),
            year,
            horizon,
            mode: Mode::Integral,
        };
        assert!(q(2011, 3).validate().is_err());
        assert!(q(1800, 2).validate().is_err());
        assert!(q(2011, 5).validate().is_ok());
        assert_eq!(q(2011, 2).window(), Window { from: 2009, to: 2010 });
    }

    fn store() -> (Catalog, ReferenceDb) {
        let mut c = Catalog::new();
        c.upsert_person(person("p1", "A", "A.")).unwrap();
        c.upsert_journal(journal("j")).unwrap();
        let mut isi = journal("isi");
        isi.isi_indexed = true;
        c.upsert_journal(isi).unwrap();
        c.upsert_article(article("ru", "j", 2010, Language::Ru), 2026).unwrap();
        c.upsert_article(article("en", "j", 2010, Language::En), 2026).unwrap();
        c.upsert_article(article("solo", "j", 2009, Language::Ru), 2026).unwrap();
        c.upsert_article(article("citer", "isi", 2011, Language::En), 2026).unwrap();
        c.link_versions(&"ru".into(), &"en".into()).unwrap();
        let mut db = ReferenceDb::new();
        db.upsert_external(ExternalDocument {
            document_id: "proc".into(),
            year: 2011,
            isi_indexed: false,
        });
        (c, db)
    }

    fn cite(c: &Catalog, db: &mut ReferenceDb, from: CitingDocument, to: &str, tag: &str) {
        let raw = RawReference::new(format!("\\paper {tag} \\yr 2010"), Origin::JournalBibliography).unwrap();
        let (id, _) = db.add_reference(c, None, from, raw, None, None).unwrap();
        db.commit_resolution(c, &id, Some(&to.into()), &[]).unwrap();
    }

    #[test]
    fn both_versions_count_once() {
        let (c, mut db) = store();
        let w = Window::before(2011, 2);
        let j: JournalId = "j".into();
        assert_eq!(citable_items(&c, &j, w, Mode::Integral), Ok(2));
        assert_eq!(citable_items(&c, &j, w, Mode::Restricted), Ok(1));
        assert_eq!(citation_count(&c, &db, &j, w, 2011, Mode::Integral), Ok(0));

        let citer = CitingDocument::Article("citer".into());
        cite(&c, &mut db, citer.clone(), "ru", "a");
        cite(&c, &mut db, citer, "en", "b");
        assert_eq!(citation_count(&c, &db, &j, w, 2011, Mode::Integral), Ok(1));
        assert_eq!(citation_count(&c, &db, &j, w, 2011, Mode::Restricted), Ok(1));

        cite(&c, &mut db, CitingDocument::External("proc".into()), "en", "c");
        assert_eq!(citation_count(&c, &db, &j, w, 2011, Mode::Integral), Ok(2));
        assert_eq!(citation_count(&c, &db, &j, w, 2011, Mode::Restricted), Ok(1));
        assert_eq!(citation_count(&c, &db, &j, w, 2012, Mode::Integral), Ok(0));

        let r = impact_factor(
            &c,
            &db,
            &MetricsQuery { journal_id: j.clone(), year: 2011, horizon: 2, mode: Mode::Integral },
        )
        .unwrap();
        assert_eq!((r.citations, r.citable_items, r.rounded.as_deref()), (2, 2, Some("1.000")));
    }

    #[test]
    fn empty_window_is_undefined() {
        let (c, db) = store();
        let r = impact_factor(
            &c,
            &db,
            &MetricsQuery { journal_id: "j".into(), year: 1990, horizon: 1, mode: Mode::Integral },
        )
        .unwrap();
        assert_eq!((r.citable_items, r.value, r.rounded), (0, None, None));
        assert!(matches!(
            citable_items(&c, &"zz".into(), Window::before(2011, 1), Mode::Integral),
            Err(MetricsError::Archive(ArchiveError::UnknownJournal(_)))
        ));
    }

    #[test]
    fn russian_only_article() {
        let (c, _) = store();
        let w = Window { from: 2009, to: 2009 };
        assert_eq!(citable_items(&c, &"j".into(), w, Mode::Integral), Ok(1));
        assert_eq!(citable_items(&c, &"j".into(), w, Mode::Restricted), Ok(0));
    }
}
