use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use super::{AccessPolicy, Article, Catalog, Journal, Organization, Person, Upsert};
use crate::amsbib::{Origin, RawReference};
use crate::citegraph::{Change, CitegraphError, CitingDocument, ExternalDocument, ReferenceDb, Resolution};
use crate::ids::{ArticleId, ReferenceId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_id: Option<ReferenceId>,
    pub source: String,
    /// An article id, or the id of a document outside the catalog.
    pub citing: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cited_year_hint: Option<i32>,
    #[serde(default)]
    pub origin: Origin,
    /// Year and venue flag of an external citing document.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citing_year: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citing_isi_indexed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<Resolution>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionLinkRecord {
    pub a: ArticleId,
    pub b: ArticleId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum IngestRecord {
    Journal(Journal),
    Article(Article),
    Person(Person),
    Organization(Organization),
    Reference(ReferenceRecord),
    VersionLink(VersionLinkRecord),
    AccessPolicy(AccessPolicy),
}

impl IngestRecord {
    /// Records are applied in this order so that references resolve.
    fn phase(&self) -> u8 {
        match self {
            Self::Organization(_) => 0,
            Self::Person(_) => 1,
            Self::Journal(_) => 2,
            Self::AccessPolicy(_) => 3,
            Self::Article(_) => 4,
            Self::VersionLink(_) => 5,
            Self::Reference(_) => 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub created: usize,
    pub updated: usize,
    pub unchanged: usize,
    pub rejected: usize,
    pub rejections: Vec<Rejection>,
}

impl IngestReport {
    fn count(&mut self, u: Upsert) {
        match u {
            Upsert::Created => self.created += 1,
            Upsert::Updated => self.updated += 1,
            Upsert::Unchanged => self.unchanged += 1,
        }
    }

    fn reject(&mut self, index: usize, reason: String) {
        self.rejected += 1;
        self.rejections.push(Rejection { index, reason });
    }
}

impl From<Change> for Upsert {
    fn from(c: Change) -> Self {
        match c {
            Change::Created => Upsert::Created,
            Change::Updated => Upsert::Updated,
            Change::Unchanged => Upsert::Unchanged,
        }
    }
}

fn apply_reference(
    catalog: &Catalog,
    refs: &mut ReferenceDb,
    r: ReferenceRecord,
) -> Result<Upsert, CitegraphError> {
    let raw = RawReference::new(r.source, r.origin)?;
    let citing = if catalog.article(&ArticleId(r.citing.clone())).is_ok() {
        CitingDocument::Article(ArticleId(r.citing))
    } else {
        let doc = match (r.citing_year, refs.external(&r.citing)) {
            (Some(year), old) => ExternalDocument {
                document_id: r.citing.clone(),
                year,
                isi_indexed: r
                    .citing_isi_indexed
                    .or(old.map(|o| o.isi_indexed))
                    .unwrap_or(false),
            },
            (None, Some(old)) => old.clone(),
            (None, None) => return Err(CitegraphError::UnknownCitingDocument(r.citing)),
        };
        let doc_change = refs.upsert_external(doc);
        let citing = CitingDocument::External(r.citing);
        let (_, change) = refs.add_reference(catalog, r.reference_id, citing, raw, r.cited_year_hint, r.resolution)?;
        return Ok(if change == Change::Unchanged && doc_change != Change::Unchanged {
            Upsert::Updated
        } else {
            change.into()
        });
    };
    let (_, change) = refs.add_reference(catalog, r.reference_id, citing, raw, r.cited_year_hint, r.resolution)?;
    Ok(change.into())
}

/// Upserts each record on its own; invalid records are rejected and
/// reported without affecting the others. Re-ingesting the same records
/// changes nothing.
pub fn ingest(
    catalog: &mut Catalog,
    refs: &mut ReferenceDb,
    records: Vec<(usize, IngestRecord)>,
    today: NaiveDate,
) -> IngestReport {
    let mut report = IngestReport::default();
    let mut records = records;
    records.sort_by_key(|(i, r)| (r.phase(), *i));
    let current_year = today.year();
    let mut links_changed = false;
    for (index, record) in records {
        let outcome: Result<Upsert, String> = match record {
            IngestRecord::Organization(o) => catalog.upsert_organization(o).map_err(|e| e.to_string()),
            IngestRecord::Person(p) => catalog.upsert_person(p).map_err(|e| e.to_string()),
            IngestRecord::Journal(j) => catalog.upsert_journal(j).map_err(|e| e.to_string()),
            IngestRecord::AccessPolicy(p) => catalog.set_policy(p).map_err(|e| e.to_string()),
            IngestRecord::Article(a) => catalog.upsert_article(a, current_year).map_err(|e| e.to_string()),
            IngestRecord::VersionLink(l) => {
                let together = catalog.cluster_of(&l.a).is_ok_and(|c| c.members.contains(&l.b));
                match catalog.link_versions(&l.a, &l.b) {
                    Ok(_) if together => Ok(Upsert::Unchanged),
                    Ok(_) => Ok(Upsert::Updated),
                    Err(e) => Err(e.to_string()),
                }
            }
            IngestRecord::Reference(r) => apply_reference(catalog, refs, r).map_err(|e| e.to_string()),
        };
        match outcome {
            Ok(u) => {
                links_changed |= u != Upsert::Unchanged;
                report.count(u);
            }
            Err(reason) => report.reject(index, reason),
        }
    }
    if links_changed {
        refs.build_forward_links();
    }
    report.rejections.sort_by_key(|r| r.index);
    report
}

/// Parses newline-delimited JSON records. Lines that do not parse are
/// rejected as malformed; blank lines are skipped but keep their index.
pub fn ingest_ndjson(catalog: &mut Catalog, refs: &mut ReferenceDb, input: &str, today: NaiveDate) -> IngestReport {
    let mut records = Vec::new();
    let mut malformed = Vec::new();
    for (i, line) in input.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<IngestRecord>(line) {
            Ok(r) => records.push((i, r)),
            Err(e) => malformed.push(Rejection {
                index: i,
                reason: format!("malformed record: {e}"),
            }),
        }
    }
    let mut report = ingest(catalog, refs, records, today);
    report.rejected += malformed.len();
    report.rejections.extend(malformed);
    report.rejections.sort_by_key(|r| r.index);
    report
}

fn type_name(r: &IngestRecord) -> &'static str {
    match r {
        IngestRecord::Journal(_) => "journal",
        IngestRecord::Article(_) => "article",
        IngestRecord::Person(_) => "person",
        IngestRecord::Organization(_) => "organization",
        IngestRecord::Reference(_) => "reference",
        IngestRecord::VersionLink(_) => "version_link",
        IngestRecord::AccessPolicy(_) => "access_policy",
    }
}

fn record_id(r: &IngestRecord) -> String {
    match r {
        IngestRecord::Journal(j) => j.journal_id.to_string(),
        IngestRecord::Article(a) => a.article_id.to_string(),
        IngestRecord::Person(p) => p.person_id.to_string(),
        IngestRecord::Organization(o) => o.organization_id.to_string(),
        IngestRecord::Reference(r) => r.reference_id.as_ref().map(|r| r.to_string()).unwrap_or_default(),
        IngestRecord::VersionLink(l) => format!("{}\u{0}{}", l.a, l.b),
        IngestRecord::AccessPolicy(p) => p.journal_id.to_string(),
    }
}

/// Canonical export: one record per line, sorted by (type, id). Ingesting
/// the export into an empty store reproduces the same export.
pub fn export(catalog: &Catalog, refs: &ReferenceDb) -> String {
    let mut records: Vec<IngestRecord> = Vec::new();
    records.extend(catalog.organizations().cloned().map(IngestRecord::Organization));
    records.extend(catalog.persons().cloned().map(IngestRecord::Person));
    records.extend(catalog.journals().cloned().map(IngestRecord::Journal));
    records.extend(catalog.policies().cloned().map(IngestRecord::AccessPolicy));
    records.extend(catalog.articles().cloned().map(IngestRecord::Article));
    for cluster in catalog.clusters() {
        let mut members = cluster.members.iter();
        let first = members.next().expect("cluster has members");
        for other in members {
            records.push(IngestRecord::VersionLink(VersionLinkRecord {
                a: first.clone(),
                b: other.clone(),
            }));
        }
    }
    for r in refs.references() {
        let (citing_year, citing_isi_indexed) = match &r.citing {
            CitingDocument::Article(_) => (None, None),
            CitingDocument::External(e) => {
                let d = refs.external(e).expect("external citing documents are registered");
                (Some(d.year), Some(d.isi_indexed))
            }
        };
        records.push(IngestRecord::Reference(ReferenceRecord {
            reference_id: Some(r.reference_id.clone()),
            source: r.raw.source.clone(),
            citing: r.citing.id().to_string(),
            cited_year_hint: r.cited_year_hint,
            origin: r.raw.origin,
            citing_year,
            citing_isi_indexed,
            resolution: Some(r.resolution.clone()),
        }));
    }
    records.sort_by_cached_key(|r| (type_name(r), record_id(r)));
    let mut out = String::new();
    for r in &records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}
