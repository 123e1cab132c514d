//! The single reference database, reference resolution and the forward-link
//! graph derived from resolved references.

mod resolve;
mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::amsbib::{parse_str, AmsbibError, ParsedReference, RawReference};
use crate::archive::{ArchiveError, Catalog};
use crate::ids::{ArticleId, ClusterId, ReferenceId};

pub use resolve::{Candidate, Method, ResolverIndex, DEFAULT_FUZZY_THRESHOLD};
pub use search::{CitedReferenceQuery, ReferenceSearchIndex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CitegraphError {
    #[error("unknown reference `{0}`")]
    UnknownReference(ReferenceId),
    #[error("unknown citing document `{0}`")]
    UnknownCitingDocument(String),
    #[error(transparent)]
    Archive(#[from] ArchiveError),
    #[error(transparent)]
    Amsbib(#[from] AmsbibError),
    #[error("query has no criteria")]
    EmptyQuery,
    #[error("{0}")]
    Invalid(String),
}

/// The document a reference list belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CitingDocument {
    Article(ArticleId),
    /// Proceedings, electronic publications and personal lists outside the catalog.
    External(String),
}

impl CitingDocument {
    pub fn id(&self) -> &str {
        match self {
            Self::Article(a) => a.as_str(),
            Self::External(e) => e,
        }
    }
}

impl fmt::Display for CitingDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalDocument {
    pub document_id: String,
    pub year: i32,
    pub isi_indexed: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Resolution {
    #[default]
    Unresolved,
    Resolved {
        article_id: ArticleId,
        score: f64,
        method: Method,
    },
}

impl Resolution {
    pub fn target(&self) -> Option<&ArticleId> {
        match self {
            Self::Resolved { article_id, .. } => Some(article_id),
            Self::Unresolved => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredReference {
    pub reference_id: ReferenceId,
    pub citing: CitingDocument,
    pub parsed: ParsedReference,
    pub raw: RawReference,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cited_year_hint: Option<i32>,
    #[serde(default)]
    pub resolution: Resolution,
}

impl StoredReference {
    /// Content-derived id: stable across re-ingestion of the same reference.
    pub fn default_id(citing: &CitingDocument, source: &str) -> ReferenceId {
        let mut h = Sha256::new();
        h.update(citing.id().as_bytes());
        h.update([0]);
        h.update(source.as_bytes());
        let digest = h.finalize();
        let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        ReferenceId(format!("r-{hex}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ForwardLink {
    pub citing: CitingDocument,
    pub cited_article: ArticleId,
    pub citing_year: i32,
}

/// How a reference resolution change affects stored state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Change {
    Created,
    Updated,
    Unchanged,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ReferenceDb {
    references: BTreeMap<ReferenceId, StoredReference>,
    externals: BTreeMap<String, ExternalDocument>,
    /// cited article → citing document → number of resolved references.
    #[serde(skip)]
    links: BTreeMap<ArticleId, BTreeMap<CitingDocument, usize>>,
}

impl ReferenceDb {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reindex(&mut self) {
        self.build_forward_links();
    }

    pub fn reference(&self, id: &ReferenceId) -> Result<&StoredReference, CitegraphError> {
        self.references
            .get(id)
            .ok_or_else(|| CitegraphError::UnknownReference(id.clone()))
    }

    pub fn references(&self) -> impl Iterator<Item = &StoredReference> {
        self.references.values()
    }

    pub fn len(&self) -> usize {
        self.references.len()
    }

    pub fn is_empty(&self) -> bool {
        self.references.is_empty()
    }

    pub fn externals(&self) -> impl Iterator<Item = &ExternalDocument> {
        self.externals.values()
    }

    pub fn external(&self, id: &str) -> Option<&ExternalDocument> {
        self.externals.get(id)
    }

    pub fn upsert_external(&mut self, doc: ExternalDocument) -> Change {
        match self.externals.get(&doc.document_id) {
            Some(old) if *old == doc => Change::Unchanged,
            Some(_) => {
                self.externals.insert(doc.document_id.clone(), doc);
                Change::Updated
            }
            None => {
                self.externals.insert(doc.document_id.clone(), doc);
                Change::Created
            }
        }
    }

    /// Publication year and ISI flag of a citing document's venue.
    pub fn citing_info(&self, catalog: &Catalog, doc: &CitingDocument) -> Option<(i32, bool)> {
        match doc {
            CitingDocument::Article(a) => {
                let a = catalog.article(a).ok()?;
                let isi = catalog.journal(&a.journal_id).ok()?.isi_indexed;
                Some((a.year, isi))
            }
            CitingDocument::External(e) => self.externals.get(e).map(|d| (d.year, d.isi_indexed)),
        }
    }

    /// Parses and stores a reference. An existing resolution is kept unless
    /// `resolution` is given.
    pub fn add_reference(
        &mut self,
        catalog: &Catalog,
        reference_id: Option<ReferenceId>,
        citing: CitingDocument,
        raw: RawReference,
        cited_year_hint: Option<i32>,
        resolution: Option<Resolution>,
    ) -> Result<(ReferenceId, Change), CitegraphError> {
        if self.citing_info(catalog, &citing).is_none() {
            return Err(CitegraphError::UnknownCitingDocument(citing.id().to_string()));
        }
        let parsed = parse_str(&raw.source)?.reference;
        if let Some(Resolution::Resolved { article_id, score, method }) = &resolution {
            catalog.article(article_id)?;
            if !(*score > 0.0 && *score <= 1.0) || (*method == Method::ExactKey && *score != 1.0) {
                return Err(CitegraphError::Invalid("resolution score out of range".into()));
            }
        }
        let id = reference_id.unwrap_or_else(|| StoredReference::default_id(&citing, &raw.source));
        let old = self.references.get(&id);
        let resolution = resolution
            .or_else(|| old.map(|o| o.resolution.clone()))
            .unwrap_or_default();
        let stored = StoredReference {
            reference_id: id.clone(),
            citing,
            parsed,
            raw,
            cited_year_hint,
            resolution,
        };
        let change = match old {
            Some(o) if *o == stored => return Ok((id, Change::Unchanged)),
            Some(_) => Change::Updated,
            None => Change::Created,
        };
        if let Some(o) = self.references.remove(&id) {
            self.unlink(&o);
        }
        self.link(&stored);
        self.references.insert(id.clone(), stored);
        Ok((id, change))
    }

    fn link(&mut self, r: &StoredReference) {
        if let Some(target) = r.resolution.target() {
            *self
                .links
                .entry(target.clone())
                .or_default()
                .entry(r.citing.clone())
                .or_default() += 1;
        }
    }

    fn unlink(&mut self, r: &StoredReference) {
        let Some(target) = r.resolution.target() else {
            return;
        };
        if let Some(citers) = self.links.get_mut(target) {
            if let Some(n) = citers.get_mut(&r.citing) {
                *n -= 1;
                if *n == 0 {
                    citers.remove(&r.citing);
                }
            }
            if citers.is_empty() {
                self.links.remove(target);
            }
        }
    }

    /// Sets or clears the resolution of one reference. A target that the
    /// automatic resolver did not propose is recorded as a manual match.
    pub fn commit_resolution(
        &mut self,
        catalog: &Catalog,
        reference_id: &ReferenceId,
        target: Option<&ArticleId>,
        candidates: &[Candidate],
    ) -> Result<StoredReference, CitegraphError> {
        let resolution = match target {
            None => Resolution::Unresolved,
            Some(a) => {
                catalog.article(a)?;
                match candidates.iter().find(|c| &c.article_id == a) {
                    Some(c) => Resolution::Resolved {
                        article_id: a.clone(),
                        score: c.score,
                        method: c.method,
                    },
                    None => Resolution::Resolved {
                        article_id: a.clone(),
                        score: 1.0,
                        method: Method::Manual,
                    },
                }
            }
        };
        self.set_resolution(reference_id, resolution)
    }

    pub fn set_resolution(
        &mut self,
        reference_id: &ReferenceId,
        resolution: Resolution,
    ) -> Result<StoredReference, CitegraphError> {
        let old = self
            .references
            .get(reference_id)
            .ok_or_else(|| CitegraphError::UnknownReference(reference_id.clone()))?
            .clone();
        if old.resolution == resolution {
            return Ok(old);
        }
        self.unlink(&old);
        let mut new = old;
        new.resolution = resolution;
        self.link(&new);
        self.references.insert(reference_id.clone(), new.clone());
        Ok(new)
    }

    /// Resolves every unresolved reference and commits the best candidate.
    /// Returns the number of newly resolved references.
    pub fn resolve_all(&mut self, catalog: &Catalog, index: &ResolverIndex, threshold: f64) -> usize {
        let pending: Vec<(ReferenceId, Candidate)> = self
            .references
            .values()
            .filter(|r| r.resolution == Resolution::Unresolved)
            .filter_map(|r| {
                index
                    .resolve(&r.parsed, r.cited_year_hint, threshold)
                    .into_iter()
                    .next()
                    .map(|c| (r.reference_id.clone(), c))
            })
            .collect();
        let n = pending.len();
        for (id, c) in pending {
            self.commit_resolution(catalog, &id, Some(&c.article_id.clone()), &[c])
                .expect("candidate comes from the catalog");
        }
        n
    }

    /// Rebuilds the forward-link index from the resolved references and
    /// returns the number of distinct (citing, cited) links.
    pub fn build_forward_links(&mut self) -> usize {
        self.links.clear();
        let refs: Vec<StoredReference> = self.references.values().cloned().collect();
        for r in &refs {
            self.link(r);
        }
        self.link_count()
    }

    pub fn link_count(&self) -> usize {
        self.links.values().map(BTreeMap::len).sum()
    }

    /// Every forward link, ordered by cited article then citing document.
    pub fn forward_links(&self, catalog: &Catalog) -> Vec<ForwardLink> {
        self.links
            .iter()
            .flat_map(|(cited, citers)| {
                citers.keys().filter_map(move |c| {
                    self.citing_info(catalog, c).map(|(year, _)| ForwardLink {
                        citing: c.clone(),
                        cited_article: cited.clone(),
                        citing_year: year,
                    })
                })
            })
            .collect()
    }

    fn is_self_citation(&self, catalog: &Catalog, citing: &CitingDocument, cited: &ArticleId) -> bool {
        let CitingDocument::Article(citing) = citing else {
            return false;
        };
        match (catalog.article(citing), catalog.article(cited)) {
            (Ok(a), Ok(b)) => a.authors.iter().any(|p| b.authors.contains(p)),
            _ => false,
        }
    }

    /// Links into one article, ordered by citing document. With
    /// `exclude_self`, citing articles sharing an author are dropped.
    pub fn forward_links_of(
        &self,
        catalog: &Catalog,
        article: &ArticleId,
        exclude_self: bool,
    ) -> Result<Vec<ForwardLink>, CitegraphError> {
        catalog.article(article)?;
        let Some(citers) = self.links.get(article) else {
            return Ok(vec![]);
        };
        Ok(citers
            .keys()
            .filter(|c| !exclude_self || !self.is_self_citation(catalog, c, article))
            .filter_map(|c| {
                self.citing_info(catalog, c).map(|(year, _)| ForwardLink {
                    citing: c.clone(),
                    cited_article: article.clone(),
                    citing_year: year,
                })
            })
            .collect())
    }

    /// Links into any member of a cluster, one per citing document. The
    /// reported `cited_article` is the smallest member that document cites.
    pub fn cluster_forward_links(
        &self,
        catalog: &Catalog,
        cluster: &ClusterId,
        exclude_self: bool,
    ) -> Result<Vec<ForwardLink>, CitegraphError> {
        let cluster = catalog.cluster(cluster)?;
        let mut by_citer: BTreeMap<CitingDocument, ForwardLink> = BTreeMap::new();
        for m in &cluster.members {
            for link in self.forward_links_of(catalog, m, exclude_self)? {
                by_citer.entry(link.citing.clone()).or_insert(link);
            }
        }
        Ok(by_citer.into_values().collect())
    }

    /// Citing documents of an article, without years; for metric scans.
    pub fn citers_of(&self, article: &ArticleId) -> impl Iterator<Item = &CitingDocument> {
        self.links.get(article).into_iter().flat_map(BTreeMap::keys)
    }

    /// Every cited article with its citing documents.
    pub fn link_index(&self) -> impl Iterator<Item = (&ArticleId, impl Iterator<Item = &CitingDocument>)> {
        self.links.iter().map(|(a, c)| (a, c.keys()))
    }

    /// All distinct citing documents that have references.
    pub fn citing_documents(&self) -> BTreeSet<&CitingDocument> {
        self.references.values().map(|r| &r.citing).collect()
    }
}
