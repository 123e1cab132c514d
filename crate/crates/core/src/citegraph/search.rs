use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{CitegraphError, ReferenceDb, StoredReference};
use crate::amsbib::{normalize_pages, Pages};
use crate::ids::ReferenceId;
use crate::text;

/// Search over parsed fields of every stored reference, resolved or not.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitedReferenceQuery {
    #[serde(default)]
    pub title_terms: Vec<String>,
    #[serde(default)]
    pub year: Option<i32>,
    #[serde(default)]
    pub author_family: Option<String>,
    /// A single page matches any range containing it; a range or text
    /// matches exactly.
    #[serde(default)]
    pub pages: Option<String>,
}

impl CitedReferenceQuery {
    fn title_terms(&self) -> Vec<String> {
        self.title_terms.iter().flat_map(|t| text::terms(t)).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.title_terms().is_empty()
            && self.year.is_none()
            && self.author_family.as_deref().is_none_or(|f| f.trim().is_empty())
            && self.pages.as_deref().is_none_or(|p| p.trim().is_empty())
    }
}

fn pages_match(query: &Pages, have: Option<&Pages>) -> bool {
    match (query, have) {
        (Pages::Range(q), Some(Pages::Range(h))) if q.first == q.last => h.first <= q.first && q.first <= h.last,
        (q, Some(h)) => q == h,
        (_, None) => false,
    }
}

fn family_key(family: &str) -> String {
    text::normalize_title(family)
}

/// Posting lists over stored references.
#[derive(Debug, Default)]
pub struct ReferenceSearchIndex {
    title: BTreeMap<String, BTreeSet<ReferenceId>>,
    family: BTreeMap<String, BTreeSet<ReferenceId>>,
    year: BTreeMap<i32, BTreeSet<ReferenceId>>,
    all: BTreeSet<ReferenceId>,
}

impl ReferenceSearchIndex {
    pub fn build(db: &ReferenceDb) -> Self {
        let mut idx = Self::default();
        for r in db.references() {
            let id = &r.reference_id;
            idx.all.insert(id.clone());
            for t in r.parsed.title.as_deref().map(text::terms).unwrap_or_default() {
                idx.title.entry(t).or_default().insert(id.clone());
            }
            for a in &r.parsed.authors {
                idx.family.entry(family_key(&a.family)).or_default().insert(id.clone());
            }
            if let Some(y) = r.parsed.year {
                idx.year.entry(y).or_default().insert(id.clone());
            }
        }
        idx
    }

    /// Conjunction of the given criteria, ordered by reference id.
    pub fn search<'a>(
        &self,
        db: &'a ReferenceDb,
        q: &CitedReferenceQuery,
    ) -> Result<Vec<&'a StoredReference>, CitegraphError> {
        if q.is_empty() {
            return Err(CitegraphError::EmptyQuery);
        }
        let empty = BTreeSet::new();
        let mut lists: Vec<&BTreeSet<ReferenceId>> = Vec::new();
        for t in q.title_terms() {
            lists.push(self.title.get(&t).unwrap_or(&empty));
        }
        if let Some(f) = q.author_family.as_deref().filter(|f| !f.trim().is_empty()) {
            lists.push(self.family.get(&family_key(f)).unwrap_or(&empty));
        }
        if let Some(y) = q.year {
            lists.push(self.year.get(&y).unwrap_or(&empty));
        }
        lists.sort_by_key(|l| l.len());
        let pages = q
            .pages
            .as_deref()
            .filter(|p| !p.trim().is_empty())
            .map(normalize_pages);
        let base = lists.first().copied().unwrap_or(&self.all);
        let mut out = Vec::new();
        for id in base {
            if lists.iter().skip(1).all(|l| l.contains(id)) {
                let r = db.reference(id)?;
                if pages.as_ref().is_none_or(|p| pages_match(p, r.parsed.pages.as_ref())) {
                    out.push(r);
                }
            }
        }
        Ok(out)
    }
}
