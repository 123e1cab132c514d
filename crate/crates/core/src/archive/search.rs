use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{ArchiveError, Article, Catalog, Person};
use crate::ids::{ArticleId, JournalId, OrganizationId, PersonId};
use crate::text;

pub const TITLE_WEIGHT: u64 = 3;
pub const KEYWORD_WEIGHT: u64 = 2;
pub const ABSTRACT_WEIGHT: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearRange {
    pub from: i32,
    pub to: i32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationQuery {
    #[serde(default)]
    pub title_keywords: Vec<String>,
    #[serde(default)]
    pub abstract_keywords: Vec<String>,
    #[serde(default)]
    pub author_name: Option<String>,
    #[serde(default)]
    pub organization_name: Option<String>,
    #[serde(default)]
    pub journal_id: Option<JournalId>,
    #[serde(default)]
    pub year_range: Option<YearRange>,
}

fn all_terms(items: &[String]) -> BTreeSet<String> {
    items.iter().flat_map(|s| text::terms(s)).collect()
}

fn opt_terms(s: Option<&str>) -> BTreeSet<String> {
    s.map(text::terms).unwrap_or_default().into_iter().collect()
}

impl PublicationQuery {
    pub fn title_terms(&self) -> BTreeSet<String> {
        all_terms(&self.title_keywords)
    }

    pub fn abstract_terms(&self) -> BTreeSet<String> {
        all_terms(&self.abstract_keywords)
    }

    pub fn author_terms(&self) -> BTreeSet<String> {
        opt_terms(self.author_name.as_deref())
    }

    pub fn organization_terms(&self) -> BTreeSet<String> {
        opt_terms(self.organization_name.as_deref())
    }

    pub fn is_empty(&self) -> bool {
        self.title_terms().is_empty()
            && self.abstract_terms().is_empty()
            && self.author_terms().is_empty()
            && self.organization_terms().is_empty()
            && self.journal_id.is_none()
            && self.year_range.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchHit {
    pub article_id: ArticleId,
    pub score: u64,
}

/// Term counts of one article, per field.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Counts {
    title: u64,
    keywords: u64,
    abstract_text: u64,
}

impl Counts {
    fn score(&self) -> u64 {
        self.title * TITLE_WEIGHT + self.keywords * KEYWORD_WEIGHT + self.abstract_text * ABSTRACT_WEIGHT
    }
}

fn title_text(a: &Article) -> Vec<String> {
    let mut t = text::terms(&a.title);
    if let Some(tt) = &a.translated_title {
        t.extend(text::terms(tt));
    }
    t
}

fn keyword_text(a: &Article) -> Vec<String> {
    a.keywords
        .iter()
        .chain(a.translated_keywords.iter().flatten())
        .flat_map(|k| text::terms(k))
        .collect()
}

fn abstract_text(a: &Article) -> Vec<String> {
    let mut t = text::terms(&a.abstract_text);
    if let Some(ta) = &a.translated_abstract {
        t.extend(text::terms(ta));
    }
    t
}

fn name_terms(p: &Person) -> Vec<BTreeSet<String>> {
    p.names()
        .map(|n| text::terms(&format!("{} {}", n.given, n.family)).into_iter().collect())
        .collect()
}

/// Inverted index over a catalog snapshot.
#[derive(Debug, Default)]
pub struct SearchIndex {
    postings: BTreeMap<String, BTreeMap<ArticleId, Counts>>,
    person_names: BTreeMap<PersonId, Vec<BTreeSet<String>>>,
    by_author: BTreeMap<PersonId, BTreeSet<ArticleId>>,
    org_terms: BTreeMap<OrganizationId, BTreeSet<String>>,
    all: BTreeSet<ArticleId>,
}

impl SearchIndex {
    pub fn build(catalog: &Catalog) -> Self {
        let mut idx = Self::default();
        for a in catalog.articles() {
            idx.all.insert(a.article_id.clone());
            let fields: [(Vec<String>, fn(&mut Counts) -> &mut u64); 3] = [
                (title_text(a), |c| &mut c.title),
                (keyword_text(a), |c| &mut c.keywords),
                (abstract_text(a), |c| &mut c.abstract_text),
            ];
            for (terms, slot) in fields {
                for t in terms {
                    let counts = idx
                        .postings
                        .entry(t)
                        .or_default()
                        .entry(a.article_id.clone())
                        .or_default();
                    *slot(counts) += 1;
                }
            }
            for p in &a.authors {
                idx.by_author.entry(p.clone()).or_default().insert(a.article_id.clone());
            }
        }
        for p in catalog.persons() {
            idx.person_names.insert(p.person_id.clone(), name_terms(p));
        }
        for o in catalog.organizations() {
            idx.org_terms
                .insert(o.organization_id.clone(), text::terms(&o.name).into_iter().collect());
        }
        idx
    }

    fn keyword_matches(&self, term: &str, in_title: bool) -> BTreeSet<ArticleId> {
        self.postings
            .get(term)
            .into_iter()
            .flatten()
            .filter(|(_, c)| if in_title { c.title + c.keywords > 0 } else { c.abstract_text > 0 })
            .map(|(a, _)| a.clone())
            .collect()
    }

    fn author_matches(&self, terms: &BTreeSet<String>) -> BTreeSet<ArticleId> {
        self.person_names
            .iter()
            .filter(|(_, names)| names.iter().any(|n| terms.is_subset(n)))
            .flat_map(|(p, _)| self.by_author.get(p).into_iter().flatten().cloned())
            .collect()
    }

    fn organization_matches(&self, catalog: &Catalog, terms: &BTreeSet<String>) -> BTreeSet<ArticleId> {
        let orgs: BTreeSet<&OrganizationId> = self
            .org_terms
            .iter()
            .filter(|(_, t)| terms.is_subset(t))
            .map(|(o, _)| o)
            .collect();
        if orgs.is_empty() {
            return BTreeSet::new();
        }
        let mut out = BTreeSet::new();
        for p in catalog.persons() {
            let affs: Vec<_> = p
                .affiliations
                .iter()
                .filter(|a| orgs.contains(&a.organization_id))
                .collect();
            if affs.is_empty() {
                continue;
            }
            for id in self.by_author.get(&p.person_id).into_iter().flatten() {
                if let Ok(a) = catalog.article(id) {
                    if affs.iter().any(|aff| aff.covers(a.year)) {
                        out.insert(id.clone());
                    }
                }
            }
        }
        out
    }

    /// Articles matching every criterion, by score then id.
    pub fn search(&self, catalog: &Catalog, q: &PublicationQuery) -> Result<Vec<SearchHit>, ArchiveError> {
        if q.is_empty() {
            return Err(ArchiveError::EmptyQuery);
        }
        let title_terms = q.title_terms();
        let abstract_terms = q.abstract_terms();
        let mut sets: Vec<BTreeSet<ArticleId>> = Vec::new();
        for t in &title_terms {
            sets.push(self.keyword_matches(t, true));
        }
        for t in &abstract_terms {
            sets.push(self.keyword_matches(t, false));
        }
        let author = q.author_terms();
        if !author.is_empty() {
            sets.push(self.author_matches(&author));
        }
        let org = q.organization_terms();
        if !org.is_empty() {
            sets.push(self.organization_matches(catalog, &org));
        }
        sets.sort_by_key(BTreeSet::len);
        let base = sets.first().unwrap_or(&self.all);
        let scored: BTreeSet<&String> = title_terms.iter().chain(abstract_terms.iter()).collect();

        let mut hits = Vec::new();
        for id in base {
            if !sets.iter().skip(1).all(|s| s.contains(id)) {
                continue;
            }
            let a = catalog.article(id)?;
            if q.journal_id.as_ref().is_some_and(|j| *j != a.journal_id) {
                continue;
            }
            if q.year_range.is_some_and(|r| a.year < r.from || a.year > r.to) {
                continue;
            }
            let score = scored
                .iter()
                .filter_map(|t| self.postings.get(*t).and_then(|p| p.get(id)))
                .map(Counts::score)
                .sum();
            hits.push(SearchHit {
                article_id: id.clone(),
                score,
            });
        }
        hits.sort_by(|a, b| b.score.cmp(&a.score).then_with(|| a.article_id.cmp(&b.article_id)));
        Ok(hits)
    }
}
