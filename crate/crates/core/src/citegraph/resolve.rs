use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::amsbib::ParsedReference;
use crate::archive::Catalog;
use crate::ids::{ArticleId, JournalId};
use crate::text;

pub const DEFAULT_FUZZY_THRESHOLD: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactKey,
    FuzzyTitle,
    /// Set by hand through `commit_resolution`.
    Manual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub article_id: ArticleId,
    pub score: f64,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct ExactKey {
    journal: JournalId,
    year: i32,
    volume: String,
    first_page: u32,
}

#[derive(Debug, Clone)]
struct TitleEntry {
    article_id: ArticleId,
    title: BTreeSet<String>,
    translated: Option<BTreeSet<String>>,
}

/// Lookup structures over a catalog snapshot for reference resolution.
#[derive(Debug, Clone)]
pub struct ResolverIndex {
    journal_names: BTreeMap<String, BTreeSet<JournalId>>,
    exact: BTreeMap<ExactKey, Vec<usize>>,
    by_year: BTreeMap<i32, Vec<usize>>,
    entries: Vec<TitleEntry>,
}

fn grams(title: &str) -> BTreeSet<String> {
    text::trigrams(&text::normalize_title(title))
}

impl ResolverIndex {
    pub fn build(catalog: &Catalog) -> Self {
        let mut journal_names: BTreeMap<String, BTreeSet<JournalId>> = BTreeMap::new();
        for j in catalog.journals() {
            for name in j.name_forms() {
                journal_names.entry(name).or_default().insert(j.journal_id.clone());
            }
        }
        let mut exact: BTreeMap<ExactKey, Vec<usize>> = BTreeMap::new();
        let mut by_year: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        let mut entries = Vec::with_capacity(catalog.article_count());
        for (i, a) in catalog.articles().enumerate() {
            if let Some(first_page) = a.first_page() {
                let key = ExactKey {
                    journal: a.journal_id.clone(),
                    year: a.year,
                    volume: a.volume.trim().to_string(),
                    first_page,
                };
                exact.entry(key).or_default().push(i);
            }
            by_year.entry(a.year).or_default().push(i);
            entries.push(TitleEntry {
                article_id: a.article_id.clone(),
                title: grams(&a.title),
                translated: a.translated_title.as_deref().map(grams),
            });
        }
        Self {
            journal_names,
            exact,
            by_year,
            entries,
        }
    }

    fn similarity(&self, entry: &TitleEntry, query: &BTreeSet<String>) -> f64 {
        let s = text::trigram_jaccard(&entry.title, query);
        match &entry.translated {
            Some(t) => s.max(text::trigram_jaccard(t, query)),
            None => s,
        }
    }

    fn exact_matches(&self, r: &ParsedReference, year: i32) -> Vec<usize> {
        let (Some(journal), Some(volume), Some(first_page)) = (
            r.journal.as_deref(),
            r.volume.as_deref(),
            r.pages.as_ref().and_then(|p| p.first_page()),
        ) else {
            return vec![];
        };
        let Some(journals) = self.journal_names.get(&text::normalize_journal(journal)) else {
            return vec![];
        };
        let mut out = Vec::new();
        for j in journals {
            let key = ExactKey {
                journal: j.clone(),
                year,
                volume: volume.trim().to_string(),
                first_page,
            };
            if let Some(hits) = self.exact.get(&key) {
                out.extend(hits);
            }
        }
        out
    }

    /// Candidates best-first. An exact key match yields exactly one
    /// candidate and suppresses the fuzzy stage.
    pub fn resolve(&self, r: &ParsedReference, year_hint: Option<i32>, threshold: f64) -> Vec<Candidate> {
        let Some(year) = r.year.or(year_hint) else {
            return vec![];
        };
        let query = r.title.as_deref().map(grams).unwrap_or_default();

        let exact = self.exact_matches(r, year);
        if !exact.is_empty() {
            let best = exact
                .iter()
                .map(|&i| (self.similarity(&self.entries[i], &query), &self.entries[i].article_id))
                .max_by(|a, b| a.0.total_cmp(&b.0).then_with(|| b.1.cmp(a.1)))
                .expect("non-empty");
            return vec![Candidate {
                article_id: best.1.clone(),
                score: 1.0,
                method: Method::ExactKey,
            }];
        }

        if query.is_empty() {
            return vec![];
        }
        let mut out: Vec<Candidate> = (year - 1..=year + 1)
            .filter_map(|y| self.by_year.get(&y))
            .flatten()
            .filter_map(|&i| {
                let score = self.similarity(&self.entries[i], &query);
                (score >= threshold).then(|| Candidate {
                    article_id: self.entries[i].article_id.clone(),
                    score,
                    method: Method::FuzzyTitle,
                })
            })
            .collect();
        out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.article_id.cmp(&b.article_id)));
        out
    }
}
