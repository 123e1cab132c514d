//! Catalog of journals, articles, language-version clusters, persons and
//! organizations.

mod ingest;
mod persons;
mod search;

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amsbib::{LinkKind, Pages, PersonName};
use crate::ids::{ArticleId, ClusterId, JournalId, OrganizationId, PersonId};
use crate::text;

pub use ingest::{export, ingest, ingest_ndjson, IngestRecord, IngestReport, Rejection, ReferenceRecord, VersionLinkRecord};
pub use persons::{PublicationEntry, Registration};
pub use search::{PublicationQuery, SearchHit, SearchIndex, YearRange};

pub const MIN_ARTICLE_YEAR: i32 = 1800;
pub const DEFAULT_MOVING_WALL: u32 = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArchiveError {
    #[error("unknown journal `{0}`")]
    UnknownJournal(JournalId),
    #[error("unknown article `{0}`")]
    UnknownArticle(ArticleId),
    #[error("unknown person `{0}`")]
    UnknownPerson(PersonId),
    #[error("unknown organization `{0}`")]
    UnknownOrganization(OrganizationId),
    #[error("unknown cluster `{0}`")]
    UnknownCluster(ClusterId),
    #[error("both clusters already hold a `{0:?}` version")]
    SameLanguageConflict(Language),
    #[error("possible duplicate of {} registered person(s)", candidates.len())]
    DuplicateSuspected { candidates: Vec<PersonId> },
    #[error("cannot merge a person into itself")]
    SelfMerge,
    #[error("query has no criteria")]
    EmptyQuery,
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Journal {
    pub journal_id: JournalId,
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translated_title: Option<String>,
    #[serde(default)]
    pub founder: String,
    #[serde(default)]
    pub publisher: String,
    #[serde(default)]
    pub editorial_board: Vec<PersonId>,
    #[serde(default)]
    pub aliases: Vec<String>,
    #[serde(default)]
    pub isi_indexed: bool,
}

impl Journal {
    pub fn new(id: impl Into<JournalId>, title: impl Into<String>) -> Self {
        Self {
            journal_id: id.into(),
            title: title.into(),
            translated_title: None,
            founder: String::new(),
            publisher: String::new(),
            editorial_board: vec![],
            aliases: vec![],
            isi_indexed: false,
        }
    }

    /// Title, translated title and aliases, normalized for comparison.
    pub fn name_forms(&self) -> impl Iterator<Item = String> + '_ {
        std::iter::once(&self.title)
            .chain(self.translated_title.iter())
            .chain(self.aliases.iter())
            .map(|s| text::normalize_journal(s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Language {
    Ru,
    En,
    Other,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub article_id: ArticleId,
    pub journal_id: JournalId,
    pub year: i32,
    #[serde(default)]
    pub volume: String,
    #[serde(default)]
    pub issue: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pages: Option<Pages>,
    pub language: Language,
    pub title: String,
    #[serde(rename = "abstract", default)]
    pub abstract_text: String,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translated_title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translated_abstract: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translated_keywords: Option<Vec<String>>,
    #[serde(default)]
    pub authors: Vec<PersonId>,
    #[serde(default)]
    pub links: BTreeMap<LinkKind, String>,
    #[serde(default = "default_true")]
    pub citable: bool,
}

impl Article {
    /// A citable article with no pages, authors or abstract yet.
    pub fn new(
        id: impl Into<ArticleId>,
        journal: impl Into<JournalId>,
        year: i32,
        language: Language,
        title: impl Into<String>,
    ) -> Self {
        Self {
            article_id: id.into(),
            journal_id: journal.into(),
            year,
            volume: String::new(),
            issue: String::new(),
            pages: None,
            language,
            title: title.into(),
            abstract_text: String::new(),
            keywords: vec![],
            translated_title: None,
            translated_abstract: None,
            translated_keywords: None,
            authors: vec![],
            links: BTreeMap::new(),
            citable: true,
        }
    }

    pub fn first_page(&self) -> Option<u32> {
        self.pages.as_ref().and_then(Pages::first_page)
    }

    fn unique_key(&self) -> ArticleKey {
        ArticleKey {
            journal_id: self.journal_id.clone(),
            year: self.year,
            volume: self.volume.clone(),
            issue: self.issue.clone(),
            first_page: match &self.pages {
                Some(Pages::Range(r)) => r.first.to_string(),
                Some(Pages::Text(t)) => t.clone(),
                None => String::new(),
            },
            title: self.title.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct ArticleKey {
    journal_id: JournalId,
    year: i32,
    volume: String,
    issue: String,
    first_page: String,
    title: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkCluster {
    pub cluster_id: ClusterId,
    pub members: BTreeSet<ArticleId>,
}

impl WorkCluster {
    /// Cluster ids are derived from the smallest member, so they do not
    /// depend on the order in which versions were linked.
    fn id_for(members: &BTreeSet<ArticleId>) -> ClusterId {
        let first = members.iter().next().expect("cluster has members");
        ClusterId(format!("cl-{first}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Affiliation {
    pub organization_id: OrganizationId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from_year: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to_year: Option<i32>,
}

impl Affiliation {
    pub fn covers(&self, year: i32) -> bool {
        self.from_year.is_none_or(|f| f <= year) && self.to_year.is_none_or(|t| year <= t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Person {
    pub person_id: PersonId,
    pub canonical_name: PersonName,
    #[serde(default)]
    pub name_variants: Vec<PersonName>,
    #[serde(default)]
    pub affiliations: Vec<Affiliation>,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default)]
    pub interests: Vec<String>,
    #[serde(default)]
    pub external_profile_urls: Vec<String>,
    /// Publications outside the archive, as AMSBIB.
    #[serde(default)]
    pub external_publications: Vec<String>,
    /// Ids of persons merged into this one; they stay resolvable.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub merged_ids: Vec<PersonId>,
}

impl Person {
    pub fn new(id: impl Into<PersonId>, name: PersonName) -> Self {
        Self {
            person_id: id.into(),
            canonical_name: name,
            name_variants: vec![],
            affiliations: vec![],
            keywords: vec![],
            interests: vec![],
            external_profile_urls: vec![],
            external_publications: vec![],
            merged_ids: vec![],
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &PersonName> {
        std::iter::once(&self.canonical_name).chain(self.name_variants.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Organization {
    pub organization_id: OrganizationId,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessPolicy {
    pub journal_id: JournalId,
    pub moving_wall_years: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessStatus {
    Open,
    Restricted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Upsert {
    Created,
    Updated,
    Unchanged,
}

fn default_wall() -> u32 {
    DEFAULT_MOVING_WALL
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Catalog {
    journals: BTreeMap<JournalId, Journal>,
    articles: BTreeMap<ArticleId, Article>,
    clusters: BTreeMap<ClusterId, WorkCluster>,
    persons: BTreeMap<PersonId, Person>,
    organizations: BTreeMap<OrganizationId, Organization>,
    policies: BTreeMap<JournalId, AccessPolicy>,
    #[serde(skip, default = "default_wall")]
    default_moving_wall: u32,
    #[serde(skip)]
    person_aliases: BTreeMap<PersonId, PersonId>,
    #[serde(skip)]
    article_cluster: BTreeMap<ArticleId, ClusterId>,
    #[serde(skip)]
    article_keys: BTreeMap<ArticleKey, ArticleId>,
}

impl Catalog {
    pub fn new() -> Self {
        Self {
            default_moving_wall: DEFAULT_MOVING_WALL,
            ..Self::default()
        }
    }

    pub fn set_default_moving_wall(&mut self, years: u32) {
        self.default_moving_wall = years;
    }

    /// Rebuilds the derived indexes after deserialization.
    pub fn reindex(&mut self) {
        self.person_aliases = self
            .persons
            .values()
            .flat_map(|p| p.merged_ids.iter().map(move |m| (m.clone(), p.person_id.clone())))
            .collect();
        self.article_cluster = self
            .clusters
            .values()
            .flat_map(|c| c.members.iter().map(move |m| (m.clone(), c.cluster_id.clone())))
            .collect();
        self.article_keys = self
            .articles
            .values()
            .map(|a| (a.unique_key(), a.article_id.clone()))
            .collect();
    }

    pub fn journal(&self, id: &JournalId) -> Result<&Journal, ArchiveError> {
        self.journals
            .get(id)
            .ok_or_else(|| ArchiveError::UnknownJournal(id.clone()))
    }

    pub fn journals(&self) -> impl Iterator<Item = &Journal> {
        self.journals.values()
    }

    pub fn article(&self, id: &ArticleId) -> Result<&Article, ArchiveError> {
        self.articles
            .get(id)
            .ok_or_else(|| ArchiveError::UnknownArticle(id.clone()))
    }

    pub fn articles(&self) -> impl Iterator<Item = &Article> {
        self.articles.values()
    }

    pub fn article_count(&self) -> usize {
        self.articles.len()
    }

    pub fn organization(&self, id: &OrganizationId) -> Result<&Organization, ArchiveError> {
        self.organizations
            .get(id)
            .ok_or_else(|| ArchiveError::UnknownOrganization(id.clone()))
    }

    pub fn organizations(&self) -> impl Iterator<Item = &Organization> {
        self.organizations.values()
    }

    pub fn persons(&self) -> impl Iterator<Item = &Person> {
        self.persons.values()
    }

    pub fn person_aliases(&self) -> impl Iterator<Item = (&PersonId, &PersonId)> {
        self.person_aliases.iter()
    }

    /// Follows merge aliases to the surviving person id.
    pub fn resolve_person_id(&self, id: &PersonId) -> Result<PersonId, ArchiveError> {
        let mut current = id;
        while let Some(next) = self.person_aliases.get(current) {
            current = next;
        }
        if self.persons.contains_key(current) {
            Ok(current.clone())
        } else {
            Err(ArchiveError::UnknownPerson(id.clone()))
        }
    }

    pub fn person(&self, id: &PersonId) -> Result<&Person, ArchiveError> {
        let id = self.resolve_person_id(id)?;
        Ok(&self.persons[&id])
    }

    pub fn policies(&self) -> impl Iterator<Item = &AccessPolicy> {
        self.policies.values()
    }

    pub fn moving_wall(&self, journal: &JournalId) -> u32 {
        self.policies
            .get(journal)
            .map_or(self.default_moving_wall, |p| p.moving_wall_years)
    }

    pub fn cluster_of(&self, article: &ArticleId) -> Result<&WorkCluster, ArchiveError> {
        let id = self
            .article_cluster
            .get(article)
            .ok_or_else(|| ArchiveError::UnknownArticle(article.clone()))?;
        Ok(&self.clusters[id])
    }

    pub fn cluster(&self, id: &ClusterId) -> Result<&WorkCluster, ArchiveError> {
        self.clusters
            .get(id)
            .ok_or_else(|| ArchiveError::UnknownCluster(id.clone()))
    }

    pub fn clusters(&self) -> impl Iterator<Item = &WorkCluster> {
        self.clusters.values()
    }

    pub fn upsert_organization(&mut self, org: Organization) -> Result<Upsert, ArchiveError> {
        if org.name.trim().is_empty() {
            return Err(ArchiveError::Invalid("organization name is empty".into()));
        }
        Ok(upsert(&mut self.organizations, org.organization_id.clone(), org))
    }

    pub fn upsert_journal(&mut self, mut journal: Journal) -> Result<Upsert, ArchiveError> {
        if journal.title.trim().is_empty() {
            return Err(ArchiveError::Invalid("journal title is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for alias in &journal.aliases {
            if !seen.insert(alias.to_lowercase()) {
                return Err(ArchiveError::Invalid(format!("duplicate alias `{alias}`")));
            }
        }
        journal.editorial_board = journal
            .editorial_board
            .iter()
            .map(|p| self.resolve_person_id(p))
            .collect::<Result<_, _>>()?;
        Ok(upsert(&mut self.journals, journal.journal_id.clone(), journal))
    }

    pub fn set_policy(&mut self, policy: AccessPolicy) -> Result<Upsert, ArchiveError> {
        self.journal(&policy.journal_id)?;
        Ok(upsert(&mut self.policies, policy.journal_id.clone(), policy))
    }

    pub fn upsert_article(&mut self, mut article: Article, current_year: i32) -> Result<Upsert, ArchiveError> {
        self.journal(&article.journal_id)?;
        if !(MIN_ARTICLE_YEAR..=current_year).contains(&article.year) {
            return Err(ArchiveError::Invalid("year out of range".into()));
        }
        if article.title.trim().is_empty() {
            return Err(ArchiveError::Invalid("article title is empty".into()));
        }
        if article.citable && article.authors.is_empty() {
            return Err(ArchiveError::Invalid("citable article has no authors".into()));
        }
        if let Some(Pages::Text(t)) = &article.pages {
            article.pages = Some(crate::amsbib::normalize_pages(t));
        }
        let mut authors = Vec::with_capacity(article.authors.len());
        for p in &article.authors {
            let id = self.resolve_person_id(p)?;
            if !authors.contains(&id) {
                authors.push(id);
            }
        }
        article.authors = authors;

        let key = article.unique_key();
        if let Some(other) = self.article_keys.get(&key) {
            if other != &article.article_id {
                return Err(ArchiveError::Invalid(format!(
                    "duplicate of article `{other}` (same journal, year, volume, issue, first page and title)"
                )));
            }
        }
        if let Some(old) = self.articles.get(&article.article_id) {
            if old.language != article.language {
                let cluster = self.cluster_of(&article.article_id)?;
                let clash = cluster
                    .members
                    .iter()
                    .filter(|m| **m != article.article_id)
                    .any(|m| self.articles[m].language == article.language);
                if clash {
                    return Err(ArchiveError::SameLanguageConflict(article.language));
                }
            }
            let old_key = old.unique_key();
            self.article_keys.remove(&old_key);
        }
        self.article_keys.insert(key, article.article_id.clone());
        let id = article.article_id.clone();
        let outcome = upsert(&mut self.articles, id.clone(), article);
        if outcome == Upsert::Created {
            let members: BTreeSet<ArticleId> = [id.clone()].into();
            let cluster_id = WorkCluster::id_for(&members);
            self.article_cluster.insert(id, cluster_id.clone());
            self.clusters.insert(cluster_id.clone(), WorkCluster { cluster_id, members });
        }
        Ok(outcome)
    }

    /// Puts two language versions into one cluster, merging their clusters.
    pub fn link_versions(&mut self, a: &ArticleId, b: &ArticleId) -> Result<ClusterId, ArchiveError> {
        let ca = self.cluster_of(a)?.clone();
        let cb = self.cluster_of(b)?.clone();
        let (la, lb) = (self.article(a)?.language, self.article(b)?.language);
        if la == lb && a != b {
            return Err(ArchiveError::SameLanguageConflict(la));
        }
        if ca.cluster_id == cb.cluster_id {
            return Ok(ca.cluster_id);
        }
        let mut languages = BTreeSet::new();
        for m in ca.members.iter().chain(cb.members.iter()) {
            let lang = self.articles[m].language;
            if !languages.insert(lang) {
                return Err(ArchiveError::SameLanguageConflict(lang));
            }
        }
        let members: BTreeSet<ArticleId> = ca.members.union(&cb.members).cloned().collect();
        let cluster_id = WorkCluster::id_for(&members);
        self.clusters.remove(&ca.cluster_id);
        self.clusters.remove(&cb.cluster_id);
        for m in &members {
            self.article_cluster.insert(m.clone(), cluster_id.clone());
        }
        self.clusters.insert(
            cluster_id.clone(),
            WorkCluster {
                cluster_id: cluster_id.clone(),
                members,
            },
        );
        Ok(cluster_id)
    }

    /// Open iff the article is at least `moving_wall` calendar years old.
    pub fn access_status(&self, article: &ArticleId, today: NaiveDate) -> Result<AccessStatus, ArchiveError> {
        let a = self.article(article)?;
        let wall = i64::from(self.moving_wall(&a.journal_id));
        let age = i64::from(today.year()) - i64::from(a.year);
        Ok(if wall > 0 && age < wall {
            AccessStatus::Restricted
        } else {
            AccessStatus::Open
        })
    }
}

fn upsert<K: Ord, V: PartialEq>(map: &mut BTreeMap<K, V>, key: K, value: V) -> Upsert {
    match map.get_mut(&key) {
        Some(old) if *old == value => Upsert::Unchanged,
        Some(old) => {
            *old = value;
            Upsert::Updated
        }
        None => {
            map.insert(key, value);
            Upsert::Created
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn journal(id: &str) -> Journal {
        Journal {
            journal_id: id.into(),
            title: format!("Journal {id}"),
            translated_title: None,
            founder: String::new(),
            publisher: String::new(),
            editorial_board: vec![],
            aliases: vec![],
            isi_indexed: false,
        }
    }

    pub fn article(id: &str, journal: &str, year: i32, lang: Language) -> Article {
        Article {
            article_id: id.into(),
            journal_id: journal.into(),
            year,
            volume: "1".into(),
            issue: "1".into(),
            pages: None,
            language: lang,
            title: format!("Title {id}"),
            abstract_text: String::new(),
            keywords: vec![],
            translated_title: None,
            translated_abstract: None,
            translated_keywords: None,
            authors: vec!["p1".into()],
            links: BTreeMap::new(),
            citable: true,
        }
    }

    pub fn person(id: &str, family: &str, given: &str) -> Person {
        Person {
            person_id: id.into(),
            canonical_name: PersonName::new(family, given),
            name_variants: vec![],
            affiliations: vec![],
            keywords: vec![],
            interests: vec![],
            external_profile_urls: vec![],
            external_publications: vec![],
            merged_ids: vec![],
        }
    }

    pub fn small_catalog() -> Catalog {
        let mut c = Catalog::new();
        c.upsert_person(person("p1", "Kolmogorov", "A. N.")).unwrap();
        c.upsert_journal(journal("j")).unwrap();
        for (id, lang) in [("ru1", Language::Ru), ("en1", Language::En), ("ot1", Language::Other), ("ru2", Language::Ru)] {
            c.upsert_article(article(id, "j", 2000, lang), 2026).unwrap();
        }
        c
    }

    fn assert_partition(c: &Catalog) {
        let mut seen = BTreeSet::new();
        for cl in c.clusters() {
            assert!(!cl.members.is_empty());
            for m in &cl.members {
                assert!(seen.insert(m.clone()), "{m} in two clusters");
                assert_eq!(&c.cluster_of(m).unwrap().cluster_id, &cl.cluster_id);
            }
        }
        let all: BTreeSet<_> = c.articles().map(|a| a.article_id.clone()).collect();
        assert_eq!(seen, all);
    }

    #[test]
    fn link_two_versions() {
        let mut c = small_catalog();
        let id = c.link_versions(&"ru1".into(), &"en1".into()).unwrap();
        assert_eq!(c.cluster(&id).unwrap().members.len(), 2);
        assert_partition(&c);
    }

    #[test]
    fn linking_is_transitive() {
        let mut c = small_catalog();
        c.link_versions(&"ru1".into(), &"en1".into()).unwrap();
        let id = c.link_versions(&"en1".into(), &"ot1".into()).unwrap();
        assert_eq!(c.cluster(&id).unwrap().members.len(), 3);
        assert_eq!(c.cluster_of(&"ru1".into()).unwrap().cluster_id, id);
        assert_partition(&c);
    }

    #[test]
    fn same_language_conflicts() {
        let mut c = small_catalog();
        assert_eq!(
            c.link_versions(&"ru1".into(), &"ru2".into()),
            Err(ArchiveError::SameLanguageConflict(Language::Ru))
        );
        c.link_versions(&"ru1".into(), &"en1".into()).unwrap();
        assert!(matches!(
            c.link_versions(&"en1".into(), &"ru2".into()),
            Err(ArchiveError::SameLanguageConflict(Language::Ru))
        ));
        assert!(matches!(
            c.link_versions(&"ru1".into(), &"nope".into()),
            Err(ArchiveError::UnknownArticle(_))
        ));
        assert_partition(&c);
    }

    #[test]
    fn relinking_is_idempotent() {
        let mut c = small_catalog();
        let a = c.link_versions(&"ru1".into(), &"en1".into()).unwrap();
        let b = c.link_versions(&"en1".into(), &"ru1".into()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn article_validation() {
        let mut c = small_catalog();
        let mut old = article("old", "j", 1492, Language::Ru);
        assert_eq!(
            c.upsert_article(old.clone(), 2026),
            Err(ArchiveError::Invalid("year out of range".into()))
        );
        old.year = 2030;
        assert!(c.upsert_article(old, 2026).is_err());
        let mut anon = article("anon", "j", 2000, Language::Ru);
        anon.authors.clear();
        assert!(c.upsert_article(anon.clone(), 2026).is_err());
        anon.citable = false;
        assert_eq!(c.upsert_article(anon, 2026), Ok(Upsert::Created));
        let mut dup = article("dup", "j", 2000, Language::Ru);
        dup.title = "Title ru1".into();
        assert!(matches!(c.upsert_article(dup, 2026), Err(ArchiveError::Invalid(_))));
        assert!(matches!(
            c.upsert_article(article("x", "nope", 2000, Language::Ru), 2026),
            Err(ArchiveError::UnknownJournal(_))
        ));
    }

    #[test]
    fn language_change_respects_cluster() {
        let mut c = small_catalog();
        c.link_versions(&"ru1".into(), &"en1".into()).unwrap();
        let mut en_as_ru = c.article(&"en1".into()).unwrap().clone();
        en_as_ru.language = Language::Ru;
        assert!(matches!(
            c.upsert_article(en_as_ru, 2026),
            Err(ArchiveError::SameLanguageConflict(_))
        ));
    }

    #[test]
    fn moving_wall() {
        let mut c = small_catalog();
        let d = |y| NaiveDate::from_ymd_opt(y, 6, 1).unwrap();
        assert_eq!(c.access_status(&"ru1".into(), d(2000)), Ok(AccessStatus::Restricted));
        assert_eq!(c.access_status(&"ru1".into(), d(2002)), Ok(AccessStatus::Restricted));
        assert_eq!(c.access_status(&"ru1".into(), d(2003)), Ok(AccessStatus::Open));
        assert_eq!(c.access_status(&"ru1".into(), d(2004)), Ok(AccessStatus::Open));
        c.set_policy(AccessPolicy { journal_id: "j".into(), moving_wall_years: 0 }).unwrap();
        assert_eq!(c.access_status(&"ru1".into(), d(2000)), Ok(AccessStatus::Open));
        assert_eq!(c.access_status(&"ru1".into(), d(1990)), Ok(AccessStatus::Open));
    }

    #[test]
    fn journal_aliases_unique() {
        let mut c = Catalog::new();
        let mut j = journal("j");
        j.aliases = vec!["Mat. Sb.".into(), "MAT. SB.".into()];
        assert!(c.upsert_journal(j).is_err());
    }

    #[test]
    fn reindex_restores_clusters() {
        let mut c = small_catalog();
        c.link_versions(&"ru1".into(), &"en1".into()).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let mut back: Catalog = serde_json::from_str(&json).unwrap();
        back.reindex();
        assert_eq!(back.cluster_of(&"en1".into()).unwrap().members.len(), 2);
        assert!(back.upsert_article(article("ru1", "j", 2000, Language::Ru), 2026).is_ok());
    }
}
