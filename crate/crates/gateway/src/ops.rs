//! The operations behind every endpoint and CLI subcommand. HTTP handlers
//! and the CLI parse their inputs into the parameter types below and call
//! the same functions, so both surfaces return identical results.
//!
//! Reads take a [`Snapshot`]; writes go through [`Service`], which owns
//! the store and the session table.

use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use chrono::{DateTime, Datelike, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use sciarchive::amsbib::{parse_str, ParseOutcome, PersonName, RawReference};
use sciarchive::archive::{
    self, AccessStatus, Article, IngestReport, Journal, Person, PublicationEntry, PublicationQuery, Registration,
    SearchHit, Upsert, YearRange,
};
use sciarchive::citegraph::{Candidate, CitedReferenceQuery, ForwardLink, StoredReference};
use sciarchive::editorial::{
    DocumentRole, EditorialReport, FlowRecord, FlowView, ForthcomingEntry, ManuscriptMetadata, ManuscriptView,
    Recommendation, RefereeAssignment, Role, RoleGrant, Stage, Upload, User,
};
use sciarchive::ids::{ArticleId, AssignmentId, ClusterId, JournalId, ManuscriptId, OrganizationId, PersonId, ReferenceId, UserId};
use sciarchive::metrics::{self, ImpactFactorResult, MetricsQuery, Mode, Table};
use sciarchive::store::{Snapshot, Store};

use crate::auth::{hash_password, Session, Sessions};
use crate::config::Config;
use crate::error::ApiError;

// ---------------------------------------------------------------------------
// Parameters

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
pub struct ArticleFilter {
    pub journal_id: Option<JournalId>,
    pub year: Option<i32>,
}

/// Publication search as flat parameters; keyword fields are split into
/// terms by the search itself.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
pub struct SearchParams {
    pub title: Option<String>,
    #[serde(rename = "abstract")]
    pub abstract_text: Option<String>,
    pub author: Option<String>,
    pub organization: Option<String>,
    pub journal_id: Option<JournalId>,
    pub year_from: Option<i32>,
    pub year_to: Option<i32>,
}

impl SearchParams {
    pub fn query(&self) -> Result<PublicationQuery, ApiError> {
        let year_range = match (self.year_from, self.year_to) {
            (None, None) => None,
            (from, to) => {
                let range = YearRange {
                    from: from.unwrap_or(i32::MIN),
                    to: to.unwrap_or(i32::MAX),
                };
                if range.from > range.to {
                    return Err(ApiError::bad_request("year_from is after year_to"));
                }
                Some(range)
            }
        };
        Ok(PublicationQuery {
            title_keywords: self.title.iter().cloned().collect(),
            abstract_keywords: self.abstract_text.iter().cloned().collect(),
            author_name: self.author.clone(),
            organization_name: self.organization.clone(),
            journal_id: self.journal_id.clone(),
            year_range,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
pub struct ReferenceSearchParams {
    pub title: Option<String>,
    pub year: Option<i32>,
    pub author: Option<String>,
    pub pages: Option<String>,
}

impl ReferenceSearchParams {
    pub fn query(&self) -> CitedReferenceQuery {
        CitedReferenceQuery {
            title_terms: self.title.iter().cloned().collect(),
            year: self.year,
            author_family: self.author.clone(),
            pages: self.pages.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ImpactFactorParams {
    pub year: i32,
    pub horizon: u32,
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ReportParams {
    pub year: i32,
    pub horizon: u32,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ComparisonParams {
    /// Comma-separated journal ids, in row order.
    pub journals: String,
    pub year: i32,
    pub horizon: u32,
}

impl ComparisonParams {
    pub fn journal_ids(&self) -> Vec<JournalId> {
        self.journals
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(JournalId::from)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct PeriodParams {
    pub from: NaiveDate,
    pub to: NaiveDate,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
pub struct LinkParams {
    /// Links into any version of the article's work, one per citing
    /// document.
    #[serde(default)]
    pub cluster: bool,
    #[serde(default)]
    pub exclude_self: bool,
}

// ---------------------------------------------------------------------------
// Read results that combine several module calls

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleView {
    #[serde(flatten)]
    pub article: Article,
    pub cluster_id: ClusterId,
    pub access_status: AccessStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageEdges {
    pub stage: Stage,
    pub terminal: bool,
    pub successors: Vec<Stage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub snapshot_id: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Me {
    pub user_id: UserId,
    pub name: String,
    pub email: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub person_id: Option<PersonId>,
    pub roles: Vec<RoleGrant>,
}

/// A referee's view of one assignment: the assignment plus what the
/// referee needs to decide on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentView {
    #[serde(flatten)]
    pub assignment: RefereeAssignment,
    pub journal_id: JournalId,
    pub title: String,
    pub current_stage: Stage,
}

// ---------------------------------------------------------------------------
// Reads

pub fn health(s: &Snapshot) -> Health {
    Health {
        status: "ok".into(),
        snapshot_id: s.id,
    }
}

pub fn journals(s: &Snapshot) -> Vec<Journal> {
    s.catalog.journals().cloned().collect()
}

pub fn journal(s: &Snapshot, id: &JournalId) -> Result<Journal, ApiError> {
    Ok(s.catalog.journal(id)?.clone())
}

pub fn articles(s: &Snapshot, f: &ArticleFilter) -> Result<Vec<Article>, ApiError> {
    if let Some(j) = &f.journal_id {
        s.catalog.journal(j)?;
    }
    Ok(s.catalog
        .articles()
        .filter(|a| f.journal_id.as_ref().is_none_or(|j| &a.journal_id == j))
        .filter(|a| f.year.is_none_or(|y| a.year == y))
        .cloned()
        .collect())
}

pub fn article(s: &Snapshot, id: &ArticleId, today: NaiveDate) -> Result<ArticleView, ApiError> {
    Ok(ArticleView {
        article: s.catalog.article(id)?.clone(),
        cluster_id: s.catalog.cluster_of(id)?.cluster_id.clone(),
        access_status: s.catalog.access_status(id, today)?,
    })
}

pub fn forward_links(s: &Snapshot, id: &ArticleId, p: &LinkParams) -> Result<Vec<ForwardLink>, ApiError> {
    if p.cluster {
        let cluster = s.catalog.cluster_of(id)?.cluster_id.clone();
        Ok(s.references.cluster_forward_links(&s.catalog, &cluster, p.exclude_self)?)
    } else {
        Ok(s.references.forward_links_of(&s.catalog, id, p.exclude_self)?)
    }
}

pub fn parse_reference(source: &str) -> Result<ParseOutcome, ApiError> {
    RawReference::new(source, Default::default())?;
    Ok(parse_str(source)?)
}

pub fn resolve_candidates(s: &Snapshot, source: &str, year_hint: Option<i32>, threshold: f64) -> Result<Vec<Candidate>, ApiError> {
    let parsed = parse_reference(source)?.reference;
    Ok(s.resolver_index().resolve(&parsed, year_hint, threshold))
}

pub fn search(s: &Snapshot, p: &SearchParams) -> Result<Vec<SearchHit>, ApiError> {
    Ok(s.search_index().search(&s.catalog, &p.query()?)?)
}

pub fn reference_search(s: &Snapshot, p: &ReferenceSearchParams) -> Result<Vec<StoredReference>, ApiError> {
    Ok(s.reference_search_index()
        .search(&s.references, &p.query())?
        .into_iter()
        .cloned()
        .collect())
}

pub fn person(s: &Snapshot, id: &PersonId) -> Result<Person, ApiError> {
    Ok(s.catalog.person(id)?.clone())
}

pub fn person_publications(s: &Snapshot, id: &PersonId) -> Result<Vec<PublicationEntry>, ApiError> {
    Ok(s.catalog.person_publications(id)?)
}

pub fn impact_factor(s: &Snapshot, journal: &JournalId, p: &ImpactFactorParams) -> Result<ImpactFactorResult, ApiError> {
    let q = MetricsQuery {
        journal_id: journal.clone(),
        year: p.year,
        horizon: p.horizon,
        mode: p.mode,
    };
    Ok(metrics::impact_factor(&s.catalog, &s.references, &q)?)
}

/// The comparison table for one journal.
pub fn journal_report(s: &Snapshot, journal: &JournalId, p: &ReportParams) -> Result<Table, ApiError> {
    s.catalog.journal(journal)?;
    comparison(
        s,
        &ComparisonParams {
            journals: journal.to_string(),
            year: p.year,
            horizon: p.horizon,
        },
    )
}

pub fn comparison(s: &Snapshot, p: &ComparisonParams) -> Result<Table, ApiError> {
    MetricsQuery {
        journal_id: JournalId::from(""),
        year: p.year,
        horizon: p.horizon,
        mode: Mode::Integral,
    }
    .validate()?;
    Ok(metrics::comparison_report(&s.catalog, &s.references, &p.journal_ids(), p.year, p.horizon))
}

pub fn forthcoming(s: &Snapshot, journal: &JournalId) -> Result<Vec<ForthcomingEntry>, ApiError> {
    s.catalog.journal(journal)?;
    Ok(s.editorial.forthcoming_list(journal))
}

pub fn editorial_report(s: &Snapshot, journal: &JournalId, p: &PeriodParams) -> Result<EditorialReport, ApiError> {
    Ok(s.editorial.editorial_report(&s.catalog, journal, p.from, p.to)?)
}

pub fn flow(s: &Snapshot, id: &ManuscriptId, viewer: &UserId) -> Result<FlowView, ApiError> {
    Ok(s.editorial.view_flow(id, viewer)?)
}

pub fn transition_table() -> Vec<StageEdges> {
    Stage::ALL
        .into_iter()
        .map(|stage| StageEdges {
            stage,
            terminal: stage.is_terminal(),
            successors: stage.successors().to_vec(),
        })
        .collect()
}

pub fn me(s: &Snapshot, user: &UserId) -> Result<Me, ApiError> {
    let u = s.editorial.user(user)?;
    Ok(Me {
        user_id: u.user_id.clone(),
        name: u.name.clone(),
        email: u.email.clone(),
        person_id: u.person_id.clone(),
        roles: u.roles.clone(),
    })
}

/// Manuscripts the user wrote or submitted, as the user may see them.
pub fn my_manuscripts(s: &Snapshot, user: &UserId) -> Result<Vec<ManuscriptView>, ApiError> {
    s.editorial.user(user)?;
    Ok(s.editorial
        .manuscripts()
        .filter(|m| s.editorial.is_author(m, user))
        .filter_map(|m| s.editorial.view_flow(&m.manuscript_id, user).ok())
        .map(|v| v.manuscript)
        .collect())
}

/// Every manuscript of a journal, for its editors.
pub fn journal_manuscripts(s: &Snapshot, journal: &JournalId, viewer: &UserId) -> Result<Vec<ManuscriptView>, ApiError> {
    s.catalog.journal(journal)?;
    s.editorial
        .manuscripts()
        .filter(|m| &m.journal_id == journal)
        .map(|m| Ok(s.editorial.view_flow(&m.manuscript_id, viewer)?.manuscript))
        .collect()
}

pub fn my_assignments(s: &Snapshot, referee: &UserId) -> Result<Vec<AssignmentView>, ApiError> {
    s.editorial.user(referee)?;
    s.editorial
        .assignments_for_referee(referee)
        .map(|a| {
            let m = s.editorial.manuscript(&a.manuscript_id)?;
            Ok(AssignmentView {
                assignment: a.clone(),
                journal_id: m.journal_id.clone(),
                title: m.metadata.title.clone(),
                current_stage: m.current_stage,
            })
        })
        .collect()
}

/// A stored document, if it is part of the viewer's view of the
/// manuscript. Returns the (possibly relabelled) filename and the bytes.
pub fn document(s: &Snapshot, id: &ManuscriptId, hash: &str, viewer: &UserId) -> Result<(String, Vec<u8>), ApiError> {
    let view = s.editorial.view_flow(id, viewer)?;
    let doc = view
        .manuscript
        .files
        .iter()
        .find(|d| d.content_hash == hash)
        .ok_or_else(|| ApiError::not_found(format!("no document {hash} on {id}")))?;
    let bytes = s
        .editorial
        .blob(hash)
        .ok_or_else(|| ApiError::new(500, "corrupt_store", format!("blob {hash} is missing")))?;
    Ok((doc.filename.clone(), bytes.to_vec()))
}

pub fn export(s: &Snapshot) -> String {
    archive::export(&s.catalog, &s.references)
}

// ---------------------------------------------------------------------------
// Write requests

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct FileBody {
    pub filename: String,
    /// Standard base64.
    pub content_base64: String,
}

impl FileBody {
    pub fn new(filename: impl Into<String>, bytes: &[u8]) -> Self {
        Self {
            filename: filename.into(),
            content_base64: STANDARD.encode(bytes),
        }
    }

    pub fn upload(&self, role: DocumentRole) -> Result<Upload, ApiError> {
        let bytes = STANDARD
            .decode(self.content_base64.trim())
            .map_err(|e| ApiError::bad_request(format!("{}: content is not base64: {e}", self.filename)))?;
        Ok(Upload::new(role, self.filename.clone(), bytes))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct DocumentBody {
    pub role: DocumentRole,
    #[serde(flatten)]
    pub file: FileBody,
}

fn uploads(docs: &[DocumentBody]) -> Result<Vec<Upload>, ApiError> {
    docs.iter().map(|d| d.file.upload(d.role)).collect()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SubmitRequest {
    pub journal_id: JournalId,
    #[serde(flatten)]
    pub metadata: ManuscriptMetadata,
    pub source_latex: Option<FileBody>,
    pub source_pdf: Option<FileBody>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct TransitionRequest {
    pub to_stage: Stage,
    #[serde(default)]
    pub note: String,
    #[serde(default)]
    pub documents: Vec<DocumentBody>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct RevisionRequest {
    #[serde(default)]
    pub note: String,
    pub documents: Vec<DocumentBody>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct AssignRequest {
    pub referee: UserId,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ResponseRequest {
    pub accept: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ReviewRequest {
    pub assignment_id: AssignmentId,
    pub recommendation: Recommendation,
    pub review: FileBody,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct RegisterRequest {
    pub name: PersonName,
    #[serde(default)]
    pub variants: Vec<PersonName>,
    pub affiliation: Option<OrganizationId>,
    /// Register even when a person with the same name exists.
    #[serde(default)]
    pub force: bool,
}

/// Without `article_id` the stored reference is resolved automatically
/// to its best candidate (or cleared when there is none); with
/// `article_id: null` it is explicitly cleared.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ResolveRequest {
    pub reference_id: Option<ReferenceId>,
    /// Resolve free AMSBIB text without storing anything.
    pub source: Option<String>,
    pub year_hint: Option<i32>,
    #[serde(default, deserialize_with = "some_or_null")]
    pub article_id: Option<Option<ArticleId>>,
}

fn some_or_null<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<Option<ArticleId>>, D::Error> {
    Option::<ArticleId>::deserialize(d).map(Some)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResolveOutcome {
    Candidates(Vec<Candidate>),
    Committed(StoredReference),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpsertOutcome {
    pub change: String,
    pub article_id: ArticleId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolveAllOutcome {
    pub resolved: usize,
    pub links: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct NewUser {
    pub user_id: UserId,
    pub name: String,
    pub email: String,
    pub password: String,
    pub person_id: Option<PersonId>,
    #[serde(default)]
    pub roles: Vec<RoleGrant>,
}

fn change_name(u: Upsert) -> String {
    match u {
        Upsert::Created => "created",
        Upsert::Updated => "updated",
        Upsert::Unchanged => "unchanged",
    }
    .into()
}

// ---------------------------------------------------------------------------
// The service

pub struct Service {
    store: Store,
    sessions: Sessions,
    fuzzy_threshold: f64,
}

impl Service {
    pub fn new(store: Store, fuzzy_threshold: f64) -> Self {
        Self {
            store,
            sessions: Sessions::default(),
            fuzzy_threshold,
        }
    }

    pub fn open(config: &Config) -> Result<Self, ApiError> {
        Self::open_dir(&config.store_path, config)
    }

    fn open_dir(dir: &Path, config: &Config) -> Result<Self, ApiError> {
        let store = Store::open(dir)?;
        store.set_default_moving_wall(config.moving_wall_default);
        Ok(Self::new(store, config.fuzzy_threshold))
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn snapshot(&self) -> std::sync::Arc<Snapshot> {
        self.store.snapshot()
    }

    pub fn sessions(&self) -> &Sessions {
        &self.sessions
    }

    pub fn fuzzy_threshold(&self) -> f64 {
        self.fuzzy_threshold
    }

    pub fn login(&self, user: &UserId, password: &str, now: DateTime<Utc>) -> Result<Session, ApiError> {
        self.sessions.login(&self.snapshot().editorial, user, password, now)
    }

    pub fn add_user(&self, new: NewUser) -> Result<Me, ApiError> {
        self.store.write(|tx| {
            let (catalog, editorial) = tx.editorial_with_catalog();
            if let Some(p) = &new.person_id {
                catalog.person(p)?;
            }
            editorial.add_user(User {
                user_id: new.user_id.clone(),
                name: new.name.clone(),
                email: new.email.clone(),
                person_id: new.person_id.clone(),
                roles: vec![],
                password_hash: Some(hash_password(&new.password)),
            })?;
            for g in &new.roles {
                editorial.grant_role(catalog, &new.user_id, &g.journal_id, g.role)?;
            }
            let u = editorial.user(&new.user_id)?;
            Ok(Me {
                user_id: u.user_id.clone(),
                name: u.name.clone(),
                email: u.email.clone(),
                person_id: u.person_id.clone(),
                roles: u.roles.clone(),
            })
        })
    }

    pub fn set_password(&self, user: &UserId, password: &str) -> Result<(), ApiError> {
        let hash = hash_password(password);
        self.store.write(|tx| Ok(tx.editorial_mut().set_password_hash(user, hash)?))
    }

    pub fn ingest(&self, ndjson: &str, today: NaiveDate) -> Result<IngestReport, ApiError> {
        self.store.write(|tx| {
            let (catalog, refs) = tx.archive_mut();
            Ok::<_, ApiError>(archive::ingest_ndjson(catalog, refs, ndjson, today))
        })
    }

    pub fn upsert_article(&self, article: Article, today: NaiveDate) -> Result<UpsertOutcome, ApiError> {
        let article_id = article.article_id.clone();
        let change = self
            .store
            .write(|tx| Ok::<_, ApiError>(tx.catalog_mut().upsert_article(article, today.year())?))?;
        Ok(UpsertOutcome {
            change: change_name(change),
            article_id,
        })
    }

    pub fn link_versions(&self, a: &ArticleId, b: &ArticleId) -> Result<sciarchive::archive::WorkCluster, ApiError> {
        self.store.write(|tx| {
            let catalog = tx.catalog_mut();
            let id = catalog.link_versions(a, b)?;
            Ok(catalog.cluster(&id)?.clone())
        })
    }

    /// Registers a person; a caller without a linked person becomes that
    /// person.
    pub fn register_person(&self, req: RegisterRequest, caller: Option<&UserId>) -> Result<Registration, ApiError> {
        self.store.write(|tx| {
            let reg = tx
                .catalog_mut()
                .register_person(req.name.clone(), req.variants.clone(), req.affiliation.clone(), req.force)?;
            if let Some(user) = caller {
                let editorial = tx.editorial_mut();
                if editorial.user(user)?.person_id.is_none() {
                    editorial.link_person(user, &reg.person_id)?;
                }
            }
            Ok(reg)
        })
    }

    /// Merges two persons in the catalog and moves editorial references
    /// (user accounts, manuscript authorship) along.
    pub fn merge_persons(&self, keep: &PersonId, absorb: &PersonId) -> Result<Person, ApiError> {
        self.store.write(|tx| {
            let (catalog, _, editorial) = tx.parts_mut();
            let keep = catalog.resolve_person_id(keep)?;
            let absorb = catalog.resolve_person_id(absorb)?;
            let merged = catalog.merge_persons(&keep, &absorb)?;
            editorial.reassign_person(&absorb, &keep);
            Ok(merged)
        })
    }

    pub fn resolve(&self, req: &ResolveRequest) -> Result<ResolveOutcome, ApiError> {
        let threshold = self.fuzzy_threshold;
        match (&req.reference_id, &req.source) {
            (None, Some(source)) => Ok(ResolveOutcome::Candidates(resolve_candidates(
                &self.snapshot(),
                source,
                req.year_hint,
                threshold,
            )?)),
            (Some(id), None) => self.store.write(|tx| {
                let index = tx.resolver_index().into_owned();
                let (catalog, refs) = tx.references_with_catalog();
                let stored = refs.reference(id)?.clone();
                let candidates = index.resolve(&stored.parsed, stored.cited_year_hint, threshold);
                let target = match &req.article_id {
                    Some(explicit) => explicit.clone(),
                    None => candidates.first().map(|c| c.article_id.clone()),
                };
                Ok(ResolveOutcome::Committed(refs.commit_resolution(
                    catalog,
                    id,
                    target.as_ref(),
                    &candidates,
                )?))
            }),
            _ => Err(ApiError::bad_request("give exactly one of reference_id and source")),
        }
    }

    pub fn resolve_all(&self) -> Result<ResolveAllOutcome, ApiError> {
        let threshold = self.fuzzy_threshold;
        self.store.write(|tx| {
            let index = tx.resolver_index().into_owned();
            let (catalog, refs) = tx.references_with_catalog();
            let resolved = refs.resolve_all(catalog, &index, threshold);
            let links = refs.build_forward_links();
            Ok::<_, ApiError>(ResolveAllOutcome { resolved, links })
        })
    }

    pub fn submit(&self, author: &UserId, req: SubmitRequest, now: DateTime<Utc>) -> Result<ManuscriptView, ApiError> {
        let latex = req.source_latex.as_ref().map(|f| f.upload(DocumentRole::SourceLatex)).transpose()?;
        let pdf = req.source_pdf.as_ref().map(|f| f.upload(DocumentRole::SourcePdf)).transpose()?;
        let id = self.store.write(|tx| {
            let (catalog, editorial) = tx.editorial_with_catalog();
            Ok::<_, ApiError>(editorial.submit_manuscript(catalog, author, &req.journal_id, req.metadata, latex, pdf, now)?)
        })?;
        Ok(flow(&self.snapshot(), &id, author)?.manuscript)
    }

    pub fn transition(&self, id: &ManuscriptId, actor: &UserId, req: &TransitionRequest, now: DateTime<Utc>) -> Result<FlowRecord, ApiError> {
        let docs = uploads(&req.documents)?;
        self.store
            .write(|tx| Ok(tx.editorial_mut().transition(id, req.to_stage, actor, &req.note, docs, now)?))
    }

    pub fn upload_revision(&self, id: &ManuscriptId, author: &UserId, req: &RevisionRequest, now: DateTime<Utc>) -> Result<FlowRecord, ApiError> {
        let docs = uploads(&req.documents)?;
        self.store
            .write(|tx| Ok(tx.editorial_mut().upload_revision(id, author, &req.note, docs, now)?))
    }

    pub fn assign_referee(&self, id: &ManuscriptId, editor: &UserId, req: &AssignRequest, now: DateTime<Utc>) -> Result<RefereeAssignment, ApiError> {
        self.store
            .write(|tx| Ok(tx.editorial_mut().assign_referee(id, &req.referee, editor, now)?))
    }

    pub fn respond(&self, assignment: &AssignmentId, referee: &UserId, req: &ResponseRequest, now: DateTime<Utc>) -> Result<RefereeAssignment, ApiError> {
        self.store
            .write(|tx| Ok(tx.editorial_mut().respond_to_assignment(assignment, referee, req.accept, now)?))
    }

    pub fn submit_review(&self, id: &ManuscriptId, referee: &UserId, req: &ReviewRequest, now: DateTime<Utc>) -> Result<FlowRecord, ApiError> {
        let review = req.review.upload(DocumentRole::Review)?;
        self.store.write(|tx| {
            let editorial = tx.editorial_mut();
            if editorial.assignment(&req.assignment_id)?.manuscript_id != *id {
                return Err(ApiError::not_found(format!("assignment {} is not on {id}", req.assignment_id)));
            }
            Ok(editorial.submit_review(&req.assignment_id, referee, review, req.recommendation, now)?)
        })
    }

    pub fn grant_role(&self, user: &UserId, journal: &JournalId, role: Role) -> Result<Me, ApiError> {
        self.store.write(|tx| {
            let (catalog, editorial) = tx.editorial_with_catalog();
            editorial.grant_role(catalog, user, journal, role)?;
            Ok::<_, ApiError>(())
        })?;
        me(&self.snapshot(), user)
    }
}

#[cfg(test)]
mod tests {
    use sciarchive::fixtures::demo_state;

    use super::*;

    fn service() -> Service {
        let (c, r, e) = demo_state();
        Service::new(Store::from_state(c, r, e), 0.75)
    }

    #[test]
    fn search_params_map_to_query() {
        let p = SearchParams {
            title: Some("random tables".into()),
            year_from: Some(2009),
            ..Default::default()
        };
        let q = p.query().unwrap();
        assert_eq!(q.title_keywords, vec!["random tables".to_string()]);
        assert_eq!(q.year_range.unwrap().to, i32::MAX);
        let bad = SearchParams {
            year_from: Some(2010),
            year_to: Some(2009),
            ..Default::default()
        };
        assert!(bad.query().is_err());
    }

    #[test]
    fn resolve_request_distinguishes_null_from_absent() {
        let r: ResolveRequest = serde_json::from_str(r#"{"reference_id":"r-1"}"#).unwrap();
        assert_eq!(r.article_id, None);
        let r: ResolveRequest = serde_json::from_str(r#"{"reference_id":"r-1","article_id":null}"#).unwrap();
        assert_eq!(r.article_id, Some(None));
        let r: ResolveRequest = serde_json::from_str(r#"{"reference_id":"r-1","article_id":"a"}"#).unwrap();
        assert_eq!(r.article_id, Some(Some("a".into())));
    }

    #[test]
    fn commit_and_clear_resolution() {
        let svc = service();
        let snap = svc.snapshot();
        let r = snap
            .references
            .references()
            .find(|r| r.resolution.target().is_some())
            .unwrap()
            .clone();
        let target = r.resolution.target().unwrap().clone();
        let cleared = svc
            .resolve(&ResolveRequest {
                reference_id: Some(r.reference_id.clone()),
                source: None,
                year_hint: None,
                article_id: Some(None),
            })
            .unwrap();
        let ResolveOutcome::Committed(c) = cleared else { panic!() };
        assert!(c.resolution.target().is_none());
        let before = forward_links(&snap, &target, &LinkParams::default()).unwrap().len();
        let after = forward_links(&svc.snapshot(), &target, &LinkParams::default()).unwrap().len();
        assert!(after <= before);
        // The old snapshot is untouched.
        assert_eq!(snap.references.reference(&r.reference_id).unwrap(), &r);
        let again = svc
            .resolve(&ResolveRequest {
                reference_id: Some(r.reference_id.clone()),
                source: None,
                year_hint: None,
                article_id: None,
            })
            .unwrap();
        let ResolveOutcome::Committed(c) = again else { panic!() };
        assert_eq!(c.resolution.target(), Some(&target));
    }

    #[test]
    fn merge_moves_manuscript_authorship() {
        let svc = service();
        let reg = svc
            .register_person(
                RegisterRequest {
                    name: PersonName::new("Arnoldov", "B."),
                    variants: vec![],
                    affiliation: None,
                    force: false,
                },
                None,
            )
            .unwrap();
        svc.add_user(NewUser {
            user_id: "dup".into(),
            name: "Dup".into(),
            email: "dup@example.org".into(),
            password: "pw".into(),
            person_id: Some(reg.person_id.clone()),
            roles: vec![],
        })
        .unwrap();
        svc.merge_persons(&"t1-p00".into(), &reg.person_id).unwrap();
        let snap = svc.snapshot();
        assert_eq!(snap.editorial.user(&"dup".into()).unwrap().person_id, Some("t1-p00".into()));
        // The merged-away id still resolves.
        assert_eq!(snap.catalog.resolve_person_id(&reg.person_id).unwrap(), PersonId::from("t1-p00"));
    }

    #[test]
    fn transition_table_matches_stage_rules() {
        let t = transition_table();
        assert_eq!(t.len(), Stage::ALL.len());
        for e in t {
            assert_eq!(e.terminal, e.successors.is_empty());
            assert!(e.successors.iter().all(|s| e.stage.can_move_to(*s)));
        }
    }

    #[test]
    fn documents_follow_the_view() {
        let svc = service();
        let snap = svc.snapshot();
        let ms1: ManuscriptId = "ms-1".into();
        let review = snap
            .editorial
            .manuscript(&ms1)
            .unwrap()
            .files
            .iter()
            .find(|d| d.role == DocumentRole::Review)
            .unwrap()
            .clone();
        // The author sees the review under a scrubbed name.
        let (name, bytes) = document(&snap, &ms1, &review.content_hash, &"author".into()).unwrap();
        assert!(!name.contains("referee1"));
        assert!(String::from_utf8(bytes).unwrap().contains("Lemma 2"));
        // The declined referee sees nothing at all.
        assert_eq!(
            document(&snap, &ms1, &review.content_hash, &"referee2".into()).unwrap_err().code,
            "forbidden"
        );
        assert_eq!(document(&snap, &ms1, "00", &"editor".into()).unwrap_err().code, "not_found");
    }
}
