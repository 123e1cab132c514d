//! Manuscript submission and tracking: stages, roles, the append-only
//! flow of records, referee assignments and the notification outbox.

mod report;
mod view;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use chrono::{DateTime, Duration, DurationRound, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::archive::Catalog;
use crate::ids::{AssignmentId, JournalId, ManuscriptId, PersonId, UserId};

pub use report::{EditorialReport, ForthcomingEntry};
pub use view::{ActorView, DocumentView, FlowRecordView, FlowView, ManuscriptView, ViewerRole};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EditorialError {
    #[error("unknown user `{0}`")]
    UnknownUser(UserId),
    #[error("unknown journal `{0}`")]
    UnknownJournal(JournalId),
    #[error("unknown manuscript `{0}`")]
    UnknownManuscript(ManuscriptId),
    #[error("unknown assignment `{0}`")]
    UnknownAssignment(AssignmentId),
    #[error("user is not linked to a registered person")]
    UnregisteredAuthor,
    #[error("missing {0:?} document")]
    MissingFile(DocumentRole),
    #[error("no transition from {from} to {to}")]
    IllegalTransition { from: Stage, to: Stage },
    #[error("role does not permit this action")]
    Forbidden,
    #[error("manuscript is in terminal stage {0}")]
    TerminalState(Stage),
    #[error("referee is an author of the manuscript")]
    ConflictOfInterest,
    #[error("no accepted assignment for this user")]
    NotAssigned,
    #[error("not allowed at stage {0}")]
    WrongStage(Stage),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stage {
    Submitted,
    Classification,
    PeerReview,
    AuthorsRevision,
    ScientificEditing,
    Translation,
    EnglishEditing,
    Forthcoming,
    PublishedOnline,
    PublishedPrint,
    Rejected,
    Withdrawn,
}

impl Stage {
    pub const ALL: [Stage; 12] = [
        Stage::Submitted,
        Stage::Classification,
        Stage::PeerReview,
        Stage::AuthorsRevision,
        Stage::ScientificEditing,
        Stage::Translation,
        Stage::EnglishEditing,
        Stage::Forthcoming,
        Stage::PublishedOnline,
        Stage::PublishedPrint,
        Stage::Rejected,
        Stage::Withdrawn,
    ];

    pub fn is_terminal(self) -> bool {
        matches!(self, Stage::PublishedPrint | Stage::Rejected | Stage::Withdrawn)
    }

    /// The transition table.
    pub fn successors(self) -> &'static [Stage] {
        use Stage::*;
        match self {
            Submitted => &[Classification, Rejected, Withdrawn],
            Classification => &[PeerReview, Rejected],
            PeerReview => &[AuthorsRevision, ScientificEditing, Rejected],
            AuthorsRevision => &[PeerReview, ScientificEditing, Withdrawn],
            ScientificEditing => &[Translation, Forthcoming],
            Translation => &[EnglishEditing],
            EnglishEditing => &[Forthcoming],
            Forthcoming => &[PublishedOnline],
            PublishedOnline => &[PublishedPrint],
            PublishedPrint | Rejected | Withdrawn => &[],
        }
    }

    pub fn can_move_to(self, to: Stage) -> bool {
        self.successors().contains(&to)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Submitted => "Submitted",
            Stage::Classification => "Classification",
            Stage::PeerReview => "PeerReview",
            Stage::AuthorsRevision => "AuthorsRevision",
            Stage::ScientificEditing => "ScientificEditing",
            Stage::Translation => "Translation",
            Stage::EnglishEditing => "EnglishEditing",
            Stage::Forthcoming => "Forthcoming",
            Stage::PublishedOnline => "PublishedOnline",
            Stage::PublishedPrint => "PublishedPrint",
            Stage::Rejected => "Rejected",
            Stage::Withdrawn => "Withdrawn",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown stage `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Author,
    Referee,
    Editor,
    JournalAdministrator,
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "author" => Ok(Role::Author),
            "referee" => Ok(Role::Referee),
            "editor" => Ok(Role::Editor),
            "journaladministrator" | "journal_administrator" | "admin" => Ok(Role::JournalAdministrator),
            _ => Err(format!("unknown role `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocumentRole {
    SourceLatex,
    SourcePdf,
    Revision,
    Review,
    Translation,
    FinalPdf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recommendation {
    Accept,
    Minor,
    Major,
    Reject,
}

impl FromStr for Recommendation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "accept" => Ok(Self::Accept),
            "minor" => Ok(Self::Minor),
            "major" => Ok(Self::Major),
            "reject" => Ok(Self::Reject),
            _ => Err(format!("unknown recommendation `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleGrant {
    pub journal_id: JournalId,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct User {
    pub user_id: UserId,
    pub name: String,
    pub email: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub person_id: Option<PersonId>,
    #[serde(default)]
    pub roles: Vec<RoleGrant>,
    /// Opaque credential set by the login layer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub password_hash: Option<String>,
}

impl User {
    pub fn has_role(&self, journal: &JournalId, role: Role) -> bool {
        self.roles.iter().any(|g| g.journal_id == *journal && g.role == role)
    }
}

/// A file as uploaded, before it is stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Upload {
    pub role: DocumentRole,
    pub filename: String,
    pub bytes: Vec<u8>,
}

impl Upload {
    pub fn new(role: DocumentRole, filename: impl Into<String>, bytes: impl Into<Vec<u8>>) -> Self {
        Self {
            role,
            filename: filename.into(),
            bytes: bytes.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    /// SHA-256 of the content, lowercase hex.
    pub content_hash: String,
    pub role: DocumentRole,
    pub filename: String,
    pub uploaded_by: UserId,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManuscriptMetadata {
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
    /// Defaults to the submitting user's person.
    #[serde(default)]
    pub authors: Vec<PersonId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manuscript {
    pub manuscript_id: ManuscriptId,
    pub journal_id: JournalId,
    #[serde(flatten)]
    pub metadata: ManuscriptMetadata,
    pub submitted_by: UserId,
    pub files: Vec<Document>,
    pub current_stage: Stage,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowAction {
    Submission,
    Transition,
    RefereeAssigned,
    AssignmentResponse,
    ReviewSubmitted,
    RevisionUploaded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Actor {
    pub user_id: UserId,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowRecord {
    pub record_id: u64,
    pub manuscript_id: ManuscriptId,
    pub action: FlowAction,
    pub from_stage: Stage,
    pub to_stage: Stage,
    pub actor: Actor,
    pub timestamp: DateTime<Utc>,
    #[serde(default)]
    pub note: String,
    /// Content hashes of documents attached with this record.
    #[serde(default)]
    pub attached_documents: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment_id: Option<AssignmentId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recommendation: Option<Recommendation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignmentStatus {
    Invited,
    Accepted,
    Declined,
    Reported,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefereeAssignment {
    pub assignment_id: AssignmentId,
    pub manuscript_id: ManuscriptId,
    pub referee: UserId,
    pub assigned_by: UserId,
    pub status: AssignmentStatus,
    /// 1-based anonymity label index, shared by all assignments of the
    /// same referee on the same manuscript.
    pub label: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recommendation: Option<Recommendation>,
}

impl RefereeAssignment {
    pub fn label_text(&self) -> String {
        format!("Referee {}", self.label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Notification {
    pub notification_id: u64,
    pub recipient: UserId,
    pub template_id: String,
    pub body: String,
    pub manuscript_id: ManuscriptId,
    /// The flow record that triggered it.
    pub record_id: u64,
    pub created_at: DateTime<Utc>,
    pub delivered: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Editorial {
    users: BTreeMap<UserId, User>,
    manuscripts: BTreeMap<ManuscriptId, Manuscript>,
    flow: BTreeMap<ManuscriptId, Vec<FlowRecord>>,
    assignments: BTreeMap<AssignmentId, RefereeAssignment>,
    notifications: Vec<Notification>,
    next_record: u64,
    next_manuscript: u64,
    next_assignment: u64,
    /// Document payloads by content hash; persisted separately.
    #[serde(skip)]
    blobs: BTreeMap<String, Arc<Vec<u8>>>,
}

pub fn content_hash(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn micros(t: DateTime<Utc>) -> DateTime<Utc> {
    t.duration_trunc(Duration::microseconds(1)).unwrap_or(t)
}

impl Editorial {
    pub fn new() -> Self {
        Self::default()
    }

    // Users and roles.

    pub fn add_user(&mut self, user: User) -> Result<(), EditorialError> {
        if user.user_id.as_str().trim().is_empty() || user.name.trim().is_empty() {
            return Err(EditorialError::Invalid("user id and name are required".into()));
        }
        if self.users.contains_key(&user.user_id) {
            return Err(EditorialError::Invalid(format!("user `{}` exists", user.user_id)));
        }
        self.users.insert(user.user_id.clone(), user);
        Ok(())
    }

    pub fn user(&self, id: &UserId) -> Result<&User, EditorialError> {
        self.users.get(id).ok_or_else(|| EditorialError::UnknownUser(id.clone()))
    }

    pub fn users(&self) -> impl Iterator<Item = &User> {
        self.users.values()
    }

    pub fn set_password_hash(&mut self, id: &UserId, hash: String) -> Result<(), EditorialError> {
        let u = self.users.get_mut(id).ok_or_else(|| EditorialError::UnknownUser(id.clone()))?;
        u.password_hash = Some(hash);
        Ok(())
    }

    /// Links an account to a registered person; the catalog is the
    /// caller's to check.
    pub fn link_person(&mut self, id: &UserId, person: &PersonId) -> Result<(), EditorialError> {
        let u = self.users.get_mut(id).ok_or_else(|| EditorialError::UnknownUser(id.clone()))?;
        u.person_id = Some(person.clone());
        Ok(())
    }

    pub fn grant_role(&mut self, catalog: &Catalog, user: &UserId, journal: &JournalId, role: Role) -> Result<(), EditorialError> {
        catalog
            .journal(journal)
            .map_err(|_| EditorialError::UnknownJournal(journal.clone()))?;
        let u = self.users.get_mut(user).ok_or_else(|| EditorialError::UnknownUser(user.clone()))?;
        let grant = RoleGrant {
            journal_id: journal.clone(),
            role,
        };
        if !u.roles.contains(&grant) {
            u.roles.push(grant);
            u.roles.sort_by(|a, b| (&a.journal_id, a.role).cmp(&(&b.journal_id, b.role)));
        }
        Ok(())
    }

    /// Points users and manuscript author lists at the surviving person.
    pub fn reassign_person(&mut self, absorb: &PersonId, keep: &PersonId) {
        for u in self.users.values_mut() {
            if u.person_id.as_ref() == Some(absorb) {
                u.person_id = Some(keep.clone());
            }
        }
        for m in self.manuscripts.values_mut() {
            if m.metadata.authors.contains(absorb) {
                let mut out: Vec<PersonId> = Vec::new();
                for p in m.metadata.authors.drain(..) {
                    let p = if &p == absorb { keep.clone() } else { p };
                    if !out.contains(&p) {
                        out.push(p);
                    }
                }
                m.metadata.authors = out;
            }
        }
    }

    // Lookups.

    pub fn manuscript(&self, id: &ManuscriptId) -> Result<&Manuscript, EditorialError> {
        self.manuscripts
            .get(id)
            .ok_or_else(|| EditorialError::UnknownManuscript(id.clone()))
    }

    pub fn manuscripts(&self) -> impl Iterator<Item = &Manuscript> {
        self.manuscripts.values()
    }

    pub fn flow(&self, id: &ManuscriptId) -> Result<&[FlowRecord], EditorialError> {
        self.manuscript(id)?;
        Ok(self.flow.get(id).map(Vec::as_slice).unwrap_or(&[]))
    }

    pub fn assignment(&self, id: &AssignmentId) -> Result<&RefereeAssignment, EditorialError> {
        self.assignments
            .get(id)
            .ok_or_else(|| EditorialError::UnknownAssignment(id.clone()))
    }

    pub fn assignments_of(&self, manuscript: &ManuscriptId) -> impl Iterator<Item = &RefereeAssignment> {
        let m = manuscript.clone();
        self.assignments.values().filter(move |a| a.manuscript_id == m)
    }

    pub fn assignments_for_referee<'a>(&'a self, referee: &'a UserId) -> impl Iterator<Item = &'a RefereeAssignment> {
        self.assignments.values().filter(move |a| a.referee == *referee)
    }

    pub fn notifications(&self) -> &[Notification] {
        &self.notifications
    }

    pub fn blob(&self, hash: &str) -> Option<Arc<Vec<u8>>> {
        self.blobs.get(hash).cloned()
    }

    pub fn blob_hashes(&self) -> impl Iterator<Item = &String> {
        self.blobs.keys()
    }

    pub fn referenced_hashes(&self) -> BTreeSet<&String> {
        self.manuscripts
            .values()
            .flat_map(|m| m.files.iter().map(|d| &d.content_hash))
            .collect()
    }

    pub fn insert_blob(&mut self, bytes: Vec<u8>) -> String {
        let hash = content_hash(&bytes);
        self.blobs.entry(hash.clone()).or_insert_with(|| Arc::new(bytes));
        hash
    }

    /// True when the user is a listed author or the submitter.
    pub fn is_author(&self, m: &Manuscript, user: &UserId) -> bool {
        if m.submitted_by == *user {
            return true;
        }
        match self.users.get(user).and_then(|u| u.person_id.as_ref()) {
            Some(p) => m.metadata.authors.contains(p),
            None => false,
        }
    }

    fn editors_of(&self, journal: &JournalId) -> Vec<UserId> {
        self.users
            .values()
            .filter(|u| u.has_role(journal, Role::Editor))
            .map(|u| u.user_id.clone())
            .collect()
    }

    fn editorial_role(&self, journal: &JournalId, user: &UserId) -> Result<Role, EditorialError> {
        let u = self.user(user)?;
        if u.has_role(journal, Role::Editor) {
            Ok(Role::Editor)
        } else if u.has_role(journal, Role::JournalAdministrator) {
            Ok(Role::JournalAdministrator)
        } else {
            Err(EditorialError::Forbidden)
        }
    }

    // Mutations. Each validates fully before touching state, so a failed
    // call leaves no trace.

    fn next_timestamp(&self, id: &ManuscriptId, now: DateTime<Utc>) -> DateTime<Utc> {
        let now = micros(now);
        match self.flow.get(id).and_then(|f| f.last()) {
            Some(last) if now <= last.timestamp => last.timestamp + Duration::microseconds(1),
            _ => now,
        }
    }

    fn store_document(&mut self, upload: Upload, by: &UserId, at: DateTime<Utc>) -> Document {
        let hash = self.insert_blob(upload.bytes);
        Document {
            content_hash: hash,
            role: upload.role,
            filename: upload.filename,
            uploaded_by: by.clone(),
            timestamp: at,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn append(
        &mut self,
        id: &ManuscriptId,
        action: FlowAction,
        to: Stage,
        actor: Actor,
        note: String,
        uploads: Vec<Upload>,
        assignment_id: Option<AssignmentId>,
        recommendation: Option<Recommendation>,
        now: DateTime<Utc>,
    ) -> FlowRecord {
        let timestamp = self.next_timestamp(id, now);
        let docs: Vec<Document> = uploads
            .into_iter()
            .map(|u| self.store_document(u, &actor.user_id, timestamp))
            .collect();
        let m = self.manuscripts.get_mut(id).expect("checked by caller");
        let from = m.current_stage;
        m.current_stage = to;
        let attached = docs.iter().map(|d| d.content_hash.clone()).collect();
        m.files.extend(docs);
        self.next_record += 1;
        let record = FlowRecord {
            record_id: self.next_record,
            manuscript_id: id.clone(),
            action,
            from_stage: from,
            to_stage: to,
            actor,
            timestamp,
            note,
            attached_documents: attached,
            assignment_id,
            recommendation,
        };
        self.flow.entry(id.clone()).or_default().push(record.clone());
        for (recipient, template) in self.recipients(&record) {
            self.notify(&record, recipient, template);
        }
        record
    }

    /// The notification table: who hears about a flow record.
    pub fn recipients(&self, r: &FlowRecord) -> Vec<(UserId, &'static str)> {
        let Some(m) = self.manuscripts.get(&r.manuscript_id) else {
            return vec![];
        };
        let editors = || self.editors_of(&m.journal_id);
        let assigner = || {
            r.assignment_id
                .as_ref()
                .and_then(|a| self.assignments.get(a))
                .map(|a| a.assigned_by.clone())
        };
        let tag = |users: Vec<UserId>, t: &'static str| users.into_iter().map(|u| (u, t)).collect();
        match r.action {
            FlowAction::Submission => tag(editors(), "new_submission"),
            FlowAction::Transition if r.actor.role == Role::Author => tag(editors(), "manuscript_withdrawn"),
            FlowAction::Transition => tag(vec![m.submitted_by.clone()], "stage_changed"),
            FlowAction::RevisionUploaded => tag(editors(), "revision_uploaded"),
            FlowAction::RefereeAssigned => {
                let referee = r
                    .assignment_id
                    .as_ref()
                    .and_then(|a| self.assignments.get(a))
                    .map(|a| a.referee.clone());
                tag(referee.into_iter().collect(), "referee_invitation")
            }
            FlowAction::AssignmentResponse => tag(assigner().into_iter().collect(), "assignment_response"),
            FlowAction::ReviewSubmitted => tag(assigner().into_iter().collect(), "review_received"),
        }
    }

    fn notify(&mut self, r: &FlowRecord, recipient: UserId, template: &'static str) {
        let title = &self.manuscripts[&r.manuscript_id].metadata.title;
        let body = match template {
            "new_submission" => format!("New submission {}: \"{title}\".", r.manuscript_id),
            "manuscript_withdrawn" => format!("Manuscript {} \"{title}\" was withdrawn by its author.", r.manuscript_id),
            "stage_changed" => format!(
                "Manuscript {} \"{title}\" moved from {} to {}.",
                r.manuscript_id, r.from_stage, r.to_stage
            ),
            "revision_uploaded" => format!("A revision of {} \"{title}\" was uploaded.", r.manuscript_id),
            "referee_invitation" => format!("You are invited to review {} \"{title}\".", r.manuscript_id),
            "assignment_response" => format!("A referee answered the invitation for {}.", r.manuscript_id),
            _ => format!("A review of {} \"{title}\" was received.", r.manuscript_id),
        };
        let id = self.notifications.len() as u64 + 1;
        self.notifications.push(Notification {
            notification_id: id,
            recipient,
            template_id: template.to_string(),
            body,
            manuscript_id: r.manuscript_id.clone(),
            record_id: r.record_id,
            created_at: r.timestamp,
            delivered: false,
        });
    }

    fn open_manuscript(&self, id: &ManuscriptId) -> Result<&Manuscript, EditorialError> {
        let m = self.manuscript(id)?;
        if m.current_stage.is_terminal() {
            return Err(EditorialError::TerminalState(m.current_stage));
        }
        Ok(m)
    }

    pub fn submit_manuscript(
        &mut self,
        catalog: &Catalog,
        author: &UserId,
        journal: &JournalId,
        mut metadata: ManuscriptMetadata,
        source_latex: Option<Upload>,
        source_pdf: Option<Upload>,
        now: DateTime<Utc>,
    ) -> Result<ManuscriptId, EditorialError> {
        let user = self.user(author)?;
        let person = user.person_id.clone().ok_or(EditorialError::UnregisteredAuthor)?;
        let person = catalog
            .resolve_person_id(&person)
            .map_err(|_| EditorialError::UnregisteredAuthor)?;
        catalog
            .journal(journal)
            .map_err(|_| EditorialError::UnknownJournal(journal.clone()))?;
        let latex = source_latex
            .filter(|u| !u.bytes.is_empty())
            .ok_or(EditorialError::MissingFile(DocumentRole::SourceLatex))?;
        let pdf = source_pdf
            .filter(|u| !u.bytes.is_empty())
            .ok_or(EditorialError::MissingFile(DocumentRole::SourcePdf))?;
        if metadata.title.trim().is_empty() {
            return Err(EditorialError::Invalid("title is empty".into()));
        }
        if metadata.authors.is_empty() {
            metadata.authors.push(person.clone());
        }
        let mut authors = Vec::new();
        for p in &metadata.authors {
            let p = catalog
                .resolve_person_id(p)
                .map_err(|e| EditorialError::Invalid(e.to_string()))?;
            if !authors.contains(&p) {
                authors.push(p);
            }
        }
        if !authors.contains(&person) {
            return Err(EditorialError::Invalid("the submitting user must be an author".into()));
        }
        metadata.authors = authors;

        self.next_manuscript += 1;
        let id = ManuscriptId(format!("ms-{}", self.next_manuscript));
        let created_at = micros(now);
        self.manuscripts.insert(
            id.clone(),
            Manuscript {
                manuscript_id: id.clone(),
                journal_id: journal.clone(),
                metadata,
                submitted_by: author.clone(),
                files: vec![],
                current_stage: Stage::Submitted,
                created_at,
            },
        );
        let latex = Upload { role: DocumentRole::SourceLatex, ..latex };
        let pdf = Upload { role: DocumentRole::SourcePdf, ..pdf };
        self.append(
            &id,
            FlowAction::Submission,
            Stage::Submitted,
            Actor {
                user_id: author.clone(),
                role: Role::Author,
            },
            String::new(),
            vec![latex, pdf],
            None,
            None,
            created_at,
        );
        Ok(id)
    }

    pub fn transition(
        &mut self,
        id: &ManuscriptId,
        to: Stage,
        actor: &UserId,
        note: &str,
        documents: Vec<Upload>,
        now: DateTime<Utc>,
    ) -> Result<FlowRecord, EditorialError> {
        let m = self.open_manuscript(id)?;
        let from = m.current_stage;
        if !from.can_move_to(to) {
            return Err(EditorialError::IllegalTransition { from, to });
        }
        self.user(actor)?;
        let role = if to == Stage::Withdrawn {
            if self.is_author(m, actor) {
                Role::Author
            } else if self.user(actor)?.has_role(&m.journal_id, Role::JournalAdministrator) {
                Role::JournalAdministrator
            } else {
                return Err(EditorialError::Forbidden);
            }
        } else {
            self.editorial_role(&m.journal_id, actor)?
        };
        let actor = Actor {
            user_id: actor.clone(),
            role,
        };
        Ok(self.append(id, FlowAction::Transition, to, actor, note.to_string(), documents, None, None, now))
    }

    /// Authors add revision files while the manuscript is with them.
    pub fn upload_revision(
        &mut self,
        id: &ManuscriptId,
        author: &UserId,
        note: &str,
        documents: Vec<Upload>,
        now: DateTime<Utc>,
    ) -> Result<FlowRecord, EditorialError> {
        let m = self.open_manuscript(id)?;
        self.user(author)?;
        if !self.is_author(m, author) {
            return Err(EditorialError::Forbidden);
        }
        if m.current_stage != Stage::AuthorsRevision {
            return Err(EditorialError::WrongStage(m.current_stage));
        }
        if documents.is_empty() {
            return Err(EditorialError::MissingFile(DocumentRole::Revision));
        }
        let stage = m.current_stage;
        let docs = documents
            .into_iter()
            .map(|d| Upload { role: DocumentRole::Revision, ..d })
            .collect();
        let actor = Actor {
            user_id: author.clone(),
            role: Role::Author,
        };
        Ok(self.append(id, FlowAction::RevisionUploaded, stage, actor, note.to_string(), docs, None, None, now))
    }

    pub fn assign_referee(
        &mut self,
        id: &ManuscriptId,
        referee: &UserId,
        editor: &UserId,
        now: DateTime<Utc>,
    ) -> Result<RefereeAssignment, EditorialError> {
        let m = self.open_manuscript(id)?;
        let role = self.editorial_role(&m.journal_id, editor)?;
        if !matches!(m.current_stage, Stage::Classification | Stage::PeerReview) {
            return Err(EditorialError::WrongStage(m.current_stage));
        }
        let r = self.user(referee)?;
        if self.is_author(m, referee) {
            return Err(EditorialError::ConflictOfInterest);
        }
        if !r.has_role(&m.journal_id, Role::Referee) {
            return Err(EditorialError::Invalid(format!("user `{referee}` is not a referee of this journal")));
        }
        let previous: Vec<&RefereeAssignment> = self.assignments_of(id).collect();
        if previous
            .iter()
            .any(|a| a.referee == *referee && matches!(a.status, AssignmentStatus::Invited | AssignmentStatus::Accepted))
        {
            return Err(EditorialError::Invalid(format!("user `{referee}` already has an open assignment")));
        }
        let label = previous
            .iter()
            .find(|a| a.referee == *referee)
            .map(|a| a.label)
            .unwrap_or_else(|| previous.iter().map(|a| a.label).max().unwrap_or(0) + 1);
        let stage = m.current_stage;

        self.next_assignment += 1;
        let assignment = RefereeAssignment {
            assignment_id: AssignmentId(format!("as-{}", self.next_assignment)),
            manuscript_id: id.clone(),
            referee: referee.clone(),
            assigned_by: editor.clone(),
            status: AssignmentStatus::Invited,
            label,
            recommendation: None,
        };
        self.assignments.insert(assignment.assignment_id.clone(), assignment.clone());
        let actor = Actor {
            user_id: editor.clone(),
            role,
        };
        self.append(
            id,
            FlowAction::RefereeAssigned,
            stage,
            actor,
            String::new(),
            vec![],
            Some(assignment.assignment_id.clone()),
            None,
            now,
        );
        Ok(assignment)
    }

    pub fn respond_to_assignment(
        &mut self,
        assignment: &AssignmentId,
        referee: &UserId,
        accept: bool,
        now: DateTime<Utc>,
    ) -> Result<RefereeAssignment, EditorialError> {
        let a = self.assignment(assignment)?.clone();
        self.open_manuscript(&a.manuscript_id)?;
        if a.referee != *referee {
            return Err(EditorialError::NotAssigned);
        }
        if a.status != AssignmentStatus::Invited {
            return Err(EditorialError::Invalid("invitation already answered".into()));
        }
        let stage = self.manuscripts[&a.manuscript_id].current_stage;
        let status = if accept {
            AssignmentStatus::Accepted
        } else {
            AssignmentStatus::Declined
        };
        self.assignments.get_mut(assignment).expect("exists").status = status;
        let actor = Actor {
            user_id: referee.clone(),
            role: Role::Referee,
        };
        let note = if accept { "accepted" } else { "declined" };
        self.append(
            &a.manuscript_id,
            FlowAction::AssignmentResponse,
            stage,
            actor,
            note.into(),
            vec![],
            Some(assignment.clone()),
            None,
            now,
        );
        Ok(self.assignments[assignment].clone())
    }

    pub fn submit_review(
        &mut self,
        assignment: &AssignmentId,
        referee: &UserId,
        review: Upload,
        recommendation: Recommendation,
        now: DateTime<Utc>,
    ) -> Result<FlowRecord, EditorialError> {
        let a = self.assignment(assignment)?.clone();
        self.open_manuscript(&a.manuscript_id)?;
        if a.referee != *referee || a.status != AssignmentStatus::Accepted {
            return Err(EditorialError::NotAssigned);
        }
        if review.bytes.is_empty() {
            return Err(EditorialError::MissingFile(DocumentRole::Review));
        }
        let stage = self.manuscripts[&a.manuscript_id].current_stage;
        {
            let a = self.assignments.get_mut(assignment).expect("exists");
            a.status = AssignmentStatus::Reported;
            a.recommendation = Some(recommendation);
        }
        let actor = Actor {
            user_id: referee.clone(),
            role: Role::Referee,
        };
        let review = Upload { role: DocumentRole::Review, ..review };
        Ok(self.append(
            &a.manuscript_id,
            FlowAction::ReviewSubmitted,
            stage,
            actor,
            String::new(),
            vec![review],
            Some(assignment.clone()),
            Some(recommendation),
            now,
        ))
    }
}

/// Replays a flow chain from Submitted; `None` if the chain is broken.
pub fn replay(records: &[FlowRecord]) -> Option<Stage> {
    let mut stage = Stage::Submitted;
    let mut last: Option<DateTime<Utc>> = None;
    for (i, r) in records.iter().enumerate() {
        if r.from_stage != stage || last.is_some_and(|t| r.timestamp <= t) {
            return None;
        }
        let legal = match r.action {
            FlowAction::Submission => i == 0 && r.to_stage == Stage::Submitted,
            FlowAction::Transition => stage.can_move_to(r.to_stage),
            _ => r.to_stage == stage,
        };
        if !legal || (i == 0) != (r.action == FlowAction::Submission) {
            return None;
        }
        stage = r.to_stage;
        last = Some(r.timestamp);
    }
    Some(stage)
}
