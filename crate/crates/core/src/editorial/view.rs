use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{
    AssignmentStatus, Document, DocumentRole, Editorial, EditorialError, FlowAction, FlowRecord, Manuscript,
    ManuscriptMetadata, Recommendation, Role, Stage,
};
use crate::ids::{JournalId, ManuscriptId, UserId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewerRole {
    Editorial,
    Author,
    Referee,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActorView {
    pub user_id: String,
    pub name: String,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentView {
    pub content_hash: String,
    pub role: DocumentRole,
    pub filename: String,
    pub uploaded_by: String,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowRecordView {
    pub record_id: u64,
    pub action: FlowAction,
    pub from_stage: Stage,
    pub to_stage: Stage,
    pub actor: ActorView,
    pub timestamp: DateTime<Utc>,
    pub note: String,
    pub documents: Vec<DocumentView>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recommendation: Option<Recommendation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManuscriptView {
    pub manuscript_id: ManuscriptId,
    pub journal_id: JournalId,
    #[serde(flatten)]
    pub metadata: ManuscriptMetadata,
    pub submitted_by: String,
    pub current_stage: Stage,
    pub created_at: DateTime<Utc>,
    pub files: Vec<DocumentView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowView {
    pub viewer_role: ViewerRole,
    pub manuscript: ManuscriptView,
    pub records: Vec<FlowRecordView>,
}

/// Replaces referee identities with their labels. Longer needles go first
/// so that one identity never leaves a fragment of another behind.
struct Scrubber {
    labels: BTreeMap<UserId, String>,
    needles: Vec<(String, String)>,
}

impl Scrubber {
    fn new(e: &Editorial, m: &Manuscript, keep: Option<&UserId>) -> Self {
        let mut labels = BTreeMap::new();
        let mut needles = Vec::new();
        for a in e.assignments_of(&m.manuscript_id) {
            if Some(&a.referee) == keep || labels.contains_key(&a.referee) {
                continue;
            }
            let label = a.label_text();
            if let Some(u) = e.users.get(&a.referee) {
                for s in [&u.user_id.0, &u.name, &u.email] {
                    if !s.is_empty() {
                        needles.push((s.clone(), label.clone()));
                    }
                }
            }
            labels.insert(a.referee.clone(), label);
        }
        needles.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        Self { labels, needles }
    }

    fn text(&self, s: &str) -> String {
        let mut out = s.to_string();
        for (needle, label) in &self.needles {
            if out.contains(needle.as_str()) {
                out = out.replace(needle.as_str(), label);
            }
        }
        out
    }

    fn user(&self, e: &Editorial, id: &UserId) -> (String, String) {
        match self.labels.get(id) {
            Some(label) => (label.clone(), label.clone()),
            None => (
                id.0.clone(),
                e.users.get(id).map(|u| u.name.clone()).unwrap_or_default(),
            ),
        }
    }
}

impl Editorial {
    /// Which view of the manuscript the user may see, if any.
    pub fn viewer_role(&self, id: &ManuscriptId, viewer: &UserId) -> Result<ViewerRole, EditorialError> {
        let m = self.manuscript(id)?;
        let u = self.user(viewer)?;
        if u.has_role(&m.journal_id, Role::Editor) || u.has_role(&m.journal_id, Role::JournalAdministrator) {
            Ok(ViewerRole::Editorial)
        } else if self.is_author(m, viewer) {
            Ok(ViewerRole::Author)
        } else if self
            .assignments_of(id)
            .any(|a| a.referee == *viewer && a.status != AssignmentStatus::Declined)
        {
            Ok(ViewerRole::Referee)
        } else {
            Err(EditorialError::Forbidden)
        }
    }

    pub fn view_flow(&self, id: &ManuscriptId, viewer: &UserId) -> Result<FlowView, EditorialError> {
        let role = self.viewer_role(id, viewer)?;
        let m = self.manuscript(id)?;
        let flow = self.flow(id)?;
        let scrub = match role {
            ViewerRole::Editorial => None,
            ViewerRole::Author => Some(Scrubber::new(self, m, None)),
            ViewerRole::Referee => Some(Scrubber::new(self, m, Some(viewer))),
        };
        let own = |r: &FlowRecord| {
            r.assignment_id
                .as_ref()
                .and_then(|a| self.assignments.get(a))
                .is_some_and(|a| a.referee == *viewer)
        };
        let visible = |r: &FlowRecord| match role {
            ViewerRole::Referee => match r.action {
                FlowAction::Submission | FlowAction::Transition | FlowAction::RevisionUploaded => true,
                _ => own(r),
            },
            _ => true,
        };
        let doc_view = |d: &Document| {
            let (uploaded_by, filename) = match &scrub {
                Some(s) => (s.user(self, &d.uploaded_by).0, s.text(&d.filename)),
                None => (d.uploaded_by.0.clone(), d.filename.clone()),
            };
            DocumentView {
                content_hash: d.content_hash.clone(),
                role: d.role,
                filename,
                uploaded_by,
                timestamp: d.timestamp,
            }
        };
        // Referees see author files and their own reviews only.
        let doc_visible = |d: &Document| role != ViewerRole::Referee || d.role != DocumentRole::Review || d.uploaded_by == *viewer;

        let records = flow
            .iter()
            .filter(|r| visible(r))
            .map(|r| {
                let (user_id, name) = match &scrub {
                    Some(s) => s.user(self, &r.actor.user_id),
                    None => (
                        r.actor.user_id.0.clone(),
                        self.users.get(&r.actor.user_id).map(|u| u.name.clone()).unwrap_or_default(),
                    ),
                };
                let documents = r
                    .attached_documents
                    .iter()
                    .filter_map(|h| m.files.iter().find(|d| d.content_hash == *h && d.timestamp == r.timestamp))
                    .filter(|d| doc_visible(d))
                    .map(doc_view)
                    .collect();
                FlowRecordView {
                    record_id: r.record_id,
                    action: r.action,
                    from_stage: r.from_stage,
                    to_stage: r.to_stage,
                    actor: ActorView {
                        user_id,
                        name,
                        role: r.actor.role,
                    },
                    timestamp: r.timestamp,
                    note: scrub.as_ref().map_or_else(|| r.note.clone(), |s| s.text(&r.note)),
                    documents,
                    recommendation: match role {
                        ViewerRole::Author => None,
                        _ => r.recommendation,
                    },
                }
            })
            .collect();
        let manuscript = ManuscriptView {
            manuscript_id: m.manuscript_id.clone(),
            journal_id: m.journal_id.clone(),
            metadata: m.metadata.clone(),
            submitted_by: m.submitted_by.0.clone(),
            current_stage: m.current_stage,
            created_at: m.created_at,
            files: m.files.iter().filter(|d| doc_visible(d)).map(doc_view).collect(),
        };
        Ok(FlowView {
            viewer_role: role,
            manuscript,
            records,
        })
    }
}
