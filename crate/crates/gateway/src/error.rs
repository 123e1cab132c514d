//! One error type for every surface. Each module error variant maps to a
//! stable machine code and an HTTP status; the CLI maps codes to exit
//! statuses.

use std::fmt;

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};

use sciarchive::amsbib::AmsbibError;
use sciarchive::archive::ArchiveError;
use sciarchive::citegraph::CitegraphError;
use sciarchive::editorial::EditorialError;
use sciarchive::metrics::MetricsError;
use sciarchive::store::StoreError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub http_status: u16,
    pub code: String,
    pub message: String,
}

impl ApiError {
    pub fn new(http_status: u16, code: &str, message: impl Into<String>) -> Self {
        Self {
            http_status,
            code: code.into(),
            message: message.into(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(400, "bad_request", message)
    }

    pub fn unauthorized() -> Self {
        Self::new(401, "unauthorized", "missing, unknown or expired session token")
    }

    pub fn forbidden() -> Self {
        Self::new(403, "forbidden", "role does not permit this action")
    }

    pub fn not_found(what: impl Into<String>) -> Self {
        Self::new(404, "not_found", what)
    }

    /// True for failures caused by the server rather than the request.
    pub fn is_internal(&self) -> bool {
        self.http_status >= 500
    }
}

impl fmt::Display for ApiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for ApiError {}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.http_status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

fn coded(status: u16, code: &str, e: &impl fmt::Display) -> ApiError {
    ApiError::new(status, code, e.to_string())
}

impl From<AmsbibError> for ApiError {
    fn from(e: AmsbibError) -> Self {
        match e {
            AmsbibError::UnbalancedBraces { .. } => coded(422, "unbalanced_braces", &e),
            AmsbibError::EmptyReference => coded(422, "empty_reference", &e),
            AmsbibError::InvalidUtf8 { .. } => coded(400, "invalid_utf8", &e),
        }
    }
}

impl From<ArchiveError> for ApiError {
    fn from(e: ArchiveError) -> Self {
        use ArchiveError as A;
        match e {
            A::UnknownJournal(_) => coded(404, "unknown_journal", &e),
            A::UnknownArticle(_) => coded(404, "unknown_article", &e),
            A::UnknownPerson(_) => coded(404, "unknown_person", &e),
            A::UnknownOrganization(_) => coded(404, "unknown_organization", &e),
            A::UnknownCluster(_) => coded(404, "unknown_cluster", &e),
            A::SameLanguageConflict(_) => coded(409, "same_language_conflict", &e),
            A::DuplicateSuspected { .. } => coded(409, "duplicate_suspected", &e),
            A::SelfMerge => coded(422, "self_merge", &e),
            A::EmptyQuery => coded(400, "empty_query", &e),
            A::Invalid(_) => coded(422, "invalid_record", &e),
        }
    }
}

impl From<CitegraphError> for ApiError {
    fn from(e: CitegraphError) -> Self {
        use CitegraphError as C;
        match e {
            C::UnknownReference(_) => coded(404, "unknown_reference", &e),
            C::UnknownCitingDocument(_) => coded(404, "unknown_citing_document", &e),
            C::Archive(inner) => inner.into(),
            C::Amsbib(inner) => inner.into(),
            C::EmptyQuery => coded(400, "empty_query", &e),
            C::Invalid(_) => coded(422, "invalid_resolution", &e),
        }
    }
}

impl From<MetricsError> for ApiError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::Archive(inner) => inner.into(),
            MetricsError::InvalidQuery(_) => coded(400, "invalid_query", &e),
        }
    }
}

impl From<EditorialError> for ApiError {
    fn from(e: EditorialError) -> Self {
        use EditorialError as E;
        match e {
            E::UnknownUser(_) => coded(404, "unknown_user", &e),
            E::UnknownJournal(_) => coded(404, "unknown_journal", &e),
            E::UnknownManuscript(_) => coded(404, "unknown_manuscript", &e),
            E::UnknownAssignment(_) => coded(404, "unknown_assignment", &e),
            E::UnregisteredAuthor => coded(422, "unregistered_author", &e),
            E::MissingFile(_) => coded(422, "missing_file", &e),
            E::IllegalTransition { .. } => coded(409, "illegal_transition", &e),
            E::Forbidden => coded(403, "forbidden", &e),
            E::TerminalState(_) => coded(409, "terminal_state", &e),
            E::ConflictOfInterest => coded(409, "conflict_of_interest", &e),
            E::NotAssigned => coded(403, "not_assigned", &e),
            E::WrongStage(_) => coded(409, "wrong_stage", &e),
            E::Invalid(_) => coded(422, "invalid_request", &e),
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Io(_) => coded(500, "store_io", &e),
            StoreError::Corrupt(_) => coded(500, "corrupt_store", &e),
        }
    }
}
