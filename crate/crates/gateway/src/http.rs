//! The HTTP/JSON API under `/api/v1`.
//!
//! Every route is registered together with an [`Access`] annotation, and
//! a guard in front of the handler enforces it. The resulting inventory is
//! public so tests can check that no mutating route is left open.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{DefaultBodyLimit, FromRequest, FromRequestParts, Path, RawPathParams, Request, State};
use axum::handler::Handler;
use axum::http::header::{AUTHORIZATION, CONTENT_DISPOSITION, CONTENT_TYPE};
use axum::http::request::Parts;
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, MethodRouter};
use axum::{Extension, Json, Router};
use chrono::Utc;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use sciarchive::archive::Article;
use sciarchive::ids::{ArticleId, AssignmentId, JournalId, ManuscriptId, PersonId};

use crate::auth::Session;
use crate::error::ApiError;
use crate::ops::{self, Service};
use crate::page::PageParams;

pub const BASE: &str = "/api/v1";
/// Uploads travel base64-encoded inside JSON.
const BODY_LIMIT: usize = 64 * 1024 * 1024;

/// Who may call a route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Access {
    Public,
    /// Any session; the editorial role matrix decides the rest.
    Authenticated,
    /// Editor or administrator of the journal named by `{id}`.
    JournalStaff,
    /// Administrator of at least one journal.
    ArchiveAdmin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RouteInfo {
    pub method: &'static str,
    pub path: &'static str,
    pub access: Access,
    pub mutating: bool,
}

type AppState = Arc<Service>;

// ---------------------------------------------------------------------------
// Extractors that answer with ApiError instead of plain-text rejections

pub struct Q<T>(pub T);

impl<T: DeserializeOwned, S: Send + Sync> FromRequestParts<S> for Q<T> {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &S) -> Result<Self, ApiError> {
        axum::extract::Query::<T>::from_request_parts(parts, state)
            .await
            .map(|q| Q(q.0))
            .map_err(|e: QueryRejection| ApiError::bad_request(e.body_text()))
    }
}

pub struct J<T>(pub T);

impl<T: DeserializeOwned, S: Send + Sync> FromRequest<S> for J<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, ApiError> {
        Json::<T>::from_request(req, state)
            .await
            .map(|j| J(j.0))
            .map_err(|e: JsonRejection| ApiError::bad_request(e.body_text()))
    }
}

fn text_body(bytes: &Bytes) -> Result<String, ApiError> {
    String::from_utf8(bytes.to_vec()).map_err(|e| ApiError::new(400, "invalid_utf8", e.to_string()))
}

type ApiResult<T> = Result<Json<T>, ApiError>;

// ---------------------------------------------------------------------------
// Guard

#[derive(Clone)]
struct Guard {
    service: AppState,
    access: Access,
}

fn bearer(req: &Request) -> Option<&str> {
    req.headers()
        .get(AUTHORIZATION)?
        .to_str()
        .ok()?
        .strip_prefix("Bearer ")
        .map(str::trim)
}

async fn guard(State(g): State<Guard>, params: RawPathParams, mut req: Request, next: Next) -> Response {
    if g.access == Access::Public {
        return next.run(req).await;
    }
    let session = match bearer(&req).map(|t| g.service.sessions().lookup(t, Utc::now())) {
        Some(Ok(s)) => s,
        _ => return ApiError::unauthorized().into_response(),
    };
    let allowed = match g.access {
        Access::Public | Access::Authenticated => true,
        Access::ArchiveAdmin => session.is_archive_admin(),
        Access::JournalStaff => params
            .iter()
            .find(|(k, _)| *k == "id")
            .is_some_and(|(_, v)| session.is_staff(&JournalId::from(v))),
    };
    if !allowed {
        return ApiError::forbidden().into_response();
    }
    req.extensions_mut().insert(session);
    next.run(req).await
}

struct Routes {
    service: AppState,
    router: Router<AppState>,
    inventory: Vec<RouteInfo>,
}

impl Routes {
    fn add(mut self, method: &'static str, path: &'static str, access: Access, mutating: bool, mr: MethodRouter<AppState>) -> Self {
        let g = Guard {
            service: self.service.clone(),
            access,
        };
        self.router = self.router.route(path, mr.route_layer(middleware::from_fn_with_state(g, guard)));
        self.inventory.push(RouteInfo {
            method,
            path,
            access,
            mutating,
        });
        self
    }

    fn get<H: Handler<T, AppState>, T: 'static>(self, path: &'static str, access: Access, h: H) -> Self {
        self.add("GET", path, access, false, get(h))
    }

    fn post<H: Handler<T, AppState>, T: 'static>(self, path: &'static str, access: Access, h: H) -> Self {
        self.add("POST", path, access, true, post(h))
    }

    /// A POST that only computes an answer from its body.
    fn post_pure<H: Handler<T, AppState>, T: 'static>(self, path: &'static str, access: Access, h: H) -> Self {
        self.add("POST", path, access, false, post(h))
    }
}

fn routes(service: AppState) -> Routes {
    use Access::*;
    Routes {
        service,
        router: Router::new(),
        inventory: vec![],
    }
    .get("/health", Public, health)
    .get("/stages", Public, stages)
    .post("/auth/login", Public, login)
    .post("/auth/logout", Authenticated, logout)
    .get("/auth/me", Authenticated, me)
    .get("/journals", Public, journals)
    .get("/journals/{id}", Public, journal)
    .get("/journals/{id}/impact-factor", Public, impact_factor)
    .get("/journals/{id}/report", Public, journal_report)
    .get("/journals/{id}/forthcoming", Public, forthcoming)
    .get("/journals/{id}/editorial-report", JournalStaff, editorial_report)
    .get("/journals/{id}/manuscripts", JournalStaff, journal_manuscripts)
    .get("/metrics/comparison", Public, comparison)
    .get("/articles", Public, articles)
    .post("/articles", ArchiveAdmin, upsert_article)
    .get("/articles/{id}", Public, article)
    .get("/articles/{id}/forward-links", Public, forward_links)
    .post("/articles/{a}/link-version/{b}", ArchiveAdmin, link_version)
    .post_pure("/references/parse", Public, parse_reference)
    .post("/references/resolve", ArchiveAdmin, resolve)
    .get("/references/search", Public, reference_search)
    .get("/search", Public, search)
    .post("/persons", Authenticated, register_person)
    .get("/persons/{id}", Public, person)
    .post("/persons/{keep}/merge/{absorb}", ArchiveAdmin, merge_persons)
    .get("/persons/{id}/publications", Public, publications)
    .post("/manuscripts", Authenticated, submit)
    .get("/manuscripts/{id}/flow", Authenticated, flow)
    .post("/manuscripts/{id}/transitions", Authenticated, transition)
    .post("/manuscripts/{id}/referees", Authenticated, assign_referee)
    .post("/manuscripts/{id}/reviews", Authenticated, submit_review)
    .post("/manuscripts/{id}/revisions", Authenticated, upload_revision)
    .get("/manuscripts/{id}/documents/{hash}", Authenticated, document)
    .post("/assignments/{id}/response", Authenticated, respond)
    .get("/me/manuscripts", Authenticated, my_manuscripts)
    .get("/me/assignments", Authenticated, my_assignments)
    .post("/admin/ingest", ArchiveAdmin, ingest)
    .post("/admin/resolve-all", ArchiveAdmin, resolve_all)
    .post("/admin/users", ArchiveAdmin, add_user)
    .get("/admin/export", ArchiveAdmin, export)
}

/// Every route with its access annotation, paths relative to [`BASE`].
pub fn inventory() -> Vec<RouteInfo> {
    routes(Arc::new(Service::new(sciarchive::store::Store::in_memory(), 0.75))).inventory
}

pub fn router(service: AppState) -> Router {
    let routes = routes(service.clone());
    Router::new()
        .nest(BASE, routes.router)
        .fallback(|| async { ApiError::not_found("no such endpoint") })
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(service)
}

pub async fn serve(service: AppState, addr: SocketAddr) -> Result<(), ApiError> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| ApiError::new(500, "bind_failure", format!("{addr}: {e}")))?;
    serve_on(service, listener).await
}

pub async fn serve_on(service: AppState, listener: tokio::net::TcpListener) -> Result<(), ApiError> {
    axum::serve(listener, router(service))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| ApiError::new(500, "server_failure", e.to_string()))
}

// ---------------------------------------------------------------------------
// Handlers

async fn health(State(s): State<AppState>) -> Json<ops::Health> {
    Json(ops::health(&s.snapshot()))
}

async fn stages() -> Json<Vec<ops::StageEdges>> {
    Json(ops::transition_table())
}

#[derive(Deserialize)]
struct LoginRequest {
    user_id: String,
    password: String,
}

async fn login(State(s): State<AppState>, J(req): J<LoginRequest>) -> ApiResult<Session> {
    Ok(Json(s.login(&req.user_id.into(), &req.password, Utc::now())?))
}

#[derive(Serialize)]
struct LoggedOut {
    logged_out: bool,
}

async fn logout(State(s): State<AppState>, Extension(session): Extension<Session>) -> Json<LoggedOut> {
    Json(LoggedOut {
        logged_out: s.sessions().logout(&session.token),
    })
}

async fn me(State(s): State<AppState>, Extension(session): Extension<Session>) -> ApiResult<ops::Me> {
    Ok(Json(ops::me(&s.snapshot(), &session.user_id)?))
}

async fn journals(State(s): State<AppState>, Q(page): Q<PageParams>) -> Result<impl IntoResponse, ApiError> {
    let pos = page.position(s.store())?;
    Ok(Json(pos.page(ops::journals(&pos.snapshot))))
}

async fn journal(State(s): State<AppState>, Path(id): Path<JournalId>) -> ApiResult<sciarchive::archive::Journal> {
    Ok(Json(ops::journal(&s.snapshot(), &id)?))
}

async fn impact_factor(
    State(s): State<AppState>,
    Path(id): Path<JournalId>,
    Q(p): Q<ops::ImpactFactorParams>,
) -> ApiResult<sciarchive::metrics::ImpactFactorResult> {
    Ok(Json(ops::impact_factor(&s.snapshot(), &id, &p)?))
}

async fn journal_report(
    State(s): State<AppState>,
    Path(id): Path<JournalId>,
    Q(p): Q<ops::ReportParams>,
) -> ApiResult<sciarchive::metrics::Table> {
    Ok(Json(ops::journal_report(&s.snapshot(), &id, &p)?))
}

async fn comparison(State(s): State<AppState>, Q(p): Q<ops::ComparisonParams>) -> ApiResult<sciarchive::metrics::Table> {
    Ok(Json(ops::comparison(&s.snapshot(), &p)?))
}

async fn forthcoming(State(s): State<AppState>, Path(id): Path<JournalId>) -> ApiResult<Vec<sciarchive::editorial::ForthcomingEntry>> {
    Ok(Json(ops::forthcoming(&s.snapshot(), &id)?))
}

async fn editorial_report(
    State(s): State<AppState>,
    Path(id): Path<JournalId>,
    Q(p): Q<ops::PeriodParams>,
) -> ApiResult<sciarchive::editorial::EditorialReport> {
    Ok(Json(ops::editorial_report(&s.snapshot(), &id, &p)?))
}

async fn journal_manuscripts(
    State(s): State<AppState>,
    Path(id): Path<JournalId>,
    Extension(session): Extension<Session>,
) -> ApiResult<Vec<sciarchive::editorial::ManuscriptView>> {
    Ok(Json(ops::journal_manuscripts(&s.snapshot(), &id, &session.user_id)?))
}

async fn articles(
    State(s): State<AppState>,
    Q(page): Q<PageParams>,
    Q(f): Q<ops::ArticleFilter>,
) -> Result<impl IntoResponse, ApiError> {
    let pos = page.position(s.store())?;
    Ok(Json(pos.page(ops::articles(&pos.snapshot, &f)?)))
}

async fn upsert_article(State(s): State<AppState>, J(a): J<Article>) -> ApiResult<ops::UpsertOutcome> {
    Ok(Json(s.upsert_article(a, Utc::now().date_naive())?))
}

async fn article(State(s): State<AppState>, Path(id): Path<ArticleId>) -> ApiResult<ops::ArticleView> {
    Ok(Json(ops::article(&s.snapshot(), &id, Utc::now().date_naive())?))
}

async fn forward_links(
    State(s): State<AppState>,
    Path(id): Path<ArticleId>,
    Q(page): Q<PageParams>,
    Q(p): Q<ops::LinkParams>,
) -> Result<impl IntoResponse, ApiError> {
    let pos = page.position(s.store())?;
    Ok(Json(pos.page(ops::forward_links(&pos.snapshot, &id, &p)?)))
}

async fn link_version(
    State(s): State<AppState>,
    Path((a, b)): Path<(ArticleId, ArticleId)>,
) -> ApiResult<sciarchive::archive::WorkCluster> {
    Ok(Json(s.link_versions(&a, &b)?))
}

#[derive(Deserialize)]
struct FormatParam {
    format: Option<String>,
}

/// The body is AMSBIB text. With `?format=` the parsed reference is
/// rendered instead of returned as JSON.
async fn parse_reference(Q(f): Q<FormatParam>, body: Bytes) -> Result<Response, ApiError> {
    let outcome = ops::parse_reference(&text_body(&body)?)?;
    match f.format.as_deref() {
        None | Some("json") => Ok(Json(outcome).into_response()),
        Some(name) => {
            let format: sciarchive::amsbib::Format = name.parse().map_err(ApiError::bad_request)?;
            let mime = match format {
                sciarchive::amsbib::Format::Html => "text/html; charset=utf-8",
                sciarchive::amsbib::Format::Xml => "application/xml; charset=utf-8",
                _ => "text/plain; charset=utf-8",
            };
            Ok(([(CONTENT_TYPE, mime)], sciarchive::amsbib::render(&outcome.reference, format)).into_response())
        }
    }
}

async fn resolve(State(s): State<AppState>, J(req): J<ops::ResolveRequest>) -> ApiResult<ops::ResolveOutcome> {
    Ok(Json(s.resolve(&req)?))
}

async fn reference_search(
    State(s): State<AppState>,
    Q(page): Q<PageParams>,
    Q(p): Q<ops::ReferenceSearchParams>,
) -> Result<impl IntoResponse, ApiError> {
    let pos = page.position(s.store())?;
    Ok(Json(pos.page(ops::reference_search(&pos.snapshot, &p)?)))
}

async fn search(
    State(s): State<AppState>,
    Q(page): Q<PageParams>,
    Q(p): Q<ops::SearchParams>,
) -> Result<impl IntoResponse, ApiError> {
    let pos = page.position(s.store())?;
    Ok(Json(pos.page(ops::search(&pos.snapshot, &p)?)))
}

async fn register_person(
    State(s): State<AppState>,
    Extension(session): Extension<Session>,
    J(req): J<ops::RegisterRequest>,
) -> ApiResult<sciarchive::archive::Registration> {
    Ok(Json(s.register_person(req, Some(&session.user_id))?))
}

async fn person(State(s): State<AppState>, Path(id): Path<PersonId>) -> ApiResult<sciarchive::archive::Person> {
    Ok(Json(ops::person(&s.snapshot(), &id)?))
}

async fn merge_persons(
    State(s): State<AppState>,
    Path((keep, absorb)): Path<(PersonId, PersonId)>,
) -> ApiResult<sciarchive::archive::Person> {
    Ok(Json(s.merge_persons(&keep, &absorb)?))
}

async fn publications(
    State(s): State<AppState>,
    Path(id): Path<PersonId>,
    Q(page): Q<PageParams>,
) -> Result<impl IntoResponse, ApiError> {
    let pos = page.position(s.store())?;
    Ok(Json(pos.page(ops::person_publications(&pos.snapshot, &id)?)))
}

async fn submit(
    State(s): State<AppState>,
    Extension(session): Extension<Session>,
    J(req): J<ops::SubmitRequest>,
) -> ApiResult<sciarchive::editorial::ManuscriptView> {
    Ok(Json(s.submit(&session.user_id, req, Utc::now())?))
}

async fn flow(
    State(s): State<AppState>,
    Path(id): Path<ManuscriptId>,
    Extension(session): Extension<Session>,
) -> ApiResult<sciarchive::editorial::FlowView> {
    Ok(Json(ops::flow(&s.snapshot(), &id, &session.user_id)?))
}

async fn transition(
    State(s): State<AppState>,
    Path(id): Path<ManuscriptId>,
    Extension(session): Extension<Session>,
    J(req): J<ops::TransitionRequest>,
) -> ApiResult<sciarchive::editorial::FlowRecord> {
    Ok(Json(s.transition(&id, &session.user_id, &req, Utc::now())?))
}

async fn assign_referee(
    State(s): State<AppState>,
    Path(id): Path<ManuscriptId>,
    Extension(session): Extension<Session>,
    J(req): J<ops::AssignRequest>,
) -> ApiResult<sciarchive::editorial::RefereeAssignment> {
    Ok(Json(s.assign_referee(&id, &session.user_id, &req, Utc::now())?))
}

async fn submit_review(
    State(s): State<AppState>,
    Path(id): Path<ManuscriptId>,
    Extension(session): Extension<Session>,
    J(req): J<ops::ReviewRequest>,
) -> ApiResult<sciarchive::editorial::FlowRecord> {
    Ok(Json(s.submit_review(&id, &session.user_id, &req, Utc::now())?))
}

async fn upload_revision(
    State(s): State<AppState>,
    Path(id): Path<ManuscriptId>,
    Extension(session): Extension<Session>,
    J(req): J<ops::RevisionRequest>,
) -> ApiResult<sciarchive::editorial::FlowRecord> {
    Ok(Json(s.upload_revision(&id, &session.user_id, &req, Utc::now())?))
}

async fn document(
    State(s): State<AppState>,
    Path(params): Path<HashMap<String, String>>,
    Extension(session): Extension<Session>,
) -> Result<Response, ApiError> {
    let id = ManuscriptId::from(params["id"].as_str());
    let (filename, bytes) = ops::document(&s.snapshot(), &id, &params["hash"], &session.user_id)?;
    let disposition = format!("attachment; filename=\"{}\"", filename.replace(['"', '\\'], "_"));
    Ok((
        [(CONTENT_TYPE, "application/octet-stream".to_string()), (CONTENT_DISPOSITION, disposition)],
        bytes,
    )
        .into_response())
}

async fn respond(
    State(s): State<AppState>,
    Path(id): Path<AssignmentId>,
    Extension(session): Extension<Session>,
    J(req): J<ops::ResponseRequest>,
) -> ApiResult<sciarchive::editorial::RefereeAssignment> {
    Ok(Json(s.respond(&id, &session.user_id, &req, Utc::now())?))
}

async fn my_manuscripts(
    State(s): State<AppState>,
    Extension(session): Extension<Session>,
) -> ApiResult<Vec<sciarchive::editorial::ManuscriptView>> {
    Ok(Json(ops::my_manuscripts(&s.snapshot(), &session.user_id)?))
}

async fn my_assignments(State(s): State<AppState>, Extension(session): Extension<Session>) -> ApiResult<Vec<ops::AssignmentView>> {
    Ok(Json(ops::my_assignments(&s.snapshot(), &session.user_id)?))
}

async fn ingest(State(s): State<AppState>, body: Bytes) -> ApiResult<sciarchive::archive::IngestReport> {
    Ok(Json(s.ingest(&text_body(&body)?, Utc::now().date_naive())?))
}

async fn resolve_all(State(s): State<AppState>) -> ApiResult<ops::ResolveAllOutcome> {
    Ok(Json(s.resolve_all()?))
}

async fn add_user(State(s): State<AppState>, J(req): J<ops::NewUser>) -> ApiResult<ops::Me> {
    Ok(Json(s.add_user(req)?))
}

async fn export(State(s): State<AppState>) -> impl IntoResponse {
    ([(CONTENT_TYPE, "application/x-ndjson")], ops::export(&s.snapshot()))
}
