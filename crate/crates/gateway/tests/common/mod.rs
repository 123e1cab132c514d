#![allow(dead_code)]

use std::path::Path;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

use sciarchive::fixtures::demo_state;
use sciarchive::store::{Store, StoreError};
use sciarchive_gateway::auth::hash_password;
use sciarchive_gateway::config::Config;
use sciarchive_gateway::http::{router, BASE};
use sciarchive_gateway::ops::Service;

pub const PASSWORD: &str = "correct horse";
pub const USERS: [&str; 6] = ["editor", "admin", "author", "coauthor", "referee1", "referee2"];

/// Writes the demo archive and editorial office to `dir`; every user's
/// password is [`PASSWORD`].
pub fn write_demo_store(dir: &Path) {
    let store = Store::open(dir).expect("open store");
    let hash = hash_password(PASSWORD);
    store
        .write(|tx| {
            let (c, r, mut e) = demo_state();
            for u in USERS {
                e.set_password_hash(&u.into(), hash.clone()).expect("demo user");
            }
            let (catalog, refs, editorial) = tx.parts_mut();
            *catalog = c;
            *refs = r;
            *editorial = e;
            Ok::<_, StoreError>(())
        })
        .expect("write demo state");
}

pub fn demo_service(dir: &Path) -> Arc<Service> {
    write_demo_store(dir);
    Arc::new(Service::open(&Config::new(dir.to_path_buf())).expect("open service"))
}

pub struct Api {
    pub router: Router,
}

pub struct Reply {
    pub status: StatusCode,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.body)))
    }

    pub fn text(&self) -> String {
        String::from_utf8(self.body.clone()).expect("utf-8 body")
    }
}

impl Api {
    pub fn new(service: Arc<Service>) -> Self {
        Self { router: router(service) }
    }

    pub async fn send(&self, method: &str, path: &str, token: Option<&str>, body: Option<String>) -> Reply {
        let mut req = Request::builder().method(method).uri(format!("{BASE}{path}"));
        if let Some(t) = token {
            req = req.header("authorization", format!("Bearer {t}"));
        }
        if body.is_some() {
            req = req.header("content-type", "application/json");
        }
        let req = req.body(body.map_or_else(Body::empty, Body::from)).expect("request");
        let resp = self.router.clone().oneshot(req).await.expect("infallible");
        let status = resp.status();
        let body = resp.into_body().collect().await.expect("body").to_bytes().to_vec();
        Reply { status, body }
    }

    pub async fn get(&self, path: &str, token: Option<&str>) -> Reply {
        self.send("GET", path, token, None).await
    }

    pub async fn post(&self, path: &str, token: Option<&str>, body: Value) -> Reply {
        self.send("POST", path, token, Some(body.to_string())).await
    }

    pub async fn login(&self, user: &str) -> String {
        let r = self
            .post("/auth/login", None, serde_json::json!({"user_id": user, "password": PASSWORD}))
            .await;
        assert_eq!(r.status, StatusCode::OK, "{}", r.text());
        r.json()["token"].as_str().expect("token").to_string()
    }

    /// Follows `next_cursor` until the list is exhausted.
    pub async fn get_all(&self, path: &str, limit: usize) -> (Vec<Value>, usize) {
        let sep = if path.contains('?') { '&' } else { '?' };
        let mut items = vec![];
        let mut pages = 0;
        let mut cursor: Option<String> = None;
        loop {
            let url = match &cursor {
                Some(c) => format!("{path}{sep}limit={limit}&cursor={c}"),
                None => format!("{path}{sep}limit={limit}"),
            };
            let r = self.get(&url, None).await;
            assert_eq!(r.status, StatusCode::OK, "{url}: {}", r.text());
            let page = r.json();
            items.extend(page["items"].as_array().expect("items").iter().cloned());
            pages += 1;
            match page.get("next_cursor").and_then(Value::as_str) {
                Some(c) => cursor = Some(c.to_string()),
                None => return (items, pages),
            }
        }
    }
}

/// Runs the CLI in-process and returns (status, stdout, stderr).
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = vec![];
    let mut err = vec![];
    let argv = std::iter::once("sciarchive").chain(args.iter().copied());
    let code = sciarchive_gateway::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).expect("utf-8"), String::from_utf8(err).expect("utf-8"))
}
