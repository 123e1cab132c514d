//! Every read endpoint asked three ways: a direct library call, the HTTP
//! API and the CLI with `--format json`. The three answers must agree.

#![allow(dead_code)]

use std::path::Path;
use std::sync::Arc;

use chrono::{NaiveDate, Utc};
use serde::Serialize;
use serde_json::Value;

use sciarchive::editorial::content_hash;
use sciarchive::ids::{JournalId, ManuscriptId, PersonId, UserId};
use sciarchive::metrics::Mode;
use sciarchive_gateway::ops::{self, Service};

use super::common::{cli, Api};

pub enum Body {
    Json(Value),
    Raw(Vec<u8>),
}

pub struct Case {
    pub name: &'static str,
    pub method: &'static str,
    pub path: String,
    pub request_body: Option<String>,
    /// Log in as this user first.
    pub user: Option<&'static str>,
    /// The HTTP answer is a page; compare the concatenated items.
    pub paged: bool,
    pub cli: Vec<String>,
    pub direct: Body,
}

fn json(v: impl Serialize) -> Body {
    Body::Json(serde_json::to_value(v).expect("serializable"))
}

fn err<T>(e: sciarchive_gateway::error::ApiError) -> T {
    panic!("{e}")
}

fn args(a: &[&str]) -> Vec<String> {
    a.iter().map(|s| s.to_string()).collect()
}

fn get(name: &'static str, path: impl Into<String>, cli: &[&str], direct: Body) -> Case {
    Case {
        name,
        method: "GET",
        path: path.into(),
        request_body: None,
        user: None,
        paged: false,
        cli: args(cli),
        direct,
    }
}

impl Case {
    fn paged(mut self) -> Self {
        self.paged = true;
        self
    }

    fn as_user(mut self, u: &'static str) -> Self {
        self.user = Some(u);
        self
    }
}

/// The read surface, with ids picked from the demo store.
pub fn cases(service: &Service) -> Vec<Case> {
    let s = service.snapshot();
    let s = &*s;
    let today = Utc::now().date_naive();
    let mat_sb = JournalId::from("mat-sb");

    // The most cited article, and a word from its title.
    let cited = s
        .catalog
        .articles()
        .map(|a| a.article_id.clone())
        .max_by_key(|id| ops::forward_links(s, id, &ops::LinkParams::default()).map_or(0, |l| l.len()))
        .expect("articles");
    let cited_article = ops::article(s, &cited, today).unwrap_or_else(err);
    let word = cited_article
        .article
        .title
        .split_whitespace()
        .find(|w| w.len() > 4)
        .expect("a title word")
        .to_lowercase();
    let person: PersonId = "t1-p00".into();
    let source = r"\RBibitem{ref1}\by B.~A.~Arnold, G.~Bogolyubov\paper Spectral bounds\jour Mat. Sb.\yr 2010\vol 2\pages 3--20";

    let search = ops::SearchParams {
        title: Some(word.clone()),
        ..Default::default()
    };
    let ref_search = ops::ReferenceSearchParams {
        title: Some(word.clone()),
        ..Default::default()
    };
    let all_journals = "mat-sb,trudy,avtomatika,dm,semr,nd";
    let period = ops::PeriodParams {
        from: NaiveDate::from_ymd_opt(2024, 3, 1).unwrap(),
        to: NaiveDate::from_ymd_opt(2024, 3, 31).unwrap(),
    };
    let flow_author = ops::flow(s, &ManuscriptId::from("ms-1"), &UserId::from("author")).unwrap_or_else(err);
    let pdf = flow_author
        .manuscript
        .files
        .iter()
        .find(|f| f.role == sciarchive::editorial::DocumentRole::SourcePdf)
        .expect("pdf")
        .content_hash
        .clone();
    let (_, pdf_bytes) = ops::document(s, &"ms-1".into(), &pdf, &"author".into()).unwrap_or_else(err);

    vec![
        get("health", "/health", &["archive", "status"], json(ops::health(s))),
        get("stages", "/stages", &["editorial", "stages"], json(ops::transition_table())),
        get("me", "/auth/me", &["archive", "user", "show", "editor"], json(ops::me(s, &"editor".into()).unwrap_or_else(err)))
            .as_user("editor"),
        get("journals", "/journals", &["archive", "journals"], json(ops::journals(s))).paged(),
        get("journal", "/journals/mat-sb", &["archive", "journal", "mat-sb"], json(ops::journal(s, &mat_sb).unwrap_or_else(err))),
        get(
            "impact_factor",
            "/journals/trudy/impact-factor?year=2011&horizon=2&mode=restricted",
            &["metrics", "if", "--journal", "trudy", "--year", "2011", "--horizon", "2", "--mode", "restricted"],
            json(
                ops::impact_factor(
                    s,
                    &"trudy".into(),
                    &ops::ImpactFactorParams {
                        year: 2011,
                        horizon: 2,
                        mode: Mode::Restricted,
                    },
                )
                .unwrap_or_else(err),
            ),
        ),
        get(
            "journal_report",
            "/journals/mat-sb/report?year=2011&horizon=2",
            &["metrics", "report", "--journal", "mat-sb", "--year", "2011", "--horizon", "2"],
            json(ops::journal_report(s, &mat_sb, &ops::ReportParams { year: 2011, horizon: 2 }).unwrap_or_else(err)),
        ),
        get(
            "comparison",
            format!("/metrics/comparison?journals={all_journals}&year=2011&horizon=2"),
            &["metrics", "report", "--journal", all_journals, "--year", "2011", "--horizon", "2"],
            json(
                ops::comparison(
                    s,
                    &ops::ComparisonParams {
                        journals: all_journals.into(),
                        year: 2011,
                        horizon: 2,
                    },
                )
                .unwrap_or_else(err),
            ),
        ),
        get(
            "forthcoming",
            "/journals/mat-sb/forthcoming",
            &["editorial", "forthcoming", "--journal", "mat-sb"],
            json(ops::forthcoming(s, &mat_sb).unwrap_or_else(err)),
        ),
        get(
            "editorial_report",
            "/journals/mat-sb/editorial-report?from=2024-03-01&to=2024-03-31",
            &["editorial", "report", "--journal", "mat-sb", "--from", "2024-03-01", "--to", "2024-03-31"],
            json(ops::editorial_report(s, &mat_sb, &period).unwrap_or_else(err)),
        )
        .as_user("editor"),
        get(
            "journal_manuscripts",
            "/journals/mat-sb/manuscripts",
            &["editorial", "manuscripts", "--journal", "mat-sb", "--as", "editor"],
            json(ops::journal_manuscripts(s, &mat_sb, &"editor".into()).unwrap_or_else(err)),
        )
        .as_user("editor"),
        get(
            "articles",
            "/articles?journal_id=mat-sb&year=2010",
            &["archive", "articles", "--journal", "mat-sb", "--year", "2010"],
            json(
                ops::articles(
                    s,
                    &ops::ArticleFilter {
                        journal_id: Some(mat_sb.clone()),
                        year: Some(2010),
                    },
                )
                .unwrap_or_else(err),
            ),
        )
        .paged(),
        get("article", format!("/articles/{cited}"), &["archive", "article", cited.as_str()], json(&cited_article)),
        get(
            "forward_links",
            format!("/articles/{cited}/forward-links"),
            &["refs", "links", cited.as_str()],
            json(ops::forward_links(s, &cited, &ops::LinkParams::default()).unwrap_or_else(err)),
        )
        .paged(),
        get(
            "forward_links_cluster",
            format!("/articles/{cited}/forward-links?cluster=true&exclude_self=true"),
            &["refs", "links", cited.as_str(), "--cluster", "--exclude-self"],
            json(
                ops::forward_links(
                    s,
                    &cited,
                    &ops::LinkParams {
                        cluster: true,
                        exclude_self: true,
                    },
                )
                .unwrap_or_else(err),
            ),
        )
        .paged(),
        Case {
            name: "parse",
            method: "POST",
            path: "/references/parse".into(),
            request_body: Some(source.into()),
            user: None,
            paged: false,
            cli: args(&["refs", "parse", "--text", source]),
            direct: json(ops::parse_reference(source).unwrap_or_else(err)),
        },
        get(
            "reference_search",
            format!("/references/search?title={word}"),
            &["refs", "search", "--title", &word],
            json(ops::reference_search(s, &ref_search).unwrap_or_else(err)),
        )
        .paged(),
        get(
            "search",
            format!("/search?title={word}"),
            &["archive", "search", "--title", &word],
            json(ops::search(s, &search).unwrap_or_else(err)),
        )
        .paged(),
        get("person", "/persons/t1-p00", &["archive", "person", "t1-p00"], json(ops::person(s, &person).unwrap_or_else(err))),
        get(
            "publications",
            "/persons/t1-p00/publications",
            &["archive", "publications", "t1-p00"],
            json(ops::person_publications(s, &person).unwrap_or_else(err)),
        )
        .paged(),
        get("flow_author", "/manuscripts/ms-1/flow", &["editorial", "flow", "ms-1", "--as", "author"], json(&flow_author))
            .as_user("author"),
        get(
            "flow_editor",
            "/manuscripts/ms-1/flow",
            &["editorial", "flow", "ms-1", "--as", "editor"],
            json(ops::flow(s, &"ms-1".into(), &"editor".into()).unwrap_or_else(err)),
        )
        .as_user("editor"),
        get(
            "document",
            format!("/manuscripts/ms-1/documents/{pdf}"),
            &["editorial", "document", "ms-1", &pdf, "--as", "author"],
            Body::Raw(pdf_bytes),
        )
        .as_user("author"),
        get(
            "my_manuscripts",
            "/me/manuscripts",
            &["editorial", "mine", "--as", "author"],
            json(ops::my_manuscripts(s, &"author".into()).unwrap_or_else(err)),
        )
        .as_user("author"),
        get(
            "my_assignments",
            "/me/assignments",
            &["editorial", "assignments", "--as", "referee1"],
            json(ops::my_assignments(s, &"referee1".into()).unwrap_or_else(err)),
        )
        .as_user("referee1"),
        get("export", "/admin/export", &["archive", "export"], Body::Raw(ops::export(s).into_bytes())).as_user("admin"),
    ]
}

pub struct Answers {
    pub name: &'static str,
    pub direct: Vec<u8>,
    pub http: Vec<u8>,
    pub cli: Vec<u8>,
}

fn bytes(v: &Value) -> Vec<u8> {
    serde_json::to_vec_pretty(v).expect("json")
}

/// Asks every case three ways. Returns canonical bytes for each surface;
/// JSON answers are re-serialized so formatting differences vanish.
pub async fn ask_all(service: Arc<Service>, store: &Path) -> Vec<Answers> {
    let cases = cases(&service);
    let api = Api::new(service);
    let store = store.to_str().expect("utf-8 path");
    let mut out = vec![];
    for case in cases {
        let token = match case.user {
            Some(u) => Some(api.login(u).await),
            None => None,
        };
        let http = if case.paged {
            let (items, _) = api.get_all(&case.path, 3).await;
            bytes(&Value::Array(items))
        } else {
            let r = api.send(case.method, &case.path, token.as_deref(), case.request_body.clone()).await;
            assert!(r.status.is_success(), "{} {}: {}", case.method, case.path, r.text());
            match case.direct {
                Body::Json(_) => bytes(&r.json()),
                Body::Raw(_) => r.body,
            }
        };
        let mut argv = vec!["--store", store, "--format", "json"];
        argv.extend(case.cli.iter().map(String::as_str));
        let (code, stdout, stderr) = cli(&argv);
        assert_eq!(code, 0, "{argv:?}: {stderr}");
        let (direct, cli) = match &case.direct {
            Body::Json(v) => (
                bytes(v),
                bytes(&serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{argv:?}: {e}"))),
            ),
            Body::Raw(b) => (b.clone(), stdout.into_bytes()),
        };
        out.push(Answers {
            name: case.name,
            direct,
            http,
            cli,
        });
    }
    out
}

/// Large answers are pinned by digest only.
const LARGE: usize = 100_000;

pub fn golden_dir() -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Checks that the three surfaces agree and match the golden files.
/// Missing golden files are written, as are all of them with `update`.
pub fn compare(answers: &[Answers], update: bool) -> Result<String, String> {
    let mut pinned = 0;
    for a in answers {
        if a.direct != a.http {
            return Err(format!("{}: HTTP differs from the library", a.name));
        }
        if a.direct != a.cli {
            return Err(format!("{}: CLI differs from the library", a.name));
        }
        let golden = if a.direct.len() > LARGE {
            format!("sha256 {}\n", content_hash(&a.direct)).into_bytes()
        } else {
            a.direct.clone()
        };
        let path = golden_dir().join(format!("{}.golden", a.name));
        if update || !path.exists() {
            std::fs::write(&path, &golden).map_err(|e| format!("{}: {e}", path.display()))?;
            continue;
        }
        let want = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        if want != golden {
            return Err(format!("{} differs from {}", a.name, path.display()));
        }
        pinned += 1;
    }
    Ok(format!("{} read endpoints agree across library, HTTP and CLI; {pinned} match golden files", answers.len()))
}
