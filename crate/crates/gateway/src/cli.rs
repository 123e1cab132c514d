//! The `sciarchive` admin CLI. Subcommands call the same operations as
//! the HTTP API.
//!
//! Exit status: 0 on success, 1 on a domain error, 2 on a usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use chrono::{NaiveDate, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use sciarchive::amsbib::{render, Format as RefFormat};
use sciarchive::editorial::{Role, RoleGrant};
use sciarchive::ids::{ArticleId, JournalId, ManuscriptId, PersonId, ReferenceId, UserId};
use sciarchive::metrics::Mode;

use crate::config::Config;
use crate::error::ApiError;
use crate::ops::{self, Service};
use crate::xml;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
    Xml,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "sciarchive", version, about = "Scientific archive administration")]
pub struct Cli {
    /// Configuration file (key = value).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Store directory; overrides `store_path` from the configuration.
    #[arg(long, global = true)]
    pub store: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Catalog, persons and service management.
    #[command(subcommand)]
    Archive(ArchiveCmd),
    /// Bibliographic references.
    #[command(subcommand)]
    Refs(RefsCmd),
    /// Impact factors.
    #[command(subcommand)]
    Metrics(MetricsCmd),
    /// Editorial office.
    #[command(subcommand)]
    Editorial(EditorialCmd),
}

#[derive(Debug, Subcommand)]
pub enum ArchiveCmd {
    /// Load newline-delimited JSON records.
    Ingest {
        #[arg(long)]
        file: PathBuf,
        /// Date used for moving-wall checks (default: today).
        #[arg(long)]
        today: Option<NaiveDate>,
    },
    /// Write the canonical export.
    Export {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long)]
        listen: Option<std::net::SocketAddr>,
    },
    /// Store health and current snapshot.
    Status,
    /// User accounts.
    #[command(subcommand)]
    User(UserCmd),
    /// List journals.
    Journals,
    /// One journal.
    Journal {
        id: String,
    },
    /// List articles, optionally by journal and year.
    Articles {
        #[arg(long)]
        journal: Option<String>,
        #[arg(long)]
        year: Option<i32>,
    },
    /// One article with its access status.
    Article {
        id: String,
        #[arg(long)]
        today: Option<NaiveDate>,
    },
    /// Publication search.
    Search(SearchArgs),
    /// One person record.
    Person {
        id: String,
    },
    /// A person's publication list.
    Publications {
        person: String,
    },
    /// Merge `absorb` into `keep`.
    Merge {
        keep: String,
        absorb: String,
    },
    /// Record two articles as language versions of one work.
    LinkVersions {
        a: String,
        b: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum UserCmd {
    /// Create a user.
    Add {
        #[arg(long)]
        id: String,
        #[arg(long)]
        name: String,
        #[arg(long)]
        email: String,
        #[arg(long)]
        password: String,
        #[arg(long)]
        person: Option<String>,
        /// `journal:role`, e.g. `mat-sb:editor`; repeatable.
        #[arg(long = "grant", value_parser = parse_grant)]
        grants: Vec<RoleGrant>,
    },
    /// Set a user's password.
    Passwd {
        #[arg(long)]
        id: String,
        #[arg(long)]
        password: String,
    },
    /// Show a user and their role grants.
    Show {
        id: String,
    },
}

fn parse_grant(s: &str) -> Result<RoleGrant, String> {
    let (journal, role) = s.split_once(':').ok_or("expected journal:role")?;
    Ok(RoleGrant {
        journal_id: journal.into(),
        role: role.parse::<Role>()?,
    })
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long = "abstract")]
    pub abstract_text: Option<String>,
    #[arg(long)]
    pub author: Option<String>,
    #[arg(long)]
    pub organization: Option<String>,
    #[arg(long)]
    pub journal: Option<String>,
    #[arg(long)]
    pub year_from: Option<i32>,
    #[arg(long)]
    pub year_to: Option<i32>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// File holding one AMSBIB reference.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub text: Option<String>,
}

impl Source {
    fn read(&self) -> Result<String, ApiError> {
        match (&self.file, &self.text) {
            (Some(f), _) => {
                let bytes = std::fs::read(f).map_err(|e| ApiError::new(400, "io", format!("{}: {e}", f.display())))?;
                String::from_utf8(bytes).map_err(|e| ApiError::new(400, "invalid_utf8", e.to_string()))
            }
            (None, Some(t)) => Ok(t.clone()),
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum RefsCmd {
    /// Parse one reference.
    Parse {
        #[command(flatten)]
        source: Source,
    },
    /// Candidates for a reference text, or commit a stored reference.
    Resolve {
        #[arg(long, conflicts_with_all = ["reference", "all"])]
        file: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["reference", "all"])]
        text: Option<String>,
        #[arg(long)]
        year_hint: Option<i32>,
        /// Stored reference to resolve and commit.
        #[arg(long, conflicts_with = "all")]
        reference: Option<String>,
        /// With --reference: commit this article instead of the best candidate.
        #[arg(long, requires = "reference", conflicts_with = "clear")]
        article: Option<String>,
        /// With --reference: clear the resolution.
        #[arg(long, requires = "reference")]
        clear: bool,
        /// Resolve every unresolved stored reference.
        #[arg(long)]
        all: bool,
    },
    /// Cited-reference search.
    Search {
        #[arg(long)]
        title: Option<String>,
        #[arg(long)]
        year: Option<i32>,
        #[arg(long)]
        author: Option<String>,
        #[arg(long)]
        pages: Option<String>,
    },
    /// Forward links into an article.
    Links {
        article: String,
        #[arg(long)]
        cluster: bool,
        #[arg(long)]
        exclude_self: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum MetricsCmd {
    /// One impact factor.
    If {
        #[arg(long)]
        journal: String,
        #[arg(long)]
        year: i32,
        #[arg(long)]
        horizon: u32,
        #[arg(long, value_parser = parse_mode)]
        mode: Mode,
    },
    /// Integral and restricted impact factors side by side.
    Report {
        /// Journal ids in row order, comma-separated or repeated.
        #[arg(long = "journal", value_delimiter = ',', required = true)]
        journals: Vec<String>,
        #[arg(long)]
        year: i32,
        #[arg(long)]
        horizon: u32,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse::<Mode>().map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum EditorialCmd {
    /// Stage statistics for a period.
    Report {
        #[arg(long)]
        journal: String,
        #[arg(long)]
        from: NaiveDate,
        #[arg(long)]
        to: NaiveDate,
    },
    /// Accepted manuscripts waiting for an issue.
    Forthcoming {
        #[arg(long)]
        journal: String,
    },
    /// A manuscript's flow as a given user sees it.
    Flow {
        manuscript: String,
        #[arg(long = "as")]
        viewer: String,
    },
    /// The stage transition table.
    Stages,
    /// A journal's manuscripts as a staff member sees them.
    Manuscripts {
        #[arg(long)]
        journal: String,
        #[arg(long = "as")]
        viewer: String,
    },
    /// Manuscripts a user is an author of.
    Mine {
        #[arg(long = "as")]
        viewer: String,
    },
    /// A referee's assignments.
    Assignments {
        #[arg(long = "as")]
        viewer: String,
    },
    /// Write a manuscript document to stdout.
    Document {
        manuscript: String,
        hash: String,
        #[arg(long = "as")]
        viewer: String,
    },
    /// Grant a role on a journal.
    Grant {
        #[arg(long)]
        user: String,
        #[arg(long)]
        journal: String,
        #[arg(long, value_parser = |s: &str| s.parse::<Role>())]
        role: Role,
    },
}

/// A command result and how it reads in each output format.
struct Output {
    root: &'static str,
    json: Value,
    text: Option<String>,
    xml: Option<String>,
    csv: Option<String>,
    /// Bytes written as-is whatever the format.
    raw: Option<Vec<u8>>,
}

impl Output {
    fn new(root: &'static str, v: &impl Serialize) -> Self {
        Self {
            root,
            json: serde_json::to_value(v).expect("serializable result"),
            text: None,
            xml: None,
            csv: None,
            raw: None,
        }
    }

    fn text(mut self, t: String) -> Self {
        self.text = Some(t);
        self
    }

    fn render(self, format: OutputFormat) -> Result<Vec<u8>, ApiError> {
        if let Some(raw) = self.raw {
            return Ok(raw);
        }
        let pretty = |v: &Value| serde_json::to_string_pretty(v).expect("json value") + "\n";
        Ok(match format {
            OutputFormat::Json => pretty(&self.json),
            OutputFormat::Text => self.text.unwrap_or_else(|| pretty(&self.json)),
            OutputFormat::Xml => self.xml.unwrap_or_else(|| xml::to_xml(self.root, &self.json)),
            OutputFormat::Csv => self
                .csv
                .ok_or_else(|| ApiError::new(400, "usage", "csv output is only available for reports"))?,
        }
        .into_bytes())
    }
}

fn manuscript_lines(list: &[sciarchive::editorial::ManuscriptView]) -> String {
    lines(list, |m| format!("{}\t{}\t{}", m.manuscript_id, m.current_stage, m.metadata.title))
}

fn lines<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(|i| f(i) + "\n").collect()
}

fn load_config(cli: &Cli) -> Result<Config, ApiError> {
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::new(PathBuf::new()),
    };
    if let Some(dir) = &cli.store {
        config.store_path = dir.clone();
    }
    if config.store_path.as_os_str().is_empty() {
        return Err(ApiError::new(400, "usage", "no store: pass --store or --config"));
    }
    Ok(config)
}

fn today_or(d: Option<NaiveDate>) -> NaiveDate {
    d.unwrap_or_else(|| Utc::now().date_naive())
}

fn execute(cli: &Cli, config: &Config) -> Result<Output, ApiError> {
    // Parsing needs no store.
    if let Command::Refs(RefsCmd::Parse { source }) = &cli.command {
        let outcome = ops::parse_reference(&source.read()?)?;
        let mut out = Output::new("parse", &outcome).text(render(&outcome.reference, RefFormat::Plain) + "\n");
        out.xml = Some(render(&outcome.reference, RefFormat::Xml) + "\n");
        return Ok(out);
    }
    let svc = Service::open(config)?;
    let snap = svc.snapshot();
    let s = &snap;
    Ok(match &cli.command {
        Command::Archive(cmd) => match cmd {
            ArchiveCmd::Ingest { file, today } => {
                let text = std::fs::read_to_string(file).map_err(|e| ApiError::new(400, "io", format!("{}: {e}", file.display())))?;
                let report = svc.ingest(&text, today_or(*today))?;
                let summary = format!(
                    "created {} updated {} unchanged {} rejected {}\n{}",
                    report.created,
                    report.updated,
                    report.unchanged,
                    report.rejected,
                    lines(&report.rejections, |r| format!("line {}: {}", r.index + 1, r.reason))
                );
                Output::new("ingest", &report).text(summary)
            }
            ArchiveCmd::Export { out } => {
                let text = ops::export(s);
                match out {
                    Some(path) => {
                        std::fs::write(path, &text).map_err(|e| ApiError::new(500, "io", format!("{}: {e}", path.display())))?;
                        let n = text.lines().count();
                        Output::new("export", &serde_json::json!({ "records": n })).text(format!("{n} records\n"))
                    }
                    None => {
                        let mut out = Output::new("export", &serde_json::json!({ "bytes": text.len() }));
                        out.raw = Some(text.into_bytes());
                        out
                    }
                }
            }
            ArchiveCmd::Serve { listen } => {
                let addr = listen.unwrap_or(config.listen_addr);
                drop(snap);
                let runtime = tokio::runtime::Runtime::new().map_err(|e| ApiError::new(500, "runtime", e.to_string()))?;
                eprintln!("listening on http://{addr}{}", crate::http::BASE);
                runtime.block_on(crate::http::serve(Arc::new(svc), addr))?;
                Output::new("serve", &"stopped").text(String::new())
            }
            ArchiveCmd::User(UserCmd::Add {
                id,
                name,
                email,
                password,
                person,
                grants,
            }) => {
                let me = svc.add_user(ops::NewUser {
                    user_id: id.as_str().into(),
                    name: name.clone(),
                    email: email.clone(),
                    password: password.clone(),
                    person_id: person.as_deref().map(PersonId::from),
                    roles: grants.clone(),
                })?;
                Output::new("user", &me).text(format!("added user {}\n", me.user_id))
            }
            ArchiveCmd::Status => {
                let h = ops::health(s);
                let text = format!("{} snapshot {}\n", h.status, h.snapshot_id);
                Output::new("health", &h).text(text)
            }
            ArchiveCmd::User(UserCmd::Show { id }) => Output::new("user", &ops::me(s, &id.as_str().into())?),
            ArchiveCmd::User(UserCmd::Passwd { id, password }) => {
                svc.set_password(&id.as_str().into(), password)?;
                Output::new("user", &id).text(format!("password set for {id}\n"))
            }
            ArchiveCmd::Journals => {
                let js = ops::journals(s);
                let text = lines(&js, |j| format!("{}\t{}", j.journal_id, j.title));
                Output::new("journals", &js).text(text)
            }
            ArchiveCmd::Journal { id } => Output::new("journal", &ops::journal(s, &id.as_str().into())?),
            ArchiveCmd::Articles { journal, year } => {
                let f = ops::ArticleFilter {
                    journal_id: journal.as_deref().map(JournalId::from),
                    year: *year,
                };
                let list = ops::articles(s, &f)?;
                let text = lines(&list, |a| format!("{}\t{}\t{}", a.article_id, a.year, a.title));
                Output::new("articles", &list).text(text)
            }
            ArchiveCmd::Article { id, today } => Output::new("article", &ops::article(s, &id.as_str().into(), today_or(*today))?),
            ArchiveCmd::Search(a) => {
                let p = ops::SearchParams {
                    title: a.title.clone(),
                    abstract_text: a.abstract_text.clone(),
                    author: a.author.clone(),
                    organization: a.organization.clone(),
                    journal_id: a.journal.as_deref().map(JournalId::from),
                    year_from: a.year_from,
                    year_to: a.year_to,
                };
                let hits = ops::search(s, &p)?;
                let text = lines(&hits, |h| format!("{}\t{}", h.article_id, h.score));
                Output::new("hits", &hits).text(text)
            }
            ArchiveCmd::Person { id } => Output::new("person", &ops::person(s, &id.as_str().into())?),
            ArchiveCmd::Publications { person } => {
                let list = ops::person_publications(s, &person.as_str().into())?;
                let text = lines(&list, |e| {
                    format!("{}\t{}", e.year().map_or_else(|| "----".into(), |y| y.to_string()), e.title())
                });
                Output::new("publications", &list).text(text)
            }
            ArchiveCmd::Merge { keep, absorb } => {
                Output::new("person", &svc.merge_persons(&keep.as_str().into(), &absorb.as_str().into())?)
            }
            ArchiveCmd::LinkVersions { a, b } => {
                let c = svc.link_versions(&ArticleId::from(a.as_str()), &ArticleId::from(b.as_str()))?;
                let text = format!("{}\n", c.cluster_id);
                Output::new("cluster", &c).text(text)
            }
        },
        Command::Refs(cmd) => match cmd {
            RefsCmd::Parse { .. } => unreachable!("handled above"),
            RefsCmd::Resolve {
                file,
                text,
                year_hint,
                reference,
                article,
                clear,
                all,
            } => {
                if *all {
                    let o = svc.resolve_all()?;
                    let text = format!("resolved {} references, {} forward links\n", o.resolved, o.links);
                    Output::new("resolve", &o).text(text)
                } else {
                    let source = match (file, text) {
                        (None, None) => None,
                        (f, t) => Some(
                            Source {
                                file: f.clone(),
                                text: t.clone(),
                            }
                            .read()?,
                        ),
                    };
                    let req = ops::ResolveRequest {
                        reference_id: reference.as_deref().map(ReferenceId::from),
                        source,
                        year_hint: *year_hint,
                        article_id: match (article, clear) {
                            (Some(a), _) => Some(Some(a.as_str().into())),
                            (None, true) => Some(None),
                            (None, false) => None,
                        },
                    };
                    let out = svc.resolve(&req)?;
                    let text = match &out {
                        ops::ResolveOutcome::Candidates(cs) => {
                            lines(cs, |c| format!("{}\t{:.4}\t{}", c.article_id, c.score, serde_json::to_value(c.method).expect("enum")))
                        }
                        ops::ResolveOutcome::Committed(r) => format!(
                            "{}\t{}\n",
                            r.reference_id,
                            r.resolution.target().map_or("unresolved", |a| a.as_str())
                        ),
                    };
                    Output::new("resolve", &out).text(text.replace('"', ""))
                }
            }
            RefsCmd::Search {
                title,
                year,
                author,
                pages,
            } => {
                let p = ops::ReferenceSearchParams {
                    title: title.clone(),
                    year: *year,
                    author: author.clone(),
                    pages: pages.clone(),
                };
                let found = ops::reference_search(s, &p)?;
                let text = lines(&found, |r| format!("{}\t{}", r.reference_id, r.raw.source));
                Output::new("references", &found).text(text)
            }
            RefsCmd::Links {
                article,
                cluster,
                exclude_self,
            } => {
                let p = ops::LinkParams {
                    cluster: *cluster,
                    exclude_self: *exclude_self,
                };
                let links = ops::forward_links(s, &article.as_str().into(), &p)?;
                let text = lines(&links, |l| format!("{}\t{}\t{}", l.citing, l.citing_year, l.cited_article));
                Output::new("links", &links).text(text)
            }
        },
        Command::Metrics(cmd) => match cmd {
            MetricsCmd::If {
                journal,
                year,
                horizon,
                mode,
            } => {
                let p = ops::ImpactFactorParams {
                    year: *year,
                    horizon: *horizon,
                    mode: *mode,
                };
                let r = ops::impact_factor(s, &journal.as_str().into(), &p)?;
                let text = format!("{}\n", r.rounded.as_deref().unwrap_or(sciarchive::metrics::DASH));
                Output::new("impact_factor", &r).text(text)
            }
            MetricsCmd::Report { journals, year, horizon } => {
                let p = ops::ComparisonParams {
                    journals: journals.join(","),
                    year: *year,
                    horizon: *horizon,
                };
                let t = ops::comparison(s, &p)?;
                let mut out = Output::new("report", &t).text(t.to_text());
                out.csv = Some(t.to_csv());
                out
            }
        },
        Command::Editorial(cmd) => match cmd {
            EditorialCmd::Report { journal, from, to } => {
                let p = ops::PeriodParams { from: *from, to: *to };
                let r = ops::editorial_report(s, &journal.as_str().into(), &p)?;
                let mut out = Output::new("editorial_report", &r).text(r.to_text());
                out.csv = Some(r.to_csv());
                out
            }
            EditorialCmd::Forthcoming { journal } => {
                let list = ops::forthcoming(s, &journal.as_str().into())?;
                let text = lines(&list, |e| format!("{}\t{}\t{}", e.accepted_at.to_rfc3339(), e.manuscript_id, e.title));
                Output::new("forthcoming", &list).text(text)
            }
            EditorialCmd::Flow { manuscript, viewer } => {
                let v = ops::flow(s, &ManuscriptId::from(manuscript.as_str()), &UserId::from(viewer.as_str()))?;
                let text = format!("{} [{}]\n", v.manuscript.metadata.title, v.manuscript.current_stage)
                    + &lines(&v.records, |r| {
                        format!(
                            "{}\t{}\t{} -> {}\t{}\t{}",
                            r.timestamp.to_rfc3339(),
                            serde_json::to_value(r.action).expect("enum").as_str().unwrap_or_default(),
                            r.from_stage,
                            r.to_stage,
                            r.actor.name,
                            r.note
                        )
                    });
                Output::new("flow", &v).text(text)
            }
            EditorialCmd::Stages => {
                let t = ops::transition_table();
                let text = lines(&t, |e| {
                    let next: Vec<String> = e.successors.iter().map(|s| s.to_string()).collect();
                    format!("{}\t{}", e.stage, next.join(" "))
                });
                Output::new("stages", &t).text(text)
            }
            EditorialCmd::Manuscripts { journal, viewer } => {
                let list = ops::journal_manuscripts(s, &journal.as_str().into(), &viewer.as_str().into())?;
                Output::new("manuscripts", &list).text(manuscript_lines(&list))
            }
            EditorialCmd::Mine { viewer } => {
                let list = ops::my_manuscripts(s, &viewer.as_str().into())?;
                Output::new("manuscripts", &list).text(manuscript_lines(&list))
            }
            EditorialCmd::Assignments { viewer } => {
                let list = ops::my_assignments(s, &viewer.as_str().into())?;
                let text = lines(&list, |a| format!("{}\t{}\t{}", a.assignment.assignment_id, a.assignment.manuscript_id, a.title));
                Output::new("assignments", &list).text(text)
            }
            EditorialCmd::Document { manuscript, hash, viewer } => {
                let (_, bytes) = ops::document(s, &manuscript.as_str().into(), hash, &viewer.as_str().into())?;
                let mut out = Output::new("document", &serde_json::json!({ "bytes": bytes.len() }));
                out.raw = Some(bytes);
                out
            }
            EditorialCmd::Grant { user, journal, role } => {
                Output::new("user", &svc.grant_role(&user.as_str().into(), &journal.as_str().into(), *role)?)
            }
        },
    })
}

/// Runs the CLI and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Refs(RefsCmd::Parse { .. }) => Ok(Config::new(PathBuf::new())),
        _ => load_config(&cli),
    }
    .and_then(|config| execute(&cli, &config)).and_then(|o| o.render(cli.format));
    match result {
        Ok(bytes) => {
            let _ = out.write_all(&bytes);
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.code == "usage" {
                EXIT_USAGE
            } else {
                EXIT_DOMAIN
            }
        }
    }
}
