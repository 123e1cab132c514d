//! Six journals whose 2011 two-year comparison is known in advance.
//!
//! Each journal has `integral_items` citable work clusters spread over
//! 2009 and 2010. Where English versions exist they live in the same
//! journal under the translated title. Citations dated 2011 come from an
//! ISI-indexed journal (counted in both modes when they hit an English
//! version), from that journal's citations of Russian originals and from
//! conference volumes outside the catalog (integral only). Every journal
//! except the first also carries noise that neither count may pick up.

use chrono::NaiveDate;

use crate::amsbib::{PageRange, Pages, PersonName};
use crate::archive::{ingest, Article, Catalog, IngestRecord, Journal, Language, Person, ReferenceRecord, VersionLinkRecord};
use crate::citegraph::{ReferenceDb, ResolverIndex, DEFAULT_FUZZY_THRESHOLD};

pub struct Table1Journal {
    pub journal_id: &'static str,
    pub title: &'static str,
    pub translated_title: Option<&'static str>,
    pub integral_citations: u64,
    pub integral_items: u64,
    pub restricted_citations: u64,
    pub restricted_items: u64,
}

pub const TABLE1_YEAR: i32 = 2011;
pub const TABLE1_HORIZON: u32 = 2;

pub const TABLE1: [Table1Journal; 6] = [
    Table1Journal {
        journal_id: "mat-sb",
        title: "Matematicheskii Sbornik",
        translated_title: Some("Sbornik: Mathematics"),
        integral_citations: 130,
        integral_items: 160,
        restricted_citations: 85,
        restricted_items: 150,
    },
    Table1Journal {
        journal_id: "trudy",
        title: "Trudy Matem. Instituta im. V. A. Steklova",
        translated_title: Some("Proceedings of the Steklov Institute of Mathematics"),
        integral_citations: 75,
        integral_items: 165,
        restricted_citations: 42,
        restricted_items: 246,
    },
    Table1Journal {
        journal_id: "avtomatika",
        title: "Avtomatika i Telemekhanika",
        translated_title: Some("Automation and Remote Control"),
        integral_citations: 227,
        integral_items: 325,
        restricted_citations: 96,
        restricted_items: 390,
    },
    Table1Journal {
        journal_id: "dm",
        title: "Diskretnaya Matematika",
        translated_title: None,
        integral_citations: 43,
        integral_items: 89,
        restricted_citations: 0,
        restricted_items: 0,
    },
    Table1Journal {
        journal_id: "semr",
        title: "Siberian Electronic Mathematical Reports",
        translated_title: None,
        integral_citations: 37,
        integral_items: 98,
        restricted_citations: 0,
        restricted_items: 0,
    },
    Table1Journal {
        journal_id: "nd",
        title: "Russian Journal of Nonlinear Dynamics",
        translated_title: None,
        integral_citations: 35,
        integral_items: 86,
        restricted_citations: 0,
        restricted_items: 0,
    },
];

const CITING_JOURNAL: &str = "intl-math-rev";
const FAMILIES: [&str; 12] = [
    "Arnold", "Bogolyubov", "Chebotarev", "Delone", "Egorov", "Fadeev", "Gelfand", "Hinchin", "Ilyashenko", "Kolmogorov",
    "Lyapunov", "Markov",
];
const ADJECTIVES: [&str; 8] = ["Asymptotic", "Spectral", "Stable", "Random", "Extremal", "Invariant", "Discrete", "Optimal"];
const NOUNS: [&str; 8] = ["bounds", "operators", "manifolds", "tables", "flows", "graphs", "estimates", "systems"];
const CONTEXTS: [&str; 6] = [
    "in Banach spaces",
    "of Markov type",
    "on the torus",
    "with delay",
    "for control problems",
    "over finite fields",
];

fn title(j: usize, k: usize) -> String {
    format!(
        "{} {} {}",
        ADJECTIVES[(k + j) % ADJECTIVES.len()],
        NOUNS[(k / ADJECTIVES.len() + j) % NOUNS.len()],
        CONTEXTS[(k / 3) % CONTEXTS.len()]
    )
}

fn person_id(n: usize) -> String {
    format!("t1-p{:02}", n % FAMILIES.len())
}

struct Builder {
    records: Vec<IngestRecord>,
    citing_pages: u32,
}

/// One version of a cited article, with what a reference to it needs.
#[derive(Clone)]
struct Target {
    id: String,
    journal_name: String,
    year: i32,
    volume: String,
    pages: PageRange,
    title: String,
    author: usize,
}

impl Target {
    fn amsbib(&self, variant: u32) -> String {
        let family = FAMILIES[self.author % FAMILIES.len()];
        let by = format!("\\by {}.~{family}", &family[..1]);
        match variant {
            // Same article, formatted as a different bibliography would.
            1 => format!(
                "{by} \\paper {{{}}} \\jour {} \\yr {} \\vol {} \\issue 1 \\pages {}",
                self.title.to_lowercase(),
                self.journal_name,
                self.year,
                self.volume,
                self.pages.first
            ),
            _ => format!(
                "{by} \\paper {} \\jour {} \\yr {} \\vol {} \\pages {}--{}",
                self.title, self.journal_name, self.year, self.volume, self.pages.first, self.pages.last
            ),
        }
    }
}

impl Builder {
    fn article(&mut self, a: Article) {
        self.records.push(IngestRecord::Article(a));
    }

    /// A fresh ISI-indexed article dated `year` that cites `targets`.
    fn isi_citer(&mut self, id: String, year: i32, targets: &[&Target]) {
        self.citing_pages += 10;
        let mut a = Article::new(id.clone(), CITING_JOURNAL, year, Language::En, format!("Citing note {id}"));
        a.volume = (year - 1990).to_string();
        a.pages = Some(Pages::Range(PageRange::new(self.citing_pages, self.citing_pages + 9).expect("ordered")));
        a.authors = vec![person_id(self.citing_pages as usize / 10).into()];
        self.article(a);
        for t in targets {
            self.reference(&id, t.amsbib(0), None);
        }
    }

    /// A document outside the catalog that cites `targets`.
    fn external_citer(&mut self, id: String, year: i32, targets: &[&Target]) {
        for t in targets {
            self.reference(&id, t.amsbib(0), Some(year));
        }
    }

    fn reference(&mut self, citing: &str, source: String, external_year: Option<i32>) {
        self.records.push(IngestRecord::Reference(ReferenceRecord {
            reference_id: None,
            source,
            citing: citing.into(),
            cited_year_hint: None,
            origin: Default::default(),
            citing_year: external_year,
            citing_isi_indexed: external_year.map(|_| false),
            resolution: None,
        }));
    }
}

/// The fixture as ingestion records, references unresolved.
pub fn table1_records() -> Vec<IngestRecord> {
    let mut b = Builder {
        records: vec![],
        citing_pages: 0,
    };
    for (n, family) in FAMILIES.iter().enumerate() {
        let given = format!("{}.", &ADJECTIVES[n % ADJECTIVES.len()][..1]);
        b.records.push(IngestRecord::Person(Person::new(person_id(n), PersonName::new(*family, given))));
    }
    let mut citing = Journal::new(CITING_JOURNAL, "International Mathematics Review");
    citing.isi_indexed = true;
    b.records.push(IngestRecord::Journal(citing));

    for (j, row) in TABLE1.iter().enumerate() {
        let jid = row.journal_id;
        let mut journal = Journal::new(jid, row.title);
        journal.translated_title = row.translated_title.map(String::from);
        b.records.push(IngestRecord::Journal(journal));

        let n_clusters = row.integral_items as usize;
        let n_en = (row.restricted_items as usize).min(n_clusters);
        let mut ru = Vec::with_capacity(n_clusters);
        let mut en = Vec::with_capacity(n_en);
        for k in 0..n_clusters {
            let year = 2009 + (k % 2) as i32;
            let volume = (year - 2008).to_string();
            let first = 3 + 20 * k as u32;
            let t = Target {
                id: format!("{jid}-{year}-{k:03}"),
                journal_name: row.title.into(),
                year,
                volume: volume.clone(),
                pages: PageRange::new(first, first + 17).expect("ordered"),
                title: title(j, k),
                author: j + k,
            };
            let mut a = Article::new(t.id.clone(), jid, year, Language::Ru, t.title.clone());
            a.volume = volume.clone();
            a.pages = Some(Pages::Range(t.pages));
            a.authors = vec![person_id(t.author).into()];
            b.article(a);
            if k < n_en {
                let translated = row.translated_title.expect("journal has English versions");
                let e = Target {
                    id: format!("{}e", t.id),
                    journal_name: translated.into(),
                    pages: PageRange::new(first + 5000, first + 5017).expect("ordered"),
                    ..t.clone()
                };
                let mut a = Article::new(e.id.clone(), jid, year, Language::En, e.title.clone());
                a.volume = volume;
                a.pages = Some(Pages::Range(e.pages));
                a.authors = vec![person_id(e.author).into()];
                b.article(a);
                b.records.push(IngestRecord::VersionLink(VersionLinkRecord {
                    a: t.id.clone().into(),
                    b: e.id.clone().into(),
                }));
                en.push(e);
            }
            ru.push(t);
        }
        // English-only items that are not research articles.
        for k in n_en..row.restricted_items as usize {
            let year = 2009 + (k % 2) as i32;
            let mut a = Article::new(format!("{jid}-{year}-x{k:03}"), jid, year, Language::En, format!("Chronicle {k}"));
            a.citable = false;
            b.article(a);
        }

        let rc = row.restricted_citations as usize;
        let integral_only = (row.integral_citations - row.restricted_citations) as usize;
        let noisy = j > 0;
        for i in 0..rc {
            let target = &en[i % en.len()];
            // Citing both versions of one work still counts once.
            let both = noisy && i % 4 == 0;
            let targets: Vec<&Target> = if both { vec![target, &ru[i % en.len()]] } else { vec![target] };
            b.isi_citer(format!("{jid}-cite-{i:03}"), TABLE1_YEAR, &targets);
        }
        for i in 0..integral_only {
            let k = (rc + i) % n_clusters;
            let id = format!("{jid}-proc-{i:03}");
            if noisy && i % 5 == 0 {
                // ISI venue, but the Russian original is cited.
                b.isi_citer(id, TABLE1_YEAR, &[&ru[k]]);
            } else if noisy && i % 5 == 1 && !en.is_empty() {
                // English version, but not from an ISI venue.
                b.external_citer(id, TABLE1_YEAR, &[&en[k % en.len()]]);
            } else {
                b.external_citer(id.clone(), TABLE1_YEAR, &[&ru[k]]);
                if noisy && i % 5 == 2 {
                    // The same document lists the same work twice.
                    b.reference(&id, ru[k].amsbib(1), None);
                }
            }
        }
        if noisy {
            let old = Target {
                id: format!("{jid}-2008-old"),
                journal_name: row.title.into(),
                year: 2008,
                volume: "0".into(),
                pages: PageRange::new(1, 2).expect("ordered"),
                title: "Outside the window".into(),
                author: j,
            };
            let mut a = Article::new(old.id.clone(), jid, 2008, Language::Ru, old.title.clone());
            a.volume = old.volume.clone();
            a.pages = Some(Pages::Range(old.pages));
            a.authors = vec![person_id(j).into()];
            b.article(a);
            b.isi_citer(format!("{jid}-noise-a"), TABLE1_YEAR, &[&old]);
            b.isi_citer(format!("{jid}-noise-b"), 2010, &[&ru[0]]);
            b.external_citer(format!("{jid}-noise-c"), 2012, &[&ru[1]]);
            b.reference(
                &format!("{jid}-noise-a"),
                "\\by L.~Euler \\paper Variae observationes circa series infinitas \\jour Commentarii academiae scientiarum Petropolitanae \\yr 1744 \\vol 9 \\pages 160--188".into(),
                None,
            );
        }
    }
    b.records
}

pub fn table1_ndjson() -> String {
    let mut out = String::new();
    for r in table1_records() {
        out.push_str(&serde_json::to_string(&r).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// Ingests the fixture and resolves its references.
pub fn table1_store() -> (Catalog, ReferenceDb) {
    let mut catalog = Catalog::new();
    let mut refs = ReferenceDb::new();
    let today = NaiveDate::from_ymd_opt(2012, 6, 1).expect("valid date");
    let report = ingest(&mut catalog, &mut refs, table1_records().into_iter().enumerate().collect(), today);
    assert_eq!(report.rejected, 0, "fixture records are valid: {:?}", report.rejections);
    let index = ResolverIndex::build(&catalog);
    refs.resolve_all(&catalog, &index, DEFAULT_FUZZY_THRESHOLD);
    (catalog, refs)
}
