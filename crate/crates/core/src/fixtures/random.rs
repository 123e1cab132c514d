//! Seeded random stores for property tests. A small vocabulary keeps
//! score ties and shared names frequent.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::amsbib::{Origin, PageRange, Pages, PersonName, RawReference};
use crate::archive::{Affiliation, Article, Catalog, Journal, Language, Organization, Person};
use crate::citegraph::{CitingDocument, ExternalDocument, Method, ReferenceDb, Resolution};

pub const VOCABULARY: [&str; 24] = [
    "random", "tables", "entropy", "operator", "spectrum", "group", "graph", "flow", "measure", "lattice", "wave",
    "field", "ring", "knot", "game", "code", "chain", "tree", "norm", "form", "orbit", "sheaf", "cone", "prime",
];
pub const FAMILIES: [&str; 8] = ["Ivanov", "Petrov", "Sidorov", "Smirnov", "Kuznetsov", "Popov", "Sokolov", "Lebedev"];
pub const GIVEN: [&str; 4] = ["A.", "B.", "A. N.", "V."];
pub const ORGANIZATIONS: [&str; 4] = [
    "Steklov Mathematical Institute",
    "Moscow State University",
    "Keldysh Institute of Applied Mathematics",
    "Institute for Information Transmission Problems",
];

#[derive(Debug, Clone, Copy)]
pub struct RandomParams {
    pub journals: usize,
    pub persons: usize,
    pub articles: usize,
    pub externals: usize,
    pub references: usize,
    /// Chance that an article is linked as a version of an earlier one.
    pub version_rate: f64,
}

impl Default for RandomParams {
    fn default() -> Self {
        Self {
            journals: 4,
            persons: 20,
            articles: 300,
            externals: 40,
            references: 1500,
            version_rate: 0.2,
        }
    }
}

fn words(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> Vec<&'static str> {
    let n = rng.gen_range(lo..=hi);
    (0..n).map(|_| *VOCABULARY.choose(rng).expect("non-empty")).collect()
}

pub fn random_store(seed: u64, p: RandomParams) -> (Catalog, ReferenceDb) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Catalog::new();
    for (i, name) in ORGANIZATIONS.iter().enumerate() {
        c.upsert_organization(Organization {
            organization_id: format!("org{i}").into(),
            name: (*name).into(),
            url: None,
        })
        .expect("valid organization");
    }
    for i in 0..p.persons {
        let mut person = Person::new(
            format!("rp{i:03}"),
            PersonName::new(FAMILIES[i % FAMILIES.len()], *GIVEN.choose(&mut rng).expect("non-empty")),
        );
        if rng.gen_bool(0.3) {
            person.name_variants.push(PersonName::new(
                format!("{}a", FAMILIES[i % FAMILIES.len()]),
                "A.",
            ));
        }
        for _ in 0..rng.gen_range(0..=2) {
            let from = rng.gen_range(1995..2012);
            person.affiliations.push(Affiliation {
                organization_id: format!("org{}", rng.gen_range(0..ORGANIZATIONS.len())).into(),
                from_year: rng.gen_bool(0.8).then_some(from),
                to_year: rng.gen_bool(0.5).then(|| from + rng.gen_range(0..6)),
            });
        }
        c.upsert_person(person).expect("valid person");
    }
    for j in 0..p.journals {
        let mut journal = Journal::new(format!("rj{j}"), format!("Random Journal {j}"));
        journal.isi_indexed = rng.gen_bool(0.5);
        c.upsert_journal(journal).expect("valid journal");
    }
    let mut ids = Vec::with_capacity(p.articles);
    for n in 0..p.articles {
        let language = match rng.gen_range(0..10) {
            0..=4 => Language::Ru,
            5..=8 => Language::En,
            _ => Language::Other,
        };
        let year = rng.gen_range(2000..=2012);
        let journal = format!("rj{}", rng.gen_range(0..p.journals));
        let mut a = Article::new(format!("ra{n:05}"), journal, year, language, words(&mut rng, 1, 5).join(" "));
        a.volume = (year - 1990).to_string();
        let first = 1 + 20 * n as u32;
        a.pages = Some(Pages::Range(PageRange::new(first, first + rng.gen_range(0..15)).expect("ordered")));
        a.keywords = words(&mut rng, 0, 3).into_iter().map(String::from).collect();
        a.abstract_text = words(&mut rng, 0, 8).join(" ");
        if rng.gen_bool(0.2) {
            a.translated_title = Some(words(&mut rng, 1, 4).join(" "));
        }
        a.citable = rng.gen_bool(0.9);
        let n_authors = rng.gen_range(1..=3).min(p.persons);
        a.authors = (0..p.persons)
            .collect::<Vec<_>>()
            .choose_multiple(&mut rng, n_authors)
            .map(|i| format!("rp{i:03}").into())
            .collect();
        c.upsert_article(a, 2026).expect("valid article");
        let id = crate::ids::ArticleId(format!("ra{n:05}"));
        if !ids.is_empty() && rng.gen_bool(p.version_rate) {
            let other = ids.choose(&mut rng).expect("non-empty");
            // Versions of one work differ in language; skip clashes.
            let _ = c.link_versions(other, &id);
        }
        ids.push(id);
    }

    let mut db = ReferenceDb::new();
    for e in 0..p.externals {
        db.upsert_external(ExternalDocument {
            document_id: format!("rx{e:03}"),
            year: rng.gen_range(2000..=2013),
            isi_indexed: rng.gen_bool(0.4),
        });
    }
    for r in 0..p.references {
        let citing = if p.externals > 0 && rng.gen_bool(0.3) {
            CitingDocument::External(format!("rx{:03}", rng.gen_range(0..p.externals)))
        } else {
            CitingDocument::Article(ids.choose(&mut rng).expect("articles exist").clone())
        };
        let target = ids.choose(&mut rng).expect("articles exist").clone();
        let family = FAMILIES.choose(&mut rng).expect("non-empty");
        let year = rng.gen_range(1995..=2012);
        let first = rng.gen_range(1..200);
        let pages = if rng.gen_bool(0.7) {
            format!("{first}--{}", first + rng.gen_range(0..20))
        } else {
            first.to_string()
        };
        let source = format!(
            "\\by A.~{family} \\paper {} \\jour Random Journal {} \\yr {year} \\vol {} \\pages {pages} \\extra ref {r}",
            words(&mut rng, 1, 4).join(" "),
            rng.gen_range(0..p.journals.max(1)),
            rng.gen_range(1..30),
        );
        let raw = RawReference::new(source, Origin::JournalBibliography).expect("valid source");
        let resolution = rng.gen_bool(0.9).then(|| Resolution::Resolved {
            article_id: target,
            score: 1.0,
            method: Method::Manual,
        });
        db.add_reference(&c, None, citing, raw, None, resolution)
            .expect("citing document exists");
    }
    (c, db)
}
