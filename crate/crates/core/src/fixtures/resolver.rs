//! 1000 articles and 500 references with a known resolution for each:
//! 300 carry a full journal/year/volume/page key, 150 only a recognizable
//! title and 50 point at nothing in the catalog.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::amsbib::{PageRange, Pages, PersonName};
use crate::archive::{Article, Catalog, Journal, Language, Person};
use crate::citegraph::Method;
use crate::ids::ArticleId;

const WORDS: [&str; 96] = [
    "abelian", "algebra", "analytic", "approximation", "asymptotic", "automorphism", "boundary", "branching",
    "canonical", "characteristic", "cohomology", "compact", "complexity", "conformal", "convex", "curvature",
    "decomposition", "deformation", "differential", "diffusion", "dimension", "dirichlet", "discrete", "distribution",
    "dynamical", "eigenvalue", "elliptic", "entropy", "equation", "ergodic", "estimate", "expansion", "extremal",
    "factorization", "finite", "fractional", "functional", "geodesic", "geometry", "gradient", "harmonic",
    "hyperbolic", "inequality", "integral", "interpolation", "invariant", "isometric", "kernel", "lattice",
    "manifold", "martingale", "measure", "minimal", "modular", "monotone", "multiplier", "nilpotent", "nonlinear",
    "operator", "orthogonal", "oscillation", "parabolic", "periodic", "perturbation", "polynomial", "potential",
    "quadratic", "quantum", "random", "rational", "recursive", "regularity", "representation", "resolvent",
    "riemannian", "scattering", "semigroup", "singular", "sobolev", "spectral", "spline", "stability",
    "stochastic", "subgroup", "summability", "symmetric", "symplectic", "tensor", "topological", "trajectory",
    "transform", "uniform", "variational", "vector", "wavelet", "weighted",
];

const FOREIGN: [&str; 12] = [
    "gastronomy", "ornithology", "viticulture", "calligraphy", "heraldry", "numismatics", "philately", "apiculture",
    "cartography", "glassblowing", "falconry", "topiary",
];

const JOURNALS: [(&str, &str, &str); 5] = [
    ("izv", "Izvestiya Rossiiskoi Akademii Nauk. Seriya Matematicheskaya", "Izv. Math."),
    ("umn", "Uspekhi Matematicheskikh Nauk", "Russian Math. Surveys"),
    ("faa", "Funktsionalnyi Analiz i ego Prilozheniya", "Funct. Anal. Appl."),
    ("tvp", "Teoriya Veroyatnostei i ee Primeneniya", "Theory Probab. Appl."),
    ("mz", "Matematicheskie Zametki", "Math. Notes"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    Exact,
    Fuzzy,
    Unresolvable,
}

#[derive(Debug, Clone)]
pub struct ResolverCase {
    pub source: String,
    pub year_hint: Option<i32>,
    pub kind: CaseKind,
    /// The intended article and method; `None` for unresolvable cases.
    pub expected: Option<(ArticleId, Method)>,
}

pub struct ResolverFixture {
    pub catalog: Catalog,
    pub cases: Vec<ResolverCase>,
}

struct Meta {
    id: ArticleId,
    journal: usize,
    year: i32,
    volume: u32,
    pages: PageRange,
    title: String,
    family: &'static str,
}

const FAMILIES: [&str; 10] = [
    "Bernstein", "Vinogradov", "Luzin", "Sobolev", "Pontryagin", "Linnik", "Nikolskii", "Postnikov", "Shafarevich",
    "Vitushkin",
];

fn random_title(rng: &mut ChaCha8Rng, vocab: &[&str]) -> String {
    let n = rng.gen_range(5..=7);
    let words: Vec<&str> = vocab.choose_multiple(rng, n).copied().collect();
    let mut t = words.join(" ");
    t[..1].make_ascii_uppercase();
    t
}

/// A one-letter change in the middle of the longest word.
fn typo(title: &str) -> String {
    let longest = title.split(' ').max_by_key(|w| w.len()).expect("non-empty title");
    let mid = longest.len() / 2;
    let replaced: String = longest
        .char_indices()
        .map(|(i, c)| if i == mid { if c == 'x' { 'y' } else { 'x' } } else { c })
        .collect();
    title.replacen(longest, &replaced, 1)
}

/// Accent macros and brace groups that title normalization removes.
fn latexify(title: &str) -> String {
    let mut out = String::new();
    let mut done = false;
    for w in title.split(' ') {
        if !out.is_empty() {
            out.push(' ');
        }
        if !done && w.contains('e') {
            out.push_str(&w.replacen('e', "\\'e", 1));
            done = true;
        } else if w.len() > 8 {
            out.push_str(&format!("{{{}}}", w.to_uppercase()));
        } else {
            out.push_str(w);
        }
    }
    out
}

fn by(m: &Meta) -> String {
    format!("\\by {}.~{}", &m.family[..1], m.family)
}

pub fn resolver_fixture(seed: u64) -> ResolverFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut catalog = Catalog::new();
    for (i, f) in FAMILIES.iter().enumerate() {
        catalog
            .upsert_person(Person::new(format!("rz-p{i}"), PersonName::new(*f, "A.")))
            .expect("valid person");
    }
    for (id, title, alias) in JOURNALS {
        let mut j = Journal::new(id, title);
        j.aliases = vec![alias.into()];
        catalog.upsert_journal(j).expect("valid journal");
    }

    let mut titles = BTreeSet::new();
    let mut metas = Vec::with_capacity(1000);
    for n in 0..1000usize {
        let title = loop {
            let t = random_title(&mut rng, &WORDS);
            if titles.insert(t.to_lowercase()) {
                break t;
            }
        };
        let journal = n % JOURNALS.len();
        let year = 1980 + ((n / JOURNALS.len()) % 30) as i32;
        let first = 1 + 40 * (n / (JOURNALS.len() * 30)) as u32;
        let author = rng.gen_range(0..FAMILIES.len());
        let m = Meta {
            id: format!("rz-{n:04}").into(),
            journal,
            year,
            volume: (year - 1936) as u32,
            pages: PageRange::new(first, first + rng.gen_range(5..30)).expect("ordered"),
            title,
            family: FAMILIES[author],
        };
        let mut a = Article::new(m.id.clone(), JOURNALS[journal].0, year, Language::Ru, m.title.clone());
        a.volume = m.volume.to_string();
        a.pages = Some(Pages::Range(m.pages));
        a.authors = vec![format!("rz-p{author}").into()];
        catalog.upsert_article(a, 2026).expect("valid article");
        metas.push(m);
    }

    let mut order: Vec<usize> = (0..metas.len()).collect();
    order.shuffle(&mut rng);
    let mut cases = Vec::with_capacity(500);

    for (i, &n) in order[..300].iter().enumerate() {
        let m = &metas[n];
        let (_, title, alias) = JOURNALS[m.journal];
        let jour = match i % 3 {
            0 => title.to_string(),
            1 => alias.to_string(),
            _ => alias.to_uppercase(),
        };
        // The key wins even when the title is wrong or missing.
        let paper = match i % 10 {
            0 => format!(" \\paper {}", metas[order[999 - i]].title),
            1 => String::new(),
            _ => format!(" \\paper {}", m.title),
        };
        let pages = if i % 2 == 0 {
            format!("{}--{}", m.pages.first, m.pages.last)
        } else {
            m.pages.first.to_string()
        };
        cases.push(ResolverCase {
            source: format!("{}{paper} \\jour {jour} \\yr {} \\vol {} \\pages {pages}", by(m), m.year, m.volume),
            year_hint: None,
            kind: CaseKind::Exact,
            expected: Some((m.id.clone(), Method::ExactKey)),
        });
    }

    for (i, &n) in order[300..450].iter().enumerate() {
        let m = &metas[n];
        let title = match i % 3 {
            0 => typo(&m.title),
            1 => latexify(&m.title),
            _ => m.title.to_lowercase(),
        };
        let year = m.year + [0, 1, -1][i % 3];
        // A wrong volume, or none at all, defeats the key.
        let rest = match i % 2 {
            0 => format!(" \\jour {} \\yr {year} \\vol {} \\pages {}", JOURNALS[m.journal].2, m.volume + 100, m.pages.first),
            _ => format!(" \\jour Preprint series \\yr {year}"),
        };
        cases.push(ResolverCase {
            source: format!("{} \\paper {title}{rest}", by(m)),
            year_hint: None,
            kind: CaseKind::Fuzzy,
            expected: Some((m.id.clone(), Method::FuzzyTitle)),
        });
    }

    for (i, &n) in order[450..500].iter().enumerate() {
        let m = &metas[n];
        let source = match i % 3 {
            // Nothing like it in the catalog.
            0 => format!(
                "{} \\paper {} \\jour Almanac \\yr {}",
                by(m),
                random_title(&mut rng, &FOREIGN),
                m.year
            ),
            // The right title, but years away from the article.
            1 => format!("{} \\paper {} \\yr {}", by(m), m.title, m.year + 5),
            // Too little of the title left to be sure.
            _ => {
                let short: Vec<&str> = m.title.split(' ').take(2).collect();
                format!("{} \\paper {} \\yr {}", by(m), short.join(" "), m.year)
            }
        };
        cases.push(ResolverCase {
            source,
            year_hint: None,
            kind: CaseKind::Unresolvable,
            expected: None,
        });
    }

    ResolverFixture { catalog, cases }
}
