use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sciarchive::amsbib::Pages;
use sciarchive::archive::{Article, Catalog, PublicationQuery, SearchHit, SearchIndex, YearRange};
use sciarchive::citegraph::{CitedReferenceQuery, ReferenceDb, ReferenceSearchIndex};
use sciarchive::fixtures::{random_store, RandomParams, FAMILIES, ORGANIZATIONS, VOCABULARY};

use super::Check;

/// Fixture text is ASCII; terms are lowercase alphanumeric runs.
fn words(s: &str) -> Vec<String> {
    s.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| w.to_ascii_lowercase())
        .collect()
}

fn count(field: &[String], t: &str) -> u64 {
    field.iter().filter(|w| *w == t).count() as u64
}

fn article_fields(a: &Article) -> (Vec<String>, Vec<String>, Vec<String>) {
    let mut title = words(&a.title);
    title.extend(a.translated_title.as_deref().map(words).unwrap_or_default());
    let keywords: Vec<String> = a
        .keywords
        .iter()
        .chain(a.translated_keywords.iter().flatten())
        .flat_map(|k| words(k))
        .collect();
    let mut abs = words(&a.abstract_text);
    abs.extend(a.translated_abstract.as_deref().map(words).unwrap_or_default());
    (title, keywords, abs)
}

pub fn oracle_publications(c: &Catalog, q: &PublicationQuery) -> Option<Vec<SearchHit>> {
    let tq: BTreeSet<String> = q.title_keywords.iter().flat_map(|s| words(s)).collect();
    let aq: BTreeSet<String> = q.abstract_keywords.iter().flat_map(|s| words(s)).collect();
    let author: BTreeSet<String> = q.author_name.as_deref().map(words).unwrap_or_default().into_iter().collect();
    let org: BTreeSet<String> = q.organization_name.as_deref().map(words).unwrap_or_default().into_iter().collect();
    if tq.is_empty() && aq.is_empty() && author.is_empty() && org.is_empty() && q.journal_id.is_none() && q.year_range.is_none() {
        return None;
    }
    let mut hits = Vec::new();
    for a in c.articles() {
        let (title, keywords, abs) = article_fields(a);
        if !tq.iter().all(|t| title.contains(t) || keywords.contains(t)) || !aq.iter().all(|t| abs.contains(t)) {
            continue;
        }
        let persons: Vec<_> = a.authors.iter().filter_map(|p| c.person(p).ok()).collect();
        if !author.is_empty()
            && !persons.iter().any(|p| {
                p.names().any(|n| {
                    let have: BTreeSet<String> = words(&format!("{} {}", n.given, n.family)).into_iter().collect();
                    author.is_subset(&have)
                })
            })
        {
            continue;
        }
        if !org.is_empty()
            && !persons.iter().any(|p| {
                p.affiliations.iter().any(|aff| {
                    let name = c.organization(&aff.organization_id).map(|o| words(&o.name)).unwrap_or_default();
                    org.is_subset(&name.into_iter().collect()) && aff.covers(a.year)
                })
            })
        {
            continue;
        }
        if q.journal_id.as_ref().is_some_and(|j| *j != a.journal_id) {
            continue;
        }
        if q.year_range.is_some_and(|r| !(r.from..=r.to).contains(&a.year)) {
            continue;
        }
        let score = tq
            .union(&aq)
            .map(|t| 3 * count(&title, t) + 2 * count(&keywords, t) + count(&abs, t))
            .sum();
        hits.push(SearchHit { article_id: a.article_id.clone(), score });
    }
    hits.sort_by(|x, y| y.score.cmp(&x.score).then(x.article_id.cmp(&y.article_id)));
    Some(hits)
}

/// A random entry of `list` in random letter case.
fn random_case(rng: &mut ChaCha8Rng, list: &[&str]) -> String {
    let word = *list.choose(rng).unwrap();
    word.chars()
        .map(|c| if rng.gen_bool(0.3) { c.to_ascii_uppercase() } else { c })
        .collect()
}

fn random_query(rng: &mut ChaCha8Rng, journals: usize) -> PublicationQuery {
    let mut q = PublicationQuery::default();
    let pick = |rng: &mut ChaCha8Rng| random_case(rng, &VOCABULARY);
    for _ in 0..rng.gen_range(0..=2) {
        q.title_keywords.push(pick(rng));
    }
    if rng.gen_bool(0.3) {
        q.abstract_keywords.push(pick(rng));
    }
    if rng.gen_bool(0.3) {
        let family = FAMILIES.choose(rng).unwrap();
        q.author_name = Some(match rng.gen_range(0..3) {
            0 => family.to_string(),
            1 => format!("A. {family}"),
            _ => format!("{}a", family.to_lowercase()),
        });
    }
    if rng.gen_bool(0.2) {
        let name = ORGANIZATIONS.choose(rng).unwrap();
        let w: Vec<&str> = name.split(' ').collect();
        q.organization_name = Some(w[..rng.gen_range(1..=w.len())].join(" "));
    }
    if rng.gen_bool(0.2) {
        q.journal_id = Some(format!("rj{}", rng.gen_range(0..journals)).into());
    }
    if rng.gen_bool(0.3) {
        let from = rng.gen_range(1999..=2012);
        q.year_range = Some(YearRange { from, to: from + rng.gen_range(0..5) });
    }
    q
}

fn oracle_references<'a>(db: &'a ReferenceDb, q: &CitedReferenceQuery) -> Vec<&'a str> {
    let terms: Vec<String> = q.title_terms.iter().flat_map(|t| words(t)).collect();
    let family = q.author_family.as_deref().map(str::to_ascii_lowercase);
    let page = q.pages.as_deref();
    let mut out: Vec<&str> = db
        .references()
        .filter(|r| {
            let title = r.parsed.title.as_deref().map(words).unwrap_or_default();
            terms.iter().all(|t| title.contains(t))
                && q.year.is_none_or(|y| r.parsed.year == Some(y))
                && family
                    .as_ref()
                    .is_none_or(|f| r.parsed.authors.iter().any(|a| a.family.to_ascii_lowercase() == *f))
                && page.is_none_or(|p| match (&r.parsed.pages, p.split_once("--")) {
                    (Some(Pages::Range(h)), None) => {
                        let n: u32 = p.parse().unwrap();
                        h.first <= n && n <= h.last
                    }
                    (Some(Pages::Range(h)), Some((a, b))) => {
                        h.first == a.parse::<u32>().unwrap() && h.last == b.parse::<u32>().unwrap()
                    }
                    _ => false,
                })
        })
        .map(|r| r.reference_id.as_str())
        .collect();
    out.sort();
    out
}

fn random_reference_query(rng: &mut ChaCha8Rng) -> CitedReferenceQuery {
    let mut q = CitedReferenceQuery::default();
    for _ in 0..rng.gen_range(0..=2) {
        q.title_terms.push(random_case(rng, &VOCABULARY));
    }
    if rng.gen_bool(0.4) {
        q.year = Some(rng.gen_range(1995..=2012));
    }
    if rng.gen_bool(0.4) {
        q.author_family = Some(random_case(rng, &FAMILIES));
    }
    if rng.gen_bool(0.3) {
        let first = rng.gen_range(1..200);
        q.pages = Some(if rng.gen_bool(0.5) { first.to_string() } else { format!("{first}--{}", first + rng.gen_range(0..20)) });
    }
    q
}

/// Publication and cited-reference search against linear scans on stores
/// of the given sizes (articles; references are five times as many).
pub fn check(sizes: &[usize], queries: usize) -> Check {
    let mut checked = 0;
    let mut nonempty = 0;
    for (seed, &n) in sizes.iter().enumerate() {
        let params = RandomParams {
            journals: 4,
            persons: (n / 10).clamp(8, 400),
            articles: n,
            externals: 20,
            references: (5 * n).min(10_000),
            version_rate: 0.1,
        };
        let (c, db) = random_store(1000 + seed as u64, params);
        let idx = SearchIndex::build(&c);
        let ridx = ReferenceSearchIndex::build(&db);
        let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
        for _ in 0..queries {
            let q = random_query(&mut rng, 4);
            let got = idx.search(&c, &q).ok();
            let want = oracle_publications(&c, &q);
            if got != want {
                return Err(format!("publication search differs for {q:?} (store of {n})"));
            }
            nonempty += usize::from(want.is_some_and(|w| !w.is_empty()));

            let rq = random_reference_query(&mut rng);
            let got: Option<Vec<&str>> = ridx
                .search(&db, &rq)
                .ok()
                .map(|v| v.into_iter().map(|r| r.reference_id.as_str()).collect());
            let want = (!rq.title_terms.is_empty() || rq.year.is_some() || rq.author_family.is_some() || rq.pages.is_some())
                .then(|| oracle_references(&db, &rq));
            if got != want {
                return Err(format!("cited-reference search differs for {rq:?} (store of {n})"));
            }
            checked += 2;
        }
    }
    Ok(format!("{checked} queries over {} stores (largest {}), {nonempty} non-empty publication results", sizes.len(), sizes.iter().max().unwrap_or(&0)))
}
