use std::collections::{BTreeMap, BTreeSet};

use sciarchive::archive::{Catalog, Language};
use sciarchive::citegraph::{CitingDocument, ReferenceDb, Resolution};
use sciarchive::fixtures::{random_store, RandomParams};
use sciarchive::ids::{ArticleId, ClusterId, JournalId};
use sciarchive::metrics::{impact_factor, MetricsQuery, Mode, HORIZONS};

use super::Check;

/// Everything the brute-force count needs, flattened out of the store.
struct Flat {
    journal: BTreeMap<ArticleId, JournalId>,
    year: BTreeMap<ArticleId, i32>,
    english: BTreeSet<ArticleId>,
    citable: BTreeSet<ArticleId>,
    cluster: BTreeMap<ArticleId, ClusterId>,
    members: BTreeMap<ClusterId, Vec<ArticleId>>,
    citer: BTreeMap<String, (i32, bool)>,
    links: BTreeSet<(String, ArticleId)>,
}

fn flatten(c: &Catalog, db: &ReferenceDb) -> Flat {
    let isi: BTreeSet<&JournalId> = c.journals().filter(|j| j.isi_indexed).map(|j| &j.journal_id).collect();
    let mut f = Flat {
        journal: BTreeMap::new(),
        year: BTreeMap::new(),
        english: BTreeSet::new(),
        citable: BTreeSet::new(),
        cluster: BTreeMap::new(),
        members: BTreeMap::new(),
        citer: BTreeMap::new(),
        links: BTreeSet::new(),
    };
    for a in c.articles() {
        f.journal.insert(a.article_id.clone(), a.journal_id.clone());
        f.year.insert(a.article_id.clone(), a.year);
        if a.language == Language::En {
            f.english.insert(a.article_id.clone());
        }
        if a.citable {
            f.citable.insert(a.article_id.clone());
        }
        f.citer.insert(format!("a:{}", a.article_id), (a.year, isi.contains(&a.journal_id)));
    }
    for cl in c.clusters() {
        for m in &cl.members {
            f.cluster.insert(m.clone(), cl.cluster_id.clone());
        }
        f.members.insert(cl.cluster_id.clone(), cl.members.iter().cloned().collect());
    }
    for e in db.externals() {
        f.citer.insert(format!("x:{}", e.document_id), (e.year, e.isi_indexed));
    }
    for r in db.references() {
        if let Resolution::Resolved { article_id, .. } = &r.resolution {
            let key = match &r.citing {
                CitingDocument::Article(a) => format!("a:{a}"),
                CitingDocument::External(x) => format!("x:{x}"),
            };
            f.links.insert((key, article_id.clone()));
        }
    }
    f
}

fn brute(f: &Flat, j: &JournalId, year: i32, horizon: u32, mode: Mode) -> (u64, u64) {
    let lo = year - horizon as i32;
    let inside = |a: &ArticleId| f.journal[a] == *j && f.year[a] >= lo && f.year[a] < year;
    let cited_in_year = |c: &String| f.citer.get(c).is_some_and(|(y, _)| *y == year);
    match mode {
        Mode::Integral => {
            let items: BTreeSet<&ClusterId> = f
                .journal
                .keys()
                .filter(|a| inside(a) && f.citable.contains(*a))
                .map(|a| &f.cluster[a])
                .collect();
            let live: BTreeSet<&ClusterId> = f
                .members
                .iter()
                .filter(|(_, ms)| ms.iter().any(inside))
                .map(|(c, _)| c)
                .collect();
            let pairs: BTreeSet<(&String, &ClusterId)> = f
                .links
                .iter()
                .filter(|(c, t)| cited_in_year(c) && live.contains(&f.cluster[t]))
                .map(|(c, t)| (c, &f.cluster[t]))
                .collect();
            (pairs.len() as u64, items.len() as u64)
        }
        Mode::Restricted => {
            let items = f.english.iter().filter(|a| inside(a)).count() as u64;
            let cites = f
                .links
                .iter()
                .filter(|(c, t)| f.english.contains(t) && inside(t) && cited_in_year(c) && f.citer[c].1)
                .count() as u64;
            (cites, items)
        }
    }
}

/// Three decimals, half up, by long division.
fn oracle_round(c: u64, p: u64) -> String {
    let scaled = c as u128 * 1000;
    let (q, r) = (scaled / p as u128, scaled % p as u128);
    let q = if 2 * r >= p as u128 { q + 1 } else { q };
    format!("{}.{:03}", q / 1000, q % 1000)
}

pub fn params(seed: u64) -> RandomParams {
    RandomParams {
        journals: 2 + (seed % 4) as usize,
        persons: 10 + (seed % 20) as usize,
        articles: 60 + (seed * 37 % 500) as usize,
        externals: (seed % 50) as usize,
        references: 200 + (seed * 131 % 4000) as usize,
        version_rate: [0.0, 0.2, 0.5][(seed % 3) as usize],
    }
}

/// Checks every (journal, year, horizon, mode) of one store.
pub fn check_store(seed: u64) -> Result<(usize, usize), String> {
    let (c, db) = random_store(seed, params(seed));
    let f = flatten(&c, &db);
    if f.links.len() > 100_000 {
        return Err(format!("store {seed} has {} links", f.links.len()));
    }
    let (mut n, mut nonzero) = (0, 0);
    for j in c.journals() {
        for year in 2001..=2013 {
            for horizon in HORIZONS {
                for mode in [Mode::Integral, Mode::Restricted] {
                    let q = MetricsQuery { journal_id: j.journal_id.clone(), year, horizon, mode };
                    let got = impact_factor(&c, &db, &q).map_err(|e| format!("{q:?}: {e}"))?;
                    let (cites, items) = brute(&f, &j.journal_id, year, horizon, mode);
                    let want_round = (items > 0).then(|| oracle_round(cites, items));
                    let same_ratio = match got.ratio() {
                        Some(r) => items > 0 && *r.numer() * items == *r.denom() * cites,
                        None => items == 0,
                    };
                    if (got.citations, got.citable_items) != (cites, items) || !same_ratio || got.rounded != want_round {
                        return Err(format!(
                            "store {seed} {q:?}: got {}/{} {:?}, oracle {cites}/{items} {want_round:?}",
                            got.citations, got.citable_items, got.rounded
                        ));
                    }
                    n += 1;
                    nonzero += usize::from(cites > 0);
                }
            }
        }
    }
    Ok((n, nonzero))
}

pub fn check(stores: u64) -> Check {
    let (mut total, mut nonzero) = (0, 0);
    for seed in 0..stores {
        let (n, z) = check_store(seed)?;
        total += n;
        nonzero += z;
    }
    Ok(format!("{stores} stores, {total} queries ({nonzero} with citations), zero mismatches"))
}
