use std::collections::BTreeSet;

use sciarchive::amsbib::parse_str;
use sciarchive::citegraph::{Method, ResolverIndex, DEFAULT_FUZZY_THRESHOLD};
use sciarchive::fixtures::{resolver_fixture, CaseKind};

use super::Check;

/// Fixture titles are ASCII words, possibly with `\'` accents, brace
/// groups and changed case.
fn trigrams(title: &str) -> BTreeSet<String> {
    let plain = title.replace("\\'", "").replace(['{', '}'], "").to_lowercase();
    let mut out = BTreeSet::new();
    for w in plain.split_whitespace() {
        let padded = format!("  {w} ");
        let chars: Vec<char> = padded.chars().collect();
        for k in 0..chars.len() - 2 {
            out.insert(chars[k..k + 3].iter().collect::<String>());
        }
    }
    out
}

pub fn similarity(a: &str, b: &str) -> f64 {
    let (x, y) = (trigrams(a), trigrams(b));
    let inter = x.intersection(&y).count();
    inter as f64 / (x.len() + y.len() - inter) as f64
}

/// Every case's top candidate against the fixture's ground truth; fuzzy
/// scores against the independent trigram count.
pub fn check(seed: u64) -> Check {
    let f = resolver_fixture(seed);
    let count = |k| f.cases.iter().filter(|c| c.kind == k).count();
    let counts = (count(CaseKind::Exact), count(CaseKind::Fuzzy), count(CaseKind::Unresolvable));
    if f.catalog.article_count() != 1000 || counts != (300, 150, 50) {
        return Err(format!("fixture shape {} articles, {counts:?}", f.catalog.article_count()));
    }
    let index = ResolverIndex::build(&f.catalog);
    for case in &f.cases {
        let parsed = parse_str(&case.source).map_err(|e| format!("{e}: {}", case.source))?.reference;
        let top = index.resolve(&parsed, case.year_hint, DEFAULT_FUZZY_THRESHOLD).into_iter().next();
        let ok = match (&case.expected, &top) {
            (None, None) => true,
            (Some((id, Method::ExactKey)), Some(c)) => c.article_id == *id && c.method == Method::ExactKey && c.score == 1.0,
            (Some((id, Method::FuzzyTitle)), Some(c)) => {
                let article = f.catalog.article(id).map_err(|e| e.to_string())?;
                let want = similarity(parsed.title.as_deref().unwrap_or_default(), &article.title);
                want >= DEFAULT_FUZZY_THRESHOLD && c.article_id == *id && c.method == Method::FuzzyTitle && c.score == want
            }
            _ => false,
        };
        if !ok {
            return Err(format!("{}: expected {:?}, got {top:?}", case.source, case.expected));
        }
    }
    Ok(format!("{} articles, {} references ({} exact, {} fuzzy, {} unresolvable) all match", 1000, f.cases.len(), counts.0, counts.1, counts.2))
}
