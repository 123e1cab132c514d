//! Resolves free-text references against the catalog and walks the
//! resulting forward links.

use sciarchive::amsbib::parse_str;
use sciarchive::citegraph::{ResolverIndex, DEFAULT_FUZZY_THRESHOLD};
use sciarchive::fixtures::table1_store;

fn main() {
    let (catalog, refs) = table1_store();
    let index = ResolverIndex::build(&catalog);

    // Cite one article twice: once precisely, once with a garbled journal
    // name, a lowercased title and no volume or pages.
    let target = catalog
        .articles()
        .find(|a| a.journal_id.as_str() == "mat-sb" && a.year == 2010 && a.first_page().is_some())
        .expect("fixture has paged mat-sb articles");
    let journal = catalog.journal(&target.journal_id).unwrap();
    let exact = format!(
        "\\RBibitem{{a}}\n\\paper {}\n\\jour {}\n\\yr {}\n\\vol {}\n\\pages {}",
        target.title,
        journal.title,
        target.year,
        target.volume,
        target.first_page().unwrap_or(1)
    );
    let fuzzy = format!("\\RBibitem{{b}}\n\\paper {}\n\\jour Mat. Sborn.\n\\yr {}", target.title.to_lowercase(), target.year);
    for source in [exact, fuzzy] {
        let parsed = parse_str(&source).expect("well formed").reference;
        let candidates = index.resolve(&parsed, None, DEFAULT_FUZZY_THRESHOLD);
        println!("{:?}", parsed.title);
        for c in candidates.iter().take(3) {
            println!("  -> {} score {:.3} via {:?}", c.article_id, c.score, c.method);
        }
    }

    let mut cited: Vec<_> = catalog
        .articles()
        .map(|a| (refs.citers_of(&a.article_id).count(), a.article_id.clone()))
        .collect();
    cited.sort_by(|a, b| b.cmp(a));
    println!("\nmost cited:");
    for (n, id) in cited.iter().take(3) {
        let links = refs.forward_links_of(&catalog, id, true).unwrap();
        println!("  {id}: {n} citing document(s), {} excluding self-citations", links.len());
    }
}
