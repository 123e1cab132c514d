//! Loads the bundled comparison catalog through NDJSON ingest, then runs a
//! few publication searches against it. With a path argument the NDJSON
//! is also written there, ready for `sciarchive archive ingest`.

use chrono::NaiveDate;
use sciarchive::archive::{ingest_ndjson, Catalog, PublicationQuery, SearchIndex, YearRange};
use sciarchive::citegraph::ReferenceDb;
use sciarchive::fixtures::table1_ndjson;

fn main() {
    let ndjson = table1_ndjson();
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, &ndjson).expect("writable path");
        println!("wrote {path}");
    }
    let mut catalog = Catalog::new();
    let mut refs = ReferenceDb::new();
    let today = NaiveDate::from_ymd_opt(2024, 1, 1).unwrap();
    let report = ingest_ndjson(&mut catalog, &mut refs, &ndjson, today);
    println!(
        "ingested {} journals, {} articles, {} references ({} rejected)",
        catalog.journals().count(),
        catalog.article_count(),
        refs.len(),
        report.rejected
    );

    let index = SearchIndex::build(&catalog);
    let queries = [
        PublicationQuery {
            title_keywords: vec!["spectral".into()],
            ..Default::default()
        },
        PublicationQuery {
            journal_id: Some("mat-sb".into()),
            year_range: Some(YearRange { from: 2010, to: 2010 }),
            ..Default::default()
        },
    ];
    for q in &queries {
        let hits = index.search(&catalog, q).expect("valid query");
        println!("\n{} hit(s) for {}", hits.len(), serde_json::to_string(q).unwrap());
        for h in hits.iter().take(5) {
            let a = catalog.article(&h.article_id).unwrap();
            println!("  {:>3}  {}  {}", h.score, h.article_id, a.title);
        }
    }
}
