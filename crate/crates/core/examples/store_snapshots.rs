//! Opens an on-disk store, writes through transactions and reads old
//! snapshots while newer ones are published.

use sciarchive::archive::{ArchiveError, Language};
use sciarchive::fixtures::demo_state;
use sciarchive::store::{Store, StoreError};

#[derive(Debug, thiserror::Error)]
enum Error {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Archive(#[from] ArchiveError),
}

fn main() -> Result<(), Error> {
    let dir = std::env::temp_dir().join(format!("sciarchive-example-{}", std::process::id()));
    let (catalog, refs, editorial) = demo_state();
    {
        let seeded = Store::from_state(catalog, refs, editorial);
        let snap = seeded.snapshot();
        let store = Store::open(&dir)?;
        store.write(|tx| {
            let (c, r, e) = tx.parts_mut();
            *c = (*snap.catalog).clone();
            *r = (*snap.references).clone();
            *e = (*snap.editorial).clone();
            Ok::<_, Error>(())
        })?;
    }

    let store = Store::open(&dir)?;
    let before = store.snapshot();
    println!("reopened snapshot {} with {} articles", before.id, before.catalog.article_count());

    // Two unclustered articles in different languages can be versions of
    // one work.
    let single = |lang| {
        before
            .catalog
            .articles()
            .find(|x| x.language == lang && before.catalog.cluster_of(&x.article_id).map_or(true, |c| c.members.len() == 1))
            .map(|x| x.article_id.clone())
            .expect("fixture has unclustered articles in both languages")
    };
    let (a, b) = (single(Language::Ru), single(Language::En));
    let cluster = store.write(|tx| Ok::<_, Error>(tx.catalog_mut().link_versions(&a, &b)?))?;
    let after = store.snapshot();
    println!("linked {a} and {b} as {cluster} in snapshot {}", after.id);
    println!(
        "old snapshot still sees {} cluster member(s), new one sees {}",
        before.catalog.cluster_of(&a).map(|c| c.members.len()).unwrap_or(1),
        after.catalog.cluster_of(&a)?.members.len()
    );

    let failed: Result<(), Error> = store.write(|tx| {
        tx.catalog_mut().link_versions(&a, &"no-such-article".into())?;
        Ok(())
    });
    println!("failed write: {}; snapshot is still {}", failed.unwrap_err(), store.snapshot().id);

    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}
