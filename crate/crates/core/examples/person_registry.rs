//! Registers authors, catches a suspected duplicate and merges it.

use sciarchive::amsbib::PersonName;
use sciarchive::archive::ArchiveError;
use sciarchive::fixtures::table1_store;

fn main() -> Result<(), ArchiveError> {
    let (mut catalog, _) = table1_store();

    let first = catalog.register_person(PersonName::new("Chebotarev", "Nikolai Grigorievich"), vec![], None, false)?;
    println!("registered {}", first.person_id);

    let again = PersonName::new("Chebotarev", "N. G.");
    let second = match catalog.register_person(again.clone(), vec![], None, false) {
        Err(ArchiveError::DuplicateSuspected { candidates }) => {
            println!("possible duplicate of {candidates:?}, registering anyway");
            catalog.register_person(again, vec![], None, true)?
        }
        other => other?,
    };
    catalog.add_external_publication(&second.person_id, r"\RBibitem{c}\paper Density theorem\yr 1926")?;

    let merged = catalog.merge_persons(&first.person_id, &second.person_id)?;
    println!(
        "merged {} into {}; variants {:?}",
        second.person_id,
        merged.person_id,
        merged.name_variants.iter().map(|n| format!("{} {}", n.given, n.family)).collect::<Vec<_>>()
    );
    println!("{} still resolves to {}", second.person_id, catalog.resolve_person_id(&second.person_id)?);
    for entry in catalog.person_publications(&first.person_id)? {
        println!("  {:?} {}", entry.year(), entry.title());
    }

    let busiest = catalog
        .persons()
        .max_by_key(|p| catalog.person_publications(&p.person_id).map(|l| l.len()).unwrap_or(0))
        .unwrap();
    println!(
        "\nmost prolific: {} {} with {} publication(s)",
        busiest.canonical_name.given,
        busiest.canonical_name.family,
        catalog.person_publications(&busiest.person_id)?.len()
    );
    Ok(())
}
