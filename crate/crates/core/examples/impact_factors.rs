//! Prints the journal comparison report and a single impact factor in both
//! counting modes.

use sciarchive::fixtures::{table1_store, TABLE1, TABLE1_HORIZON, TABLE1_YEAR};
use sciarchive::ids::JournalId;
use sciarchive::metrics::{comparison_report, impact_factor, MetricsQuery, Mode, DASH};

fn main() {
    let (catalog, refs) = table1_store();
    let journals: Vec<JournalId> = TABLE1.iter().map(|j| j.journal_id.into()).collect();
    let table = comparison_report(&catalog, &refs, &journals, TABLE1_YEAR, TABLE1_HORIZON);
    println!("{}", table.to_text());

    for mode in [Mode::Integral, Mode::Restricted] {
        for horizon in [1, 2, 5] {
            let q = MetricsQuery {
                journal_id: "mat-sb".into(),
                year: TABLE1_YEAR,
                horizon,
                mode,
            };
            let r = impact_factor(&catalog, &refs, &q).expect("known journal");
            println!(
                "mat-sb {mode:>10} {horizon}y: {:>3} / {:>3} = {}",
                r.citations,
                r.citable_items,
                r.rounded.as_deref().unwrap_or(DASH)
            );
        }
    }
}
