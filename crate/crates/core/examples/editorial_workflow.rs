//! Takes a manuscript from submission to the forthcoming list and shows
//! how the flow looks to the author and to the editor.

use chrono::{TimeZone, Utc};
use sciarchive::editorial::{DocumentRole, Recommendation, Stage, Upload};
use sciarchive::fixtures::{demo_state, DEMO_JOURNAL};
use sciarchive::ids::UserId;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (catalog, _, mut e) = demo_state();
    let journal = DEMO_JOURNAL.into();
    let (editor, author, referee): (UserId, UserId, UserId) = ("editor".into(), "author".into(), "referee1".into());
    let at = |day, hour| Utc.with_ymd_and_hms(2024, 4, day, hour, 0, 0).unwrap();

    let mut meta = e.manuscript(&e.manuscripts().next().unwrap().manuscript_id)?.metadata.clone();
    meta.title = "Rigidity of nilpotent lattices".into();
    let tex = Upload::new(DocumentRole::SourceLatex, "paper.tex", b"\\title{Rigidity}".to_vec());
    let pdf = Upload::new(DocumentRole::SourcePdf, "paper.pdf", b"%PDF-1.4".to_vec());
    let ms = e.submit_manuscript(&catalog, &author, &journal, meta, Some(tex), Some(pdf), at(1, 9))?;
    println!("submitted {ms}");

    e.transition(&ms, Stage::Classification, &editor, "Group theory", vec![], at(2, 9))?;
    e.transition(&ms, Stage::PeerReview, &editor, "", vec![], at(2, 10))?;
    let a = e.assign_referee(&ms, &referee, &editor, at(2, 11))?;
    e.respond_to_assignment(&a.assignment_id, &referee, true, at(3, 9))?;
    let report = Upload::new(DocumentRole::Review, "review.pdf", b"Accept as is.".to_vec());
    e.submit_review(&a.assignment_id, &referee, report, Recommendation::Accept, at(9, 9))?;
    for (day, stage) in [(10, Stage::ScientificEditing), (12, Stage::Forthcoming)] {
        e.transition(&ms, stage, &editor, "", vec![], at(day, 9))?;
    }

    for viewer in [&author, &editor] {
        let view = e.view_flow(&ms, viewer)?;
        println!("\nas {viewer} ({:?}):", view.viewer_role);
        for r in &view.records {
            println!(
                "  {} {:?} {} -> {} by {} {}",
                r.timestamp.format("%m-%d %H:%M"),
                r.action,
                r.from_stage.as_str(),
                r.to_stage.as_str(),
                r.actor.name,
                r.recommendation.map(|x| format!("{x:?}")).unwrap_or_default()
            );
        }
    }

    println!("\nforthcoming in {DEMO_JOURNAL}:");
    for f in e.forthcoming_list(&journal) {
        println!("  {} accepted {}", f.title, f.accepted_at.format("%Y-%m-%d"));
    }
    let from = chrono::NaiveDate::from_ymd_opt(2024, 3, 1).unwrap();
    let to = chrono::NaiveDate::from_ymd_opt(2024, 4, 30).unwrap();
    println!("\n{}", e.editorial_report(&catalog, &journal, from, to)?.to_text());
    Ok(())
}
