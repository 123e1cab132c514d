//! The comparison fixture plus an editorial office with a few manuscripts
//! at different stages. Used by examples and by the service tests.

use chrono::{DateTime, TimeZone, Utc};

use super::table1_store;
use crate::archive::Catalog;
use crate::citegraph::ReferenceDb;
use crate::editorial::{DocumentRole, Editorial, ManuscriptMetadata, Recommendation, Role, Stage, Upload, User};
use crate::ids::{JournalId, UserId};

pub const DEMO_JOURNAL: &str = "mat-sb";

fn at(day: u32, hour: u32) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 3, day, hour, 0, 0).single().expect("valid time")
}

fn user(id: &str, name: &str, person: Option<&str>) -> User {
    User {
        user_id: id.into(),
        name: name.into(),
        email: format!("{id}@mathnet.example"),
        person_id: person.map(Into::into),
        roles: vec![],
        password_hash: None,
    }
}

fn meta(title: &str, keywords: &[&str]) -> ManuscriptMetadata {
    ManuscriptMetadata {
        title: title.into(),
        abstract_text: format!("We study {}.", title.to_lowercase()),
        keywords: keywords.iter().map(|k| k.to_string()).collect(),
        translated_title: None,
        translated_abstract: None,
        translated_keywords: None,
        authors: vec![],
    }
}

fn sources(tag: &str) -> (Option<Upload>, Option<Upload>) {
    (
        Some(Upload::new(DocumentRole::SourceLatex, format!("{tag}.tex"), format!("\\title{{{tag}}}").into_bytes())),
        Some(Upload::new(DocumentRole::SourcePdf, format!("{tag}.pdf"), format!("%PDF-1.4 {tag}").into_bytes())),
    )
}

/// Users: `editor`, `admin`, `author`, `coauthor`, `referee1`, `referee2`.
pub fn demo_editorial(catalog: &Catalog) -> Editorial {
    let mut e = Editorial::new();
    for u in [
        user("editor", "Elena Editova", None),
        user("admin", "Anton Adminov", None),
        user("author", "Boris Arnold", Some("t1-p00")),
        user("coauthor", "Gleb Bogolyubov", Some("t1-p01")),
        user("referee1", "Roman Refereev", None),
        user("referee2", "Rita Recenzentova", None),
    ] {
        e.add_user(u).expect("distinct users");
    }
    let j: JournalId = DEMO_JOURNAL.into();
    let grant = |e: &mut Editorial, u: &str, role| e.grant_role(catalog, &u.into(), &j, role).expect("known journal");
    grant(&mut e, "editor", Role::Editor);
    grant(&mut e, "admin", Role::JournalAdministrator);
    grant(&mut e, "referee1", Role::Referee);
    grant(&mut e, "referee2", Role::Referee);
    grant(&mut e, "coauthor", Role::Referee);

    let editor: UserId = "editor".into();
    let author: UserId = "author".into();
    let submit = |e: &mut Editorial, title: &str, day| {
        let (tex, pdf) = sources(title);
        let mut m = meta(title, &["spectral theory"]);
        m.authors = vec!["t1-p00".into(), "t1-p01".into()];
        e.submit_manuscript(catalog, &author, &j, m, tex, pdf, at(day, 9))
            .expect("valid submission")
    };

    // Reviewed and sent back to the authors.
    let ms1 = submit(&mut e, "Spectral bounds on the torus", 1);
    e.transition(&ms1, Stage::Classification, &editor, "Operator theory", vec![], at(2, 10)).expect("legal");
    e.transition(&ms1, Stage::PeerReview, &editor, "", vec![], at(3, 10)).expect("legal");
    let a1 = e.assign_referee(&ms1, &"referee1".into(), &editor, at(3, 11)).expect("eligible");
    let a2 = e.assign_referee(&ms1, &"referee2".into(), &editor, at(3, 11)).expect("eligible");
    e.respond_to_assignment(&a1.assignment_id, &"referee1".into(), true, at(4, 9)).expect("invited");
    e.respond_to_assignment(&a2.assignment_id, &"referee2".into(), false, at(4, 12)).expect("invited");
    e.submit_review(
        &a1.assignment_id,
        &"referee1".into(),
        Upload::new(DocumentRole::Review, "report.pdf", b"The proof of Lemma 2 needs detail.".to_vec()),
        Recommendation::Minor,
        at(10, 9),
    )
    .expect("accepted assignment");
    e.transition(
        &ms1,
        Stage::AuthorsRevision,
        &editor,
        "Roman Refereev asks for a detailed proof of Lemma 2.",
        vec![],
        at(11, 9),
    )
    .expect("legal");

    // Just arrived.
    submit(&mut e, "Invariant flows with delay", 5);

    // Accepted and waiting for an issue.
    let ms3 = submit(&mut e, "Extremal graphs over finite fields", 2);
    for (k, s) in [Stage::Classification, Stage::PeerReview, Stage::ScientificEditing, Stage::Forthcoming]
        .into_iter()
        .enumerate()
    {
        e.transition(&ms3, s, &editor, "", vec![], at(12 + k as u32, 10)).expect("legal");
    }
    e
}

pub fn demo_state() -> (Catalog, ReferenceDb, Editorial) {
    let (catalog, refs) = table1_store();
    let editorial = demo_editorial(&catalog);
    (catalog, refs, editorial)
}
