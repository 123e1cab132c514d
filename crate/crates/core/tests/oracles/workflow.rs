use std::collections::BTreeMap;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sciarchive::amsbib::PersonName;
use sciarchive::archive::{Catalog, Journal, Person};
use sciarchive::editorial::{
    replay, AssignmentStatus, DocumentRole, Editorial, EditorialError, FlowAction, ManuscriptMetadata, Recommendation,
    Role, Stage, Upload, User,
};
use sciarchive::ids::{ManuscriptId, UserId};

use super::Check;

const USERS: [(&str, &str); 10] = [
    ("au-one", "Olga Avtorova"),
    ("au-two", "Pavel Soavtorov"),
    ("ed-main", "Egor Redaktorov"),
    ("ed-second", "Nina Vtoraya"),
    ("adm-main", "Alla Upravlyaeva"),
    ("rv-quill", "Zinaida Quillfeather"),
    ("rv-marsh", "Yakov Marshwood"),
    ("rv-thorn", "Xenia Thornbury"),
    ("ed-other", "Foma Chuzhoi"),
    ("nobody", "Ivan Postoronnii"),
];
const REFEREES: [&str; 3] = ["rv-quill", "rv-marsh", "rv-thorn"];

/// Legal edges, written out independently of the library's table.
const EDGES: [(Stage, Stage); 17] = {
    use Stage::*;
    [
        (Submitted, Classification),
        (Submitted, Rejected),
        (Submitted, Withdrawn),
        (Classification, PeerReview),
        (Classification, Rejected),
        (PeerReview, AuthorsRevision),
        (PeerReview, ScientificEditing),
        (PeerReview, Rejected),
        (AuthorsRevision, PeerReview),
        (AuthorsRevision, ScientificEditing),
        (AuthorsRevision, Withdrawn),
        (ScientificEditing, Translation),
        (ScientificEditing, Forthcoming),
        (Translation, EnglishEditing),
        (EnglishEditing, Forthcoming),
        (Forthcoming, PublishedOnline),
        (PublishedOnline, PublishedPrint),
    ]
};

fn edge(from: Stage, to: Stage) -> bool {
    !terminal(from) && EDGES.contains(&(from, to))
}

fn terminal(s: Stage) -> bool {
    matches!(s, Stage::PublishedPrint | Stage::Rejected | Stage::Withdrawn)
}

struct World {
    catalog: Catalog,
    e: Editorial,
    /// Oracle's own bookkeeping of who wrote each manuscript.
    authors: BTreeMap<ManuscriptId, Vec<&'static str>>,
    now: DateTime<Utc>,
}

fn world() -> World {
    let mut catalog = Catalog::new();
    for (id, fam) in [("pa1", "Avtorova"), ("pa2", "Soavtorov")] {
        catalog.upsert_person(Person::new(id, PersonName::new(fam, "O."))).unwrap();
    }
    catalog.upsert_journal(Journal::new("wj", "Workflow Journal")).unwrap();
    catalog.upsert_journal(Journal::new("other", "Other Journal")).unwrap();
    let mut e = Editorial::new();
    for (id, name) in USERS {
        let person = match id {
            "au-one" => Some("pa1".into()),
            "au-two" => Some("pa2".into()),
            _ => None,
        };
        e.add_user(User {
            user_id: id.into(),
            name: name.into(),
            email: format!("{id}@mail.example"),
            person_id: person,
            roles: vec![],
            password_hash: None,
        })
        .unwrap();
    }
    let grants = [
        ("ed-main", "wj", Role::Editor),
        ("ed-second", "wj", Role::Editor),
        ("adm-main", "wj", Role::JournalAdministrator),
        ("ed-other", "other", Role::Editor),
        ("rv-quill", "wj", Role::Referee),
        ("rv-marsh", "wj", Role::Referee),
        ("rv-thorn", "wj", Role::Referee),
        ("au-two", "wj", Role::Referee),
    ];
    for (u, j, r) in grants {
        e.grant_role(&catalog, &u.into(), &j.into(), r).unwrap();
    }
    World {
        catalog,
        e,
        authors: BTreeMap::new(),
        now: Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap(),
    }
}

fn journal_role(u: &str) -> Option<Role> {
    match u {
        "ed-main" | "ed-second" => Some(Role::Editor),
        "adm-main" => Some(Role::JournalAdministrator),
        _ => None,
    }
}

fn fingerprint(e: &Editorial) -> (usize, usize, Vec<Stage>, usize) {
    let flows = e.manuscripts().map(|m| e.flow(&m.manuscript_id).unwrap().len()).sum();
    let stages = e.manuscripts().map(|m| m.current_stage).collect();
    (flows, e.notifications().len(), stages, e.manuscripts().count())
}

fn pick_user(rng: &mut ChaCha8Rng) -> &'static str {
    USERS.choose(rng).unwrap().0
}

fn note(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..4) {
        0 => String::new(),
        1 => "Please address the comments.".into(),
        // Editors sometimes mention referees by name.
        2 => format!("Per {} the proof is incomplete.", name_of(REFEREES.choose(rng).unwrap())),
        _ => format!("Forwarded from {}@mail.example", REFEREES.choose(rng).unwrap()),
    }
}

fn step(w: &mut World, rng: &mut ChaCha8Rng) -> Result<(), String> {
    w.now += Duration::minutes(rng.gen_range(-30..600));
    let before = fingerprint(&w.e);
    let ids: Vec<ManuscriptId> = w.e.manuscripts().map(|m| m.manuscript_id.clone()).collect();
    let open: Vec<&ManuscriptId> = ids
        .iter()
        .filter(|id| !terminal(w.e.manuscript(id).unwrap().current_stage))
        .collect();
    let target = match open.choose(rng) {
        Some(id) if rng.gen_bool(0.85) => Some((*id).clone()),
        _ => ids.choose(rng).cloned(),
    };
    let action = rng.gen_range(0..10);
    // Mostly a plausible actor, sometimes anyone.
    let actor = if rng.gen_bool(0.3) {
        pick_user(rng)
    } else {
        match action {
            0 | 9 => *["au-one", "au-two"].choose(rng).unwrap(),
            1..=6 => *["ed-main", "ed-second", "adm-main", "au-one"].choose(rng).unwrap(),
            _ => pick_user(rng),
        }
    };
    let (result, expected): (Result<(), EditorialError>, bool) = match (action, target) {
        (0, _) | (_, None) => {
            let meta = ManuscriptMetadata {
                title: format!("Manuscript {}", ids.len() + 1),
                abstract_text: String::new(),
                keywords: vec![],
                translated_title: None,
                translated_abstract: None,
                translated_keywords: None,
                authors: if actor == "au-one" && rng.gen_bool(0.5) { vec!["pa1".into(), "pa2".into()] } else { vec![] },
            };
            let pdf = rng.gen_bool(0.9).then(|| Upload::new(DocumentRole::SourcePdf, "m.pdf", b"%PDF".to_vec()));
            let tex = Some(Upload::new(DocumentRole::SourceLatex, "m.tex", b"\\begin".to_vec()));
            let expected = matches!(actor, "au-one" | "au-two") && pdf.is_some();
            let r = w.e.submit_manuscript(&w.catalog, &actor.into(), &"wj".into(), meta.clone(), tex, pdf, w.now);
            if let Ok(id) = &r {
                let mut who = vec![actor];
                if meta.authors.len() == 2 {
                    who.push("au-two");
                }
                w.authors.insert(id.clone(), who);
            }
            (r.map(|_| ()), expected)
        }
        (1..=4, Some(id)) => {
            let from = w.e.manuscript(&id).unwrap().current_stage;
            let legal: Vec<Stage> = Stage::ALL.into_iter().filter(|s| edge(from, *s)).collect();
            let to = match legal.choose(rng) {
                Some(s) if rng.gen_bool(0.8) => *s,
                _ => *Stage::ALL.choose(rng).unwrap(),
            };
            let is_author = w.authors[&id].contains(&actor);
            let role_ok = if to == Stage::Withdrawn {
                is_author || actor == "adm-main"
            } else {
                journal_role(actor).is_some()
            };
            let expected = edge(from, to) && role_ok;
            let r = w.e.transition(&id, to, &actor.into(), &note(rng), vec![], w.now);
            (r.map(|_| ()), expected)
        }
        (5..=6, Some(id)) => {
            let m = w.e.manuscript(&id).unwrap();
            let referee = *["rv-quill", "rv-marsh", "rv-thorn", "au-two", "nobody"].choose(rng).unwrap();
            let open = w.e.assignments_of(&id).any(|a| {
                a.referee.as_str() == referee && matches!(a.status, AssignmentStatus::Invited | AssignmentStatus::Accepted)
            });
            let expected = !terminal(m.current_stage)
                && journal_role(actor).is_some()
                && matches!(m.current_stage, Stage::Classification | Stage::PeerReview)
                && !w.authors[&id].contains(&referee)
                && referee != "nobody"
                && !open;
            let r = w.e.assign_referee(&id, &referee.into(), &actor.into(), w.now);
            (r.map(|_| ()), expected)
        }
        (7, Some(id)) => {
            let Some(a) = w.e.assignments_of(&id).collect::<Vec<_>>().choose(rng).map(|a| (*a).clone()) else {
                return Ok(());
            };
            let who = if rng.gen_bool(0.7) { a.referee.as_str() } else { actor };
            let expected = !terminal(w.e.manuscript(&id).unwrap().current_stage)
                && who == a.referee.as_str()
                && a.status == AssignmentStatus::Invited;
            let r = w.e.respond_to_assignment(&a.assignment_id, &who.into(), rng.gen_bool(0.8), w.now);
            (r.map(|_| ()), expected)
        }
        (8, Some(id)) => {
            let Some(a) = w.e.assignments_of(&id).collect::<Vec<_>>().choose(rng).map(|a| (*a).clone()) else {
                return Ok(());
            };
            let who = if rng.gen_bool(0.7) { a.referee.as_str() } else { actor };
            let expected = !terminal(w.e.manuscript(&id).unwrap().current_stage)
                && who == a.referee.as_str()
                && a.status == AssignmentStatus::Accepted;
            let body = format!("Report by {} ({who})", name_of(who));
            let doc = Upload::new(DocumentRole::Review, format!("{who}-report.pdf"), body.into_bytes());
            let rec = *[Recommendation::Accept, Recommendation::Minor, Recommendation::Major, Recommendation::Reject]
                .choose(rng)
                .unwrap();
            let r = w.e.submit_review(&a.assignment_id, &who.into(), doc, rec, w.now);
            (r.map(|_| ()), expected)
        }
        (_, Some(id)) => {
            let stage = w.e.manuscript(&id).unwrap().current_stage;
            let expected = stage == Stage::AuthorsRevision && w.authors[&id].contains(&actor);
            let docs = vec![Upload::new(DocumentRole::Revision, "v2.tex", format!("rev {}", w.now).into_bytes())];
            let r = w.e.upload_revision(&id, &actor.into(), "revised", docs, w.now);
            (r.map(|_| ()), expected)
        }
    };
    match (&result, expected) {
        (Ok(()), true) => Ok(()),
        (Err(_), false) if fingerprint(&w.e) == before => Ok(()),
        (Err(e), false) => Err(format!("failed call changed state: {e}")),
        (Ok(()), false) => Err(format!("permitted an action the role matrix forbids (actor {actor})")),
        (Err(e), true) => Err(format!("rejected a permitted action by {actor}: {e}")),
    }
}

fn name_of(id: &str) -> &'static str {
    USERS.iter().find(|u| u.0 == id).unwrap().1
}

/// Editors hear about submissions, revisions and withdrawals; everything
/// else goes to one person.
fn recipients(action: FlowAction, role: Role) -> usize {
    const EDITORS: usize = 2;
    match action {
        FlowAction::Submission | FlowAction::RevisionUploaded => EDITORS,
        FlowAction::Transition if role == Role::Author => EDITORS,
        _ => 1,
    }
}

fn verify(w: &World) -> Result<(), String> {
    let mut expected_notifications = 0;
    for m in w.e.manuscripts() {
        let flow = w.e.flow(&m.manuscript_id).unwrap();
        // Chain integrity and replay.
        if flow.first().map(|r| r.action) != Some(FlowAction::Submission) {
            return Err(format!("{} does not start with its submission", m.manuscript_id));
        }
        for pair in flow.windows(2) {
            if pair[1].from_stage != pair[0].to_stage || pair[1].timestamp <= pair[0].timestamp {
                return Err(format!("{} chain broken at record {}", m.manuscript_id, pair[1].record_id));
            }
        }
        if replay(flow) != Some(m.current_stage) {
            return Err(format!("{} replay disagrees with current stage", m.manuscript_id));
        }
        // Terminality.
        if let Some(k) = flow.iter().position(|r| terminal(r.to_stage)) {
            if k + 1 != flow.len() {
                return Err(format!("{} has records after a terminal stage", m.manuscript_id));
            }
        }
        // Actors hold their claimed roles.
        for r in flow {
            let u = r.actor.user_id.as_str();
            let ok = match r.actor.role {
                Role::Author => w.authors[&m.manuscript_id].contains(&u),
                Role::Editor => journal_role(u) == Some(Role::Editor),
                Role::JournalAdministrator => u == "adm-main",
                Role::Referee => REFEREES.contains(&u) || u == "au-two",
            };
            if !ok {
                return Err(format!("record {} claims {:?} for {u}", r.record_id, r.actor.role));
            }
            expected_notifications += recipients(r.action, r.actor.role);
        }
        // Access soundness and redaction.
        for (u, _) in USERS {
            let referee_here = w
                .e
                .assignments_of(&m.manuscript_id)
                .any(|a| a.referee.as_str() == u && a.status != AssignmentStatus::Declined);
            let may = journal_role(u).is_some() || w.authors[&m.manuscript_id].contains(&u) || referee_here;
            let view = w.e.view_flow(&m.manuscript_id, &u.into());
            if view.is_ok() != may {
                return Err(format!("{u} view of {} is {:?}, expected access {may}", m.manuscript_id, view.err()));
            }
            if view.is_ok() && w.authors[&m.manuscript_id].contains(&u) {
                let text = serde_json::to_string(&view.unwrap()).unwrap();
                for a in w.e.assignments_of(&m.manuscript_id) {
                    let id = a.referee.as_str();
                    for needle in [id.to_string(), name_of(id).to_string(), format!("{id}@mail.example")] {
                        if text.contains(&needle) {
                            return Err(format!("author view of {} leaks {needle}", m.manuscript_id));
                        }
                    }
                }
                if text.contains("\"recommendation\"") {
                    return Err(format!("author view of {} shows a recommendation", m.manuscript_id));
                }
            }
        }
    }
    if expected_notifications != w.e.notifications().len() {
        return Err(format!(
            "{} notifications, notification table gives {expected_notifications}",
            w.e.notifications().len()
        ));
    }
    let ids: Vec<UserId> = USERS.iter().map(|u| u.0.into()).collect();
    if w.e.notifications().iter().any(|n| n.delivered || !ids.contains(&n.recipient)) {
        return Err("notification marked delivered or sent to a stranger".into());
    }
    Ok(())
}

/// Runs `sequences` random action sequences of `steps` actions each.
pub fn check(sequences: u64, steps: usize) -> Check {
    let mut records = 0;
    let mut terminal_seen = 0;
    for seed in 0..sequences {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = world();
        for k in 0..steps {
            step(&mut w, &mut rng).map_err(|e| format!("sequence {seed}, step {k}: {e}"))?;
        }
        verify(&w).map_err(|e| format!("sequence {seed}: {e}"))?;
        records += w.e.manuscripts().map(|m| w.e.flow(&m.manuscript_id).unwrap().len()).sum::<usize>();
        terminal_seen += w.e.manuscripts().filter(|m| terminal(m.current_stage)).count();
    }
    Ok(format!("{sequences} sequences, {records} flow records, {terminal_seen} manuscripts reached a terminal stage"))
}
