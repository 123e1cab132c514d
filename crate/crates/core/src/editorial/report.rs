use std::collections::BTreeMap;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use super::{Editorial, EditorialError, FlowAction, Stage};
use crate::archive::Catalog;
use crate::ids::{JournalId, ManuscriptId, PersonId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForthcomingEntry {
    pub manuscript_id: ManuscriptId,
    pub title: String,
    pub authors: Vec<PersonId>,
    pub accepted_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageStats {
    /// Records that moved a manuscript into the stage.
    pub entered: u64,
    /// Stays in the stage that ended within the period.
    pub completed: u64,
    /// Mean length of the completed stays, 0 when there are none.
    pub mean_days: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditorialReport {
    pub journal_id: JournalId,
    pub from: NaiveDate,
    pub to: NaiveDate,
    pub submissions: u64,
    pub rejections: u64,
    pub withdrawals: u64,
    pub publications: u64,
    pub stages: BTreeMap<Stage, StageStats>,
}

impl EditorialReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["stage", "entered", "completed", "mean_days"]).expect("in-memory write");
        for (stage, s) in &self.stages {
            w.write_record([
                stage.to_string(),
                s.entered.to_string(),
                s.completed.to_string(),
                format!("{:.3}", s.mean_days),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {}..{}\nsubmissions {}\nrejections {}\nwithdrawals {}\npublications {}\n",
            self.journal_id, self.from, self.to, self.submissions, self.rejections, self.withdrawals, self.publications
        );
        for (stage, s) in &self.stages {
            out.push_str(&format!(
                "{:<18} entered {:>4}  completed {:>4}  mean_days {:.3}\n",
                stage.as_str(),
                s.entered,
                s.completed,
                s.mean_days
            ));
        }
        out
    }
}

impl Editorial {
    /// Manuscripts waiting at Forthcoming, in order of acceptance.
    pub fn forthcoming_list(&self, journal: &JournalId) -> Vec<ForthcomingEntry> {
        let mut out: Vec<ForthcomingEntry> = self
            .manuscripts
            .values()
            .filter(|m| m.journal_id == *journal && m.current_stage == Stage::Forthcoming)
            .map(|m| {
                let accepted_at = self.flow[&m.manuscript_id]
                    .iter()
                    .rev()
                    .find(|r| r.action == FlowAction::Transition && r.to_stage == Stage::Forthcoming)
                    .map(|r| r.timestamp)
                    .unwrap_or(m.created_at);
                ForthcomingEntry {
                    manuscript_id: m.manuscript_id.clone(),
                    title: m.metadata.title.clone(),
                    authors: m.metadata.authors.clone(),
                    accepted_at,
                }
            })
            .collect();
        out.sort_by(|a, b| (a.accepted_at, &a.manuscript_id).cmp(&(b.accepted_at, &b.manuscript_id)));
        out
    }

    /// Counts stage entries dated within `[from, to]` (UTC days) and the
    /// mean length of stage stays that ended within the period.
    pub fn editorial_report(
        &self,
        catalog: &Catalog,
        journal: &JournalId,
        from: NaiveDate,
        to: NaiveDate,
    ) -> Result<EditorialReport, EditorialError> {
        catalog
            .journal(journal)
            .map_err(|_| EditorialError::UnknownJournal(journal.clone()))?;
        if from > to {
            return Err(EditorialError::Invalid(format!("empty period {from}..{to}")));
        }
        let in_period = |t: DateTime<Utc>| (from..=to).contains(&t.date_naive());
        let mut stages: BTreeMap<Stage, StageStats> = Stage::ALL.into_iter().map(|s| (s, StageStats::default())).collect();
        let mut total_micros: BTreeMap<Stage, i64> = BTreeMap::new();

        for m in self.manuscripts.values().filter(|m| m.journal_id == *journal) {
            let mut entered_at: Option<DateTime<Utc>> = None;
            for r in &self.flow[&m.manuscript_id] {
                if !matches!(r.action, FlowAction::Submission | FlowAction::Transition) {
                    continue;
                }
                if let (FlowAction::Transition, Some(start)) = (r.action, entered_at) {
                    if in_period(r.timestamp) {
                        stages.get_mut(&r.from_stage).expect("all stages").completed += 1;
                        *total_micros.entry(r.from_stage).or_default() += (r.timestamp - start).num_microseconds().unwrap_or(i64::MAX);
                    }
                }
                if in_period(r.timestamp) {
                    stages.get_mut(&r.to_stage).expect("all stages").entered += 1;
                }
                entered_at = Some(r.timestamp);
            }
        }
        for (stage, micros) in total_micros {
            let s = stages.get_mut(&stage).expect("all stages");
            s.mean_days = micros as f64 / 86_400_000_000.0 / s.completed as f64;
        }
        let entered = |s: Stage| stages[&s].entered;
        Ok(EditorialReport {
            journal_id: journal.clone(),
            from,
            to,
            submissions: entered(Stage::Submitted),
            rejections: entered(Stage::Rejected),
            withdrawals: entered(Stage::Withdrawn),
            publications: entered(Stage::PublishedOnline),
            stages,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{files, meta, setup, submit, t};
    use super::*;

    fn day(d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2024, 3, d).unwrap()
    }

    #[test]
    fn no_activity() {
        let (c, e) = setup();
        let r = e.editorial_report(&c, &"j".into(), day(1), day(31)).unwrap();
        assert_eq!((r.submissions, r.rejections, r.publications), (0, 0, 0));
        assert!(r.stages.values().all(|s| *s == StageStats::default()));
        assert_eq!(r.to_csv().lines().count(), 13);
        assert!(e.forthcoming_list(&"j".into()).is_empty());
        assert!(e.editorial_report(&c, &"j".into(), day(2), day(1)).is_err());
    }

    #[test]
    fn counts_and_durations() {
        let (c, mut e) = setup();
        let a = submit(&c, &mut e);
        let b = submit(&c, &mut e);
        let (tex, pdf) = files();
        e.submit_manuscript(&c, &"author".into(), &"j".into(), meta("Third"), tex, pdf, t(5, 9))
            .unwrap();
        // a: Submitted for 1 day, Classification for 2.5 days.
        e.transition(&a, Stage::Classification, &"editor".into(), "", vec![], t(2, 9)).unwrap();
        e.transition(&a, Stage::Rejected, &"editor".into(), "", vec![], t(4, 21)).unwrap();
        // b: Submitted for 3 days.
        e.transition(&b, Stage::Classification, &"editor".into(), "", vec![], t(4, 9)).unwrap();
        let r = e.editorial_report(&c, &"j".into(), day(1), day(31)).unwrap();
        assert_eq!((r.submissions, r.rejections), (3, 1));
        assert_eq!(r.stages[&Stage::Submitted].completed, 2);
        assert!((r.stages[&Stage::Submitted].mean_days - 2.0).abs() < 1e-9);
        assert!((r.stages[&Stage::Classification].mean_days - 2.5).abs() < 1e-9);
        assert!(r.to_csv().contains("Classification,2,1,2.500\n"));

        let narrow = e.editorial_report(&c, &"j".into(), day(4), day(4)).unwrap();
        assert_eq!((narrow.submissions, narrow.rejections), (0, 1));
        assert_eq!(narrow.stages[&Stage::Submitted].completed, 1);
    }

    #[test]
    fn forthcoming_in_acceptance_order() {
        let (c, mut e) = setup();
        let ids = [submit(&c, &mut e), submit(&c, &mut e), submit(&c, &mut e)];
        let path = [Stage::Classification, Stage::PeerReview, Stage::ScientificEditing, Stage::Forthcoming];
        for (k, id) in ids.iter().enumerate().rev() {
            for (h, s) in path.iter().enumerate() {
                e.transition(id, *s, &"editor".into(), "", vec![], t(10 + k as u32, h as u32)).unwrap();
            }
        }
        e.transition(&ids[1], Stage::PublishedOnline, &"editor".into(), "", vec![], t(20, 1)).unwrap();
        let list = e.forthcoming_list(&"j".into());
        let order: Vec<&ManuscriptId> = list.iter().map(|x| &x.manuscript_id).collect();
        assert_eq!(order, [&ids[0], &ids[2]]);
    }
}
