use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{Affiliation, ArchiveError, Catalog, Person, Upsert};
use crate::amsbib::{parse_str, PersonName};
use crate::ids::{ArticleId, OrganizationId, PersonId};
use crate::text::fold;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Registration {
    pub person_id: PersonId,
}

/// One line of a personal publication list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PublicationEntry {
    Article {
        article_id: ArticleId,
        year: Option<i32>,
        title: String,
    },
    External {
        source: String,
        year: Option<i32>,
        title: String,
    },
}

impl PublicationEntry {
    pub fn year(&self) -> Option<i32> {
        match self {
            Self::Article { year, .. } | Self::External { year, .. } => *year,
        }
    }

    pub fn title(&self) -> &str {
        match self {
            Self::Article { title, .. } | Self::External { title, .. } => title,
        }
    }

    fn tiebreak(&self) -> &str {
        match self {
            Self::Article { article_id, .. } => article_id.as_str(),
            Self::External { source, .. } => source,
        }
    }
}

fn name_key(name: &PersonName) -> (String, String) {
    (fold(name.family.trim()), fold(&name.initials()))
}

fn push_unique<T: PartialEq + Clone>(into: &mut Vec<T>, items: &[T]) {
    for item in items {
        if !into.contains(item) {
            into.push(item.clone());
        }
    }
}

impl Catalog {
    fn validate_person(&self, person: &Person) -> Result<(), ArchiveError> {
        if person.canonical_name.family.trim().is_empty() {
            return Err(ArchiveError::Invalid("family name is empty".into()));
        }
        if let Some(target) = self.person_aliases.get(&person.person_id) {
            return Err(ArchiveError::Invalid(format!(
                "person `{}` was merged into `{target}`",
                person.person_id
            )));
        }
        for aff in &person.affiliations {
            self.organization(&aff.organization_id)?;
            if let (Some(f), Some(t)) = (aff.from_year, aff.to_year) {
                if f > t {
                    return Err(ArchiveError::Invalid("affiliation ends before it starts".into()));
                }
            }
        }
        for source in &person.external_publications {
            parse_str(source)
                .map_err(|e| ArchiveError::Invalid(format!("external publication: {e}")))?;
        }
        Ok(())
    }

    pub fn upsert_person(&mut self, person: Person) -> Result<Upsert, ArchiveError> {
        self.validate_person(&person)?;
        if let Some(old) = self.persons.get(&person.person_id) {
            for gone in old.merged_ids.iter().filter(|m| !person.merged_ids.contains(m)) {
                self.person_aliases.remove(gone);
            }
        }
        for m in &person.merged_ids {
            self.person_aliases.insert(m.clone(), person.person_id.clone());
        }
        Ok(super::upsert(&mut self.persons, person.person_id.clone(), person))
    }

    /// Registered persons with the same family name and initials.
    pub fn duplicate_candidates(&self, name: &PersonName) -> Vec<PersonId> {
        let key = name_key(name);
        self.persons
            .values()
            .filter(|p| name_key(&p.canonical_name) == key)
            .map(|p| p.person_id.clone())
            .collect()
    }

    fn next_person_id(&self) -> PersonId {
        let mut n = self.persons.len() + self.person_aliases.len() + 1;
        loop {
            let id = PersonId(format!("p{n}"));
            if !self.persons.contains_key(&id) && !self.person_aliases.contains_key(&id) {
                return id;
            }
            n += 1;
        }
    }

    /// Creates a person unless one with the same family name and initials
    /// exists; `force` creates it anyway.
    pub fn register_person(
        &mut self,
        name: PersonName,
        variants: Vec<PersonName>,
        affiliation: Option<OrganizationId>,
        force: bool,
    ) -> Result<Registration, ArchiveError> {
        if !force {
            let candidates = self.duplicate_candidates(&name);
            if !candidates.is_empty() {
                return Err(ArchiveError::DuplicateSuspected { candidates });
            }
        }
        let person_id = self.next_person_id();
        let person = Person {
            person_id: person_id.clone(),
            canonical_name: name,
            name_variants: variants,
            affiliations: affiliation
                .into_iter()
                .map(|organization_id| Affiliation {
                    organization_id,
                    from_year: None,
                    to_year: None,
                })
                .collect(),
            keywords: vec![],
            interests: vec![],
            external_profile_urls: vec![],
            external_publications: vec![],
            merged_ids: vec![],
        };
        self.upsert_person(person)?;
        Ok(Registration { person_id })
    }

    /// Folds `absorb` into `keep`. Authorships, variants, affiliations and
    /// board seats move over; `absorb` stays resolvable as an alias.
    pub fn merge_persons(&mut self, keep: &PersonId, absorb: &PersonId) -> Result<Person, ArchiveError> {
        if keep == absorb {
            return Err(ArchiveError::SelfMerge);
        }
        let keep = self.resolve_person_id(keep)?;
        let absorb = self.resolve_person_id(absorb)?;
        if keep == absorb {
            return Ok(self.persons[&keep].clone());
        }
        let gone = self.persons.remove(&absorb).expect("resolved id exists");
        let survivor = self.persons.get_mut(&keep).expect("resolved id exists");

        let mut names = vec![gone.canonical_name.clone()];
        names.extend(gone.name_variants.iter().cloned());
        names.retain(|n| *n != survivor.canonical_name);
        push_unique(&mut survivor.name_variants, &names);
        push_unique(&mut survivor.affiliations, &gone.affiliations);
        push_unique(&mut survivor.keywords, &gone.keywords);
        push_unique(&mut survivor.interests, &gone.interests);
        push_unique(&mut survivor.external_profile_urls, &gone.external_profile_urls);
        push_unique(&mut survivor.external_publications, &gone.external_publications);
        let mut merged = vec![absorb.clone()];
        merged.extend(gone.merged_ids.iter().cloned());
        push_unique(&mut survivor.merged_ids, &merged);
        survivor.merged_ids.sort();
        let result = survivor.clone();

        for id in merged {
            self.person_aliases.insert(id, keep.clone());
        }
        let swap = |list: &mut Vec<PersonId>| {
            if list.contains(&absorb) {
                let mut out = Vec::with_capacity(list.len());
                for p in list.drain(..) {
                    let p = if p == absorb { keep.clone() } else { p };
                    if !out.contains(&p) {
                        out.push(p);
                    }
                }
                *list = out;
            }
        };
        for article in self.articles.values_mut() {
            swap(&mut article.authors);
        }
        for journal in self.journals.values_mut() {
            swap(&mut journal.editorial_board);
        }
        Ok(result)
    }

    /// Attaches a publication from outside the archive, given as AMSBIB.
    pub fn add_external_publication(&mut self, person: &PersonId, source: &str) -> Result<Person, ArchiveError> {
        parse_str(source).map_err(|e| ArchiveError::Invalid(format!("external publication: {e}")))?;
        let id = self.resolve_person_id(person)?;
        let p = self.persons.get_mut(&id).expect("resolved id exists");
        if !p.external_publications.iter().any(|s| s == source) {
            p.external_publications.push(source.to_string());
        }
        Ok(p.clone())
    }

    /// In-archive authorships plus external entries, newest first, then by title.
    pub fn person_publications(&self, person: &PersonId) -> Result<Vec<PublicationEntry>, ArchiveError> {
        let id = self.resolve_person_id(person)?;
        let mut out: Vec<PublicationEntry> = self
            .articles
            .values()
            .filter(|a| a.authors.contains(&id))
            .map(|a| PublicationEntry::Article {
                article_id: a.article_id.clone(),
                year: Some(a.year),
                title: a.title.clone(),
            })
            .collect();
        for source in &self.persons[&id].external_publications {
            let parsed = parse_str(source).map(|o| o.reference).ok();
            out.push(PublicationEntry::External {
                source: source.clone(),
                year: parsed.as_ref().and_then(|r| r.year),
                title: parsed.and_then(|r| r.title).unwrap_or_else(|| source.clone()),
            });
        }
        out.sort_by(publication_order);
        Ok(out)
    }
}

pub(crate) fn publication_order(a: &PublicationEntry, b: &PublicationEntry) -> Ordering {
    let year = match (a.year(), b.year()) {
        (Some(x), Some(y)) => y.cmp(&x),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    };
    year.then_with(|| a.title().cmp(b.title()))
        .then_with(|| a.tiebreak().cmp(b.tiebreak()))
}
