//! SC assignment of publications and professors, and cohort eligibility.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::AnalysisConfig;
use crate::error::{Error, Result};
use crate::ingest::{
    Country, DatasetBundle, Discipline, JournalRecord, ProfessorId, PublicationRecord, ScCode,
    ScMap, Year,
};

/// Journal entries keyed by id, then year.
#[derive(Debug, Clone)]
pub struct JournalIndex<'a> {
    by_id: HashMap<&'a str, BTreeMap<Year, &'a JournalRecord>>,
}

impl<'a> JournalIndex<'a> {
    pub fn new(journals: &'a [JournalRecord]) -> Self {
        let mut by_id: HashMap<&str, BTreeMap<Year, &JournalRecord>> = HashMap::new();
        for j in journals {
            by_id
                .entry(j.journal_id.as_str())
                .or_default()
                .insert(j.year, j);
        }
        Self { by_id }
    }

    /// Entry for `(journal, year)`, or the nearest year of the same journal
    /// (earlier year on ties). The second value is true for a fallback.
    pub fn lookup(&self, journal: &str, year: Year) -> Option<(&'a JournalRecord, bool)> {
        let years = self.by_id.get(journal)?;
        if let Some(j) = years.get(&year) {
            return Some((j, false));
        }
        let before = years.range(..year).next_back();
        let after = years.range(year..).next();
        let pick = match (before, after) {
            (Some(b), Some(a)) => {
                if year - b.0 <= a.0 - year {
                    b.1
                } else {
                    a.1
                }
            }
            (Some(b), None) => b.1,
            (None, Some(a)) => a.1,
            (None, None) => return None,
        };
        Some((pick, true))
    }
}

/// Subject categories of one publication.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicationScs {
    /// Sorted, de-duplicated.
    pub scs: Vec<ScCode>,
    pub impact_factor: Option<f64>,
    /// Journal year used when the publication year had no entry.
    pub fallback_year: Option<Year>,
}

/// SCs of the hosting journal, sorted.
pub fn assign_publication_scs(
    publication: &PublicationRecord,
    journals: &JournalIndex<'_>,
) -> Result<PublicationScs> {
    let (journal, fallback) = journals
        .lookup(publication.journal_id.as_str(), publication.year)
        .ok_or_else(|| Error::MissingJournal {
            pub_id: publication.pub_id.to_string(),
            journal_id: publication.journal_id.to_string(),
        })?;
    let mut scs = journal.subject_categories.clone();
    scs.sort();
    scs.dedup();
    Ok(PublicationScs {
        scs,
        impact_factor: journal.impact_factor,
        fallback_year: fallback.then_some(journal.year),
    })
}

/// Most recurrent SC of a portfolio given as `(scs, citations)` per
/// publication. Each publication counts once for each of its SCs. Ties go
/// to the SC with more citations, then to the smaller code.
pub fn classify_professor<'s, I>(portfolio: I) -> Option<ScCode>
where
    I: IntoIterator<Item = (&'s [ScCode], u64)>,
{
    let mut tally: BTreeMap<&ScCode, (usize, u64)> = BTreeMap::new();
    for (scs, citations) in portfolio {
        for sc in scs {
            let entry = tally.entry(sc).or_default();
            entry.0 += 1;
            entry.1 += citations;
        }
    }
    // BTreeMap iterates in code order; keep the first maximum.
    let mut best: Option<(&ScCode, (usize, u64))> = None;
    for (sc, score) in tally {
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((sc, score));
        }
    }
    best.map(|(sc, _)| sc.clone())
}

/// Publication with its resolved journal metadata.
#[derive(Debug, Clone)]
pub struct ResolvedPub<'a> {
    pub record: &'a PublicationRecord,
    pub scs: PublicationScs,
}

/// Indexed view of a bundle: resolved publications and each professor's
/// portfolio.
#[derive(Debug, Clone)]
pub struct Corpus<'a> {
    pub bundle: &'a DatasetBundle,
    pub pubs: Vec<ResolvedPub<'a>>,
    /// Per professor (aligned with `bundle.professors`): (publication index,
    /// byline position), in publication order.
    pub portfolios: Vec<Vec<(usize, u32)>>,
}

impl<'a> Corpus<'a> {
    pub fn build(bundle: &'a DatasetBundle) -> Result<Self> {
        let journals = JournalIndex::new(&bundle.journals);
        let pubs = bundle
            .publications
            .par_iter()
            .map(|p| {
                assign_publication_scs(p, &journals).map(|scs| ResolvedPub { record: p, scs })
            })
            .collect::<Result<Vec<_>>>()?;
        let pub_index: HashMap<&str, usize> = bundle
            .publications
            .iter()
            .enumerate()
            .map(|(i, p)| (p.pub_id.as_str(), i))
            .collect();
        let prof_index: HashMap<&str, usize> = bundle
            .professors
            .iter()
            .enumerate()
            .map(|(i, p)| (p.professor_id.as_str(), i))
            .collect();
        let mut portfolios = vec![Vec::new(); bundle.professors.len()];
        for a in &bundle.authorships {
            let (Some(&pi), Some(&qi)) = (
                pub_index.get(a.pub_id.as_str()),
                prof_index.get(a.professor_id.as_str()),
            ) else {
                continue;
            };
            portfolios[qi].push((pi, a.position));
        }
        for p in &mut portfolios {
            p.sort_unstable();
        }
        Ok(Self {
            bundle,
            pubs,
            portfolios,
        })
    }

    /// Assigned SC of professor `idx`, `None` without publications.
    pub fn classify(&self, idx: usize) -> Option<ScCode> {
        classify_professor(self.portfolios[idx].iter().map(|&(pi, _)| {
            let p = &self.pubs[pi];
            (p.scs.scs.as_slice(), p.record.citations)
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    None,
    TooFewYears,
    NoPublications,
    SmallSc,
    ExcludedField,
}

impl ExclusionReason {
    pub fn as_str(self) -> &'static str {
        match self {
            ExclusionReason::None => "none",
            ExclusionReason::TooFewYears => "too_few_years",
            ExclusionReason::NoPublications => "no_publications",
            ExclusionReason::SmallSc => "small_sc",
            ExclusionReason::ExcludedField => "excluded_field",
        }
    }
}

/// Input to the eligibility filters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub professor_id: ProfessorId,
    pub country: Country,
    pub years_on_staff: u32,
    pub publication_count: usize,
    pub assigned_sc: Option<ScCode>,
    pub discipline: Option<Discipline>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohortAssignment {
    pub candidate: Candidate,
    pub eligible: bool,
    pub exclusion_reason: ExclusionReason,
}

/// Every input professor with its eligibility outcome, sorted by id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cohort {
    pub assignments: Vec<CohortAssignment>,
}

impl Cohort {
    pub fn eligible(&self) -> impl Iterator<Item = &CohortAssignment> {
        self.assignments.iter().filter(|a| a.eligible)
    }

    pub fn size(&self) -> usize {
        self.eligible().count()
    }

    pub fn eligible_candidates(&self) -> Vec<Candidate> {
        self.eligible().map(|a| a.candidate.clone()).collect()
    }

    pub fn exclusion_counts(&self) -> BTreeMap<ExclusionReason, usize> {
        let mut counts = BTreeMap::new();
        for a in &self.assignments {
            *counts.entry(a.exclusion_reason).or_default() += 1;
        }
        counts
    }
}

/// Candidates for every professor in the bundle, classified in parallel.
pub fn build_candidates(corpus: &Corpus<'_>, scmap: &ScMap) -> Vec<Candidate> {
    corpus
        .bundle
        .professors
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let assigned_sc = corpus.classify(i);
            let discipline = assigned_sc
                .as_ref()
                .and_then(|sc| scmap.discipline_of(sc).cloned());
            Candidate {
                professor_id: p.professor_id.clone(),
                country: p.country.clone(),
                years_on_staff: p.years_on_staff,
                publication_count: corpus.portfolios[i].len(),
                assigned_sc,
                discipline,
            }
        })
        .collect()
}

/// Applies, in order: minimum years on staff, at least one publication,
/// minimum SC size (counting professors still eligible after the first two
/// filters, across all countries), and the excluded-SC list.
pub fn apply_eligibility_filters(candidates: &[Candidate], config: &AnalysisConfig) -> Cohort {
    let first_pass = |c: &Candidate| {
        if c.years_on_staff < config.min_years_on_staff {
            ExclusionReason::TooFewYears
        } else if c.publication_count == 0 || c.assigned_sc.is_none() {
            ExclusionReason::NoPublications
        } else {
            ExclusionReason::None
        }
    };
    let mut sc_sizes: BTreeMap<&ScCode, usize> = BTreeMap::new();
    for c in candidates {
        if first_pass(c) == ExclusionReason::None {
            if let Some(sc) = &c.assigned_sc {
                *sc_sizes.entry(sc).or_default() += 1;
            }
        }
    }
    let mut assignments: Vec<CohortAssignment> = candidates
        .iter()
        .map(|c| {
            let mut reason = first_pass(c);
            if reason == ExclusionReason::None {
                let sc = c.assigned_sc.as_ref().expect("checked by first pass");
                if sc_sizes[sc] < config.min_sc_professors {
                    reason = ExclusionReason::SmallSc;
                } else if config.excluded_scs.contains(sc) {
                    reason = ExclusionReason::ExcludedField;
                }
            }
            CohortAssignment {
                candidate: c.clone(),
                eligible: reason == ExclusionReason::None,
                exclusion_reason: reason,
            }
        })
        .collect();
    assignments.sort_by(|a, b| a.candidate.professor_id.cmp(&b.candidate.professor_id));
    Cohort { assignments }
}

/// Eligible-professor counts per (SC, country).
pub fn sc_country_sizes(cohort: &Cohort) -> BTreeMap<(ScCode, Country), usize> {
    let mut sizes = BTreeMap::new();
    for a in cohort.eligible() {
        if let Some(sc) = &a.candidate.assigned_sc {
            *sizes
                .entry((sc.clone(), a.candidate.country.clone()))
                .or_default() += 1;
        }
    }
    sizes
}

/// Distinct SCs present among eligible professors.
pub fn cohort_scs(cohort: &Cohort) -> BTreeSet<ScCode> {
    cohort
        .eligible()
        .filter_map(|a| a.candidate.assigned_sc.clone())
        .collect()
}
