//! Cross-table integrity checks run on top of the per-file parsers.

use std::collections::{BTreeSet, HashSet};

use crate::cohort::{apply_eligibility_filters, build_candidates, Corpus, JournalIndex};
use crate::config::AnalysisConfig;
use crate::ingest::{DatasetBundle, DatasetPaths, Issue, LoadedDataset, ValidationReport};

/// Parse issues plus cross-table checks.
pub fn validate_dataset(loaded: &LoadedDataset, config: &AnalysisConfig) -> ValidationReport {
    let mut issues = loaded.issues.clone();
    issues.extend(cross_check(&loaded.bundle, config));
    ValidationReport::from_issues(issues)
}

/// Checks that span several tables: authorships against personnel, journal
/// SCs against the SC map, and cost coverage of every eligible professor.
pub fn cross_check(bundle: &DatasetBundle, config: &AnalysisConfig) -> Vec<Issue> {
    let mut issues = Vec::new();

    if bundle.publications.is_empty() {
        issues.push(Issue::fatal(
            DatasetPaths::PUBLICATIONS,
            None,
            "empty-corpus",
            "empty corpus: no valid publications",
        ));
    }

    let known: HashSet<&str> = bundle.professors.iter().map(|p| p.professor_id.as_str()).collect();
    let mut unknown = BTreeSet::new();
    for a in &bundle.authorships {
        if !known.contains(a.professor_id.as_str()) && unknown.insert(a.professor_id.as_str()) {
            issues.push(Issue::fatal(
                DatasetPaths::AUTHORSHIPS,
                None,
                "unknown-professor",
                format!("professor `{}` is not in personnel", a.professor_id),
            ));
        }
    }

    let mut missing_salary = BTreeSet::new();
    for p in &bundle.professors {
        for &rank in p.rank_by_year.values() {
            if bundle.costs.salary_of(&p.country, rank).is_none() {
                missing_salary.insert((p.country.clone(), rank));
            }
        }
    }
    for (country, rank) in missing_salary {
        issues.push(Issue::fatal(
            DatasetPaths::SALARIES,
            None,
            "missing-cost-entry",
            format!("missing cost entry: salary for ({country}, {rank})"),
        ));
    }

    let mut unknown_scs = BTreeSet::new();
    for j in &bundle.journals {
        for sc in &j.subject_categories {
            if bundle.scmap.get(sc).is_none() {
                unknown_scs.insert(sc.clone());
            }
        }
    }
    for sc in &unknown_scs {
        issues.push(Issue::fatal(
            DatasetPaths::SCMAP,
            None,
            "unknown-sc",
            format!("subject category `{sc}` is not in the SC map"),
        ));
    }

    let journals = JournalIndex::new(&bundle.journals);
    for p in &bundle.publications {
        if let Some((j, true)) = journals.lookup(p.journal_id.as_str(), p.year) {
            issues.push(Issue::warning(
                DatasetPaths::JOURNALS,
                None,
                "journal-year-fallback",
                format!(
                    "publication `{}`: no {} entry for journal `{}`; using {}",
                    p.pub_id, p.year, p.journal_id, j.year
                ),
            ));
        }
    }

    let Ok(corpus) = Corpus::build(bundle) else {
        // unresolved journals are already reported by the publication parser
        return issues;
    };
    for (prof, portfolio) in bundle.professors.iter().zip(&corpus.portfolios) {
        let years: BTreeSet<_> = portfolio.iter().map(|&(pi, _)| corpus.pubs[pi].record.year).collect();
        for year in years {
            if let Some((_, true)) = prof.rank_in(year) {
                issues.push(Issue::warning(
                    DatasetPaths::PERSONNEL,
                    None,
                    "cost-imputed",
                    format!(
                        "professor `{}`: no rank for {year}; cost imputed from nearest rank year",
                        prof.professor_id
                    ),
                ));
            }
        }
    }

    if unknown_scs.is_empty() {
        let cohort = apply_eligibility_filters(&build_candidates(&corpus, &bundle.scmap), config);
        let mut missing_capital = BTreeSet::new();
        for a in cohort.eligible() {
            if let Some(d) = &a.candidate.discipline {
                if bundle.costs.capital_of(&a.candidate.country, d).is_none() {
                    missing_capital.insert((a.candidate.country.clone(), d.clone()));
                }
            }
        }
        for (country, discipline) in missing_capital {
            issues.push(Issue::fatal(
                DatasetPaths::CAPITAL,
                None,
                "missing-cost-entry",
                format!("missing cost entry: capital for ({country}, {discipline})"),
            ));
        }
    }
    issues
}
