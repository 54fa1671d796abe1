use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::compare::{gap_table, outperform_counts, sc_country_means, GapTable, OutperformTable};
use super::normalize::{aggregate, top_decile, GroupMean, Level, NormalizedScores};
use super::{Indicator, ScoredProfessor};
use crate::config::ReportConfig;
use crate::error::{Error, Result};
use crate::ingest::Country;
use crate::scalar::Real;

/// Ordered country pair. Gaps are `a - b`; outperform counts are `b` over `a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountryPair {
    pub a: Country,
    pub b: Country,
}

impl CountryPair {
    pub fn new(a: Country, b: Country) -> Self {
        Self { a, b }
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.b.clone(), self.a.clone())
    }
}

impl fmt::Display for CountryPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.a, self.b)
    }
}

/// Indicators that get a gap table.
pub const GAP_INDICATORS: [Indicator; 4] = [Indicator::O, Indicator::FO, Indicator::AC, Indicator::AIF];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportBundle<T> {
    pub pair: CountryPair,
    pub top_k: usize,
    pub decile: f64,
    /// Country means over the whole cohort.
    pub overall: Vec<GroupMean<T>>,
    /// Country means over the top-decile professors.
    pub top_decile: Vec<GroupMean<T>>,
    /// Per-discipline country means, followed by the overall rows.
    pub discipline_table: Vec<GroupMean<T>>,
    pub outperform: Vec<OutperformTable>,
    pub gaps: Vec<GapTable<T>>,
}

fn resolve_pair<T>(scores: &[ScoredProfessor<T>], requested: Option<&(Country, Country)>) -> Result<CountryPair> {
    let present: BTreeSet<&Country> = scores.iter().map(|p| &p.country).collect();
    match requested {
        Some((a, b)) => {
            for c in [a, b] {
                if !present.contains(c) {
                    return Err(Error::config("countries", format!("country `{c}` has no eligible professors")));
                }
            }
            Ok(CountryPair::new(a.clone(), b.clone()))
        }
        None => {
            let mut it = present.into_iter();
            match (it.next(), it.next()) {
                (Some(a), Some(b)) => Ok(CountryPair::new(a.clone(), b.clone())),
                _ => Err(Error::config(
                    "countries",
                    "the cohort needs professors from at least two countries",
                )),
            }
        }
    }
}

/// Builds every comparison table from normalized scores.
pub fn build_report<T: Real>(normalized: &NormalizedScores<T>, config: &ReportConfig) -> Result<ReportBundle<T>> {
    config.validate()?;
    let scores = &normalized.professors;
    let pair = resolve_pair(scores, config.countries.as_ref())?;
    let in_pair: Vec<ScoredProfessor<T>> = scores
        .iter()
        .filter(|p| p.country == pair.a || p.country == pair.b)
        .cloned()
        .collect();

    let overall = aggregate(&in_pair, Level::Overall, None);

    let selected = top_decile(scores, config.decile);
    let top: Vec<ScoredProfessor<T>> = in_pair
        .iter()
        .filter(|p| selected.contains(&p.professor_id))
        .cloned()
        .collect();
    let top_decile = aggregate(&top, Level::Overall, None);

    let mut discipline_table = aggregate(&in_pair, Level::Discipline, None);
    discipline_table.extend(overall.iter().cloned());

    let means = sc_country_means(&in_pair);
    let outperform = Indicator::ALL
        .into_iter()
        .map(|ind| outperform_counts(&means, &pair, ind))
        .collect();
    let gaps = GAP_INDICATORS
        .into_iter()
        .map(|ind| gap_table(&means, &pair, ind, config.top_k))
        .collect();

    Ok(ReportBundle {
        pair,
        top_k: config.top_k,
        decile: config.decile,
        overall,
        top_decile,
        discipline_table,
        outperform,
        gaps,
    })
}
