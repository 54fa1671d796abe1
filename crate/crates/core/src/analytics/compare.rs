use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

use super::report::CountryPair;
use super::{Indicator, ScoredProfessor};
use crate::ingest::{Country, Discipline, ScCode};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountryMeans<T> {
    pub n_professors: usize,
    pub means: [Option<T>; 5],
}

/// Per-SC, per-country mean normalized scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScCountryMeans<T> {
    pub entries: BTreeMap<ScCode, (Discipline, BTreeMap<Country, CountryMeans<T>>)>,
}

impl<T> Default for ScCountryMeans<T> {
    fn default() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }
}

impl<T: Real> ScCountryMeans<T> {
    pub fn insert(&mut self, sc: ScCode, discipline: Discipline, country: Country, means: CountryMeans<T>) {
        self.entries
            .entry(sc)
            .or_insert_with(|| (discipline, BTreeMap::new()))
            .1
            .insert(country, means);
    }

    /// Both countries' means, when both have professors in `sc`.
    fn pair(&self, sc: &ScCode, pair: &CountryPair) -> Option<(&CountryMeans<T>, &CountryMeans<T>)> {
        let (_, by_country) = self.entries.get(sc)?;
        Some((by_country.get(&pair.a)?, by_country.get(&pair.b)?))
    }
}

pub fn sc_country_means<T: Real>(scores: &[ScoredProfessor<T>]) -> ScCountryMeans<T> {
    let mut groups: BTreeMap<(&ScCode, &Country), (&Discipline, Vec<&ScoredProfessor<T>>)> = BTreeMap::new();
    for p in scores {
        groups
            .entry((&p.sc, &p.country))
            .or_insert_with(|| (&p.discipline, Vec::new()))
            .1
            .push(p);
    }
    let mut out = ScCountryMeans::default();
    for ((sc, country), (discipline, members)) in groups {
        let mut means = [None; 5];
        for ind in Indicator::ALL {
            means[ind.index()] = crate::scalar::mean(members.iter().filter_map(|p| p.value(ind)));
        }
        out.insert(
            sc.clone(),
            discipline.clone(),
            country.clone(),
            CountryMeans {
                n_professors: members.len(),
                means,
            },
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutperformRow {
    /// Discipline name, or `Overall`.
    pub discipline: String,
    /// SCs of the discipline where both countries have professors.
    pub n_scs: usize,
    /// SCs where country B's mean strictly exceeds country A's.
    pub count: usize,
}

impl OutperformRow {
    pub fn share(&self) -> f64 {
        if self.n_scs == 0 {
            0.0
        } else {
            self.count as f64 / self.n_scs as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutperformTable {
    pub indicator: Indicator,
    pub rows: Vec<OutperformRow>,
    pub overall: OutperformRow,
    /// SCs left out because one of the countries is absent.
    pub excluded_scs: Vec<ScCode>,
}

/// Number of SCs per discipline where `pair.b` outperforms `pair.a`.
pub fn outperform_counts<T: Real>(
    means: &ScCountryMeans<T>,
    pair: &CountryPair,
    indicator: Indicator,
) -> OutperformTable {
    let mut per_discipline: BTreeMap<&Discipline, (usize, usize)> = BTreeMap::new();
    let mut excluded_scs = Vec::new();
    for (sc, (discipline, _)) in &means.entries {
        let Some((a, b)) = means.pair(sc, pair) else {
            excluded_scs.push(sc.clone());
            continue;
        };
        let entry = per_discipline.entry(discipline).or_default();
        entry.0 += 1;
        let k = indicator.index();
        if let (Some(ma), Some(mb)) = (a.means[k], b.means[k]) {
            if mb > ma {
                entry.1 += 1;
            }
        }
    }
    if !excluded_scs.is_empty() {
        log::info!(
            "{indicator}: {} SC(s) lack one of {}/{} and are not compared",
            excluded_scs.len(),
            pair.a,
            pair.b
        );
    }
    let rows: Vec<OutperformRow> = per_discipline
        .into_iter()
        .map(|(d, (n_scs, count))| OutperformRow {
            discipline: d.to_string(),
            n_scs,
            count,
        })
        .collect();
    let overall = OutperformRow {
        discipline: "Overall".into(),
        n_scs: rows.iter().map(|r| r.n_scs).sum(),
        count: rows.iter().map(|r| r.count).sum(),
    };
    OutperformTable {
        indicator,
        rows,
        overall,
        excluded_scs,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow<T> {
    pub sc: ScCode,
    pub discipline: Discipline,
    pub n_a: usize,
    pub mean_a: T,
    pub n_b: usize,
    pub mean_b: T,
    /// `mean_a - mean_b`.
    pub delta: T,
}

/// SCs with the largest gaps each way. `favor_b` holds negative gaps, most
/// negative first; `favor_a` holds positive gaps, largest first. Ties are
/// ordered by SC code.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapTable<T> {
    pub indicator: Indicator,
    pub favor_b: Vec<GapRow<T>>,
    pub favor_a: Vec<GapRow<T>>,
}

pub fn gap_table<T: Real>(
    means: &ScCountryMeans<T>,
    pair: &CountryPair,
    indicator: Indicator,
    k: usize,
) -> GapTable<T> {
    let idx = indicator.index();
    let mut negative = Vec::new();
    let mut positive = Vec::new();
    for (sc, (discipline, _)) in &means.entries {
        let Some((a, b)) = means.pair(sc, pair) else { continue };
        let (Some(mean_a), Some(mean_b)) = (a.means[idx], b.means[idx]) else { continue };
        let row = GapRow {
            sc: sc.clone(),
            discipline: discipline.clone(),
            n_a: a.n_professors,
            mean_a,
            n_b: b.n_professors,
            mean_b,
            delta: mean_a - mean_b,
        };
        match row.delta.partial_cmp(&T::zero()) {
            Some(Ordering::Less) => negative.push(row),
            Some(Ordering::Greater) => positive.push(row),
            _ => {}
        }
    }
    let by_magnitude = |x: &GapRow<T>, y: &GapRow<T>| {
        y.delta
            .abs()
            .partial_cmp(&x.delta.abs())
            .unwrap_or(Ordering::Equal)
            .then_with(|| x.sc.cmp(&y.sc))
    };
    negative.sort_by(by_magnitude);
    positive.sort_by(by_magnitude);
    for (side, rows) in [(&pair.b, &negative), (&pair.a, &positive)] {
        if rows.len() < k {
            log::warn!(
                "{indicator} gap table: only {} SC(s) favor {side}, fewer than top-k {k}; returning all",
                rows.len()
            );
        }
    }
    negative.truncate(k);
    positive.truncate(k);
    GapTable {
        indicator,
        favor_b: negative,
        favor_a: positive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair() -> CountryPair {
        CountryPair::new("IT".into(), "NO".into())
    }

    fn means(rows: &[(&str, &str, f64, f64)]) -> ScCountryMeans<f64> {
        let mut m = ScCountryMeans::default();
        for &(sc, d, a, b) in rows {
            for (c, v, n) in [("IT", a, 46), ("NO", b, 6)] {
                m.insert(
                    sc.into(),
                    d.into(),
                    c.into(),
                    CountryMeans {
                        n_professors: n,
                        means: [Some(v); 5],
                    },
                );
            }
        }
        m
    }

    #[test]
    fn gap_subtraction_convention() {
        let m = means(&[
            ("MATHEMATICS, INTERDISCIPLINARY APPLICATIONS", "Mathematics", 0.64, 3.77),
            ("OPTICS", "Physics", 1.2, 0.9),
        ]);
        let g = gap_table(&m, &pair(), Indicator::O, 10);
        let top = &g.favor_b[0];
        assert_eq!(top.sc.as_str(), "MATHEMATICS, INTERDISCIPLINARY APPLICATIONS");
        assert!((top.delta - (-3.13)).abs() < 1e-12);
        assert_eq!(crate::numfmt::sig10(top.delta), "-3.13");
        assert_eq!((top.n_a, top.n_b), (46, 6));
        assert_eq!(g.favor_a.len(), 1);
    }

    #[test]
    fn k_overflow_returns_everything() {
        let m = means(&[("A", "D", 1.0, 2.0), ("B", "D", 2.0, 1.0), ("C", "D", 1.0, 1.5)]);
        let g = gap_table(&m, &pair(), Indicator::O, 10);
        assert_eq!(g.favor_a.len() + g.favor_b.len(), 3);
        assert_eq!(g.favor_b[0].sc.as_str(), "A");
    }

    #[test]
    fn outperform_strict_and_absent() {
        let mut m = means(&[
            ("A", "Physics", 1.0, 2.0),
            ("B", "Physics", 1.0, 1.0),
            ("C", "Physics", 2.0, 1.0),
            ("D", "Chemistry", 0.5, 0.7),
            ("E", "Chemistry", 0.9, 0.3),
        ]);
        m.insert(
            "F".into(),
            "Chemistry".into(),
            "IT".into(),
            CountryMeans {
                n_professors: 3,
                means: [Some(0.1); 5],
            },
        );
        let t = outperform_counts(&m, &pair(), Indicator::FSS);
        assert_eq!(t.overall.n_scs, 5);
        assert_eq!(t.overall.count, 2);
        assert!((t.overall.share() - 0.4).abs() < 1e-15);
        assert_eq!(t.excluded_scs, vec![ScCode::from("F")]);
        let chem = &t.rows[0];
        assert_eq!((chem.discipline.as_str(), chem.n_scs, chem.count), ("Chemistry", 2, 1));
    }

    proptest! {
        #[test]
        fn gaps_are_antisymmetric(vals in prop::collection::vec((0.0f64..3.0, 0.0f64..3.0), 1..30), k in 1usize..12) {
            let rows: Vec<(String, f64, f64)> = vals.iter().enumerate().map(|(i, &(a, b))| (format!("SC{i:02}"), a, b)).collect();
            let borrowed: Vec<(&str, &str, f64, f64)> = rows.iter().map(|(s, a, b)| (s.as_str(), "D", *a, *b)).collect();
            let m = means(&borrowed);
            let fwd = gap_table(&m, &pair(), Indicator::O, k);
            let rev = gap_table(&m, &CountryPair::new("NO".into(), "IT".into()), Indicator::O, k);
            prop_assert_eq!(fwd.favor_a.len(), rev.favor_b.len());
            prop_assert_eq!(fwd.favor_b.len(), rev.favor_a.len());
            for (x, y) in fwd.favor_a.iter().zip(&rev.favor_b).chain(fwd.favor_b.iter().zip(&rev.favor_a)) {
                prop_assert_eq!(&x.sc, &y.sc);
                prop_assert_eq!(x.delta, -y.delta);
            }
            let t = outperform_counts(&m, &pair(), Indicator::O);
            prop_assert!(t.rows.iter().all(|r| r.count <= r.n_scs));
            prop_assert_eq!(t.overall.count, t.rows.iter().map(|r| r.count).sum::<usize>());
        }
    }
}
