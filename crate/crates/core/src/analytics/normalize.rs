use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{Indicator, ScoredProfessor};
use crate::ingest::{Country, ProfessorId, ScCode};
use crate::scalar::Real;

/// Scores divided by their SC's scaling factor: the mean of the nonzero
/// values of all professors in the SC, both countries pooled.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedScores<T> {
    pub professors: Vec<ScoredProfessor<T>>,
    /// `None` when every value of the SC is zero or undefined.
    pub factors: BTreeMap<(ScCode, Indicator), Option<T>>,
}

pub fn normalize_within_sc<T: Real>(raw: &[ScoredProfessor<T>]) -> NormalizedScores<T> {
    let mut by_sc: BTreeMap<&ScCode, Vec<usize>> = BTreeMap::new();
    for (i, p) in raw.iter().enumerate() {
        by_sc.entry(&p.sc).or_default().push(i);
    }
    let mut professors = raw.to_vec();
    let mut factors = BTreeMap::new();
    for (sc, members) in by_sc {
        for ind in Indicator::ALL {
            let k = ind.index();
            let factor = crate::scalar::mean(
                members
                    .iter()
                    .filter_map(|&i| raw[i].values[k])
                    .filter(|v| *v != T::zero()),
            );
            factors.insert((sc.clone(), ind), factor);
            for &i in &members {
                professors[i].values[k] = raw[i].values[k].map(|v| match factor {
                    Some(f) => v / f,
                    None => T::zero(),
                });
            }
        }
    }
    NormalizedScores {
        professors,
        factors,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Sc,
    Discipline,
    Overall,
}

/// Mean scores of one group of professors of one country.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupMean<T> {
    /// SC code, discipline name, or `Overall`.
    pub group: String,
    pub country: Country,
    pub n_professors: usize,
    pub means: [Option<T>; 5],
}

/// Per-group, per-country means, undefined values skipped. Groups are
/// ordered by name, then country. With `country` set, only that country's
/// groups are returned.
pub fn aggregate<T: Real>(
    scores: &[ScoredProfessor<T>],
    level: Level,
    country: Option<&Country>,
) -> Vec<GroupMean<T>> {
    let mut groups: BTreeMap<(String, &Country), Vec<&ScoredProfessor<T>>> = BTreeMap::new();
    for p in scores {
        if country.is_some_and(|c| c != &p.country) {
            continue;
        }
        let key = match level {
            Level::Sc => p.sc.to_string(),
            Level::Discipline => p.discipline.to_string(),
            Level::Overall => "Overall".to_string(),
        };
        groups.entry((key, &p.country)).or_default().push(p);
    }
    groups
        .into_iter()
        .map(|((group, country), members)| {
            let mut means = [None; 5];
            for ind in Indicator::ALL {
                means[ind.index()] = crate::scalar::mean(members.iter().filter_map(|p| p.value(ind)));
            }
            GroupMean {
                group,
                country: country.clone(),
                n_professors: members.len(),
                means,
            }
        })
        .collect()
}

fn quota(n: usize, fraction: f64) -> usize {
    // guard against 0.1 * 30 = 3.0000000000000004
    let q = (fraction * n as f64 - 1e-9).ceil();
    (q.max(1.0) as usize).min(n)
}

/// Top `fraction` of each SC by FSS: `ceil(fraction * n)` professors, plus
/// everyone tied with the last one selected.
pub fn top_decile<T: Real>(scores: &[ScoredProfessor<T>], fraction: f64) -> BTreeSet<ProfessorId> {
    let mut by_sc: BTreeMap<&ScCode, Vec<(T, &ProfessorId)>> = BTreeMap::new();
    for p in scores {
        let fss = p.value(Indicator::FSS).unwrap_or(T::zero());
        by_sc.entry(&p.sc).or_default().push((fss, &p.professor_id));
    }
    let mut selected = BTreeSet::new();
    for (_, mut members) in by_sc {
        members.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));
        let q = quota(members.len(), fraction);
        let cutoff = members[q - 1].0;
        selected.extend(
            members
                .iter()
                .filter(|(v, _)| *v >= cutoff)
                .map(|(_, id)| (*id).clone()),
        );
    }
    selected
}

/// Mean of nonzero values.
#[cfg(test)]
fn nonzero_mean<T: Real>(values: impl IntoIterator<Item = T>) -> Option<T> {
    let mut acc = crate::scalar::CompensatedSum::new();
    let mut n = 0;
    for v in values.into_iter().filter(|v| *v != T::zero()) {
        acc.add(v);
        n += 1;
    }
    (n > 0).then(|| acc.total() / T::of_count(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn prof(id: &str, country: &str, sc: &str, fss: f64) -> ScoredProfessor<f64> {
        ScoredProfessor {
            professor_id: id.into(),
            country: country.into(),
            sc: sc.into(),
            discipline: "D".into(),
            values: [Some(fss), Some(fss), None, Some(fss), Some(fss)],
        }
    }

    fn fss_of(n: &NormalizedScores<f64>) -> Vec<f64> {
        n.professors.iter().map(|p| p.value(Indicator::FSS).unwrap()).collect()
    }

    #[test]
    fn nonzero_mean_scaling() {
        let raw: Vec<_> = [2.0, 0.0, 4.0, 6.0]
            .iter()
            .enumerate()
            .map(|(i, &v)| prof(&format!("P{i}"), "IT", "A", v))
            .collect();
        let n = normalize_within_sc(&raw);
        assert_eq!(fss_of(&n), vec![0.5, 0.0, 1.0, 1.5]);
        assert_eq!(n.factors[&("A".into(), Indicator::FSS)], Some(4.0));
        assert_eq!(n.factors[&("A".into(), Indicator::AC)], None);
        assert!(n.professors.iter().all(|p| p.value(Indicator::AC).is_none()));
    }

    #[test]
    fn ten_percent_above_average() {
        let raw: Vec<_> = [0.5, 1.5, 1.1, 0.0, 0.9]
            .iter()
            .enumerate()
            .map(|(i, &v)| prof(&format!("P{i}"), "IT", "A", v))
            .collect();
        // nonzero mean = (0.5 + 1.5 + 1.1 + 0.9) / 4 = 1.0
        let n = normalize_within_sc(&raw);
        assert!((n.professors[2].value(Indicator::FSS).unwrap() - 1.10).abs() < 1e-12);
    }

    #[test]
    fn equal_scores_normalize_to_one_and_zeros_stay() {
        let raw: Vec<_> = (0..5).map(|i| prof(&format!("P{i}"), "NO", "A", 3.7)).collect();
        assert!(fss_of(&normalize_within_sc(&raw)).iter().all(|&v| v == 1.0));
        let zeros: Vec<_> = (0..3).map(|i| prof(&format!("P{i}"), "NO", "A", 0.0)).collect();
        let n = normalize_within_sc(&zeros);
        assert!(fss_of(&n).iter().all(|&v| v == 0.0));
        assert_eq!(n.factors[&("A".into(), Indicator::FSS)], None);
    }

    #[test]
    fn aggregate_levels() {
        let scores = vec![
            prof("P1", "IT", "A", 1.0),
            prof("P2", "IT", "A", 3.0),
            prof("P3", "NO", "B", 5.0),
        ];
        let sc = aggregate(&scores, Level::Sc, None);
        assert_eq!(sc.len(), 2);
        assert_eq!(sc[0].group, "A");
        assert_eq!(sc[0].n_professors, 2);
        assert_eq!(sc[0].means[Indicator::O.index()], Some(2.0));
        assert_eq!(sc[0].means[Indicator::AC.index()], None);
        let no = aggregate(&scores, Level::Overall, Some(&"NO".into()));
        assert_eq!(no.len(), 1);
        assert_eq!(no[0].means[Indicator::FSS.index()], Some(5.0));
    }

    #[test]
    fn decile_quota_and_ties() {
        let twenty: Vec<_> = (0..20).map(|i| prof(&format!("P{i:02}"), "IT", "A", i as f64)).collect();
        let top = top_decile(&twenty, 0.10);
        assert_eq!(top.len(), 2);
        assert!(top.contains(&ProfessorId::from("P19")) && top.contains(&ProfessorId::from("P18")));

        let fifteen: Vec<_> = (0..15).map(|i| prof(&format!("P{i:02}"), "IT", "A", i as f64)).collect();
        assert_eq!(top_decile(&fifteen, 0.10).len(), 2);

        let thirty: Vec<_> = (0..30).map(|i| prof(&format!("P{i:02}"), "IT", "A", i as f64)).collect();
        assert_eq!(top_decile(&thirty, 0.10).len(), 3);

        // quota 2 on 11 professors; the 2nd and 3rd tie with the 4th
        let mut tied: Vec<_> = (0..11).map(|i| prof(&format!("P{i:02}"), "IT", "A", i as f64 / 100.0)).collect();
        tied[0].values[4] = Some(9.0);
        for p in &mut tied[1..4] {
            p.values[4] = Some(5.0);
        }
        let top = top_decile(&tied, 0.10);
        assert_eq!(top.len(), 4);
    }

    proptest! {
        #[test]
        fn mean_one_and_scale_invariance(values in prop::collection::vec(prop_oneof![Just(0.0), 1e-6f64..1e3], 1..60), lambda in prop_oneof![Just(0.5), Just(3.0), Just(1000.0), 1e-3f64..1e3]) {
            let raw: Vec<_> = values.iter().enumerate().map(|(i, &v)| prof(&format!("P{i:03}"), if i % 3 == 0 { "NO" } else { "IT" }, "A", v)).collect();
            let n = normalize_within_sc(&raw);
            let fss = fss_of(&n);
            if let Some(m) = nonzero_mean(fss.iter().copied()) {
                prop_assert!((m - 1.0).abs() <= 1e-9);
            }
            let scaled: Vec<_> = raw.iter().map(|p| ScoredProfessor { values: p.values.map(|v| v.map(|x| x * lambda)), ..p.clone() }).collect();
            let ns = normalize_within_sc(&scaled);
            for (a, b) in fss.iter().zip(fss_of(&ns)) {
                prop_assert!((a - b).abs() <= 1e-9);
            }
            prop_assert_eq!(top_decile(&n.professors, 0.1), top_decile(&raw, 0.1));
            prop_assert_eq!(top_decile(&ns.professors, 0.1), top_decile(&n.professors, 0.1));
        }

        #[test]
        fn decile_bounds(values in prop::collection::vec(0u32..20, 1..80), fraction in 0.01f64..=1.0) {
            let raw: Vec<_> = values.iter().enumerate().map(|(i, &v)| prof(&format!("P{i:03}"), "IT", "A", v as f64)).collect();
            let top = top_decile(&raw, fraction);
            let n = raw.len();
            prop_assert!(top.len() >= quota(n, fraction) && top.len() <= n);
            let min_in = raw.iter().filter(|p| top.contains(&p.professor_id)).map(|p| p.values[4].unwrap()).fold(f64::INFINITY, f64::min);
            let max_out = raw.iter().filter(|p| !top.contains(&p.professor_id)).map(|p| p.values[4].unwrap()).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(min_in > max_out);
        }
    }
}
