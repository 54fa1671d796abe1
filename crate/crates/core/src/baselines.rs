//! Field baselines for citations and impact factors, and standardization
//! against them.
//!
//! A baseline cell is a (year, SC) pair. Its citation baseline is the mean
//! citation count of the cell's cited publications (at least one citation);
//! its impact-factor baseline is the mean impact factor of the journals
//! hosting those same cited publications. Publications whose SC cells are
//! all empty fall back to the (year, discipline) cell, then to the whole
//! year.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{Discipline, ScCode, ScMap, Year};
use crate::numfmt::sig10;
use crate::scalar::{CompensatedSum, Real};

/// What baselines need to know about one publication.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    pub year: Year,
    /// Sorted, de-duplicated.
    pub scs: &'a [ScCode],
    pub citations: u64,
    pub impact_factor: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellStat<T> {
    pub mean: T,
    /// Publications behind the mean.
    pub support: usize,
}

#[derive(Debug, Clone)]
struct Accumulator<T> {
    sum: CompensatedSum<T>,
    count: usize,
}

impl<T: Real> Accumulator<T> {
    fn new() -> Self {
        Self {
            sum: CompensatedSum::new(),
            count: 0,
        }
    }

    fn add(&mut self, v: T) {
        self.sum.add(v);
        self.count += 1;
    }

    fn finish(&self) -> Option<CellStat<T>> {
        (self.count > 0).then(|| CellStat {
            mean: self.sum.total() / T::of_count(self.count),
            support: self.count,
        })
    }
}

fn finish_all<K: Ord + Clone, T: Real>(acc: BTreeMap<K, Accumulator<T>>) -> BTreeMap<K, CellStat<T>> {
    acc.into_iter()
        .filter_map(|(k, a)| a.finish().map(|s| (k, s)))
        .collect()
}

/// One baseline kind (citations or impact factor) at the three fallback
/// levels.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineLevels<T> {
    pub by_sc: BTreeMap<(Year, ScCode), CellStat<T>>,
    pub by_discipline: BTreeMap<(Year, Discipline), CellStat<T>>,
    pub by_year: BTreeMap<Year, CellStat<T>>,
}

impl<T> Default for BaselineLevels<T> {
    fn default() -> Self {
        Self {
            by_sc: BTreeMap::new(),
            by_discipline: BTreeMap::new(),
            by_year: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineLevel {
    Sc,
    Discipline,
    Year,
}

/// Standardized value with the fallback level that produced it. `value` is
/// `None` when no baseline exists at any level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Standardized<T> {
    pub value: Option<T>,
    pub level: Option<BaselineLevel>,
}

impl<T: Real> BaselineLevels<T> {
    /// Mean baseline over the observation's SCs, falling back when every SC
    /// cell is empty.
    pub fn resolve(&self, obs: &Observation<'_>, scmap: &ScMap) -> Option<(T, BaselineLevel)> {
        let per_sc = obs
            .scs
            .iter()
            .filter_map(|sc| self.by_sc.get(&(obs.year, sc.clone())).map(|c| c.mean));
        if let Some(m) = crate::scalar::mean(per_sc) {
            return Some((m, BaselineLevel::Sc));
        }
        let disciplines: BTreeSet<&Discipline> =
            obs.scs.iter().filter_map(|sc| scmap.discipline_of(sc)).collect();
        let per_discipline = disciplines
            .into_iter()
            .filter_map(|d| self.by_discipline.get(&(obs.year, d.clone())).map(|c| c.mean));
        if let Some(m) = crate::scalar::mean(per_discipline) {
            return Some((m, BaselineLevel::Discipline));
        }
        self.by_year
            .get(&obs.year)
            .map(|c| (c.mean, BaselineLevel::Year))
    }
}

/// Citation and impact-factor baselines of a corpus.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BaselineTable<T> {
    pub citation: BaselineLevels<T>,
    pub impact: BaselineLevels<T>,
}

/// Aggregates `value(obs)` over cited publications into the three levels.
fn build_levels<'a, T: Real>(
    corpus: impl IntoIterator<Item = &'a Observation<'a>>,
    scmap: &ScMap,
    value: impl Fn(&Observation<'_>) -> Option<T>,
) -> BaselineLevels<T> {
    let mut by_sc: BTreeMap<(Year, ScCode), Accumulator<T>> = BTreeMap::new();
    let mut by_discipline: BTreeMap<(Year, Discipline), Accumulator<T>> = BTreeMap::new();
    let mut by_year: BTreeMap<Year, Accumulator<T>> = BTreeMap::new();
    for obs in corpus {
        if obs.citations == 0 {
            continue;
        }
        let Some(v) = value(obs) else { continue };
        for sc in obs.scs {
            by_sc
                .entry((obs.year, sc.clone()))
                .or_insert_with(Accumulator::new)
                .add(v);
        }
        let disciplines: BTreeSet<&Discipline> =
            obs.scs.iter().filter_map(|sc| scmap.discipline_of(sc)).collect();
        for d in disciplines {
            by_discipline
                .entry((obs.year, d.clone()))
                .or_insert_with(Accumulator::new)
                .add(v);
        }
        by_year
            .entry(obs.year)
            .or_insert_with(Accumulator::new)
            .add(v);
    }
    BaselineLevels {
        by_sc: finish_all(by_sc),
        by_discipline: finish_all(by_discipline),
        by_year: finish_all(by_year),
    }
}

/// Mean citations of cited publications per cell.
pub fn build_citation_baseline<'a, T: Real>(
    corpus: &'a [Observation<'a>],
    scmap: &ScMap,
) -> BaselineLevels<T> {
    build_levels(corpus, scmap, |o| Some(T::of(o.citations as f64)))
}

/// Mean hosting-journal impact factor of cited publications per cell,
/// skipping journals without an impact factor.
pub fn build_if_baseline<'a, T: Real>(
    corpus: &'a [Observation<'a>],
    scmap: &ScMap,
) -> BaselineLevels<T> {
    build_levels(corpus, scmap, |o| o.impact_factor.map(T::of))
}

pub fn build_baselines<'a, T: Real>(corpus: &'a [Observation<'a>], scmap: &ScMap) -> BaselineTable<T> {
    BaselineTable {
        citation: build_citation_baseline(corpus, scmap),
        impact: build_if_baseline(corpus, scmap),
    }
}

/// `c_i / c̄`. Uncited publications standardize to zero whatever the
/// baseline.
pub fn standardize_citations<T: Real>(
    obs: &Observation<'_>,
    baselines: &BaselineTable<T>,
    scmap: &ScMap,
) -> Standardized<T> {
    let resolved = baselines.citation.resolve(obs, scmap);
    let value = if obs.citations == 0 {
        Some(T::zero())
    } else {
        resolved.map(|(base, _)| T::of(obs.citations as f64) / base)
    };
    Standardized {
        value,
        level: resolved.map(|(_, l)| l),
    }
}

/// `IF_i / IF̄`; undefined for journals without an impact factor.
pub fn standardize_if<T: Real>(
    obs: &Observation<'_>,
    baselines: &BaselineTable<T>,
    scmap: &ScMap,
) -> Standardized<T> {
    let Some(impact) = obs.impact_factor else {
        return Standardized {
            value: None,
            level: None,
        };
    };
    let resolved = baselines.impact.resolve(obs, scmap);
    let value = if impact == 0.0 {
        Some(T::zero())
    } else {
        resolved.map(|(base, _)| T::of(impact) / base)
    };
    Standardized {
        value,
        level: resolved.map(|(_, l)| l),
    }
}

/// Writes the (year, SC) cells as
/// `year,sc,c_mean,if_mean,c_support,if_support`.
pub fn write_baselines<T: Real, W: Write>(table: &BaselineTable<T>, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let err = |source| Error::Csv {
        file: "baselines".into(),
        source,
    };
    w.write_record(["year", "sc", "c_mean", "if_mean", "c_support", "if_support"])
        .map_err(err)?;
    let keys: BTreeSet<&(Year, ScCode)> = table
        .citation
        .by_sc
        .keys()
        .chain(table.impact.by_sc.keys())
        .collect();
    for key in keys {
        let c = table.citation.by_sc.get(key);
        let i = table.impact.by_sc.get(key);
        w.write_record([
            key.0.to_string(),
            key.1.to_string(),
            c.map(|s| sig10(s.mean.as_f64())).unwrap_or_default(),
            i.map(|s| sig10(s.mean.as_f64())).unwrap_or_default(),
            c.map(|s| s.support).unwrap_or(0).to_string(),
            i.map(|s| s.support).unwrap_or(0).to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io("baselines", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{CreditRegime, ScEntry};
    use proptest::prelude::*;

    fn scmap() -> ScMap {
        let mut m = ScMap::default();
        for (sc, d) in [("A", "Physics"), ("B", "Physics"), ("C", "Chemistry")] {
            m.entries.insert(
                sc.into(),
                ScEntry {
                    discipline: d.into(),
                    regime: CreditRegime::Uniform,
                },
            );
        }
        m
    }

    fn scs(names: &[&str]) -> Vec<ScCode> {
        names.iter().map(|s| ScCode::from(*s)).collect()
    }

    fn obs<'a>(scs: &'a [ScCode], citations: u64, impact: Option<f64>) -> Observation<'a> {
        Observation {
            year: 2013,
            scs,
            citations,
            impact_factor: impact,
        }
    }

    fn cell(levels: &BaselineLevels<f64>, sc: &str) -> Option<CellStat<f64>> {
        levels.by_sc.get(&(2013, ScCode::from(sc))).copied()
    }

    #[test]
    fn citation_baseline_uses_cited_only() {
        let a = scs(&["A"]);
        let corpus: Vec<_> = [0, 2, 4, 6].iter().map(|&c| obs(&a, c, None)).collect();
        let b = build_citation_baseline::<f64>(&corpus, &scmap());
        assert_eq!(cell(&b, "A"), Some(CellStat { mean: 4.0, support: 3 }));

        let single = [obs(&a, 5, None)];
        assert_eq!(cell(&build_citation_baseline(&single, &scmap()), "A").unwrap().mean, 5.0);

        let uncited = [obs(&a, 0, None), obs(&a, 0, None)];
        assert_eq!(cell(&build_citation_baseline(&uncited, &scmap()), "A"), None);
    }

    #[test]
    fn if_baseline_skips_missing_impact() {
        let a = scs(&["A"]);
        let two = [obs(&a, 1, Some(2.0)), obs(&a, 1, Some(4.0))];
        assert_eq!(cell(&build_if_baseline(&two, &scmap()), "A").unwrap().mean, 3.0);
        let mixed = [obs(&a, 1, None), obs(&a, 1, Some(4.0))];
        assert_eq!(
            cell(&build_if_baseline(&mixed, &scmap()), "A"),
            Some(CellStat { mean: 4.0, support: 1 })
        );
        let none = [obs(&a, 1, None)];
        assert_eq!(cell(&build_if_baseline(&none, &scmap()), "A"), None);
    }

    #[test]
    fn standardization_rules() {
        let a = scs(&["A"]);
        let b = scs(&["B"]);
        let ab = scs(&["A", "B"]);
        let corpus = [obs(&a, 4, Some(3.0)), obs(&b, 8, Some(3.0))];
        let table = build_baselines::<f64>(&corpus, &scmap());
        let m = scmap();
        assert_eq!(standardize_citations(&obs(&a, 8, None), &table, &m).value, Some(2.0));
        assert_eq!(standardize_citations(&obs(&a, 0, None), &table, &m).value, Some(0.0));
        let multi = standardize_citations(&obs(&ab, 6, None), &table, &m);
        assert_eq!(multi.value, Some(1.0));
        assert_eq!(multi.level, Some(BaselineLevel::Sc));

        assert_eq!(standardize_if(&obs(&a, 1, Some(6.0)), &table, &m).value, Some(2.0));
        assert_eq!(standardize_if(&obs(&a, 1, Some(3.0)), &table, &m).value, Some(1.0));
        assert_eq!(standardize_if(&obs(&a, 1, None), &table, &m).value, None);
    }

    #[test]
    fn fallback_hierarchy() {
        let a = scs(&["A"]);
        let b = scs(&["B"]);
        let c = scs(&["C"]);
        let m = scmap();
        let corpus = [obs(&a, 4, None)];
        let table = build_baselines::<f64>(&corpus, &m);
        // B is empty but shares the Physics discipline with A
        let s = standardize_citations(&obs(&b, 2, None), &table, &m);
        assert_eq!((s.value, s.level), (Some(0.5), Some(BaselineLevel::Discipline)));
        // C has no discipline cell; the whole year applies
        let s = standardize_citations(&obs(&c, 8, None), &table, &m);
        assert_eq!((s.value, s.level), (Some(2.0), Some(BaselineLevel::Year)));
        // another year has nothing at all
        let other = Observation { year: 2014, ..obs(&c, 8, None) };
        assert_eq!(standardize_citations(&other, &table, &m).value, None);
    }

    #[test]
    fn baseline_dump_format() {
        let a = scs(&["A"]);
        let corpus = [obs(&a, 3, Some(1.5)), obs(&a, 0, Some(9.0))];
        let table = build_baselines::<f64>(&corpus, &scmap());
        let mut buf = Vec::new();
        write_baselines(&table, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "year,sc,c_mean,if_mean,c_support,if_support\n2013,A,3,1.5,1,1\n"
        );
    }

    proptest! {
        #[test]
        fn standardization_conserves_and_is_scale_free(
            cites in prop::collection::vec(0u64..500, 1..60),
            lambda in 1u64..50,
        ) {
            let a = scs(&["A"]);
            let m = scmap();
            let corpus: Vec<_> = cites.iter().map(|&c| obs(&a, c, None)).collect();
            let table = build_baselines::<f64>(&corpus, &m);
            if let Some(base) = cell(&table.citation, "A") {
                let cited: Vec<_> = corpus.iter().filter(|o| o.citations > 0).collect();
                let rebuilt: f64 = cited
                    .iter()
                    .map(|o| standardize_citations(o, &table, &m).value.unwrap() * base.mean)
                    .sum();
                let raw: f64 = cited.iter().map(|o| o.citations as f64).sum();
                prop_assert!((rebuilt - raw).abs() <= 1e-9 * raw.max(1.0));

                let scaled: Vec<_> = cites.iter().map(|&c| obs(&a, c * lambda, None)).collect();
                let scaled_table = build_baselines::<f64>(&scaled, &m);
                let sbase = cell(&scaled_table.citation, "A").unwrap();
                prop_assert!((sbase.mean - base.mean * lambda as f64).abs() <= 1e-9 * sbase.mean);
                for (o, s) in corpus.iter().zip(&scaled) {
                    let x = standardize_citations(o, &table, &m).value.unwrap();
                    let y = standardize_citations(s, &scaled_table, &m).value.unwrap();
                    prop_assert!((x - y).abs() <= 1e-9);
                }
            } else {
                prop_assert!(cites.iter().all(|&c| c == 0));
            }
        }

        #[test]
        fn baselines_ignore_input_order(cites in prop::collection::vec((0u64..50, 0usize..3), 1..40), seed: u64) {
            let names = [scs(&["A"]), scs(&["B"]), scs(&["A", "C"])];
            let corpus: Vec<_> = cites.iter().map(|&(c, k)| obs(&names[k], c, Some(1.0 + k as f64))).collect();
            let mut shuffled = corpus.clone();
            let n = shuffled.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
            let t1 = build_baselines::<f64>(&corpus, &scmap());
            let t2 = build_baselines::<f64>(&shuffled, &scmap());
            prop_assert_eq!(t1.citation.by_sc.keys().collect::<Vec<_>>(), t2.citation.by_sc.keys().collect::<Vec<_>>());
            for (k, v) in &t1.citation.by_sc {
                prop_assert!((v.mean - t2.citation.by_sc[k].mean).abs() <= 1e-12 * v.mean);
            }
            for (k, v) in &t1.impact.by_sc {
                prop_assert!((v.mean - t2.impact.by_sc[k].mean).abs() <= 1e-12 * v.mean);
            }
        }
    }
}
