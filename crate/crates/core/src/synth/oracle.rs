//! Straight nested-loop recomputation of every indicator and report table.
//! Shares only the record types with the main pipeline.

use std::collections::BTreeMap;

use crate::analytics::{
    CountryPair, GapRow, GapTable, GroupMean, Indicator, OutperformRow, OutperformTable, ReportBundle,
};
use crate::config::{AnalysisConfig, ReportConfig};
use crate::error::{Error, Result};
use crate::ingest::{
    Country, CreditRegime, DatasetBundle, Discipline, JournalRecord, ProfessorId, PublicationRecord,
    ScCode, Year,
};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub professor_id: ProfessorId,
    pub country: Country,
    pub sc: ScCode,
    pub discipline: Discipline,
    pub t: u32,
    pub cost: f64,
    pub n: usize,
    pub o: f64,
    pub fo: f64,
    pub ac: Option<f64>,
    pub aif: Option<f64>,
    pub fss: f64,
}

impl OracleRow {
    pub fn values(&self) -> [Option<f64>; 5] {
        [Some(self.o), Some(self.fo), self.ac, self.aif, Some(self.fss)]
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OracleOutput {
    /// Eligible professors.
    pub rows: BTreeMap<ProfessorId, OracleRow>,
    /// Exclusion label of every professor (`none` when eligible).
    pub exclusions: BTreeMap<ProfessorId, &'static str>,
}

fn journal_for<'a>(bundle: &'a DatasetBundle, p: &PublicationRecord) -> Option<&'a JournalRecord> {
    let mut best: Option<&JournalRecord> = None;
    for j in &bundle.journals {
        if j.journal_id != p.journal_id {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => {
                let (dj, db) = ((j.year - p.year).abs(), (b.year - p.year).abs());
                dj < db || (dj == db && j.year < b.year)
            }
        };
        if better {
            best = Some(j);
        }
    }
    best
}

fn rank_year(ranks: &BTreeMap<Year, crate::ingest::Rank>, year: Year) -> Option<crate::ingest::Rank> {
    let mut best: Option<(Year, crate::ingest::Rank)> = None;
    for (&y, &r) in ranks {
        let better = match best {
            None => true,
            Some((by, _)) => {
                let (d, bd) = ((y - year).abs(), (by - year).abs());
                d < bd || (d == bd && y < by)
            }
        };
        if better {
            best = Some((y, r));
        }
    }
    best.map(|(_, r)| r)
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Role-based weight of every byline position, rescaled to sum to one.
fn position_weights(n: usize, intramural: bool, c: &crate::config::CreditConstants) -> Vec<f64> {
    let mut w = vec![0.0; n];
    if intramural {
        w[0] += c.intramural_first_last;
        w[n - 1] += c.intramural_first_last;
        if n > 2 {
            for x in &mut w[1..n - 1] {
                *x += c.intramural_others_pool / (n - 2) as f64;
            }
        }
    } else {
        w[0] += c.extramural_first_last;
        w[n - 1] += c.extramural_first_last;
        if n >= 2 {
            w[1] += c.extramural_second;
            w[n - 2] += c.extramural_second;
        }
        if n > 4 {
            for x in &mut w[2..n - 2] {
                *x += c.extramural_others_pool / (n - 4) as f64;
            }
        }
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

struct Pub<'a> {
    record: &'a PublicationRecord,
    scs: Vec<ScCode>,
    disciplines: Vec<Discipline>,
    impact: Option<f64>,
}

/// Recomputes every eligible professor's indicators from scratch.
pub fn oracle_compute(bundle: &DatasetBundle, config: &AnalysisConfig) -> Result<OracleOutput> {
    let mut pubs = Vec::new();
    for p in &bundle.publications {
        let j = journal_for(bundle, p).ok_or_else(|| Error::MissingJournal {
            pub_id: p.pub_id.to_string(),
            journal_id: p.journal_id.to_string(),
        })?;
        let mut scs = j.subject_categories.clone();
        scs.sort();
        scs.dedup();
        let mut disciplines = Vec::new();
        for sc in &scs {
            let d = bundle.scmap.entries.get(sc).ok_or_else(|| Error::UnknownSc(sc.to_string()))?;
            if !disciplines.contains(&d.discipline) {
                disciplines.push(d.discipline.clone());
            }
        }
        pubs.push(Pub {
            record: p,
            scs,
            disciplines,
            impact: j.impact_factor,
        });
    }

    // Baselines: (year, key) cell means over cited publications.
    let cell = |year: Year, member: &dyn Fn(&Pub) -> bool, value: &dyn Fn(&Pub) -> Option<f64>| -> Option<f64> {
        let vals: Vec<f64> = pubs
            .iter()
            .filter(|q| q.record.year == year && q.record.citations > 0 && member(q))
            .filter_map(value)
            .collect();
        mean(&vals)
    };
    let standardize = |p: &Pub, value: &dyn Fn(&Pub) -> Option<f64>| -> Option<f64> {
        let year = p.record.year;
        let by_sc: Vec<f64> = p
            .scs
            .iter()
            .filter_map(|sc| cell(year, &|q| q.scs.contains(sc), value))
            .collect();
        if let Some(m) = mean(&by_sc) {
            return Some(m);
        }
        let by_d: Vec<f64> = p
            .disciplines
            .iter()
            .filter_map(|d| cell(year, &|q| q.disciplines.contains(d), value))
            .collect();
        if let Some(m) = mean(&by_d) {
            return Some(m);
        }
        cell(year, &|_| true, value)
    };
    let citation_value = |q: &Pub| Some(q.record.citations as f64);
    let impact_value = |q: &Pub| q.impact;
    let mut std_c = Vec::new();
    let mut std_if = Vec::new();
    for p in &pubs {
        let c = p.record.citations as f64;
        std_c.push(if c == 0.0 { Some(0.0) } else { standardize(p, &citation_value).map(|b| c / b) });
        std_if.push(match p.impact {
            None => None,
            Some(x) if x == 0.0 => Some(0.0),
            Some(x) => standardize(p, &impact_value).map(|b| x / b),
        });
    }

    // Portfolios and classification.
    let mut assigned: Vec<Option<ScCode>> = Vec::new();
    let mut portfolios: Vec<Vec<(usize, u32)>> = Vec::new();
    for prof in &bundle.professors {
        let mut portfolio = Vec::new();
        for a in &bundle.authorships {
            if a.professor_id == prof.professor_id {
                let idx = pubs.iter().position(|p| p.record.pub_id == a.pub_id);
                if let Some(i) = idx {
                    portfolio.push((i, a.position));
                }
            }
        }
        let mut counts: BTreeMap<&ScCode, (usize, u64)> = BTreeMap::new();
        for &(i, _) in &portfolio {
            for sc in &pubs[i].scs {
                let e = counts.entry(sc).or_insert((0, 0));
                e.0 += 1;
                e.1 += pubs[i].record.citations;
            }
        }
        let mut best: Option<(&ScCode, (usize, u64))> = None;
        for (sc, v) in counts {
            match best {
                Some((_, b)) if v.0 < b.0 || (v.0 == b.0 && v.1 <= b.1) => {}
                _ => best = Some((sc, v)),
            }
        }
        assigned.push(best.map(|(sc, _)| sc.clone()));
        portfolios.push(portfolio);
    }

    // Filters.
    let passes_first = |i: usize| {
        bundle.professors[i].years_on_staff >= config.min_years_on_staff && !portfolios[i].is_empty()
    };
    let mut out = OracleOutput::default();
    for (i, prof) in bundle.professors.iter().enumerate() {
        let label = if prof.years_on_staff < config.min_years_on_staff {
            "too_few_years"
        } else if portfolios[i].is_empty() {
            "no_publications"
        } else {
            let sc = assigned[i].as_ref().expect("publishing professor has an SC");
            let size = (0..bundle.professors.len())
                .filter(|&k| passes_first(k) && assigned[k].as_ref() == Some(sc))
                .count();
            if size < config.min_sc_professors {
                "small_sc"
            } else if config.excluded_scs.contains(sc) {
                "excluded_field"
            } else {
                "none"
            }
        };
        out.exclusions.insert(prof.professor_id.clone(), label);
        if label != "none" {
            continue;
        }
        let sc = assigned[i].clone().expect("eligible");
        let entry = bundle.scmap.entries.get(&sc).ok_or_else(|| Error::UnknownSc(sc.to_string()))?;

        let mut years: Vec<Year> = prof.rank_by_year.keys().copied().collect();
        for &(pi, _) in &portfolios[i] {
            let y = pubs[pi].record.year;
            if !years.contains(&y) {
                years.push(y);
            }
        }
        let mut salary = 0.0;
        for &y in &years {
            let rank = rank_year(&prof.rank_by_year, y)
                .ok_or_else(|| Error::MissingCost(format!("rank of {}", prof.professor_id)))?;
            salary += bundle
                .costs
                .salary
                .get(&(prof.country.clone(), rank))
                .ok_or_else(|| Error::MissingCost(format!("salary ({}, {rank})", prof.country)))?;
        }
        let capital = *bundle
            .costs
            .capital
            .get(&(prof.country.clone(), entry.discipline.clone()))
            .ok_or_else(|| Error::MissingCost(format!("capital ({}, {})", prof.country, entry.discipline)))?;
        let cost = salary / years.len() as f64 / 2.0 + capital;

        let mut fo_sum = 0.0;
        let mut fss_sum = 0.0;
        let mut cs = Vec::new();
        let mut ifs = Vec::new();
        for &(pi, position) in &portfolios[i] {
            let r = pubs[pi].record;
            let n = r.total_authors as usize;
            let f = match entry.regime {
                CreditRegime::Uniform => 1.0 / n as f64,
                CreditRegime::PositionWeighted => {
                    position_weights(n, r.affiliation_count == 1, &config.credit)[position as usize - 1]
                }
            };
            fo_sum += f;
            fss_sum += f * std_c[pi].unwrap_or(0.0);
            cs.extend(std_c[pi]);
            ifs.extend(std_if[pi]);
        }
        let t = prof.years_on_staff as f64;
        let n = portfolios[i].len();
        out.rows.insert(
            prof.professor_id.clone(),
            OracleRow {
                professor_id: prof.professor_id.clone(),
                country: prof.country.clone(),
                sc,
                discipline: entry.discipline.clone(),
                t: prof.years_on_staff,
                cost,
                n,
                o: n as f64 / (t * cost),
                fo: fo_sum / (t * cost),
                ac: mean(&cs),
                aif: mean(&ifs),
                fss: fss_sum / (t * cost),
            },
        );
    }
    Ok(out)
}

/// Recomputes the report tables from oracle rows.
pub fn oracle_report(
    bundle: &DatasetBundle,
    analysis: &AnalysisConfig,
    report: &ReportConfig,
) -> Result<ReportBundle<f64>> {
    let out = oracle_compute(bundle, analysis)?;
    let rows: Vec<&OracleRow> = out.rows.values().collect();

    // Normalize per SC by the mean of nonzero values.
    let mut normalized: Vec<[Option<f64>; 5]> = Vec::new();
    for r in &rows {
        let mut v = [None; 5];
        for k in 0..5 {
            let Some(x) = r.values()[k] else { continue };
            let nonzero: Vec<f64> = rows
                .iter()
                .filter(|q| q.sc == r.sc)
                .filter_map(|q| q.values()[k])
                .filter(|&y| y != 0.0)
                .collect();
            v[k] = Some(match mean(&nonzero) {
                Some(m) if x != 0.0 => x / m,
                _ => 0.0,
            });
        }
        normalized.push(v);
    }

    let mut countries: Vec<&Country> = rows.iter().map(|r| &r.country).collect();
    countries.sort();
    countries.dedup();
    let pair = match &report.countries {
        Some((a, b)) => CountryPair::new(a.clone(), b.clone()),
        None if countries.len() >= 2 => CountryPair::new(countries[0].clone(), countries[1].clone()),
        None => return Err(Error::config("countries", "fewer than two countries")),
    };
    let in_pair: Vec<usize> = (0..rows.len())
        .filter(|&i| rows[i].country == pair.a || rows[i].country == pair.b)
        .collect();

    let group_mean = |members: &[usize], group: &str, country: &Country| -> Option<GroupMean<f64>> {
        let ms: Vec<usize> = members.iter().copied().filter(|&i| &rows[i].country == country).collect();
        if ms.is_empty() {
            return None;
        }
        let mut means = [None; 5];
        for (k, m) in means.iter_mut().enumerate() {
            let vals: Vec<f64> = ms.iter().filter_map(|&i| normalized[i][k]).collect();
            *m = mean(&vals);
        }
        Some(GroupMean {
            group: group.to_string(),
            country: country.clone(),
            n_professors: ms.len(),
            means,
        })
    };
    let pair_countries = {
        let mut v = vec![pair.a.clone(), pair.b.clone()];
        v.sort();
        v
    };
    let overall: Vec<GroupMean<f64>> =
        pair_countries.iter().filter_map(|c| group_mean(&in_pair, "Overall", c)).collect();

    // Top decile per SC over all countries.
    let mut top = Vec::new();
    let fss = |i: usize| normalized[i][4].unwrap_or(0.0);
    for i in 0..rows.len() {
        let peers: Vec<usize> = (0..rows.len()).filter(|&k| rows[k].sc == rows[i].sc).collect();
        let quota = ((report.decile * peers.len() as f64 - 1e-9).ceil() as usize).clamp(1, peers.len());
        let mut values: Vec<f64> = peers.iter().map(|&k| fss(k)).collect();
        values.sort_by(|a, b| b.total_cmp(a));
        if fss(i) >= values[quota - 1] {
            top.push(i);
        }
    }
    let top_in_pair: Vec<usize> = top.into_iter().filter(|i| in_pair.contains(i)).collect();
    let top_decile: Vec<GroupMean<f64>> =
        pair_countries.iter().filter_map(|c| group_mean(&top_in_pair, "Overall", c)).collect();

    let mut disciplines: Vec<&Discipline> = in_pair.iter().map(|&i| &rows[i].discipline).collect();
    disciplines.sort();
    disciplines.dedup();
    let mut discipline_table = Vec::new();
    for d in &disciplines {
        let members: Vec<usize> = in_pair.iter().copied().filter(|&i| &rows[i].discipline == *d).collect();
        for c in &pair_countries {
            discipline_table.extend(group_mean(&members, d.as_str(), c));
        }
    }
    discipline_table.extend(overall.iter().cloned());

    // Per-SC country means.
    let mut scs: Vec<(&ScCode, &Discipline)> = in_pair.iter().map(|&i| (&rows[i].sc, &rows[i].discipline)).collect();
    scs.sort();
    scs.dedup();
    let sc_mean = |sc: &ScCode, c: &Country| {
        let members: Vec<usize> = in_pair.iter().copied().filter(|&i| &rows[i].sc == sc).collect();
        group_mean(&members, sc.as_str(), c)
    };

    let mut outperform = Vec::new();
    for ind in Indicator::ALL {
        let k = ind.index();
        let mut rows_out = Vec::new();
        let mut excluded = Vec::new();
        for d in &disciplines {
            let (mut n_scs, mut count) = (0, 0);
            for (sc, sd) in &scs {
                if sd != d {
                    continue;
                }
                match (sc_mean(sc, &pair.a), sc_mean(sc, &pair.b)) {
                    (Some(a), Some(b)) => {
                        n_scs += 1;
                        if let (Some(x), Some(y)) = (a.means[k], b.means[k]) {
                            if y > x {
                                count += 1;
                            }
                        }
                    }
                    _ => excluded.push((*sc).clone()),
                }
            }
            if n_scs > 0 {
                rows_out.push(OutperformRow { discipline: d.to_string(), n_scs, count });
            }
        }
        excluded.sort();
        let overall_row = OutperformRow {
            discipline: "Overall".into(),
            n_scs: rows_out.iter().map(|r| r.n_scs).sum(),
            count: rows_out.iter().map(|r| r.count).sum(),
        };
        outperform.push(OutperformTable { indicator: ind, rows: rows_out, overall: overall_row, excluded_scs: excluded });
    }

    let mut gaps = Vec::new();
    for ind in [Indicator::O, Indicator::FO, Indicator::AC, Indicator::AIF] {
        let k = ind.index();
        let mut all = Vec::new();
        for (sc, d) in &scs {
            if let (Some(a), Some(b)) = (sc_mean(sc, &pair.a), sc_mean(sc, &pair.b)) {
                if let (Some(x), Some(y)) = (a.means[k], b.means[k]) {
                    all.push(GapRow {
                        sc: (*sc).clone(),
                        discipline: (*d).clone(),
                        n_a: a.n_professors,
                        mean_a: x,
                        n_b: b.n_professors,
                        mean_b: y,
                        delta: x - y,
                    });
                }
            }
        }
        let mut favor_b: Vec<GapRow<f64>> = all.iter().filter(|r| r.delta < 0.0).cloned().collect();
        favor_b.sort_by(|x, y| x.delta.total_cmp(&y.delta).then(x.sc.cmp(&y.sc)));
        let mut favor_a: Vec<GapRow<f64>> = all.iter().filter(|r| r.delta > 0.0).cloned().collect();
        favor_a.sort_by(|x, y| y.delta.total_cmp(&x.delta).then(x.sc.cmp(&y.sc)));
        favor_b.truncate(report.top_k);
        favor_a.truncate(report.top_k);
        gaps.push(GapTable { indicator: ind, favor_b, favor_a });
    }

    Ok(ReportBundle {
        pair,
        top_k: report.top_k,
        decile: report.decile,
        overall,
        top_decile,
        discipline_table,
        outperform,
        gaps,
    })
}
