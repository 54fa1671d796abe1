//! Seeded synthetic datasets and a brute-force oracle to check the pipeline
//! against.

mod oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, LogNormal, Poisson};
use serde::{Deserialize, Serialize};

pub use oracle::{oracle_compute, oracle_report, OracleOutput, OracleRow};

use crate::error::{Error, Result};
use crate::ingest::{
    AuthorshipRecord, Country, CostTable, CreditRegime, DatasetBundle, Discipline, Gender,
    JournalRecord, ObservationWindow, ProfessorRecord, PublicationRecord, Rank, ScCode, ScEntry,
    ScMap, Year,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountryProfile {
    pub code: Country,
    pub professors: usize,
    /// Yearly salary per rank.
    pub salary: BTreeMap<Rank, f64>,
    /// Yearly research capital per discipline; missing disciplines use
    /// `capital_default`.
    #[serde(default)]
    pub capital: BTreeMap<Discipline, f64>,
    pub capital_default: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScProfile {
    pub code: ScCode,
    pub discipline: Discipline,
    /// Relative share of professors beyond the guaranteed minimum.
    #[serde(default = "one")]
    pub weight: f64,
    /// Overrides `min_professors_per_sc`.
    #[serde(default)]
    pub min_professors: Option<usize>,
    /// Mean publications per professor per staffed year.
    pub publication_rate: f64,
    /// Negative-binomial shape; smaller is more dispersed.
    pub publication_dispersion: f64,
    /// Citations are `floor(exp(N(mu, sigma)))`.
    pub citation_mu: f64,
    pub citation_sigma: f64,
    pub mean_authors: f64,
    pub impact_mu: f64,
    pub impact_sigma: f64,
    #[serde(default)]
    pub regime: Option<CreditRegime>,
}

fn one() -> f64 {
    1.0
}

/// Generator parameters, readable from a flat TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: u64,
    #[serde(default)]
    pub window: ObservationWindow,
    /// Guaranteed professors per SC (all countries together) who are on
    /// staff at least `min_years_on_staff` years and publish.
    pub min_professors_per_sc: usize,
    #[serde(default = "default_min_years")]
    pub min_years_on_staff: u32,
    pub journals_per_sc: usize,
    /// Chance that a journal (other than an SC's first) carries a second SC.
    #[serde(default)]
    pub multi_sc_probability: f64,
    /// Chance that a journal-year has no impact factor.
    #[serde(default)]
    pub missing_if_probability: f64,
    /// Chance that a journal-year row is left out, forcing a year fallback.
    #[serde(default)]
    pub journal_gap_probability: f64,
    /// Chance of a single-affiliation byline.
    #[serde(default = "half")]
    pub intramural_probability: f64,
    /// Chance that a publication has a second registered author.
    #[serde(default)]
    pub coauthor_probability: f64,
    /// Chance that a professor outside the guaranteed core is on staff for
    /// fewer than `min_years_on_staff` years.
    #[serde(default)]
    pub short_tenure_probability: f64,
    /// Chance that a professor outside the guaranteed core never publishes.
    #[serde(default)]
    pub inactive_probability: f64,
    /// Chance that a publication falls in a year the professor has no rank
    /// entry for.
    #[serde(default)]
    pub off_staff_publication_probability: f64,
    #[serde(default)]
    pub max_publications_per_professor: Option<usize>,
    pub countries: Vec<CountryProfile>,
    pub sc: Vec<ScProfile>,
}

fn default_min_years() -> u32 {
    3
}

fn half() -> f64 {
    0.5
}

fn probability(field: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::config(field, format!("must lie in [0, 1], got {p}")))
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be positive, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be non-negative, got {v}")))
    }
}

impl SynthConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self =
            toml::from_str(&text).map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window.first > self.window.last {
            return Err(Error::config("window", "first year is after last year"));
        }
        if self.min_years_on_staff == 0 || self.min_years_on_staff as usize > self.window.len() {
            return Err(Error::config(
                "min_years_on_staff",
                format!("must lie in 1..={}", self.window.len()),
            ));
        }
        if self.journals_per_sc == 0 {
            return Err(Error::config("journals_per_sc", "must be at least 1"));
        }
        for (field, p) in [
            ("multi_sc_probability", self.multi_sc_probability),
            ("missing_if_probability", self.missing_if_probability),
            ("journal_gap_probability", self.journal_gap_probability),
            ("intramural_probability", self.intramural_probability),
            ("coauthor_probability", self.coauthor_probability),
            ("short_tenure_probability", self.short_tenure_probability),
            ("inactive_probability", self.inactive_probability),
            ("off_staff_publication_probability", self.off_staff_publication_probability),
        ] {
            probability(field, p)?;
        }
        if self.max_publications_per_professor == Some(0) {
            return Err(Error::config("max_publications_per_professor", "must be at least 1"));
        }
        if self.countries.is_empty() {
            return Err(Error::config("countries", "at least one country is required"));
        }
        let mut seen = BTreeSet::new();
        for c in &self.countries {
            let field = |f: &str| format!("countries.{}.{f}", c.code);
            if !Country::is_valid_code(c.code.as_str()) {
                return Err(Error::config("countries.code", format!("invalid country code `{}`", c.code)));
            }
            if !seen.insert(&c.code) {
                return Err(Error::config("countries.code", format!("`{}` listed twice", c.code)));
            }
            for rank in Rank::ALL {
                let v = c.salary.get(&rank).copied().ok_or_else(|| {
                    Error::config(field(&format!("salary.{rank}")), "missing salary")
                })?;
                positive(&field(&format!("salary.{rank}")), v)?;
            }
            non_negative(&field("capital_default"), c.capital_default)?;
            for (d, v) in &c.capital {
                non_negative(&field(&format!("capital.{d}")), *v)?;
            }
        }
        if self.sc.is_empty() {
            return Err(Error::config("sc", "at least one SC profile is required"));
        }
        let mut codes = BTreeSet::new();
        let mut disciplines: BTreeMap<&ScCode, &Discipline> = BTreeMap::new();
        for s in &self.sc {
            let field = |f: &str| format!("sc.{}.{f}", s.code);
            if s.code.as_str().trim().is_empty() {
                return Err(Error::config("sc.code", "empty SC code"));
            }
            if !codes.insert(&s.code) {
                return Err(Error::config("sc.code", format!("`{}` listed twice", s.code)));
            }
            disciplines.insert(&s.code, &s.discipline);
            positive(&field("weight"), s.weight)?;
            positive(&field("publication_rate"), s.publication_rate)?;
            positive(&field("publication_dispersion"), s.publication_dispersion)?;
            non_negative(&field("citation_sigma"), s.citation_sigma)?;
            non_negative(&field("impact_sigma"), s.impact_sigma)?;
            if !(s.citation_mu.is_finite() && s.impact_mu.is_finite()) {
                return Err(Error::config(field("citation_mu"), "must be finite"));
            }
            if !(s.mean_authors.is_finite() && (1.0..=200.0).contains(&s.mean_authors)) {
                return Err(Error::config(field("mean_authors"), "must lie in [1, 200]"));
            }
        }
        let guaranteed: usize = self.sc.iter().map(|s| self.sc_minimum(s)).sum();
        let total: usize = self.countries.iter().map(|c| c.professors).sum();
        if total < guaranteed {
            return Err(Error::config(
                "min_professors_per_sc",
                format!("{guaranteed} guaranteed professors but only {total} in total"),
            ));
        }
        Ok(())
    }

    fn sc_minimum(&self, s: &ScProfile) -> usize {
        s.min_professors.unwrap_or(self.min_professors_per_sc)
    }

    fn base(seed: u64, countries: &[(&str, usize)], scs: Vec<ScProfile>) -> Self {
        let salary = |scale: f64| {
            Rank::ALL
                .into_iter()
                .zip([38_000.0, 52_000.0, 74_000.0])
                .map(|(r, s)| (r, s * scale))
                .collect()
        };
        Self {
            seed,
            window: ObservationWindow::default(),
            min_professors_per_sc: 10,
            min_years_on_staff: 3,
            journals_per_sc: 4,
            multi_sc_probability: 0.3,
            missing_if_probability: 0.05,
            journal_gap_probability: 0.02,
            intramural_probability: 0.4,
            coauthor_probability: 0.1,
            short_tenure_probability: 0.08,
            inactive_probability: 0.04,
            off_staff_publication_probability: 0.03,
            max_publications_per_professor: None,
            countries: countries
                .iter()
                .enumerate()
                .map(|(i, &(code, n))| CountryProfile {
                    code: code.into(),
                    professors: n,
                    salary: salary(1.0 + 0.06 * i as f64),
                    capital: BTreeMap::new(),
                    capital_default: 20_000.0 + 1_500.0 * i as f64,
                })
                .collect(),
            sc: scs,
        }
    }

    fn profiles(n: usize) -> Vec<ScProfile> {
        const SCS: [(&str, &str); 12] = [
            ("MATHEMATICS", "Mathematics"),
            ("MATHEMATICS, APPLIED", "Mathematics"),
            ("MATHEMATICS, INTERDISCIPLINARY APPLICATIONS", "Mathematics"),
            ("PHYSICS, APPLIED", "Physics"),
            ("OPTICS", "Physics"),
            ("CHEMISTRY, PHYSICAL", "Chemistry"),
            ("CHEMISTRY, ORGANIC", "Chemistry"),
            ("BIOCHEMISTRY & MOLECULAR BIOLOGY", "Biology"),
            ("CELL BIOLOGY", "Biology"),
            ("ONCOLOGY", "Clinical medicine"),
            ("COMPUTER SCIENCE, THEORY & METHODS", "Computer science"),
            ("ENGINEERING, CIVIL", "Civil engineering"),
        ];
        (0..n)
            .map(|i| {
                let (code, discipline) = SCS[i % SCS.len()];
                let code = if i < SCS.len() { code.to_string() } else { format!("{code} {}", i / SCS.len()) };
                let f = i as f64;
                ScProfile {
                    code: ScCode::new(code),
                    discipline: discipline.into(),
                    weight: 1.0 + (i % 3) as f64,
                    min_professors: None,
                    publication_rate: 0.6 + 0.25 * (i % 5) as f64,
                    publication_dispersion: 2.0,
                    citation_mu: 1.0 + 0.15 * (f % 7.0),
                    citation_sigma: 1.1,
                    mean_authors: 2.0 + (i % 4) as f64 * 1.5,
                    impact_mu: 0.3 + 0.1 * (f % 4.0),
                    impact_sigma: 0.5,
                    regime: None,
                }
            })
            .collect()
    }

    /// At most 50 professors and 200 publications over three SCs, one of
    /// them position-weighted.
    pub fn small(seed: u64) -> Self {
        let mut scs = Self::profiles(9);
        scs.retain(|s| ["MATHEMATICS", "OPTICS", "CELL BIOLOGY"].contains(&s.code.as_str()));
        let mut cfg = Self::base(seed, &[("IT", 22), ("NO", 18)], scs);
        cfg.max_publications_per_professor = Some(5);
        cfg.coauthor_probability = 0.15;
        cfg
    }

    /// Twelve SCs and 1000 professors over two countries.
    pub fn standard(seed: u64) -> Self {
        Self::base(seed, &[("IT", 600), ("NO", 400)], Self::profiles(12))
    }

    /// Roughly 40 000 professors and 500 000 publications.
    pub fn large(seed: u64) -> Self {
        let mut cfg = Self::base(seed, &[("IT", 24_000), ("NO", 16_000)], Self::profiles(180));
        for s in &mut cfg.sc {
            s.publication_rate *= 3.1;
        }
        cfg.journals_per_sc = 6;
        cfg
    }
}

struct Slot {
    country: usize,
    sc: usize,
    core: bool,
}

/// Home SC of every professor, per country in id order. The first
/// `minimum` professors of each SC are drawn round-robin across countries
/// and form the guaranteed core.
fn assign_homes(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Vec<Slot> {
    let mut order = Vec::new();
    let mut remaining: Vec<usize> = cfg.countries.iter().map(|c| c.professors).collect();
    while remaining.iter().any(|&r| r > 0) {
        for (ci, r) in remaining.iter_mut().enumerate() {
            if *r > 0 {
                order.push(ci);
                *r -= 1;
            }
        }
    }
    let mut quota: Vec<usize> = cfg.sc.iter().map(|s| cfg.sc_minimum(s)).collect();
    let total_weight: f64 = cfg.sc.iter().map(|s| s.weight).sum();
    // one core professor per country before moving to the next SC
    let countries = cfg.countries.iter().filter(|c| c.professors > 0).count().max(1);
    let mut forced_count = 0;
    let mut slots = Vec::with_capacity(order.len());
    for country in order {
        let start = (forced_count / countries) % quota.len();
        let forced = (0..quota.len()).map(|k| (start + k) % quota.len()).find(|&s| quota[s] > 0);
        let slot = match forced {
            Some(sc) => {
                quota[sc] -= 1;
                forced_count += 1;
                Slot { country, sc, core: true }
            }
            None => {
                let mut x = rng.random::<f64>() * total_weight;
                let mut sc = cfg.sc.len() - 1;
                for (i, s) in cfg.sc.iter().enumerate() {
                    if x < s.weight {
                        sc = i;
                        break;
                    }
                    x -= s.weight;
                }
                Slot { country, sc, core: false }
            }
        };
        slots.push(slot);
    }
    slots.sort_by_key(|s| s.country);
    slots
}

fn negative_binomial(rng: &mut ChaCha8Rng, mean: f64, shape: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let lambda = Gamma::new(shape, mean / shape).expect("valid gamma").sample(rng);
    if lambda <= 0.0 {
        return 0;
    }
    Poisson::new(lambda).map(|p| p.sample(rng) as usize).unwrap_or(0)
}

fn poisson(rng: &mut ChaCha8Rng, lambda: f64) -> u32 {
    if lambda <= 0.0 {
        return 0;
    }
    Poisson::new(lambda).map(|p| p.sample(rng) as u32).unwrap_or(0)
}

/// Generates a dataset. The same config always yields the same bundle.
pub fn generate(cfg: &SynthConfig) -> Result<DatasetBundle> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let window = cfg.window;
    let years: Vec<Year> = window.years().collect();
    for c in cfg.countries.iter().filter(|c| c.professors == 0) {
        log::warn!("country {} has no professors and will be absent from outputs", c.code);
    }

    // Journals: the first journal of each SC carries that SC alone.
    let mut journals = Vec::new();
    let mut sc_journals: Vec<Vec<String>> = vec![Vec::new(); cfg.sc.len()];
    for (si, s) in cfg.sc.iter().enumerate() {
        let impact = LogNormal::new(s.impact_mu, s.impact_sigma).map_err(|e| Error::config(format!("sc.{}.impact_sigma", s.code), e.to_string()))?;
        for k in 0..cfg.journals_per_sc {
            let id = format!("J{si:04}{k:02}");
            let mut scs = vec![s.code.clone()];
            if k > 0 && cfg.sc.len() > 1 && rng.random_bool(cfg.multi_sc_probability) {
                let other = (si + rng.random_range(1..cfg.sc.len())) % cfg.sc.len();
                scs.push(cfg.sc[other].code.clone());
            }
            let mut kept = 0;
            for (yi, &year) in years.iter().enumerate() {
                let last = yi + 1 == years.len();
                if !(last && kept == 0) && rng.random_bool(cfg.journal_gap_probability) {
                    continue;
                }
                kept += 1;
                let impact_factor = if rng.random_bool(cfg.missing_if_probability) {
                    None
                } else {
                    Some((impact.sample(&mut rng) * 1000.0).round() / 1000.0)
                };
                journals.push(JournalRecord {
                    journal_id: id.as_str().into(),
                    year,
                    impact_factor,
                    subject_categories: scs.clone(),
                });
            }
            sc_journals[si].push(id);
        }
    }

    // Professors.
    let slots = assign_homes(cfg, &mut rng);
    let window_len = window.len() as u32;
    let mut professors = Vec::with_capacity(slots.len());
    let mut active = Vec::with_capacity(slots.len());
    let mut counters = vec![0usize; cfg.countries.len()];
    for slot in &slots {
        let country = &cfg.countries[slot.country];
        counters[slot.country] += 1;
        let short = !slot.core && cfg.min_years_on_staff > 1 && rng.random_bool(cfg.short_tenure_probability);
        let t = if short {
            rng.random_range(1..cfg.min_years_on_staff)
        } else {
            rng.random_range(cfg.min_years_on_staff..=window_len)
        };
        let start = window.first + rng.random_range(0..=(window_len - t)) as Year;
        let mut rank = Rank::ALL[rng.random_range(0..3)];
        let mut rank_by_year = BTreeMap::new();
        for year in start..start + t as Year {
            if rank != Rank::Full && rng.random_bool(0.08) {
                rank = if rank == Rank::Assistant { Rank::Associate } else { Rank::Full };
            }
            rank_by_year.insert(year, rank);
        }
        professors.push(ProfessorRecord {
            professor_id: format!("{}{:06}", country.code, counters[slot.country]).as_str().into(),
            country: country.code.clone(),
            gender: if rng.random_bool(0.5) { Gender::F } else { Gender::M },
            rank_by_year,
            years_on_staff: t,
        });
        active.push(slot.core || !rng.random_bool(cfg.inactive_probability));
    }

    // Registered co-author candidates per SC.
    let mut by_sc: Vec<Vec<usize>> = vec![Vec::new(); cfg.sc.len()];
    for (pi, slot) in slots.iter().enumerate() {
        if active[pi] {
            by_sc[slot.sc].push(pi);
        }
    }

    let mut publications = Vec::new();
    let mut authorships = Vec::new();
    for (pi, slot) in slots.iter().enumerate() {
        if !active[pi] {
            continue;
        }
        let s = &cfg.sc[slot.sc];
        let prof = &professors[pi];
        let staffed: Vec<Year> = prof.rank_by_year.keys().copied().collect();
        let mut n = negative_binomial(&mut rng, s.publication_rate * staffed.len() as f64, s.publication_dispersion).max(1);
        if let Some(cap) = cfg.max_publications_per_professor {
            n = n.min(cap);
        }
        let citations = LogNormal::new(s.citation_mu, s.citation_sigma).map_err(|e| Error::config(format!("sc.{}.citation_sigma", s.code), e.to_string()))?;
        for k in 0..n {
            let year = if rng.random_bool(cfg.off_staff_publication_probability) {
                *years.choose(&mut rng).expect("non-empty window")
            } else {
                *staffed.choose(&mut rng).expect("rank history")
            };
            let journal = if k == 0 {
                sc_journals[slot.sc][0].clone()
            } else {
                sc_journals[slot.sc].choose(&mut rng).expect("journals").clone()
            };
            let total_authors = (1 + poisson(&mut rng, s.mean_authors - 1.0)).min(200);
            let affiliation_count = if rng.random_bool(cfg.intramural_probability) {
                1
            } else {
                2 + poisson(&mut rng, 1.0)
            };
            let pub_id = format!("P{:08}", publications.len() + 1);
            let position = rng.random_range(1..=total_authors);
            authorships.push(AuthorshipRecord {
                pub_id: pub_id.as_str().into(),
                professor_id: prof.professor_id.clone(),
                position,
            });
            if total_authors > 1 && rng.random_bool(cfg.coauthor_probability) {
                let peers = &by_sc[slot.sc];
                let other = peers[rng.random_range(0..peers.len())];
                if other != pi {
                    let mut p2 = rng.random_range(1..total_authors);
                    if p2 >= position {
                        p2 += 1;
                    }
                    authorships.push(AuthorshipRecord {
                        pub_id: pub_id.as_str().into(),
                        professor_id: professors[other].professor_id.clone(),
                        position: p2,
                    });
                }
            }
            publications.push(PublicationRecord {
                pub_id: pub_id.as_str().into(),
                year,
                journal_id: journal.as_str().into(),
                citations: citations.sample(&mut rng).floor() as u64,
                total_authors,
                affiliation_count,
            });
        }
    }

    let mut costs = CostTable::default();
    let disciplines: BTreeSet<&Discipline> = cfg.sc.iter().map(|s| &s.discipline).collect();
    for c in &cfg.countries {
        for (&rank, &salary) in &c.salary {
            costs.salary.insert((c.code.clone(), rank), salary);
        }
        for &d in &disciplines {
            let capital = c.capital.get(d).copied().unwrap_or(c.capital_default);
            costs.capital.insert((c.code.clone(), d.clone()), capital);
        }
    }
    let scmap = ScMap {
        entries: cfg
            .sc
            .iter()
            .map(|s| {
                let regime = s.regime.unwrap_or_else(|| CreditRegime::default_for(&s.discipline));
                (s.code.clone(), ScEntry { discipline: s.discipline.clone(), regime })
            })
            .collect(),
    };

    let mut bundle = DatasetBundle {
        professors,
        publications,
        authorships,
        journals,
        costs,
        scmap,
    };
    bundle.canonicalize();
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohort::{apply_eligibility_filters, build_candidates, sc_country_sizes, Corpus};
    use crate::config::AnalysisConfig;
    use crate::ingest::load_dataset;
    use crate::validate::validate_dataset;

    #[test]
    fn deterministic_for_a_seed() {
        let a = generate(&SynthConfig::small(42)).unwrap();
        let b = generate(&SynthConfig::small(42)).unwrap();
        let c = generate(&SynthConfig::small(43)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn small_respects_oracle_limits() {
        for seed in 0..20 {
            let b = generate(&SynthConfig::small(seed)).unwrap();
            assert!(b.professors.len() <= 50);
            assert!(b.publications.len() <= 200, "{}", b.publications.len());
        }
    }

    #[test]
    fn written_dataset_validates() {
        let bundle = generate(&SynthConfig::standard(1)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = bundle.write_dir(dir.path()).unwrap();
        let cfg = AnalysisConfig::default();
        let loaded = load_dataset(&paths, cfg.observation_window).unwrap();
        let report = validate_dataset(&loaded, &cfg);
        assert!(report.valid, "{:?}", report.fatal_issues().collect::<Vec<_>>());
        assert_eq!(loaded.bundle, bundle);
    }

    #[test]
    fn every_sc_meets_its_minimum() {
        let cfg = SynthConfig::standard(9);
        let bundle = generate(&cfg).unwrap();
        let corpus = Corpus::build(&bundle).unwrap();
        let cohort = apply_eligibility_filters(&build_candidates(&corpus, &bundle.scmap), &AnalysisConfig::default());
        let mut per_sc: BTreeMap<ScCode, usize> = BTreeMap::new();
        for ((sc, _), n) in sc_country_sizes(&cohort) {
            *per_sc.entry(sc).or_default() += n;
        }
        assert_eq!(per_sc.len(), 12);
        assert!(per_sc.values().all(|&n| n >= cfg.min_professors_per_sc), "{per_sc:?}");
    }

    #[test]
    fn citations_are_right_skewed() {
        let bundle = generate(&SynthConfig::standard(4)).unwrap();
        let mut by_journal_sc: BTreeMap<&str, Vec<u64>> = BTreeMap::new();
        for p in &bundle.publications {
            by_journal_sc.entry(&p.journal_id.as_str()[..5]).or_default().push(p.citations);
        }
        for (_, mut c) in by_journal_sc.into_iter().filter(|(_, c)| c.len() >= 200) {
            c.sort_unstable();
            let mean = c.iter().sum::<u64>() as f64 / c.len() as f64;
            assert!(mean > c[c.len() / 2] as f64);
        }
    }

    #[test]
    fn invalid_config_names_the_field() {
        let mut cfg = SynthConfig::small(1);
        cfg.sc[0].publication_rate = -1.0;
        match generate(&cfg) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "sc.MATHEMATICS.publication_rate"),
            other => panic!("unexpected {other:?}"),
        }
        let mut cfg = SynthConfig::small(1);
        cfg.coauthor_probability = 1.5;
        assert!(matches!(generate(&cfg), Err(Error::Config { field, .. }) if field == "coauthor_probability"));
    }

    #[test]
    fn empty_country_is_absent() {
        let mut cfg = SynthConfig::small(1);
        cfg.countries[1].professors = 0;
        cfg.countries[0].professors = 40;
        let b = generate(&cfg).unwrap();
        assert!(b.professors.iter().all(|p| p.country.as_str() == "IT"));
    }

    #[test]
    fn config_parses_from_toml() {
        let cfg = SynthConfig::small(5);
        let text = toml::to_string(&cfg).unwrap();
        let back: SynthConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }
}
