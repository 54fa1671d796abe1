//! End-to-end computation: cohort, baselines, per-professor indicators and
//! the report bundle.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::analytics::{build_report, normalize_within_sc, NormalizedScores, ReportBundle, ScoredProfessor};
use crate::baselines::{build_baselines, standardize_citations, standardize_if, BaselineTable, Observation};
use crate::cohort::{apply_eligibility_filters, build_candidates, Cohort, Corpus};
use crate::config::{AnalysisConfig, ReportConfig};
use crate::credit::{detect_regime, fractional_contribution};
use crate::error::{Error, Result};
use crate::indicators::{compute_indicators, research_cost, CostProfile, IndicatorVector, PublicationTerm};
use crate::ingest::{load_dataset, Country, DatasetBundle, DatasetPaths, Discipline, ProfessorId, ScCode, ValidationReport};
use crate::numfmt::sig10;
use crate::scalar::Real;
use crate::validate::validate_dataset;

/// Indicators of one eligible professor.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfessorResult<T> {
    pub professor_id: ProfessorId,
    pub country: Country,
    pub sc: ScCode,
    pub discipline: Discipline,
    pub years_on_staff: u32,
    pub cost: CostProfile<T>,
    pub indicators: IndicatorVector<T>,
}

impl<T: Real> ProfessorResult<T> {
    pub fn scored(&self) -> ScoredProfessor<T> {
        let v = &self.indicators;
        ScoredProfessor {
            professor_id: self.professor_id.clone(),
            country: self.country.clone(),
            sc: self.sc.clone(),
            discipline: self.discipline.clone(),
            values: [Some(v.o), Some(v.fo), v.ac, v.aif, Some(v.fss)],
        }
    }
}

#[derive(Debug, Clone)]
pub struct ComputeOutput<T> {
    pub cohort: Cohort,
    pub baselines: BaselineTable<T>,
    /// Eligible professors, sorted by id.
    pub results: Vec<ProfessorResult<T>>,
}

impl<T: Real> ComputeOutput<T> {
    pub fn raw_scores(&self) -> Vec<ScoredProfessor<T>> {
        self.results.iter().map(ProfessorResult::scored).collect()
    }

    pub fn normalized(&self) -> NormalizedScores<T> {
        normalize_within_sc(&self.raw_scores())
    }

    pub fn report(&self, config: &ReportConfig) -> Result<ReportBundle<T>> {
        build_report(&self.normalized(), config)
    }
}

/// Loads and validates a dataset. Fatal issues become [`Error::Invalid`].
pub fn load_validated(paths: &DatasetPaths, config: &AnalysisConfig) -> Result<(DatasetBundle, ValidationReport)> {
    let loaded = load_dataset(paths, config.observation_window)?;
    let report = validate_dataset(&loaded, config);
    if !report.valid {
        return Err(Error::Invalid(report.fatal_issues().cloned().collect()));
    }
    Ok((loaded.bundle, report))
}

fn log_cohort(cohort: &Cohort) {
    let mut by_country: BTreeMap<&Country, (usize, usize)> = BTreeMap::new();
    for a in &cohort.assignments {
        let e = by_country.entry(&a.candidate.country).or_default();
        e.0 += 1;
        e.1 += usize::from(a.eligible);
    }
    for (country, (total, eligible)) in by_country {
        log::info!("{country}: {total} professors, {eligible} in the cohort");
    }
    for (reason, n) in cohort.exclusion_counts() {
        log::info!("exclusion {}: {n}", reason.as_str());
    }
}

/// Computes raw indicators for every eligible professor of a validated
/// bundle. Professors are processed in parallel and collected in id order.
pub fn compute<T: Real>(bundle: &DatasetBundle, config: &AnalysisConfig) -> Result<ComputeOutput<T>> {
    config.validate()?;
    let corpus = Corpus::build(bundle)?;
    let cohort = apply_eligibility_filters(&build_candidates(&corpus, &bundle.scmap), config);
    log_cohort(&cohort);

    let observations: Vec<Observation<'_>> = corpus
        .pubs
        .iter()
        .map(|p| Observation {
            year: p.record.year,
            scs: &p.scs.scs,
            citations: p.record.citations,
            impact_factor: p.scs.impact_factor,
        })
        .collect();
    let baselines: BaselineTable<T> = build_baselines(&observations, &bundle.scmap);
    let standardized: Vec<(Option<T>, Option<T>)> = observations
        .par_iter()
        .map(|o| {
            (
                standardize_citations(o, &baselines, &bundle.scmap).value,
                standardize_if(o, &baselines, &bundle.scmap).value,
            )
        })
        .collect();

    let index: HashMap<&str, usize> = bundle
        .professors
        .iter()
        .enumerate()
        .map(|(i, p)| (p.professor_id.as_str(), i))
        .collect();
    let eligible: Vec<_> = cohort.eligible().collect();
    let results = eligible
        .par_iter()
        .map(|a| {
            let c = &a.candidate;
            let idx = index[c.professor_id.as_str()];
            let prof = &bundle.professors[idx];
            let sc = c.assigned_sc.clone().expect("eligible professors have an SC");
            let discipline = c
                .discipline
                .clone()
                .ok_or_else(|| Error::UnknownSc(sc.to_string()))?;
            let regime = detect_regime(&sc, &bundle.scmap)?;
            let portfolio = &corpus.portfolios[idx];
            let cost: CostProfile<T> = research_cost(
                prof,
                portfolio.iter().map(|&(pi, _)| corpus.pubs[pi].record.year),
                &discipline,
                &bundle.costs,
            )?;
            let terms = portfolio
                .iter()
                .map(|&(pi, position)| {
                    let r = corpus.pubs[pi].record;
                    Ok(PublicationTerm {
                        credit: fractional_contribution(
                            position,
                            r.total_authors,
                            r.affiliation_count,
                            regime,
                            &config.credit,
                        )?,
                        citations: standardized[pi].0,
                        impact: standardized[pi].1,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let indicators = compute_indicators(&terms, prof.years_on_staff, cost.research_cost)
                .map_err(|e| match e {
                    Error::ZeroYears(_) => Error::ZeroYears(c.professor_id.to_string()),
                    other => other,
                })?;
            Ok(ProfessorResult {
                professor_id: c.professor_id.clone(),
                country: c.country.clone(),
                sc,
                discipline,
                years_on_staff: prof.years_on_staff,
                cost,
                indicators,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComputeOutput {
        cohort,
        baselines,
        results,
    })
}

/// Runs `f` on a pool of `threads` workers; 0 uses the global pool.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    Ok(pool.install(f))
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn csv_err(file: &str) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        file: file.to_string(),
        source,
    }
}

pub const INDICATORS_HEADER: [&str; 12] = [
    "professor_id",
    "country",
    "sc",
    "discipline",
    "t",
    "cost_eur",
    "N",
    "O_raw",
    "FO_raw",
    "AC_raw",
    "AIF_raw",
    "FSS_raw",
];

/// Writes `indicators.csv`, one row per eligible professor in id order.
pub fn write_indicators<T: Real, W: Write>(results: &[ProfessorResult<T>], out: W) -> Result<()> {
    let err = csv_err("indicators.csv");
    let mut w = csv_writer(out);
    w.write_record(INDICATORS_HEADER).map_err(&err)?;
    let opt = |v: Option<T>| v.map(|x| sig10(x.as_f64())).unwrap_or_default();
    for r in results {
        let v = &r.indicators;
        w.write_record([
            r.professor_id.to_string(),
            r.country.to_string(),
            r.sc.to_string(),
            r.discipline.to_string(),
            r.years_on_staff.to_string(),
            sig10(r.cost.research_cost.as_f64()),
            v.publication_count.to_string(),
            sig10(v.o.as_f64()),
            sig10(v.fo.as_f64()),
            opt(v.ac),
            opt(v.aif),
            sig10(v.fss.as_f64()),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| err(e.into()))?;
    Ok(())
}

/// Writes `cohort.csv`: every professor with its eligibility outcome.
pub fn write_cohort<W: Write>(cohort: &Cohort, out: W) -> Result<()> {
    let err = csv_err("cohort.csv");
    let mut w = csv_writer(out);
    w.write_record([
        "professor_id",
        "country",
        "years_on_staff",
        "publication_count",
        "assigned_sc",
        "discipline",
        "eligible",
        "exclusion_reason",
    ])
    .map_err(&err)?;
    for a in &cohort.assignments {
        let c = &a.candidate;
        w.write_record([
            c.professor_id.to_string(),
            c.country.to_string(),
            c.years_on_staff.to_string(),
            c.publication_count.to_string(),
            c.assigned_sc.as_ref().map(ToString::to_string).unwrap_or_default(),
            c.discipline.as_ref().map(ToString::to_string).unwrap_or_default(),
            a.eligible.to_string(),
            a.exclusion_reason.as_str().to_string(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| err(e.into()))?;
    Ok(())
}

/// Creates `path` (and its parent directory) for buffered writing.
pub fn create_file(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, SynthConfig};

    #[test]
    fn results_sorted_and_deterministic_across_pools() {
        let bundle = generate(&SynthConfig::small(3)).unwrap();
        let cfg = AnalysisConfig::default();
        let render = |threads| {
            with_threads(threads, || {
                let out = compute::<f64>(&bundle, &cfg).unwrap();
                let mut buf = Vec::new();
                write_indicators(&out.results, &mut buf).unwrap();
                buf
            })
            .unwrap()
        };
        let one = render(1);
        assert_eq!(one, render(4));
        let text = String::from_utf8(one).unwrap();
        let ids: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
        assert!(!ids.is_empty());
    }

    #[test]
    fn f32_pipeline_tracks_f64() {
        let bundle = generate(&SynthConfig::small(5)).unwrap();
        let cfg = AnalysisConfig::default();
        let a = compute::<f64>(&bundle, &cfg).unwrap();
        let b = compute::<f32>(&bundle, &cfg).unwrap();
        assert_eq!(a.results.len(), b.results.len());
        for (x, y) in a.results.iter().zip(&b.results) {
            let rel = (x.indicators.fss - y.indicators.fss as f64).abs() / x.indicators.fss.abs().max(1e-300);
            assert!(rel < 1e-4 || x.indicators.fss == 0.0);
        }
    }
}
