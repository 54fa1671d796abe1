use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use super::records::*;
use super::Issue;
use crate::error::{Error, Result};

/// Parser output: the accepted records, every issue found, and the keys of
/// rows that were rejected.
#[derive(Debug, Clone, Default)]
pub struct Parsed<T> {
    pub records: T,
    pub issues: Vec<Issue>,
    pub rejected: BTreeSet<String>,
}

impl<T> Parsed<T> {
    pub fn has_fatal(&self) -> bool {
        self.issues.iter().any(Issue::is_fatal)
    }
}

struct Table<R: Read> {
    file: String,
    reader: csv::Reader<R>,
    columns: HashMap<String, usize>,
}

struct Row {
    line: u64,
    record: csv::StringRecord,
}

impl<R: Read> Table<R> {
    fn open(reader: R, file: &str, required: &[&str]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = reader
            .headers()
            .map_err(|source| Error::Csv {
                file: file.to_string(),
                source,
            })?
            .clone();
        if headers.iter().all(str::is_empty) {
            return Err(Error::Schema {
                file: file.to_string(),
                line: 1,
                message: "empty file: header row missing".into(),
            });
        }
        let columns: HashMap<String, usize> = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim_start_matches('\u{feff}').to_string(), i))
            .collect();
        for col in required {
            if !columns.contains_key(*col) {
                return Err(Error::Schema {
                    file: file.to_string(),
                    line: 1,
                    message: format!(
                        "missing required column `{col}` (expected header `{}`)",
                        required.join(",")
                    ),
                });
            }
        }
        Ok(Self {
            file: file.to_string(),
            reader,
            columns,
        })
    }

    fn col(&self, name: &str) -> Option<usize> {
        self.columns.get(name).copied()
    }

    fn rows(&mut self) -> impl Iterator<Item = Result<Row>> + '_ {
        let file = self.file.clone();
        self.reader.records().map(move |r| {
            let record = r.map_err(|source| Error::Csv {
                file: file.clone(),
                source,
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            Ok(Row { line, record })
        })
    }
}

impl Row {
    fn get(&self, idx: usize) -> &str {
        self.record.get(idx).unwrap_or("")
    }

    fn opt(&self, idx: Option<usize>) -> Option<&str> {
        idx.map(|i| self.get(i)).filter(|s| !s.is_empty())
    }
}

fn open_file(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

fn name_of(path: &Path) -> String {
    path.display().to_string()
}

/// Parses `personnel.csv`.
pub fn parse_personnel(path: &Path, window: ObservationWindow) -> Result<Parsed<Vec<ProfessorRecord>>> {
    parse_personnel_from(open_file(path)?, &name_of(path), window)
}

pub fn parse_personnel_from<R: Read>(
    reader: R,
    file: &str,
    window: ObservationWindow,
) -> Result<Parsed<Vec<ProfessorRecord>>> {
    const COLS: [&str; 5] = [
        "professor_id",
        "country",
        "gender",
        "rank_by_year",
        "years_on_staff",
    ];
    let mut table = Table::open(reader, file, &COLS)?;
    let idx: Vec<usize> = COLS.iter().map(|c| table.col(c).unwrap()).collect();
    let mut out = Parsed::<Vec<ProfessorRecord>>::default();
    let mut seen: HashSet<String> = HashSet::new();
    for row in table.rows() {
        let row = row?;
        let line = Some(row.line);
        let id = row.get(idx[0]).to_string();
        if id.is_empty() {
            out.issues
                .push(Issue::error(file, line, "invalid-field", "empty professor_id; row excluded"));
            continue;
        }
        if !seen.insert(id.clone()) {
            out.issues.push(Issue::fatal(
                file,
                line,
                "duplicate-professor-id",
                format!("duplicate professor_id `{id}`"),
            ));
            continue;
        }
        let reject = |out: &mut Parsed<Vec<ProfessorRecord>>, rule: &str, msg: String| {
            out.issues
                .push(Issue::error(file, line, rule, format!("{msg}; row `{id}` excluded")));
            out.rejected.insert(id.clone());
        };
        let country = row.get(idx[1]);
        if !Country::is_valid_code(country) {
            reject(&mut out, "invalid-country", format!("invalid country code `{country}`"));
            continue;
        }
        let gender = match row.get(idx[2]).parse::<Gender>() {
            Ok(g) => g,
            Err(msg) => {
                reject(&mut out, "unknown-gender", msg);
                continue;
            }
        };
        let ranks = match parse_rank_history(row.get(idx[3]), window) {
            Ok(r) => r,
            Err((rule, msg)) => {
                reject(&mut out, rule, msg);
                continue;
            }
        };
        let years = match row.get(idx[4]).parse::<u32>() {
            Ok(t) if t >= 1 => t,
            _ => {
                reject(
                    &mut out,
                    "invalid-years-on-staff",
                    format!("years_on_staff `{}` must be an integer >= 1", row.get(idx[4])),
                );
                continue;
            }
        };
        out.records.push(ProfessorRecord {
            professor_id: ProfessorId(id.clone()),
            country: Country::new(country),
            gender,
            rank_by_year: ranks,
            years_on_staff: years,
        });
    }
    out.records.sort_by(|a, b| a.professor_id.cmp(&b.professor_id));
    Ok(out)
}

fn parse_rank_history(
    field: &str,
    window: ObservationWindow,
) -> std::result::Result<BTreeMap<Year, Rank>, (&'static str, String)> {
    let mut ranks = BTreeMap::new();
    for pair in field.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (year, rank) = pair
            .split_once(':')
            .ok_or(("invalid-rank-history", format!("malformed year:rank pair `{pair}`")))?;
        let year: Year = year
            .trim()
            .parse()
            .map_err(|_| ("invalid-rank-history", format!("invalid year in `{pair}`")))?;
        if !window.contains(year) {
            return Err((
                "rank-year-outside-window",
                format!("rank year {year} outside observation window {}-{}", window.first, window.last),
            ));
        }
        let rank: Rank = rank.parse().map_err(|m: String| ("unknown-rank", m))?;
        if ranks.insert(year, rank).is_some() {
            return Err(("invalid-rank-history", format!("year {year} listed twice")));
        }
    }
    if ranks.is_empty() {
        return Err(("missing-rank-history", "rank_by_year is empty".into()));
    }
    Ok(ranks)
}

/// Parses `journals.csv`.
pub fn parse_journals(path: &Path) -> Result<Parsed<Vec<JournalRecord>>> {
    parse_journals_from(open_file(path)?, &name_of(path))
}

pub fn parse_journals_from<R: Read>(reader: R, file: &str) -> Result<Parsed<Vec<JournalRecord>>> {
    const COLS: [&str; 4] = ["journal_id", "year", "impact_factor", "subject_categories"];
    let mut table = Table::open(reader, file, &COLS)?;
    let idx: Vec<usize> = COLS.iter().map(|c| table.col(c).unwrap()).collect();
    let mut out = Parsed::<Vec<JournalRecord>>::default();
    let mut seen = HashSet::new();
    for row in table.rows() {
        let row = row?;
        let line = Some(row.line);
        let id = row.get(idx[0]);
        let Ok(year) = row.get(idx[1]).parse::<Year>() else {
            out.issues.push(Issue::fatal(
                file,
                line,
                "invalid-field",
                format!("journal `{id}`: invalid year `{}`", row.get(idx[1])),
            ));
            continue;
        };
        if !seen.insert((id.to_string(), year)) {
            out.issues.push(Issue::fatal(
                file,
                line,
                "duplicate-journal-year",
                format!("duplicate entry for journal `{id}` year {year}"),
            ));
            continue;
        }
        let impact_factor = match row.opt(Some(idx[2])) {
            None => None,
            Some(raw) => match raw.parse::<f64>() {
                Ok(v) if v.is_finite() && v >= 0.0 => Some(v),
                Ok(v) if v < 0.0 => {
                    out.issues.push(Issue::fatal(
                        file,
                        line,
                        "negative-impact-factor",
                        format!("journal `{id}` year {year}: negative impact factor {raw}"),
                    ));
                    continue;
                }
                _ => {
                    out.issues.push(Issue::fatal(
                        file,
                        line,
                        "invalid-field",
                        format!("journal `{id}` year {year}: invalid impact factor `{raw}`"),
                    ));
                    continue;
                }
            },
        };
        let scs: Vec<ScCode> = row
            .get(idx[3])
            .split('|')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(ScCode::from)
            .collect();
        if scs.is_empty() {
            out.issues.push(Issue::fatal(
                file,
                line,
                "empty-sc-list",
                format!("journal `{id}` year {year}: empty SC list"),
            ));
            continue;
        }
        out.records.push(JournalRecord {
            journal_id: JournalId::from(id),
            year,
            impact_factor,
            subject_categories: scs,
        });
    }
    out.records
        .sort_by(|a, b| (&a.journal_id, a.year).cmp(&(&b.journal_id, b.year)));
    Ok(out)
}

/// Parses `publications.csv` and `authorships.csv` against an already
/// loaded journal table.
pub fn parse_publications(
    publications: &Path,
    authorships: &Path,
    journals: &[JournalRecord],
    window: ObservationWindow,
) -> Result<Parsed<(Vec<PublicationRecord>, Vec<AuthorshipRecord>)>> {
    parse_publications_from(
        open_file(publications)?,
        &name_of(publications),
        open_file(authorships)?,
        &name_of(authorships),
        journals,
        window,
    )
}

pub fn parse_publications_from<R1: Read, R2: Read>(
    pub_reader: R1,
    pub_file: &str,
    auth_reader: R2,
    auth_file: &str,
    journals: &[JournalRecord],
    window: ObservationWindow,
) -> Result<Parsed<(Vec<PublicationRecord>, Vec<AuthorshipRecord>)>> {
    const PCOLS: [&str; 6] = [
        "pub_id",
        "year",
        "journal_id",
        "citations",
        "total_authors",
        "affiliation_count",
    ];
    const ACOLS: [&str; 3] = ["pub_id", "professor_id", "position"];
    let known_journals: HashSet<&str> = journals.iter().map(|j| j.journal_id.as_str()).collect();

    let mut out = Parsed::<(Vec<PublicationRecord>, Vec<AuthorshipRecord>)>::default();
    let mut pubs: Vec<PublicationRecord> = Vec::new();
    let mut seen = HashSet::new();
    {
        let mut table = Table::open(pub_reader, pub_file, &PCOLS)?;
        let idx: Vec<usize> = PCOLS.iter().map(|c| table.col(c).unwrap()).collect();
        for row in table.rows() {
            let row = row?;
            let line = Some(row.line);
            let id = row.get(idx[0]).to_string();
            let mut fatal = |rule: &str, msg: String| {
                out.issues
                    .push(Issue::fatal(pub_file, line, rule, format!("publication `{id}`: {msg}")));
            };
            if id.is_empty() {
                fatal("invalid-field", "empty pub_id".into());
                continue;
            }
            if !seen.insert(id.clone()) {
                fatal("duplicate-pub-id", "duplicate pub_id".into());
                continue;
            }
            let Ok(year) = row.get(idx[1]).parse::<Year>() else {
                fatal("invalid-field", format!("invalid year `{}`", row.get(idx[1])));
                continue;
            };
            let journal = row.get(idx[2]);
            if !known_journals.contains(journal) {
                fatal("unknown-journal", format!("unknown journal_id `{journal}`"));
                continue;
            }
            let citations = match row.get(idx[3]).parse::<i64>() {
                Ok(c) if c >= 0 => c as u64,
                Ok(c) => {
                    fatal("negative-citations", format!("negative citation count {c}"));
                    continue;
                }
                Err(_) => {
                    fatal("invalid-field", format!("invalid citation count `{}`", row.get(idx[3])));
                    continue;
                }
            };
            let total_authors = match row.get(idx[4]).parse::<u32>() {
                Ok(n) if n >= 1 => n,
                _ => {
                    fatal("invalid-total-authors", format!("total_authors `{}` must be >= 1", row.get(idx[4])));
                    continue;
                }
            };
            let affiliation_count = match row.get(idx[5]).parse::<u32>() {
                Ok(n) if n >= 1 => n,
                _ => {
                    fatal(
                        "invalid-affiliation-count",
                        format!("affiliation_count `{}` must be >= 1", row.get(idx[5])),
                    );
                    continue;
                }
            };
            if !window.contains(year) {
                out.issues.push(Issue::error(
                    pub_file,
                    line,
                    "year-outside-window",
                    format!(
                        "publication `{id}`: year {year} outside observation window {}-{}; row excluded",
                        window.first, window.last
                    ),
                ));
                out.rejected.insert(id);
                continue;
            }
            pubs.push(PublicationRecord {
                pub_id: PubId(id),
                year,
                journal_id: JournalId::from(journal),
                citations,
                total_authors,
                affiliation_count,
            });
        }
    }
    pubs.sort_by(|a, b| a.pub_id.cmp(&b.pub_id));
    let authors_of: HashMap<&str, u32> = pubs
        .iter()
        .map(|p| (p.pub_id.as_str(), p.total_authors))
        .collect();

    let mut auths = Vec::new();
    {
        let mut table = Table::open(auth_reader, auth_file, &ACOLS)?;
        let idx: Vec<usize> = ACOLS.iter().map(|c| table.col(c).unwrap()).collect();
        let mut pairs = HashSet::new();
        let mut slots = HashSet::new();
        for row in table.rows() {
            let row = row?;
            let line = Some(row.line);
            let pub_id = row.get(idx[0]);
            let prof = row.get(idx[1]);
            let mut fatal = |rule: &str, msg: String| {
                out.issues.push(Issue::fatal(
                    auth_file,
                    line,
                    rule,
                    format!("authorship `{pub_id}`/`{prof}`: {msg}"),
                ));
            };
            let Some(&total) = authors_of.get(pub_id) else {
                if !out.rejected.contains(pub_id) {
                    fatal("unknown-publication", format!("unknown pub_id `{pub_id}`"));
                }
                continue;
            };
            let Ok(position) = row.get(idx[2]).parse::<u32>() else {
                fatal("invalid-field", format!("invalid position `{}`", row.get(idx[2])));
                continue;
            };
            if position < 1 || position > total {
                fatal(
                    "position-out-of-range",
                    format!("position {position} outside 1..={total} (total_authors)"),
                );
                continue;
            }
            if prof.is_empty() {
                fatal("invalid-field", "empty professor_id".into());
                continue;
            }
            if !pairs.insert((pub_id.to_string(), prof.to_string())) {
                fatal("duplicate-authorship", "professor listed twice on the same publication".into());
                continue;
            }
            if !slots.insert((pub_id.to_string(), position)) {
                fatal("duplicate-position", format!("position {position} already taken"));
                continue;
            }
            auths.push(AuthorshipRecord {
                pub_id: PubId::from(pub_id),
                professor_id: ProfessorId::from(prof),
                position,
            });
        }
    }
    auths.sort_by(|a, b| (&a.pub_id, a.position).cmp(&(&b.pub_id, b.position)));
    out.records = (pubs, auths);
    Ok(out)
}

/// Parses salaries, capital and the SC map.
pub fn parse_cost_and_scmap(
    salaries: &Path,
    capital: &Path,
    scmap: &Path,
) -> Result<Parsed<(CostTable, ScMap)>> {
    let s = parse_salaries(open_file(salaries)?, &name_of(salaries))?;
    let c = parse_capital(open_file(capital)?, &name_of(capital))?;
    let m = parse_scmap(open_file(scmap)?, &name_of(scmap))?;
    let mut issues = s.issues;
    issues.extend(c.issues);
    issues.extend(m.issues);
    Ok(Parsed {
        records: (
            CostTable {
                salary: s.records,
                capital: c.records,
            },
            m.records,
        ),
        issues,
        rejected: BTreeSet::new(),
    })
}

fn parse_euros(raw: &str, allow_zero: bool) -> Option<f64> {
    let v: f64 = raw.parse().ok()?;
    let ok = v.is_finite() && if allow_zero { v >= 0.0 } else { v > 0.0 };
    ok.then_some(v)
}

pub fn parse_salaries<R: Read>(
    reader: R,
    file: &str,
) -> Result<Parsed<BTreeMap<(Country, Rank), f64>>> {
    const COLS: [&str; 3] = ["country", "rank", "yearly_salary_eur"];
    let mut table = Table::open(reader, file, &COLS)?;
    let idx: Vec<usize> = COLS.iter().map(|c| table.col(c).unwrap()).collect();
    let mut out = Parsed::<BTreeMap<(Country, Rank), f64>>::default();
    for row in table.rows() {
        let row = row?;
        let line = Some(row.line);
        let country = Country::from(row.get(idx[0]));
        let rank = match row.get(idx[1]).parse::<Rank>() {
            Ok(r) => r,
            Err(msg) => {
                out.issues.push(Issue::fatal(file, line, "unknown-rank", msg));
                continue;
            }
        };
        let Some(value) = parse_euros(row.get(idx[2]), false) else {
            out.issues.push(Issue::fatal(
                file,
                line,
                "non-positive-cost",
                format!("salary for ({country}, {rank}) must be a positive number, got `{}`", row.get(idx[2])),
            ));
            continue;
        };
        if out.records.insert((country.clone(), rank), value).is_some() {
            out.issues.push(Issue::fatal(
                file,
                line,
                "duplicate-cost-entry",
                format!("duplicate salary entry for ({country}, {rank})"),
            ));
        }
    }
    Ok(out)
}

/// Capital may be zero; salary may not.
pub fn parse_capital<R: Read>(
    reader: R,
    file: &str,
) -> Result<Parsed<BTreeMap<(Country, Discipline), f64>>> {
    const COLS: [&str; 3] = ["country", "discipline", "yearly_capital_eur"];
    let mut table = Table::open(reader, file, &COLS)?;
    let idx: Vec<usize> = COLS.iter().map(|c| table.col(c).unwrap()).collect();
    let mut out = Parsed::<BTreeMap<(Country, Discipline), f64>>::default();
    for row in table.rows() {
        let row = row?;
        let line = Some(row.line);
        let country = Country::from(row.get(idx[0]));
        let discipline = Discipline::from(row.get(idx[1]));
        let Some(value) = parse_euros(row.get(idx[2]), true) else {
            out.issues.push(Issue::fatal(
                file,
                line,
                "non-positive-cost",
                format!(
                    "capital for ({country}, {discipline}) must be a non-negative number, got `{}`",
                    row.get(idx[2])
                ),
            ));
            continue;
        };
        if out
            .records
            .insert((country.clone(), discipline.clone()), value)
            .is_some()
        {
            out.issues.push(Issue::fatal(
                file,
                line,
                "duplicate-cost-entry",
                format!("duplicate capital entry for ({country}, {discipline})"),
            ));
        }
    }
    Ok(out)
}

/// Parses `scmap.csv`. The optional `credit_regime` column applies to the
/// whole discipline; disciplines without one get [`CreditRegime::default_for`].
pub fn parse_scmap<R: Read>(reader: R, file: &str) -> Result<Parsed<ScMap>> {
    let mut table = Table::open(reader, file, &["sc", "discipline"])?;
    let sc_col = table.col("sc").unwrap();
    let disc_col = table.col("discipline").unwrap();
    let regime_col = table.col("credit_regime");
    let mut out = Parsed::<ScMap>::default();
    let mut disciplines: BTreeMap<ScCode, (Discipline, u64)> = BTreeMap::new();
    let mut explicit: BTreeMap<Discipline, (CreditRegime, u64)> = BTreeMap::new();
    for row in table.rows() {
        let row = row?;
        let line = Some(row.line);
        let sc = ScCode::from(row.get(sc_col));
        let discipline = Discipline::from(row.get(disc_col));
        if sc.as_str().is_empty() || discipline.as_str().is_empty() {
            out.issues.push(Issue::fatal(
                file,
                line,
                "invalid-field",
                "sc and discipline must be non-empty",
            ));
            continue;
        }
        if let Some(raw) = row.opt(regime_col) {
            match raw.parse::<CreditRegime>() {
                Ok(regime) => match explicit.get(&discipline) {
                    Some((prev, prev_line)) if *prev != regime => {
                        out.issues.push(Issue::fatal(
                            file,
                            line,
                            "regime-conflict",
                            format!(
                                "discipline `{discipline}` given regime {} here and {} on line {prev_line}",
                                regime.as_str(),
                                prev.as_str()
                            ),
                        ));
                    }
                    Some(_) => {}
                    None => {
                        explicit.insert(discipline.clone(), (regime, row.line));
                    }
                },
                Err(msg) => {
                    out.issues.push(Issue::fatal(file, line, "unknown-regime", msg));
                    continue;
                }
            }
        }
        match disciplines.get(&sc) {
            Some((prev, prev_line)) if *prev != discipline => {
                out.issues.push(Issue::fatal(
                    file,
                    line,
                    "sc-multiple-disciplines",
                    format!(
                        "SC `{sc}` mapped to `{discipline}` here and to `{prev}` on line {prev_line}"
                    ),
                ));
            }
            Some(_) => {
                out.issues.push(Issue::warning(
                    file,
                    line,
                    "duplicate-sc",
                    format!("SC `{sc}` listed twice"),
                ));
            }
            None => {
                disciplines.insert(sc, (discipline, row.line));
            }
        }
    }
    out.records.entries = disciplines
        .into_iter()
        .map(|(sc, (discipline, _))| {
            let regime = explicit
                .get(&discipline)
                .map(|(r, _)| *r)
                .unwrap_or_else(|| CreditRegime::default_for(&discipline));
            (sc, ScEntry { discipline, regime })
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const W: ObservationWindow = ObservationWindow {
        first: 2011,
        last: 2015,
    };

    fn personnel(body: &str) -> Parsed<Vec<ProfessorRecord>> {
        let text = format!("professor_id,country,gender,rank_by_year,years_on_staff\n{body}");
        parse_personnel_from(text.as_bytes(), "personnel.csv", W).unwrap()
    }

    fn journals(body: &str) -> Parsed<Vec<JournalRecord>> {
        let text = format!("journal_id,year,impact_factor,subject_categories\n{body}");
        parse_journals_from(text.as_bytes(), "journals.csv").unwrap()
    }

    fn publications(
        pubs: &str,
        auths: &str,
        journals: &[JournalRecord],
    ) -> Parsed<(Vec<PublicationRecord>, Vec<AuthorshipRecord>)> {
        let p = format!("pub_id,year,journal_id,citations,total_authors,affiliation_count\n{pubs}");
        let a = format!("pub_id,professor_id,position\n{auths}");
        parse_publications_from(
            p.as_bytes(),
            "publications.csv",
            a.as_bytes(),
            "authorships.csv",
            journals,
            W,
        )
        .unwrap()
    }

    #[test]
    fn personnel_row_maps_fields() {
        let out = personnel("P001,IT,F,2011:associate;2012:associate;2013:full,5\n");
        assert!(out.issues.is_empty());
        let p = &out.records[0];
        assert_eq!(p.professor_id.as_str(), "P001");
        assert_eq!(p.years_on_staff, 5);
        assert_eq!(p.gender, Gender::F);
        assert_eq!(p.rank_by_year[&2013], Rank::Full);
        assert_eq!(p.rank_by_year.len(), 3);
    }

    #[test]
    fn duplicate_professor_is_fatal_and_named() {
        let out = personnel("P001,IT,F,2011:full,5\nP001,NO,M,2011:full,5\n");
        let fatal: Vec<_> = out.issues.iter().filter(|i| i.is_fatal()).collect();
        assert_eq!(fatal.len(), 1);
        assert!(fatal[0].message.contains("P001"));
        assert_eq!(fatal[0].line, Some(3));
        assert_eq!(fatal[0].file, "personnel.csv");
        assert_eq!(fatal[0].rule, "duplicate-professor-id");
    }

    #[test]
    fn unknown_rank_excludes_row_and_continues() {
        let out = personnel("P001,IT,F,2011:adjunct,5\nP002,IT,M,2011:full,4\n");
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].professor_id.as_str(), "P002");
        assert!(!out.has_fatal());
        let issue = &out.issues[0];
        assert_eq!(issue.rule, "unknown-rank");
        assert!(issue.message.contains("unknown rank"));
        assert!(out.rejected.contains("P001"));
    }

    #[test]
    fn missing_column_is_schema_error() {
        let text = "professor_id,country,gender,years_on_staff\nP1,IT,F,3\n";
        let err = parse_personnel_from(text.as_bytes(), "personnel.csv", W).unwrap_err();
        assert!(matches!(err, Error::Schema { .. }));
        assert!(err.to_string().contains("rank_by_year"));
    }

    #[test]
    fn journal_rows() {
        let out = journals(
            "J9,2013,4.20,CHEMISTRY PHYSICAL|CHEMISTRY MULTIDISCIPLINARY\nJ8,2013,,MATHEMATICS\n",
        );
        assert!(out.issues.is_empty());
        let j9 = out.records.iter().find(|j| j.journal_id.as_str() == "J9").unwrap();
        assert_eq!(j9.subject_categories.len(), 2);
        assert_eq!(j9.impact_factor, Some(4.2));
        let j8 = out.records.iter().find(|j| j.journal_id.as_str() == "J8").unwrap();
        assert_eq!(j8.impact_factor, None);
    }

    #[test]
    fn journal_empty_sc_list_is_fatal() {
        let out = journals("J9,2013,4.20,\n");
        assert!(out.records.is_empty());
        assert!(out.issues[0].is_fatal());
        assert!(out.issues[0].message.contains("empty SC list"));
    }

    #[test]
    fn journal_negative_if_is_fatal() {
        let out = journals("J9,2013,-1,MATHEMATICS\n");
        assert_eq!(out.issues[0].rule, "negative-impact-factor");
    }

    #[test]
    fn publication_and_authorship_rows() {
        let j = journals("J9,2013,4.2,MATHEMATICS\n").records;
        let out = publications("W1,2013,J9,14,6,3\n", "W1,P001,1\n", &j);
        assert!(out.issues.is_empty());
        let (pubs, auths) = &out.records;
        assert_eq!(pubs[0].citations, 14);
        assert_eq!(pubs[0].total_authors, 6);
        assert_eq!(pubs[0].affiliation_count, 3);
        assert_eq!(auths[0].professor_id.as_str(), "P001");
        assert_eq!(auths[0].position, 1);
    }

    #[test]
    fn position_beyond_byline_is_fatal() {
        let j = journals("J9,2013,4.2,MATHEMATICS\n").records;
        let out = publications("W1,2013,J9,14,6,3\n", "W1,P002,7\n", &j);
        assert!(out.has_fatal());
        assert_eq!(out.issues[0].rule, "position-out-of-range");
        assert_eq!(out.issues[0].file, "authorships.csv");
        assert_eq!(out.issues[0].line, Some(2));
    }

    #[test]
    fn unknown_journal_and_negative_citations_are_fatal() {
        let j = journals("J9,2013,4.2,MATHEMATICS\n").records;
        let out = publications("W1,2013,J404,14,6,3\nW2,2013,J9,-3,1,1\n", "", &j);
        let rules: Vec<_> = out.issues.iter().map(|i| i.rule.as_str()).collect();
        assert_eq!(rules, ["unknown-journal", "negative-citations"]);
        assert!(out.issues.iter().all(Issue::is_fatal));
    }

    #[test]
    fn duplicate_authorship_keys_are_fatal() {
        let j = journals("J9,2013,4.2,MATHEMATICS\n").records;
        let out = publications(
            "W1,2013,J9,1,3,1\n",
            "W1,P1,1\nW1,P1,2\nW1,P2,1\n",
            &j,
        );
        let rules: Vec<_> = out.issues.iter().map(|i| i.rule.as_str()).collect();
        assert_eq!(rules, ["duplicate-authorship", "duplicate-position"]);
    }

    #[test]
    fn out_of_window_publication_is_dropped_with_its_authorships() {
        let j = journals("J9,2010,4.2,MATHEMATICS\n").records;
        let out = publications("W1,2010,J9,1,1,1\n", "W1,P1,1\n", &j);
        assert!(!out.has_fatal());
        assert!(out.records.0.is_empty());
        assert!(out.records.1.is_empty());
    }

    #[test]
    fn salary_and_scmap_rows() {
        let s = parse_salaries("country,rank,yearly_salary_eur\nIT,full,110000\n".as_bytes(), "s")
            .unwrap();
        assert_eq!(s.records[&(Country::from("IT"), Rank::Full)], 110000.0);

        let m = parse_scmap(
            "sc,discipline\nHEMATOLOGY,Clinical medicine\nALGEBRA,Mathematics\n".as_bytes(),
            "m",
        )
        .unwrap();
        assert!(m.issues.is_empty());
        assert_eq!(
            m.records.get(&"HEMATOLOGY".into()).unwrap().regime,
            CreditRegime::PositionWeighted
        );
        assert_eq!(
            m.records.get(&"ALGEBRA".into()).unwrap().regime,
            CreditRegime::Uniform
        );
    }

    #[test]
    fn sc_in_two_disciplines_is_fatal() {
        let m = parse_scmap(
            "sc,discipline\nACOUSTICS,Physics\nACOUSTICS,Engineering\n".as_bytes(),
            "scmap.csv",
        )
        .unwrap();
        assert!(m.has_fatal());
        assert_eq!(m.issues[0].rule, "sc-multiple-disciplines");
        assert!(m.issues[0].message.contains("ACOUSTICS"));
    }

    #[test]
    fn explicit_regime_overrides_default() {
        let m = parse_scmap(
            "sc,discipline,credit_regime\nALGEBRA,Mathematics,position_weighted\nTOPOLOGY,Mathematics,\n"
                .as_bytes(),
            "m",
        )
        .unwrap();
        assert!(m.issues.is_empty());
        assert!(m
            .records
            .entries
            .values()
            .all(|e| e.regime == CreditRegime::PositionWeighted));
    }
}
