//! Serializers producing the same CSV layouts the parsers read.

use std::io::Write;

use super::records::*;
use crate::error::{Error, Result};

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn csv_err(file: &str) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        file: file.to_string(),
        source,
    }
}

fn finish<W: Write>(mut w: csv::Writer<W>, file: &str) -> Result<()> {
    w.flush().map_err(|e| Error::io(file, e))
}

/// Integral amounts are written without a fractional part.
fn euros(value: f64) -> String {
    if value.fract() == 0.0 && value.abs() < 1e15 {
        format!("{value:.0}")
    } else {
        value.to_string()
    }
}

pub fn write_personnel<W: Write>(w: W, records: &[ProfessorRecord]) -> Result<()> {
    const FILE: &str = "personnel.csv";
    let mut w = writer(w);
    let err = csv_err(FILE);
    w.write_record(["professor_id", "country", "gender", "rank_by_year", "years_on_staff"])
        .map_err(&err)?;
    for p in records {
        let ranks = p
            .rank_by_year
            .iter()
            .map(|(y, r)| format!("{y}:{}", r.as_str()))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            p.professor_id.as_str(),
            p.country.as_str(),
            p.gender.as_str(),
            &ranks,
            &p.years_on_staff.to_string(),
        ])
        .map_err(&err)?;
    }
    finish(w, FILE)
}

pub fn write_publications<W: Write>(w: W, records: &[PublicationRecord]) -> Result<()> {
    const FILE: &str = "publications.csv";
    let mut w = writer(w);
    let err = csv_err(FILE);
    w.write_record([
        "pub_id",
        "year",
        "journal_id",
        "citations",
        "total_authors",
        "affiliation_count",
    ])
    .map_err(&err)?;
    for p in records {
        w.write_record([
            p.pub_id.as_str(),
            &p.year.to_string(),
            p.journal_id.as_str(),
            &p.citations.to_string(),
            &p.total_authors.to_string(),
            &p.affiliation_count.to_string(),
        ])
        .map_err(&err)?;
    }
    finish(w, FILE)
}

pub fn write_authorships<W: Write>(w: W, records: &[AuthorshipRecord]) -> Result<()> {
    const FILE: &str = "authorships.csv";
    let mut w = writer(w);
    let err = csv_err(FILE);
    w.write_record(["pub_id", "professor_id", "position"])
        .map_err(&err)?;
    for a in records {
        w.write_record([
            a.pub_id.as_str(),
            a.professor_id.as_str(),
            &a.position.to_string(),
        ])
        .map_err(&err)?;
    }
    finish(w, FILE)
}

pub fn write_journals<W: Write>(w: W, records: &[JournalRecord]) -> Result<()> {
    const FILE: &str = "journals.csv";
    let mut w = writer(w);
    let err = csv_err(FILE);
    w.write_record(["journal_id", "year", "impact_factor", "subject_categories"])
        .map_err(&err)?;
    for j in records {
        let scs = j
            .subject_categories
            .iter()
            .map(ScCode::as_str)
            .collect::<Vec<_>>()
            .join("|");
        w.write_record([
            j.journal_id.as_str(),
            &j.year.to_string(),
            &j.impact_factor.map(|v| v.to_string()).unwrap_or_default(),
            &scs,
        ])
        .map_err(&err)?;
    }
    finish(w, FILE)
}

pub fn write_salaries<W: Write>(w: W, costs: &CostTable) -> Result<()> {
    const FILE: &str = "salaries.csv";
    let mut w = writer(w);
    let err = csv_err(FILE);
    w.write_record(["country", "rank", "yearly_salary_eur"])
        .map_err(&err)?;
    for ((country, rank), value) in &costs.salary {
        w.write_record([country.as_str(), rank.as_str(), &euros(*value)])
            .map_err(&err)?;
    }
    finish(w, FILE)
}

pub fn write_capital<W: Write>(w: W, costs: &CostTable) -> Result<()> {
    const FILE: &str = "capital.csv";
    let mut w = writer(w);
    let err = csv_err(FILE);
    w.write_record(["country", "discipline", "yearly_capital_eur"])
        .map_err(&err)?;
    for ((country, discipline), value) in &costs.capital {
        w.write_record([country.as_str(), discipline.as_str(), &euros(*value)])
            .map_err(&err)?;
    }
    finish(w, FILE)
}

pub fn write_scmap<W: Write>(w: W, scmap: &ScMap) -> Result<()> {
    const FILE: &str = "scmap.csv";
    let mut w = writer(w);
    let err = csv_err(FILE);
    w.write_record(["sc", "discipline", "credit_regime"])
        .map_err(&err)?;
    for (sc, entry) in &scmap.entries {
        w.write_record([sc.as_str(), entry.discipline.as_str(), entry.regime.as_str()])
            .map_err(&err)?;
    }
    finish(w, FILE)
}
