//! Loading and validation of the input tables.
//!
//! Seven CSV files make up a dataset: personnel, publications, authorships,
//! journals, salaries, capital and the SC map. Parsers never stop at the
//! first integrity problem; they collect [`Issue`]s so a single validation
//! run reports everything wrong with a dataset. Only unreadable files and
//! header mismatches abort parsing.

mod parse;
mod records;
mod write;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use parse::{
    parse_capital, parse_cost_and_scmap, parse_journals, parse_personnel, parse_publications,
    parse_salaries, parse_scmap, Parsed,
};
pub use records::*;
pub use write::{
    write_authorships, write_capital, write_journals, write_personnel, write_publications,
    write_salaries, write_scmap,
};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    /// Row-level problem: the row is dropped, the run continues.
    Error,
    /// Dataset cannot be analysed.
    Fatal,
    Warning,
}

/// One problem found in a dataset, with its location.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub severity: Severity,
    pub file: String,
    /// 1-based line in `file`, when the issue is tied to a row.
    pub line: Option<u64>,
    /// Short identifier of the violated rule.
    pub rule: String,
    pub message: String,
}

impl Issue {
    pub fn new(
        severity: Severity,
        file: impl Into<String>,
        line: Option<u64>,
        rule: &str,
        message: impl Into<String>,
    ) -> Self {
        Self {
            severity,
            file: file.into(),
            line,
            rule: rule.to_string(),
            message: message.into(),
        }
    }

    pub fn fatal(file: &str, line: Option<u64>, rule: &str, message: impl Into<String>) -> Self {
        Self::new(Severity::Fatal, file, line, rule, message)
    }

    pub fn error(file: &str, line: Option<u64>, rule: &str, message: impl Into<String>) -> Self {
        Self::new(Severity::Error, file, line, rule, message)
    }

    pub fn warning(file: &str, line: Option<u64>, rule: &str, message: impl Into<String>) -> Self {
        Self::new(Severity::Warning, file, line, rule, message)
    }

    pub fn is_fatal(&self) -> bool {
        self.severity == Severity::Fatal
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Fatal => "fatal",
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.line {
            Some(line) => write!(f, "{sev} [{}] {}:{}: {}", self.rule, self.file, line, self.message),
            None => write!(f, "{sev} [{}] {}: {}", self.rule, self.file, self.message),
        }
    }
}

/// Every issue found in a dataset. Valid only when no issue is fatal.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub fatal: usize,
    pub errors: usize,
    pub warnings: usize,
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn from_issues(issues: Vec<Issue>) -> Self {
        let count = |s| issues.iter().filter(|i| i.severity == s).count();
        let fatal = count(Severity::Fatal);
        Self {
            valid: fatal == 0,
            fatal,
            errors: count(Severity::Error),
            warnings: count(Severity::Warning),
            issues,
        }
    }

    pub fn fatal_issues(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.is_fatal())
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues
            .iter()
            .filter(|i| i.severity == Severity::Warning)
    }
}

/// Parsed dataset in canonical form: every table sorted by its key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetBundle {
    pub professors: Vec<ProfessorRecord>,
    pub publications: Vec<PublicationRecord>,
    pub authorships: Vec<AuthorshipRecord>,
    pub journals: Vec<JournalRecord>,
    pub costs: CostTable,
    pub scmap: ScMap,
}

impl DatasetBundle {
    /// Sorts every table by its key.
    pub fn canonicalize(&mut self) {
        self.professors
            .sort_by(|a, b| a.professor_id.cmp(&b.professor_id));
        self.publications.sort_by(|a, b| a.pub_id.cmp(&b.pub_id));
        self.authorships.sort_by(|a, b| {
            (&a.pub_id, a.position, &a.professor_id).cmp(&(&b.pub_id, b.position, &b.professor_id))
        });
        self.journals
            .sort_by(|a, b| (&a.journal_id, a.year).cmp(&(&b.journal_id, b.year)));
    }

    /// Writes the seven CSV files under their standard names in `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<DatasetPaths> {
        std::fs::create_dir_all(dir).map_err(|e| crate::Error::io(dir, e))?;
        let paths = DatasetPaths::in_dir(dir);
        let create = |p: &Path| {
            std::fs::File::create(p)
                .map(std::io::BufWriter::new)
                .map_err(|e| crate::Error::io(p, e))
        };
        write_personnel(create(&paths.personnel)?, &self.professors)?;
        write_publications(create(&paths.publications)?, &self.publications)?;
        write_authorships(create(&paths.authorships)?, &self.authorships)?;
        write_journals(create(&paths.journals)?, &self.journals)?;
        write_salaries(create(&paths.salaries)?, &self.costs)?;
        write_capital(create(&paths.capital)?, &self.costs)?;
        write_scmap(create(&paths.scmap)?, &self.scmap)?;
        Ok(paths)
    }
}

/// Locations of the input tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetPaths {
    pub personnel: PathBuf,
    pub publications: PathBuf,
    pub authorships: PathBuf,
    pub journals: PathBuf,
    pub salaries: PathBuf,
    pub capital: PathBuf,
    pub scmap: PathBuf,
}

impl DatasetPaths {
    pub const PERSONNEL: &'static str = "personnel.csv";
    pub const PUBLICATIONS: &'static str = "publications.csv";
    pub const AUTHORSHIPS: &'static str = "authorships.csv";
    pub const JOURNALS: &'static str = "journals.csv";
    pub const SALARIES: &'static str = "salaries.csv";
    pub const CAPITAL: &'static str = "capital.csv";
    pub const SCMAP: &'static str = "scmap.csv";

    /// Standard file names inside `dir`.
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            personnel: dir.join(Self::PERSONNEL),
            publications: dir.join(Self::PUBLICATIONS),
            authorships: dir.join(Self::AUTHORSHIPS),
            journals: dir.join(Self::JOURNALS),
            salaries: dir.join(Self::SALARIES),
            capital: dir.join(Self::CAPITAL),
            scmap: dir.join(Self::SCMAP),
        }
    }

    pub fn all(&self) -> [&Path; 7] {
        [
            &self.personnel,
            &self.publications,
            &self.authorships,
            &self.journals,
            &self.salaries,
            &self.capital,
            &self.scmap,
        ]
    }
}

/// A bundle together with the issues found while parsing it.
#[derive(Debug, Clone, Default)]
pub struct LoadedDataset {
    pub bundle: DatasetBundle,
    pub issues: Vec<Issue>,
}

/// Parses all seven tables. Independent files are read concurrently;
/// publications wait for journals.
pub fn load_dataset(paths: &DatasetPaths, window: ObservationWindow) -> Result<LoadedDataset> {
    let ((personnel, journals_then_pubs), costs) = rayon::join(
        || {
            rayon::join(
                || parse_personnel(&paths.personnel, window),
                || -> Result<_> {
                    let journals = parse_journals(&paths.journals)?;
                    let pubs = parse_publications(
                        &paths.publications,
                        &paths.authorships,
                        &journals.records,
                        window,
                    )?;
                    Ok((journals, pubs))
                },
            )
        },
        || parse_cost_and_scmap(&paths.salaries, &paths.capital, &paths.scmap),
    );
    let personnel = personnel?;
    let (journals, pubs) = journals_then_pubs?;
    let costs = costs?;

    let mut issues = Vec::new();
    issues.extend(personnel.issues.iter().cloned());
    issues.extend(journals.issues);
    issues.extend(pubs.issues);
    issues.extend(costs.issues);
    let (publications, mut authorships) = pubs.records;
    if !personnel.rejected.is_empty() {
        let file = paths.authorships.display().to_string();
        authorships.retain(|a| {
            let keep = !personnel.rejected.contains(a.professor_id.as_str());
            if !keep {
                issues.push(Issue::warning(
                    &file,
                    None,
                    "rejected-professor",
                    format!(
                        "authorship {}/{} dropped: professor row was rejected",
                        a.pub_id, a.professor_id
                    ),
                ));
            }
            keep
        });
    }
    let (costs, scmap) = costs.records;
    let mut bundle = DatasetBundle {
        professors: personnel.records,
        publications,
        authorships,
        journals: journals.records,
        costs,
        scmap,
    };
    bundle.canonicalize();
    Ok(LoadedDataset { bundle, issues })
}
