//! Run configuration: analysis parameters, report options and input paths.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Country, DatasetPaths, ObservationWindow, ScCode};

/// Role weights of the position-weighted credit regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CreditConstants {
    /// Share given to each of the first and last author of an intramural paper.
    pub intramural_first_last: f64,
    /// Share split among the remaining authors of an intramural paper.
    pub intramural_others_pool: f64,
    /// Share given to each of the first and last author of an extramural paper.
    pub extramural_first_last: f64,
    /// Share given to each of the second and second-to-last author.
    pub extramural_second: f64,
    /// Share split among the remaining authors of an extramural paper.
    pub extramural_others_pool: f64,
}

impl Default for CreditConstants {
    fn default() -> Self {
        Self {
            intramural_first_last: 0.40,
            intramural_others_pool: 0.20,
            extramural_first_last: 0.30,
            extramural_second: 0.15,
            extramural_others_pool: 0.10,
        }
    }
}

impl CreditConstants {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("credit.intramural_first_last", self.intramural_first_last),
            ("credit.intramural_others_pool", self.intramural_others_pool),
            ("credit.extramural_first_last", self.extramural_first_last),
            ("credit.extramural_second", self.extramural_second),
            ("credit.extramural_others_pool", self.extramural_others_pool),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(name, format!("must be a non-negative number, got {v}")));
            }
        }
        if self.intramural_first_last == 0.0 && self.intramural_others_pool == 0.0 {
            return Err(Error::config("credit", "intramural weights are all zero"));
        }
        if self.extramural_first_last == 0.0
            && self.extramural_second == 0.0
            && self.extramural_others_pool == 0.0
        {
            return Err(Error::config("credit", "extramural weights are all zero"));
        }
        Ok(())
    }
}

/// Parameters that determine every computed number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub observation_window: ObservationWindow,
    pub min_years_on_staff: u32,
    pub min_sc_professors: usize,
    pub excluded_scs: BTreeSet<ScCode>,
    pub credit: CreditConstants,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            observation_window: ObservationWindow::default(),
            min_years_on_staff: 3,
            min_sc_professors: 10,
            excluded_scs: BTreeSet::new(),
            credit: CreditConstants::default(),
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        let w = self.observation_window;
        if w.first > w.last {
            return Err(Error::config(
                "observation_window",
                format!("first year {} is after last year {}", w.first, w.last),
            ));
        }
        self.credit.validate()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    /// Rows per side in gap tables.
    pub top_k: usize,
    /// Fraction of each SC selected as its top performers.
    pub decile: f64,
    /// Country pair (A, B); gaps are A minus B, outperform counts B over A.
    pub countries: Option<(Country, Country)>,
    pub format: ReportFormat,
    /// Also write the pretty text tables.
    pub text: bool,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            top_k: 10,
            decile: 0.10,
            countries: None,
            format: ReportFormat::Csv,
            text: false,
        }
    }
}

impl ReportConfig {
    pub fn validate(&self) -> Result<()> {
        if self.top_k < 1 {
            return Err(Error::config("top_k", "must be at least 1"));
        }
        if !(self.decile > 0.0 && self.decile <= 1.0) {
            return Err(Error::config("decile", format!("must lie in (0, 1], got {}", self.decile)));
        }
        if let Some((a, b)) = &self.countries {
            if a == b {
                return Err(Error::config("countries", "the two countries must differ"));
            }
        }
        Ok(())
    }
}

/// Config file layout. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfigFile {
    pub input_dir: Option<PathBuf>,
    pub personnel: Option<PathBuf>,
    pub publications: Option<PathBuf>,
    pub authorships: Option<PathBuf>,
    pub journals: Option<PathBuf>,
    pub salaries: Option<PathBuf>,
    pub capital: Option<PathBuf>,
    pub scmap: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub observation_window: Option<ObservationWindow>,
    pub min_years_on_staff: Option<u32>,
    pub min_sc_professors: Option<usize>,
    pub excluded_scs: Option<Vec<ScCode>>,
    pub credit: Option<CreditConstants>,
    pub top_k: Option<usize>,
    pub decile: Option<f64>,
    pub countries: Option<Vec<Country>>,
    pub format: Option<ReportFormat>,
    pub text: Option<bool>,
    pub parallel: Option<usize>,
    pub emit_baselines: Option<PathBuf>,
}

/// Fully resolved configuration of one CLI run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub inputs: DatasetPaths,
    pub out_dir: PathBuf,
    pub analysis: AnalysisConfig,
    pub report: ReportConfig,
    /// Worker threads; 0 lets the runtime decide.
    pub parallel: usize,
    pub emit_baselines: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            inputs: DatasetPaths::in_dir(Path::new(".")),
            out_dir: PathBuf::from("out"),
            analysis: AnalysisConfig::default(),
            report: ReportConfig::default(),
            parallel: 0,
            emit_baselines: None,
        }
    }
}

pub fn parse_country_pair(items: &[Country]) -> Result<(Country, Country)> {
    match items {
        [a, b] => Ok((a.clone(), b.clone())),
        _ => Err(Error::config(
            "countries",
            format!("expected exactly two country codes, got {}", items.len()),
        )),
    }
}

impl RunConfig {
    /// Reads a TOML config. Relative paths resolve against the file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: RunConfigFile =
            toml::from_str(&text).map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_parts(file, base)
    }

    pub fn from_parts(file: RunConfigFile, base: &Path) -> Result<Self> {
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        let input_dir = file.input_dir.clone().map(resolve).unwrap_or_else(|| base.to_path_buf());
        let mut inputs = DatasetPaths::in_dir(&input_dir);
        let overrides = [
            (&mut inputs.personnel, file.personnel),
            (&mut inputs.publications, file.publications),
            (&mut inputs.authorships, file.authorships),
            (&mut inputs.journals, file.journals),
            (&mut inputs.salaries, file.salaries),
            (&mut inputs.capital, file.capital),
            (&mut inputs.scmap, file.scmap),
        ];
        for (slot, value) in overrides {
            if let Some(p) = value {
                *slot = resolve(p);
            }
        }
        let defaults = AnalysisConfig::default();
        let analysis = AnalysisConfig {
            observation_window: file.observation_window.unwrap_or(defaults.observation_window),
            min_years_on_staff: file.min_years_on_staff.unwrap_or(defaults.min_years_on_staff),
            min_sc_professors: file.min_sc_professors.unwrap_or(defaults.min_sc_professors),
            excluded_scs: file
                .excluded_scs
                .map(|v| v.into_iter().collect())
                .unwrap_or_default(),
            credit: file.credit.unwrap_or_default(),
        };
        let rdefaults = ReportConfig::default();
        let report = ReportConfig {
            top_k: file.top_k.unwrap_or(rdefaults.top_k),
            decile: file.decile.unwrap_or(rdefaults.decile),
            countries: file.countries.as_deref().map(parse_country_pair).transpose()?,
            format: file.format.unwrap_or_default(),
            text: file.text.unwrap_or(false),
        };
        let cfg = Self {
            inputs,
            out_dir: file.out_dir.map(resolve).unwrap_or_else(|| base.join("out")),
            analysis,
            report,
            parallel: file.parallel.unwrap_or(0),
            emit_baselines: file.emit_baselines.map(resolve),
        };
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.analysis.validate()?;
        self.report.validate()?;
        let paths = self.inputs.all();
        for (i, a) in paths.iter().enumerate() {
            if paths[i + 1..].contains(a) {
                return Err(Error::config(
                    "inputs",
                    format!("{} is used for two different input tables", a.display()),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_round_trip() {
        let text = r#"
            input_dir = "data"
            observation_window = [2011, 2015]
            min_years_on_staff = 3
            excluded_scs = ["HISTORY", "LITERATURE"]
            countries = ["IT", "NO"]
            top_k = 5
            [credit]
            extramural_second = 0.2
        "#;
        let file: RunConfigFile = toml::from_str(text).unwrap();
        let cfg = RunConfig::from_parts(file, Path::new("/cfg")).unwrap();
        assert_eq!(cfg.inputs.personnel, Path::new("/cfg/data/personnel.csv"));
        assert_eq!(cfg.analysis.excluded_scs.len(), 2);
        assert_eq!(cfg.analysis.credit.extramural_second, 0.2);
        assert_eq!(cfg.analysis.credit.extramural_first_last, 0.3);
        assert_eq!(cfg.report.top_k, 5);
        assert_eq!(
            cfg.report.countries,
            Some((Country::from("IT"), Country::from("NO")))
        );
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = RunConfig::default();
        cfg.report.decile = 0.0;
        assert!(cfg.validate().is_err());
        cfg.report.decile = 1.0;
        cfg.report.top_k = 0;
        assert!(cfg.validate().is_err());
        cfg.report.top_k = 1;
        cfg.inputs.capital = cfg.inputs.salaries.clone();
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("inputs"));
    }

    #[test]
    fn unknown_key_is_rejected() {
        assert!(toml::from_str::<RunConfigFile>("top_kk = 3").is_err());
    }
}
