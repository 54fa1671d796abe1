//! Normalization, aggregation and the cross-country comparison tables.

mod compare;
mod normalize;
mod render;
mod report;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use compare::{
    gap_table, outperform_counts, sc_country_means, CountryMeans, GapRow, GapTable,
    OutperformRow, OutperformTable, ScCountryMeans,
};
pub use normalize::{aggregate, normalize_within_sc, top_decile, GroupMean, Level, NormalizedScores};
pub use render::{render_csv, render_json, render_text, write_reports, REPORT_FILES};
pub use report::{build_report, CountryPair, ReportBundle};

use crate::ingest::{Country, Discipline, ProfessorId, ScCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Indicator {
    O,
    FO,
    AC,
    AIF,
    FSS,
}

impl Indicator {
    pub const ALL: [Indicator; 5] = [
        Indicator::O,
        Indicator::FO,
        Indicator::AC,
        Indicator::AIF,
        Indicator::FSS,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Indicator::O => "O",
            Indicator::FO => "FO",
            Indicator::AC => "AC",
            Indicator::AIF => "AIF",
            Indicator::FSS => "FSS",
        }
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Indicator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Indicator::ALL
            .into_iter()
            .find(|i| i.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown indicator `{s}`"))
    }
}

/// Indicator values of one professor, indexed by [`Indicator::index`].
/// `None` marks an undefined value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredProfessor<T> {
    pub professor_id: ProfessorId,
    pub country: Country,
    pub sc: ScCode,
    pub discipline: Discipline,
    pub values: [Option<T>; 5],
}

impl<T: Copy> ScoredProfessor<T> {
    pub fn value(&self, indicator: Indicator) -> Option<T> {
        self.values[indicator.index()]
    }
}
