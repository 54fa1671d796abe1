use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub type Year = i32;

macro_rules! string_key {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(value: impl Into<String>) -> Self {
                Self(value.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(value: &str) -> Self {
                Self(value.to_string())
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

string_key!(ProfessorId);
string_key!(PubId);
string_key!(JournalId);
string_key!(
    /// Web of Science subject category code, e.g. `MATHEMATICS`.
    ScCode
);
string_key!(
    /// ISO-3166 alpha-2 country code.
    Country
);
string_key!(Discipline);

impl Country {
    pub fn is_valid_code(code: &str) -> bool {
        code.len() == 2 && code.bytes().all(|b| b.is_ascii_uppercase())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    F,
    M,
    Unknown,
}

impl Gender {
    pub fn as_str(self) -> &'static str {
        match self {
            Gender::F => "F",
            Gender::M => "M",
            Gender::Unknown => "unknown",
        }
    }
}

impl FromStr for Gender {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "F" | "f" => Ok(Gender::F),
            "M" | "m" => Ok(Gender::M),
            "" | "unknown" | "U" | "u" => Ok(Gender::Unknown),
            other => Err(format!("unknown gender `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rank {
    Assistant,
    Associate,
    Full,
}

impl Rank {
    pub const ALL: [Rank; 3] = [Rank::Assistant, Rank::Associate, Rank::Full];

    pub fn as_str(self) -> &'static str {
        match self {
            Rank::Assistant => "assistant",
            Rank::Associate => "associate",
            Rank::Full => "full",
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Rank {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "assistant" => Ok(Rank::Assistant),
            "associate" => Ok(Rank::Associate),
            "full" => Ok(Rank::Full),
            other => Err(format!("unknown rank `{other}`")),
        }
    }
}

/// Inclusive range of calendar years under observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(Year, Year)", into = "(Year, Year)")]
pub struct ObservationWindow {
    pub first: Year,
    pub last: Year,
}

impl ObservationWindow {
    pub fn new(first: Year, last: Year) -> Self {
        Self { first, last }
    }

    pub fn contains(&self, year: Year) -> bool {
        (self.first..=self.last).contains(&year)
    }

    pub fn years(&self) -> std::ops::RangeInclusive<Year> {
        self.first..=self.last
    }

    pub fn len(&self) -> usize {
        (self.last - self.first + 1).max(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl From<(Year, Year)> for ObservationWindow {
    fn from((first, last): (Year, Year)) -> Self {
        Self::new(first, last)
    }
}

impl From<ObservationWindow> for (Year, Year) {
    fn from(w: ObservationWindow) -> Self {
        (w.first, w.last)
    }
}

impl Default for ObservationWindow {
    fn default() -> Self {
        Self::new(2011, 2015)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfessorRecord {
    pub professor_id: ProfessorId,
    pub country: Country,
    pub gender: Gender,
    pub rank_by_year: BTreeMap<Year, Rank>,
    /// Years on staff within the observation window.
    pub years_on_staff: u32,
}

impl ProfessorRecord {
    /// Rank held in `year`. Years without an entry take the nearest year
    /// that has one, the earlier year winning at equal distance. The flag is
    /// true when the rank was imputed.
    pub fn rank_in(&self, year: Year) -> Option<(Rank, bool)> {
        if let Some(rank) = self.rank_by_year.get(&year) {
            return Some((*rank, false));
        }
        let before = self.rank_by_year.range(..year).next_back();
        let after = self.rank_by_year.range(year..).next();
        let pick = match (before, after) {
            (Some(b), Some(a)) => {
                if year - b.0 <= a.0 - year {
                    b
                } else {
                    a
                }
            }
            (Some(b), None) => b,
            (None, Some(a)) => a,
            (None, None) => return None,
        };
        Some((*pick.1, true))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub pub_id: PubId,
    pub year: Year,
    pub journal_id: JournalId,
    pub citations: u64,
    pub total_authors: u32,
    /// Distinct affiliations in the address list.
    pub affiliation_count: u32,
}

/// Byline slot held by a registered professor. External co-authors appear
/// only through `PublicationRecord::total_authors`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorshipRecord {
    pub pub_id: PubId,
    pub professor_id: ProfessorId,
    /// 1-based byline index.
    pub position: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JournalRecord {
    pub journal_id: JournalId,
    pub year: Year,
    pub impact_factor: Option<f64>,
    pub subject_categories: Vec<ScCode>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CostTable {
    /// Average yearly salary in euros per (country, rank).
    pub salary: BTreeMap<(Country, Rank), f64>,
    /// Average yearly research capital in euros per (country, discipline).
    pub capital: BTreeMap<(Country, Discipline), f64>,
}

impl CostTable {
    pub fn salary_of(&self, country: &Country, rank: Rank) -> Option<f64> {
        self.salary.get(&(country.clone(), rank)).copied()
    }

    pub fn capital_of(&self, country: &Country, discipline: &Discipline) -> Option<f64> {
        self.capital
            .get(&(country.clone(), discipline.clone()))
            .copied()
    }
}

/// How co-author credit is split in a discipline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CreditRegime {
    /// Every author receives `1 / total_authors`.
    Uniform,
    /// First/last and second/second-to-last positions carry extra weight.
    PositionWeighted,
}

impl CreditRegime {
    pub fn as_str(self) -> &'static str {
        match self {
            CreditRegime::Uniform => "uniform",
            CreditRegime::PositionWeighted => "position_weighted",
        }
    }

    /// Disciplines whose bylines encode contribution order.
    pub fn default_for(discipline: &Discipline) -> Self {
        const ORDERED: [&str; 3] = ["biology", "biomedical research", "clinical medicine"];
        let name = discipline.as_str().trim().to_ascii_lowercase();
        if ORDERED.contains(&name.as_str()) {
            CreditRegime::PositionWeighted
        } else {
            CreditRegime::Uniform
        }
    }
}

impl FromStr for CreditRegime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(CreditRegime::Uniform),
            "position_weighted" => Ok(CreditRegime::PositionWeighted),
            other => Err(format!("unknown credit regime `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScEntry {
    pub discipline: Discipline,
    pub regime: CreditRegime,
}

/// Subject category to discipline map. Each SC belongs to exactly one
/// discipline.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScMap {
    pub entries: BTreeMap<ScCode, ScEntry>,
}

impl ScMap {
    pub fn get(&self, sc: &ScCode) -> Option<&ScEntry> {
        self.entries.get(sc)
    }

    pub fn discipline_of(&self, sc: &ScCode) -> Option<&Discipline> {
        self.entries.get(sc).map(|e| &e.discipline)
    }
}
