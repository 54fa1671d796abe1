//! Per-professor output (O), fractional output (FO), average citation (AC),
//! average impact factor (AIF) and fractional scientific strength (FSS).
//!
//! O, FO and FSS are yearly quantities per euro of research cost, where the
//! research cost is half the average salary (half of a professor's time goes
//! to research) plus the yearly research capital.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{CostTable, Discipline, ProfessorRecord, Year};
use crate::scalar::{CompensatedSum, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostProfile<T> {
    /// Average yearly salary over the professor's staffed years.
    pub yearly_salary: T,
    pub yearly_capital: T,
    /// `yearly_salary / 2 + yearly_capital`.
    pub research_cost: T,
}

impl<T: Real> CostProfile<T> {
    pub fn new(yearly_salary: T, yearly_capital: T) -> Result<Self> {
        let two = T::one() + T::one();
        let research_cost = yearly_salary / two + yearly_capital;
        if !(research_cost > T::zero()) {
            return Err(Error::NonPositiveCost(research_cost.as_f64()));
        }
        Ok(Self {
            yearly_salary,
            yearly_capital,
            research_cost,
        })
    }
}

/// Research cost of a professor. Salary is averaged over the years in
/// `rank_by_year` plus any `publication_years` lacking a rank entry, whose
/// rank is imputed from the nearest ranked year.
pub fn research_cost<T: Real>(
    professor: &ProfessorRecord,
    publication_years: impl IntoIterator<Item = Year>,
    discipline: &Discipline,
    costs: &CostTable,
) -> Result<CostProfile<T>> {
    let mut years: BTreeSet<Year> = professor.rank_by_year.keys().copied().collect();
    years.extend(publication_years);
    let mut salary = CompensatedSum::<T>::new();
    for &year in &years {
        let (rank, _) = professor.rank_in(year).ok_or_else(|| {
            Error::MissingCost(format!("professor {} has no rank history", professor.professor_id))
        })?;
        let value = costs.salary_of(&professor.country, rank).ok_or_else(|| {
            Error::MissingCost(format!("salary for ({}, {rank})", professor.country))
        })?;
        salary.add(T::of(value));
    }
    if years.is_empty() {
        return Err(Error::MissingCost(format!(
            "professor {} has no staffed years",
            professor.professor_id
        )));
    }
    let capital = costs
        .capital_of(&professor.country, discipline)
        .ok_or_else(|| {
            Error::MissingCost(format!("capital for ({}, {discipline})", professor.country))
        })?;
    CostProfile::new(salary.total() / T::of_count(years.len()), T::of(capital))
}

/// One publication's contribution terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublicationTerm<T> {
    /// Fractional credit `f_i`.
    pub credit: T,
    /// `c_i / c̄`, `None` without a baseline.
    pub citations: Option<T>,
    /// `IF_i / IF̄`, `None` without an impact factor or baseline.
    pub impact: Option<T>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct UndefinedFlags {
    /// No publication had a defined citation standardization.
    pub ac: bool,
    /// No publication had a defined impact-factor standardization.
    pub aif: bool,
    /// Some publications lacked a citation baseline and count zero in FSS.
    pub citations_partial: bool,
    /// Some publications lacked an impact factor or its baseline.
    pub impact_partial: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndicatorVector<T> {
    pub o: T,
    pub fo: T,
    pub ac: Option<T>,
    pub aif: Option<T>,
    pub fss: T,
    /// Publications in the portfolio (N).
    pub publication_count: usize,
    pub undefined: UndefinedFlags,
}

fn check<T: Real>(years_on_staff: u32, cost: T) -> Result<()> {
    if years_on_staff == 0 {
        return Err(Error::ZeroYears(String::new()));
    }
    if !(cost > T::zero()) {
        return Err(Error::NonPositiveCost(cost.as_f64()));
    }
    Ok(())
}

/// `total / t / cost`, shared by O, FO and FSS so equal sums give equal
/// results.
fn per_cost_year<T: Real>(total: T, years_on_staff: u32, cost: T) -> T {
    total / T::of_count(years_on_staff as usize) / cost
}

pub fn compute_o<T: Real>(publication_count: usize, years_on_staff: u32, cost: T) -> Result<T> {
    check(years_on_staff, cost)?;
    Ok(per_cost_year(T::of_count(publication_count), years_on_staff, cost))
}

pub fn compute_fo<T: Real>(
    credits: impl IntoIterator<Item = T>,
    years_on_staff: u32,
    cost: T,
) -> Result<T> {
    check(years_on_staff, cost)?;
    let total: CompensatedSum<T> = credits.into_iter().collect();
    Ok(per_cost_year(total.total(), years_on_staff, cost))
}

/// Mean of the defined standardized citations; `None` when none is defined.
pub fn compute_ac<T: Real>(standardized: impl IntoIterator<Item = Option<T>>) -> Option<T> {
    crate::scalar::mean(standardized.into_iter().flatten())
}

pub fn compute_aif<T: Real>(standardized: impl IntoIterator<Item = Option<T>>) -> Option<T> {
    crate::scalar::mean(standardized.into_iter().flatten())
}

/// Undefined standardizations contribute zero.
pub fn compute_fss<T: Real>(terms: &[PublicationTerm<T>], years_on_staff: u32, cost: T) -> Result<T> {
    check(years_on_staff, cost)?;
    let total: CompensatedSum<T> = terms
        .iter()
        .map(|t| t.citations.unwrap_or(T::zero()) * t.credit)
        .collect();
    Ok(per_cost_year(total.total(), years_on_staff, cost))
}

pub fn compute_indicators<T: Real>(
    terms: &[PublicationTerm<T>],
    years_on_staff: u32,
    cost: T,
) -> Result<IndicatorVector<T>> {
    let ac = compute_ac(terms.iter().map(|t| t.citations));
    let aif = compute_aif(terms.iter().map(|t| t.impact));
    Ok(IndicatorVector {
        o: compute_o(terms.len(), years_on_staff, cost)?,
        fo: compute_fo(terms.iter().map(|t| t.credit), years_on_staff, cost)?,
        ac,
        aif,
        fss: compute_fss(terms, years_on_staff, cost)?,
        publication_count: terms.len(),
        undefined: UndefinedFlags {
            ac: ac.is_none(),
            aif: aif.is_none(),
            citations_partial: terms.iter().any(|t| t.citations.is_none()),
            impact_partial: terms.iter().any(|t| t.impact.is_none()),
        },
    })
}
