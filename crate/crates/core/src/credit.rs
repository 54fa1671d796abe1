//! Fractional author credit.
//!
//! Uniform credit gives every author `1/n`. Position-weighted credit follows
//! the byline: intramural papers (a single affiliation) give a fixed share to
//! the first and last author and split a pool among the rest; extramural
//! papers also reward the second and second-to-last author. When a short
//! byline makes roles coincide, a position collects every role share that
//! lands on it; when the middle pool has nobody to go to, the vector is
//! rescaled to sum to one.

use crate::config::CreditConstants;
use crate::error::{Error, Result};
use crate::ingest::{CreditRegime, ScCode, ScMap};
use crate::scalar::Real;

/// Credit share per byline position (index 0 is position 1).
#[derive(Debug, Clone, PartialEq)]
pub struct CreditWeights<T> {
    pub weights: Vec<T>,
}

impl<T: Real> CreditWeights<T> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Share of 1-based `position`.
    pub fn at(&self, position: u32) -> Result<T> {
        position
            .checked_sub(1)
            .and_then(|i| self.weights.get(i as usize))
            .copied()
            .ok_or(Error::PositionOutOfRange {
                position,
                total_authors: self.weights.len() as u32,
            })
    }

    pub fn total(&self) -> T {
        self.weights.iter().copied().sum()
    }
}

/// Regime of the discipline `sc` belongs to.
pub fn detect_regime(sc: &ScCode, scmap: &ScMap) -> Result<CreditRegime> {
    scmap
        .get(sc)
        .map(|e| e.regime)
        .ok_or_else(|| Error::UnknownSc(sc.to_string()))
}

/// A publication is intramural when its address list has one affiliation.
pub fn is_intramural(affiliation_count: u32) -> bool {
    affiliation_count == 1
}

pub fn uniform_weights<T: Real>(total_authors: u32) -> Result<CreditWeights<T>> {
    if total_authors == 0 {
        return Err(Error::NoAuthors);
    }
    let share = T::one() / T::of_count(total_authors as usize);
    Ok(CreditWeights {
        weights: vec![share; total_authors as usize],
    })
}

pub fn position_weights<T: Real>(
    total_authors: u32,
    intramural: bool,
    constants: &CreditConstants,
) -> Result<CreditWeights<T>> {
    if total_authors == 0 {
        return Err(Error::NoAuthors);
    }
    let n = total_authors as usize;
    let mut w = vec![T::zero(); n];
    let (first_last, second, pool) = if intramural {
        (
            T::of(constants.intramural_first_last),
            None,
            T::of(constants.intramural_others_pool),
        )
    } else {
        (
            T::of(constants.extramural_first_last),
            Some(T::of(constants.extramural_second)),
            T::of(constants.extramural_others_pool),
        )
    };
    w[0] = w[0] + first_last;
    w[n - 1] = w[n - 1] + first_last;
    // Positions outside every named role share the pool.
    let mut named = 1usize;
    if let Some(second) = second {
        if n >= 2 {
            w[1] = w[1] + second;
            w[n - 2] = w[n - 2] + second;
        }
        named = 2;
    }
    let others = n.saturating_sub(2 * named);
    if others > 0 {
        let share = pool / T::of_count(others);
        for slot in &mut w[named..n - named] {
            *slot = *slot + share;
        }
    }
    let total: T = w.iter().copied().sum();
    let tolerance = T::epsilon() * T::of_count(4 * n);
    if (total - T::one()).abs() > tolerance {
        for slot in &mut w {
            *slot = *slot / total;
        }
    }
    Ok(CreditWeights { weights: w })
}

/// Full weight vector for one publication under `regime`.
pub fn weights_for<T: Real>(
    total_authors: u32,
    affiliation_count: u32,
    regime: CreditRegime,
    constants: &CreditConstants,
) -> Result<CreditWeights<T>> {
    match regime {
        CreditRegime::Uniform => uniform_weights(total_authors),
        CreditRegime::PositionWeighted => {
            position_weights(total_authors, is_intramural(affiliation_count), constants)
        }
    }
}

/// Credit `f_i` of the author at `position` of a publication.
pub fn fractional_contribution<T: Real>(
    position: u32,
    total_authors: u32,
    affiliation_count: u32,
    regime: CreditRegime,
    constants: &CreditConstants,
) -> Result<T> {
    if position == 0 || position > total_authors {
        return Err(Error::PositionOutOfRange {
            position,
            total_authors,
        });
    }
    weights_for::<T>(total_authors, affiliation_count, regime, constants)?.at(position)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{Discipline, ScEntry};
    use proptest::prelude::*;

    fn defaults() -> CreditConstants {
        CreditConstants::default()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn uniform_shares() {
        assert_eq!(uniform_weights::<f64>(4).unwrap().weights, vec![0.25; 4]);
        assert_eq!(uniform_weights::<f64>(1).unwrap().weights, vec![1.0]);
        let seven = uniform_weights::<f64>(7).unwrap();
        assert!((seven.total() - 1.0).abs() < 1e-15);
        assert!(seven.weights.iter().all(|&w| w == 1.0 / 7.0));
        assert!(matches!(uniform_weights::<f64>(0), Err(Error::NoAuthors)));
    }

    #[test]
    fn intramural_bylines() {
        let w = position_weights::<f64>(5, true, &defaults()).unwrap();
        let m = 0.2 / 3.0;
        assert!(close(&w.weights, &[0.4, m, m, m, 0.4]));
        assert_eq!(position_weights::<f64>(2, true, &defaults()).unwrap().weights, vec![0.5, 0.5]);
        assert_eq!(position_weights::<f64>(1, true, &defaults()).unwrap().weights, vec![1.0]);
    }

    #[test]
    fn extramural_bylines() {
        let six = position_weights::<f64>(6, false, &defaults()).unwrap();
        assert_eq!(six.weights, vec![0.30, 0.15, 0.05, 0.05, 0.15, 0.30]);
        let w2 = position_weights::<f64>(2, false, &defaults()).unwrap();
        assert!(close(&w2.weights, &[0.5, 0.5]));
        let w3 = position_weights::<f64>(3, false, &defaults()).unwrap();
        assert!(close(&w3.weights, &[1.0 / 3.0; 3]));
        let w4 = position_weights::<f64>(4, false, &defaults()).unwrap();
        assert!(close(&w4.weights, &[1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0]));
        let w5 = position_weights::<f64>(5, false, &defaults()).unwrap();
        assert!(close(&w5.weights, &[0.3, 0.15, 0.1, 0.15, 0.3]));
    }

    #[test]
    fn contribution_lookup() {
        let c = defaults();
        let f = |pos, n, aff, regime| fractional_contribution::<f64>(pos, n, aff, regime, &c);
        assert_eq!(f(2, 5, 1, CreditRegime::Uniform).unwrap(), 0.2);
        assert_eq!(f(2, 6, 3, CreditRegime::PositionWeighted).unwrap(), 0.15);
        assert!((f(3, 5, 1, CreditRegime::PositionWeighted).unwrap() - 0.0666666666667).abs() < 1e-12);
        assert!(matches!(
            f(6, 5, 1, CreditRegime::Uniform),
            Err(Error::PositionOutOfRange { position: 6, total_authors: 5 })
        ));
        assert!(f(0, 5, 1, CreditRegime::Uniform).is_err());
    }

    #[test]
    fn intramural_flag() {
        assert!(is_intramural(1));
        assert!(!is_intramural(2));
        assert!(!is_intramural(3));
    }

    #[test]
    fn regime_from_scmap() {
        let mut map = ScMap::default();
        for (sc, d) in [
            ("HEMATOLOGY", "Clinical medicine"),
            ("ALGEBRA", "Mathematics"),
            ("OPTICS", "Physics"),
        ] {
            let discipline = Discipline::from(d);
            map.entries.insert(
                sc.into(),
                ScEntry {
                    regime: CreditRegime::default_for(&discipline),
                    discipline,
                },
            );
        }
        assert_eq!(detect_regime(&"HEMATOLOGY".into(), &map).unwrap(), CreditRegime::PositionWeighted);
        assert_eq!(detect_regime(&"ALGEBRA".into(), &map).unwrap(), CreditRegime::Uniform);
        assert_eq!(detect_regime(&"OPTICS".into(), &map).unwrap(), CreditRegime::Uniform);
        assert!(matches!(detect_regime(&"NOPE".into(), &map), Err(Error::UnknownSc(_))));
    }

    #[test]
    fn single_precision_sums_to_one() {
        for n in 1..=200 {
            for intramural in [true, false] {
                let w = position_weights::<f32>(n, intramural, &defaults()).unwrap();
                assert!((w.total() - 1.0).abs() < 1e-5, "n={n}");
            }
        }
    }

    proptest! {
        #[test]
        fn weights_are_a_palindromic_distribution(n in 1u32..=200, intramural: bool, uniform: bool) {
            let w: CreditWeights<f64> = if uniform {
                uniform_weights(n).unwrap()
            } else {
                position_weights(n, intramural, &defaults()).unwrap()
            };
            prop_assert_eq!(w.len(), n as usize);
            prop_assert!(w.weights.iter().all(|&x| x >= 0.0));
            prop_assert!((w.total() - 1.0).abs() <= 1e-9);
            let k = w.len();
            for i in 0..k {
                prop_assert!((w.weights[i] - w.weights[k - 1 - i]).abs() < 1e-15);
            }
        }

        #[test]
        fn roles_dominate_middle(n in 5u32..=200, intramural: bool) {
            let w = position_weights::<f64>(n, intramural, &defaults()).unwrap().weights;
            let k = w.len();
            prop_assert!(w[0] >= w[1]);
            prop_assert!(w[k - 1] >= w[k - 2]);
            for &mid in &w[2..k - 2] {
                prop_assert!(w[1] >= mid);
            }
        }
    }
}
