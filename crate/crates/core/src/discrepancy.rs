//! Discrepancies of the exceptional divisors and the minimal discrepancy.
//!
//! The discrepancy vector `a` is the unique rational solution of
//! `sum_j a_j (C . E_j) = C . K` over the supplied curve classes `C`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::{self, SolveError};
use crate::rational::{format_rational, int, Rational};
use crate::resolution::ResolutionData;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiscrepancyError {
    #[error("no curve classes supplied; the discrepancies are not determined")]
    NoCurves,
    #[error("curve classes do not determine the discrepancies: rank {rank} of {divisors}, nullspace dimension {nullity}")]
    Underdetermined {
        rank: usize,
        divisors: usize,
        nullity: usize,
    },
    #[error("pairing data is not numerically Q-Gorenstein: the linear system has no solution")]
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscrepancyVector(Vec<Rational>);

impl DiscrepancyVector {
    pub fn new(values: Vec<Rational>) -> Self {
        assert!(!values.is_empty(), "discrepancy vector must be nonempty");
        DiscrepancyVector(values)
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> &Rational {
        self.0.iter().min().expect("nonempty")
    }
}

impl std::ops::Index<usize> for DiscrepancyVector {
    type Output = Rational;

    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

/// A rational or negative infinity. Never used as a sentinel rational.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtendedRational {
    NegInfinity,
    Finite(Rational),
}

impl ExtendedRational {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtendedRational::Finite(v) => Some(v),
            ExtendedRational::NegInfinity => None,
        }
    }

    pub fn is_neg_infinity(&self) -> bool {
        matches!(self, ExtendedRational::NegInfinity)
    }
}

impl PartialOrd for ExtendedRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedRational {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtendedRational::*;
        match (self, other) {
            (NegInfinity, NegInfinity) => Ordering::Equal,
            (NegInfinity, Finite(_)) => Ordering::Less,
            (Finite(_), NegInfinity) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedRational::NegInfinity => f.write_str("-inf"),
            ExtendedRational::Finite(v) => f.write_str(&format_rational(v)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Terminal,
    CanonicalNotTerminal,
    LogCanonicalBoundary,
    NotLogCanonical,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Terminal => "terminal",
            Classification::CanonicalNotTerminal => "canonical_not_terminal",
            Classification::LogCanonicalBoundary => "log_canonical_boundary",
            Classification::NotLogCanonical => "not_log_canonical",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalDiscrepancy {
    pub value: ExtendedRational,
    pub classification: Classification,
}

pub fn compute_discrepancies(res: &ResolutionData) -> Result<DiscrepancyVector, DiscrepancyError> {
    if res.curves().is_empty() {
        return Err(DiscrepancyError::NoCurves);
    }
    let matrix = res.pairing_matrix();
    let rhs = res.canonical_pairings();
    match linalg::solve_unique(&matrix, &rhs) {
        Ok(a) => Ok(DiscrepancyVector(a)),
        Err(SolveError::Underdetermined {
            rank,
            unknowns,
            nullity,
        }) => Err(DiscrepancyError::Underdetermined {
            rank,
            divisors: unknowns,
            nullity,
        }),
        Err(SolveError::Inconsistent { .. }) => Err(DiscrepancyError::Inconsistent),
        Err(SolveError::Empty) => Err(DiscrepancyError::NoCurves),
    }
}

/// `min_j a_j` when every `a_j >= -1`, negative infinity otherwise.
pub fn minimal_discrepancy(a: &DiscrepancyVector) -> MinimalDiscrepancy {
    let min = a.min();
    if *min < -Rational::one() {
        return MinimalDiscrepancy {
            value: ExtendedRational::NegInfinity,
            classification: Classification::NotLogCanonical,
        };
    }
    let classification = if min.is_positive() {
        Classification::Terminal
    } else if min.is_zero() {
        Classification::CanonicalNotTerminal
    } else {
        Classification::LogCanonicalBoundary
    };
    MinimalDiscrepancy {
        value: ExtendedRational::Finite(min.clone()),
        classification,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniquenessCertificate {
    pub divisors: usize,
    pub curves: usize,
    pub rank: usize,
    /// Full column rank of the pairing matrix.
    pub unique: bool,
    /// Leading principal minors of the surface intersection matrix.
    pub surface_minors: Option<Vec<Rational>>,
    pub negative_definite: Option<bool>,
}

pub fn check_uniqueness_certificate(res: &ResolutionData) -> UniquenessCertificate {
    let rank = linalg::rank(&res.pairing_matrix());
    let l = res.divisor_count();
    let surface_minors = res
        .surface_geometry()
        .map(|g| linalg::leading_principal_minors(&g.intersection_matrix()));
    let negative_definite = surface_minors
        .as_ref()
        .map(|m| linalg::is_negative_definite(m));
    UniquenessCertificate {
        divisors: l,
        curves: res.curves().len(),
        rank,
        unique: rank == l,
        surface_minors,
        negative_definite,
    }
}

/// Convenience for tests and fixtures.
pub fn discrepancies_from_ints(values: &[i64]) -> DiscrepancyVector {
    DiscrepancyVector::new(values.iter().map(|&v| int(v)).collect())
}
