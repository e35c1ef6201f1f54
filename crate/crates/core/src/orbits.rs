//! Reeb-orbit families of the contact form built from the resolution.
//!
//! Families are indexed by monoid elements `V = sum_{i in I} d_i S_i` whose
//! support `I` lies in the nerve. Each family has
//!
//! * `cz   = 2 sum (a_i + 1) d_i + (1 - |I|) / 2`
//! * `size = 2n - |I| - 1`
//! * `lsft = cz - size / 2 + (n - 3)`
//!
//! and period within `eps^3 sum d_i` of `sum d_i (pi eps^2 + lambda_i)`.

use std::fmt;

use num_traits::{One, Zero};

use crate::discrepancy::{DiscrepancyVector, ExtendedRational, MinimalDiscrepancy};
use crate::rational::{format_rational, int, ratio, Rational};
use crate::resolution::ResolutionData;
use crate::symplectic::{RotationBlock, SegmentKind, SymplecticPath};

pub const DEFAULT_BUDGET: u64 = 8;

/// The rational stand-in for pi used in period formulas only.
pub fn default_pi() -> Rational {
    ratio(355, 113)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrbitError {
    #[error("support {support:?} is not in the nerve")]
    SubsetNotInNerve { support: Vec<usize> },
    #[error("multiplicities must be positive and match the support")]
    BadMultiplicity,
    #[error("support refers to divisor {index} but only {count} discrepancies are known")]
    UnknownDivisor { index: usize, count: usize },
    #[error("discrepancy {a} is not in (1/{n})Z")]
    NonIntegralDiscrepancy { a: String, n: u64 },
    #[error("budget must be at least 1")]
    ZeroBudget,
}

/// `V = sum_{i in support} d_i S_i` with every `d_i >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrbitMultiplicity {
    support: Vec<usize>,
    degrees: Vec<u64>,
}

impl OrbitMultiplicity {
    pub fn new(res: &ResolutionData, support: Vec<usize>, degrees: Vec<u64>) -> Result<Self, OrbitError> {
        if support.len() != degrees.len() || support.is_empty() || degrees.contains(&0) {
            return Err(OrbitError::BadMultiplicity);
        }
        let mut pairs: Vec<(usize, u64)> = support.into_iter().zip(degrees).collect();
        pairs.sort_unstable();
        let (support, degrees): (Vec<usize>, Vec<u64>) = pairs.into_iter().unzip();
        if !res.nerve().contains(&support) {
            return Err(OrbitError::SubsetNotInNerve { support });
        }
        Ok(OrbitMultiplicity { support, degrees })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn total_degree(&self) -> u64 {
        self.degrees.iter().sum()
    }

    fn terms(&self) -> impl Iterator<Item = (usize, Rational)> + '_ {
        self.support
            .iter()
            .zip(&self.degrees)
            .map(|(&i, &d)| (i, int(d as i64)))
    }
}

impl fmt::Display for OrbitMultiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .support
            .iter()
            .zip(&self.degrees)
            .map(|(i, d)| format!("{d}*S{}", i + 1))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyIndices {
    pub cz: Rational,
    pub size: i64,
    pub lsft: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitFamily {
    pub multiplicity: OrbitMultiplicity,
    pub cz: Rational,
    pub size: i64,
    pub lsft: Rational,
    pub period_center: Rational,
    pub period_radius: Rational,
}

/// `2 sum (a_i + 1) d_i` over the support.
fn weighted_log_discrepancy(v: &OrbitMultiplicity, a: &DiscrepancyVector) -> Result<Rational, OrbitError> {
    v.terms()
        .map(|(i, d)| {
            if i >= a.len() {
                return Err(OrbitError::UnknownDivisor { index: i, count: a.len() });
            }
            Ok(int(2) * (&a[i] + int(1)) * d)
        })
        .sum()
}

pub fn family_indices(v: &OrbitMultiplicity, a: &DiscrepancyVector, n: u32) -> Result<FamilyIndices, OrbitError> {
    let support = v.support.len() as i64;
    let cz = weighted_log_discrepancy(v, a)? + ratio(1 - support, 2);
    let size = 2 * n as i64 - support - 1;
    let lsft = &cz - ratio(size, 2) + int(n as i64 - 3);
    Ok(FamilyIndices { cz, size, lsft })
}

/// `2 sum (a_i + 1) d_i - 2`, the lower SFT index read off without the
/// kernel-size bookkeeping.
pub fn lsft_direct(v: &OrbitMultiplicity, a: &DiscrepancyVector) -> Result<Rational, OrbitError> {
    Ok(weighted_log_discrepancy(v, a)? - int(2))
}

pub fn family_period(
    v: &OrbitMultiplicity,
    wrapping_numbers: &[Rational],
    epsilon: &Rational,
    pi: &Rational,
) -> (Rational, Rational) {
    let eps_sq = epsilon * epsilon;
    let center = v
        .terms()
        .map(|(i, d)| d * (pi * &eps_sq + &wrapping_numbers[i]))
        .sum();
    let radius = &eps_sq * epsilon * int(v.total_degree() as i64);
    (center, radius)
}

/// Positive compositions of every total up to `budget` into `parts` parts.
fn compositions(parts: usize, budget: u64) -> Vec<Vec<u64>> {
    fn go(parts: usize, remaining: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if parts == 0 {
            out.push(prefix.clone());
            return;
        }
        // Leave at least one for each later part.
        let max = remaining.saturating_sub(parts as u64 - 1);
        for d in 1..=max {
            prefix.push(d);
            go(parts - 1, remaining - d, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if budget >= parts as u64 {
        go(parts, budget, &mut Vec::new(), &mut out);
    }
    out
}

/// Every family with `sum d_i <= budget`, sorted by total degree, then
/// support, then degrees.
pub fn enumerate_families(
    res: &ResolutionData,
    a: &DiscrepancyVector,
    budget: u64,
    pi: &Rational,
) -> Result<Vec<OrbitFamily>, OrbitError> {
    if budget == 0 {
        return Err(OrbitError::ZeroBudget);
    }
    let n = res.complex_dimension();
    let mut families = Vec::new();
    for support in res.nerve() {
        for degrees in compositions(support.len(), budget) {
            let v = OrbitMultiplicity {
                support: support.clone(),
                degrees,
            };
            let idx = family_indices(&v, a, n)?;
            let (period_center, period_radius) =
                family_period(&v, res.wrapping_numbers(), res.epsilon(), pi);
            families.push(OrbitFamily {
                multiplicity: v,
                cz: idx.cz,
                size: idx.size,
                lsft: idx.lsft,
                period_center,
                period_radius,
            });
        }
    }
    families.sort_by(|x, y| {
        let (vx, vy) = (&x.multiplicity, &y.multiplicity);
        vx.total_degree()
            .cmp(&vy.total_degree())
            .then_with(|| vx.support.cmp(&vy.support))
            .then_with(|| vx.degrees.cmp(&vy.degrees))
    });
    Ok(families)
}

/// Infimum of the lower SFT index over all families: `2 min_j a_j` when
/// every `a_j >= -1`, negative infinity otherwise.
pub fn mi_closed_form(a: &DiscrepancyVector) -> ExtendedRational {
    let min = a.min();
    if *min < -Rational::one() {
        ExtendedRational::NegInfinity
    } else {
        ExtendedRational::Finite(int(2) * min)
    }
}

/// Minimum lower SFT index over the families of total degree at most
/// `budget`, by exhaustive enumeration.
pub fn mi_bruteforce(res: &ResolutionData, a: &DiscrepancyVector, budget: u64) -> Result<Rational, OrbitError> {
    let families = enumerate_families(res, a, budget, &default_pi())?;
    Ok(families
        .into_iter()
        .map(|f| f.lsft)
        .min()
        .expect("every nerve has singletons"))
}

/// `mi_bruteforce` at every budget `1..=budget`.
pub fn mi_descent(res: &ResolutionData, a: &DiscrepancyVector, budget: u64) -> Result<Vec<Rational>, OrbitError> {
    let families = enumerate_families(res, a, budget, &default_pi())?;
    let mut table = Vec::with_capacity(budget as usize);
    let mut best: Option<Rational> = None;
    let mut iter = families.iter().peekable();
    for d in 1..=budget {
        while let Some(f) = iter.next_if(|f| f.multiplicity.total_degree() <= d) {
            if best.as_ref().is_none_or(|b| f.lsft < *b) {
                best = Some(f.lsft.clone());
            }
        }
        table.push(best.clone().expect("budget 1 already has families"));
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    EqualTwiceMd,
    HmiNegative,
    Mismatch,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::EqualTwiceMd => "EQUAL_TWICE_MD",
            Relation::HmiNegative => "HMI_NEGATIVE",
            Relation::Mismatch => "MISMATCH",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremVerdict {
    pub md: MinimalDiscrepancy,
    pub mi_closed_form: ExtendedRational,
    pub mi_bruteforce_at_budget: Rational,
    pub budget: u64,
    pub relation: Relation,
}

/// Compares the minimal discrepancy with both computations of `mi`.
/// `descent[k]` is the brute-force minimum at budget `k + 1`.
pub fn theorem_verdict(
    md: &MinimalDiscrepancy,
    mi_closed: &ExtendedRational,
    descent: &[Rational],
) -> TheoremVerdict {
    let brute = descent.last().expect("descent table is nonempty").clone();
    let relation = match &md.value {
        ExtendedRational::Finite(m) => {
            let twice = int(2) * m;
            if mi_closed.finite() == Some(&twice) && brute == twice {
                Relation::EqualTwiceMd
            } else {
                Relation::Mismatch
            }
        }
        ExtendedRational::NegInfinity => {
            let decreasing = descent.windows(2).all(|w| w[1] < w[0]);
            if mi_closed.is_neg_infinity() && brute < Rational::zero() && decreasing {
                Relation::HmiNegative
            } else {
                Relation::Mismatch
            }
        }
    };
    TheoremVerdict {
        md: md.clone(),
        mi_closed_form: mi_closed.clone(),
        mi_bruteforce_at_budget: brute,
        budget: descent.len() as u64,
        relation,
    }
}

/// Index of a `k`-fold orbit around the fiber of a cone over a divisor with
/// discrepancy `a`, from the winding degrees of the trivializing sections:
/// the section of `K^N` has `a N k` zeros along the `k`-fold fiber loop, the
/// fiber rotation contributes degree `-k N`, and the index is `2/N` times
/// the resulting degree.
pub fn cone_orbit_cz(a: &Rational, k: u64, n: u64) -> Result<Rational, OrbitError> {
    let n_rat = int(n as i64);
    let k_rat = int(k as i64);
    if n == 0 || !(a * &n_rat).is_integer() {
        return Err(OrbitError::NonIntegralDiscrepancy {
            a: format_rational(a),
            n,
        });
    }
    let zeros_along_orbit = a * &n_rat * &k_rat;
    let fiber_degree = -(&k_rat * &n_rat);
    let degree = zeros_along_orbit - fiber_degree;
    Ok(int(2) * degree / n_rat)
}

/// A linearized return path for the cone orbit in the `N`-fold trivialized
/// sum: a unitary loop in `U((n - 1) N)` whose determinant winds
/// `(a + 1) k N` times.
pub fn cone_orbit_model_path(a: &Rational, k: u64, n_mult: u64, complex_dimension: u32) -> Result<SymplecticPath, OrbitError> {
    let n_rat = int(n_mult as i64);
    if n_mult == 0 || !(a * &n_rat).is_integer() {
        return Err(OrbitError::NonIntegralDiscrepancy {
            a: format_rational(a),
            n: n_mult,
        });
    }
    let winding = (a + int(1)) * int(k as i64) * &n_rat;
    let blocks = (complex_dimension as u64 - 1) * n_mult;
    let mut rot = vec![RotationBlock {
        start: Rational::zero(),
        rate: winding,
    }];
    rot.extend((1..blocks).map(|_| RotationBlock {
        start: Rational::zero(),
        rate: Rational::zero(),
    }));
    Ok(SymplecticPath::single(SegmentKind::Rotation { blocks: rot }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationReport {
    pub extremal_divisor: usize,
    pub extremal_lsft: Rational,
    pub extremal_period: Rational,
    /// Families below this period center are checked.
    pub threshold: Rational,
    pub checked: Vec<OrbitFamily>,
    pub violations: Vec<OrbitFamily>,
}

/// Checks that every family other than the extremal one `S_j` (the unique
/// divisor with `a_j = md >= 0`) whose period center lies below the extremal
/// period minus `eps^2` has `lsft >= 0` and `lsft > 2 md`. Returns `None`
/// when `md` is negative or the minimizing divisor is not unique.
pub fn separation_check(
    res: &ResolutionData,
    a: &DiscrepancyVector,
    budget: u64,
    pi: &Rational,
) -> Result<Option<SeparationReport>, OrbitError> {
    let min = a.min().clone();
    if min < Rational::zero() {
        return Ok(None);
    }
    let argmins: Vec<usize> = (0..a.len()).filter(|&i| a[i] == min).collect();
    let [j] = argmins[..] else {
        return Ok(None);
    };
    let eps_sq = res.epsilon() * res.epsilon();
    let eps_m = res.epsilon_m();
    let extremal_period = pi * eps_m * eps_m + &res.wrapping_numbers()[j];
    let threshold = &extremal_period - &eps_sq;
    let twice_md = int(2) * &min;
    let extremal = OrbitMultiplicity {
        support: vec![j],
        degrees: vec![1],
    };
    let extremal_lsft = family_indices(&extremal, a, res.complex_dimension())?.lsft;
    let checked: Vec<OrbitFamily> = enumerate_families(res, a, budget, pi)?
        .into_iter()
        .filter(|f| f.multiplicity != extremal && f.period_center < threshold)
        .collect();
    let violations = checked
        .iter()
        .filter(|f| !(f.lsft >= Rational::zero() && f.lsft > twice_md))
        .cloned()
        .collect();
    Ok(Some(SeparationReport {
        extremal_divisor: j,
        extremal_lsft,
        extremal_period,
        threshold,
        checked,
        violations,
    }))
}
