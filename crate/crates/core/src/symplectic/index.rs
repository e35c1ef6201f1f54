use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::matrix::{
    complexify, operator_norm, relative_distance, standard_form, to_dmatrix, unitary_defect,
};
use super::path::{SegmentEvaluator, SegmentKind, SymplecticPath};
use super::{CrossingTolerances, CzError};
use crate::rational::{format_rational, int, to_f64, Rational};

/// An index in `(1 / 2N) Z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexValue {
    value: Rational,
    multiplicity: u64,
}

impl IndexValue {
    pub fn new(value: Rational, multiplicity: u64) -> Self {
        assert!(multiplicity > 0, "multiplicity must be positive");
        let scaled = &value * int(2 * multiplicity as i64);
        assert!(scaled.is_integer(), "index {value} is not in (1/{})Z", 2 * multiplicity);
        IndexValue { value, multiplicity }
    }

    pub fn from_halves(halves: i64) -> Self {
        IndexValue::new(Rational::new(BigInt::from(halves), BigInt::from(2)), 1)
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn multiplicity(&self) -> u64 {
        self.multiplicity
    }

    /// `2N * value`, always an integer.
    pub fn scaled_numerator(&self) -> BigInt {
        (&self.value * int(2 * self.multiplicity as i64)).to_integer()
    }
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.value))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub segment: usize,
    /// Local segment time in `[0, 1]`.
    pub local_time: f64,
    pub exact_local_time: Option<Rational>,
    /// Normalized time along the whole path.
    pub time: f64,
    pub exact_time: Option<Rational>,
    pub kernel_dim: usize,
    pub signature: i64,
    /// Crossings at a segment end count with half weight.
    pub endpoint: bool,
}

impl Crossing {
    /// Contribution in half-units.
    pub fn halves(&self) -> i64 {
        if self.endpoint {
            self.signature
        } else {
            2 * self.signature
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexReport {
    pub dimension: usize,
    pub crossings: Vec<Crossing>,
    pub index: IndexValue,
}

/// A crossing within one segment before it is placed on the whole path.
#[derive(Debug, Clone)]
struct LocalCrossing {
    time: f64,
    exact: Option<Rational>,
    kernel_dim: usize,
    signature: i64,
}

fn sign(r: &Rational) -> i64 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

fn ceil(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

fn floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

/// Kernel dimension of `A(s) - I` for the closed-form kinds.
fn exact_kernel_dim(kind: &SegmentKind, s: &Rational, tol: &CrossingTolerances) -> usize {
    match kind {
        SegmentKind::Rotation { blocks } => blocks
            .iter()
            .filter(|b| (&b.start + &b.rate * s).is_integer())
            .count()
            * 2,
        SegmentKind::Shear { blocks } => blocks
            .iter()
            .map(|b| if (&b.start + &b.rate * s).is_zero() { 2 } else { 1 })
            .sum(),
        SegmentKind::BlockSum { parts } => parts.iter().map(|p| exact_kernel_dim(p, s, tol)).sum(),
        other => numeric_kernel_dim(&other.evaluate(to_f64(s)).0, tol),
    }
}

fn numeric_kernel_dim(a: &DMatrix<f64>, tol: &CrossingTolerances) -> usize {
    let n = a.nrows();
    let scale = a.norm().max(1.0);
    let shifted = a - DMatrix::<f64>::identity(n, n);
    shifted
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&v| v < tol.kernel * 100.0 * scale)
        .count()
}

/// Closed-form crossings of a rotation block: `start + rate s` hits an integer.
fn rotation_crossings(start: &Rational, rate: &Rational) -> Vec<(Rational, i64)> {
    if rate.is_zero() {
        return Vec::new();
    }
    let end = start + rate;
    let (lo, hi) = if rate.is_positive() {
        (start.clone(), end)
    } else {
        (end, start.clone())
    };
    let mut out = Vec::new();
    let mut m = ceil(&lo);
    let last = floor(&hi);
    while m <= last {
        let s = (Rational::from_integer(m.clone()) - start) / rate;
        out.push((s, 2 * sign(rate)));
        m += 1;
    }
    out
}

/// The shear `[[1, 0], [-c(s), 1]]` has a one-dimensional kernel with zero
/// crossing form except where `c(s) = 0`; there the form is `diag(-c', 0)`
/// and only its nondegenerate part is counted.
fn shear_crossings(start: &Rational, rate: &Rational) -> Vec<(Rational, i64)> {
    if rate.is_zero() {
        return Vec::new();
    }
    let s = -start / rate;
    if s.is_negative() || s > int(1) {
        return Vec::new();
    }
    vec![(s, -sign(rate))]
}

fn merge_exact(
    raw: Vec<(Rational, i64)>,
    kind: &SegmentKind,
    tol: &CrossingTolerances,
) -> Vec<LocalCrossing> {
    let mut raw = raw;
    raw.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<LocalCrossing> = Vec::new();
    for (s, sig) in raw {
        match out.last_mut() {
            Some(last) if last.exact.as_ref() == Some(&s) => last.signature += sig,
            _ => out.push(LocalCrossing {
                time: to_f64(&s),
                kernel_dim: exact_kernel_dim(kind, &s, tol),
                exact: Some(s),
                signature: sig,
            }),
        }
    }
    out
}

fn segment_crossings(
    kind: &SegmentKind,
    segment: usize,
    tol: &CrossingTolerances,
) -> Result<Vec<LocalCrossing>, CzError> {
    match kind {
        SegmentKind::Constant { .. } => Ok(Vec::new()),
        SegmentKind::Rotation { blocks } => {
            let raw = blocks
                .iter()
                .flat_map(|b| rotation_crossings(&b.start, &b.rate))
                .collect();
            Ok(merge_exact(raw, kind, tol))
        }
        SegmentKind::Shear { blocks } => {
            let raw = blocks
                .iter()
                .flat_map(|b| shear_crossings(&b.start, &b.rate))
                .collect();
            Ok(merge_exact(raw, kind, tol))
        }
        SegmentKind::BlockSum { parts } => {
            let mut all = Vec::new();
            for p in parts {
                all.extend(segment_crossings(p, segment, tol)?);
            }
            all.sort_by(|a, b| a.time.total_cmp(&b.time));
            let mut out: Vec<LocalCrossing> = Vec::new();
            for c in all {
                let same = out.last().is_some_and(|last| match (&last.exact, &c.exact) {
                    (Some(x), Some(y)) => x == y,
                    _ => (last.time - c.time).abs() < 1e-9,
                });
                if same {
                    let last = out.last_mut().expect("checked");
                    last.signature += c.signature;
                    if last.exact.is_none() {
                        last.exact = c.exact;
                    }
                } else {
                    out.push(c);
                }
            }
            for c in &mut out {
                c.kernel_dim = match &c.exact {
                    Some(s) => exact_kernel_dim(kind, s, tol),
                    None => numeric_kernel_dim(&kind.evaluate(c.time).0, tol),
                };
            }
            Ok(out)
        }
        _ => numeric_crossings(kind, segment, tol),
    }
}

fn sigma_min(kind: &SegmentEvaluator, s: f64) -> (f64, f64) {
    let (a, _) = kind.evaluate(s);
    let n = a.nrows();
    let scale = a.norm().max(1.0);
    let v = (a - DMatrix::<f64>::identity(n, n))
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    (v, scale)
}

/// Golden-section minimization of the smallest singular value of `A(s) - I`.
fn refine_minimum(kind: &SegmentEvaluator, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = sigma_min(kind, x1).0;
    let mut f2 = sigma_min(kind, x2).0;
    for _ in 0..200 {
        if hi - lo < 1e-15 {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = sigma_min(kind, x1).0;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = sigma_min(kind, x2).0;
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Crossing form on `ker(A - I)` at local time `s`, returning the kernel
/// dimension and the signature.
fn analyze_crossing(
    kind: &SegmentEvaluator,
    segment: usize,
    s: f64,
    tol: &CrossingTolerances,
) -> Result<(usize, i64), CzError> {
    let (a, d) = kind.evaluate(s);
    let n = a.nrows();
    let scale = a.norm().max(1.0);
    let shifted = &a - DMatrix::<f64>::identity(n, n);
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let kernel_cols: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &sv)| sv < tol.kernel * 100.0 * scale)
        .map(|(i, _)| i)
        .collect();
    let k = kernel_cols.len();
    let basis = DMatrix::from_fn(n, k, |r, c| v_t[(kernel_cols[c], r)]);
    let j = standard_form(n);
    let form = a.transpose() * j.transpose() * &d;
    let sym = (&form + form.transpose()) * 0.5;
    let restricted = basis.transpose() * sym * &basis;
    let eig = SymmetricEigen::new(restricted);
    let mut signature = 0i64;
    for &lambda in eig.eigenvalues.iter() {
        if lambda.abs() < tol.eigenvalue {
            return Err(CzError::DegenerateCrossing {
                segment,
                time: s,
                eigenvalue: lambda,
            });
        }
        signature += if lambda > 0.0 { 1 } else { -1 };
    }
    Ok((k, signature))
}

/// Grid scan of `sigma_min(A(s) - I)` with golden-section refinement of
/// every local minimum.
fn numeric_crossings(
    kind: &SegmentKind,
    segment: usize,
    tol: &CrossingTolerances,
) -> Result<Vec<LocalCrossing>, CzError> {
    let kind = &kind.evaluator();
    let g = tol.grid.max(2);
    let step = 1.0 / g as f64;
    let values: Vec<(f64, f64)> = (0..=g).map(|i| sigma_min(kind, i as f64 * step)).collect();
    let below = |v: f64, scale: f64| v < tol.kernel * scale;

    let mut times: Vec<f64> = Vec::new();
    let start_hit = below(values[0].0, values[0].1);
    let end_hit = below(values[g].0, values[g].1);
    if start_hit {
        times.push(0.0);
    }
    for i in 0..=g {
        if (i == 0 && start_hit) || (i == g && end_hit) {
            continue;
        }
        let left_ok = i == 0 || values[i].0 <= values[i - 1].0;
        let right_ok = i == g || values[i].0 <= values[i + 1].0;
        if !(left_ok && right_ok) {
            continue;
        }
        let lo = if i == 0 { 0.0 } else { (i - 1) as f64 * step };
        let hi = if i == g { 1.0 } else { (i + 1) as f64 * step };
        let (s, v) = refine_minimum(kind, lo, hi);
        let scale = sigma_min(kind, s).1;
        if !below(v, scale) {
            continue;
        }
        let near_start = start_hit && s < 1e-9;
        let near_end = end_hit && s > 1.0 - 1e-9;
        let duplicate = times.iter().any(|&t| (t - s).abs() < 1e-9);
        if !(near_start || near_end || duplicate) {
            times.push(s);
        }
    }
    if end_hit {
        times.push(1.0);
    }
    times.sort_by(f64::total_cmp);

    times
        .into_iter()
        .map(|s| {
            let (kernel_dim, signature) = analyze_crossing(kind, segment, s, tol)?;
            let exact = if s == 0.0 {
                Some(Rational::zero())
            } else if s == 1.0 {
                Some(int(1))
            } else {
                None
            };
            Ok(LocalCrossing {
                time: s,
                exact,
                kernel_dim,
                signature,
            })
        })
        .collect()
}

pub fn cz_index_report(path: &SymplecticPath, tol: &CrossingTolerances) -> Result<IndexReport, CzError> {
    let points = path.breakpoints();
    let mut crossings = Vec::new();
    for (i, seg) in path.segments().iter().enumerate() {
        let (lo, hi) = (&points[i], &points[i + 1]);
        for c in segment_crossings(&seg.kind, i, tol)? {
            let endpoint = match &c.exact {
                Some(s) => s.is_zero() || *s == int(1),
                None => c.time <= 0.0 || c.time >= 1.0,
            };
            let exact_time = c.exact.as_ref().map(|s| lo + (hi - lo) * s);
            crossings.push(Crossing {
                segment: i,
                local_time: c.time,
                time: to_f64(lo) + (to_f64(hi) - to_f64(lo)) * c.time,
                exact_local_time: c.exact,
                exact_time,
                kernel_dim: c.kernel_dim,
                signature: c.signature,
                endpoint,
            });
        }
    }
    let halves: i64 = crossings.iter().map(Crossing::halves).sum();
    Ok(IndexReport {
        dimension: path.dimension(),
        crossings,
        index: IndexValue::from_halves(halves),
    })
}

pub fn cz_index(path: &SymplecticPath, tol: &CrossingTolerances) -> Result<IndexValue, CzError> {
    cz_index_report(path, tol).map(|r| r.index)
}

/// `cz_index(path) / N` for a path representing an `N`-fold direct sum.
pub fn cz_rational(path: &SymplecticPath, n: u64, tol: &CrossingTolerances) -> Result<IndexValue, CzError> {
    if n == 0 {
        return Err(CzError::ZeroMultiplicity);
    }
    let full = cz_index(path, tol)?;
    Ok(IndexValue::new(full.value() / int(n as i64), n))
}

/// Unwrapped change of `arg det_C A(s)` over a numeric segment, in turns.
fn numeric_winding(kind: &SegmentKind, segment_start: f64, span: f64, tol: &CrossingTolerances) -> Result<f64, CzError> {
    let kind = kind.evaluator();
    let phase = |s: f64| -> Result<f64, CzError> {
        let (a, _) = kind.evaluate(s);
        let defect = unitary_defect(&a);
        if defect > tol.symplectic * 100.0 {
            return Err(CzError::NotUnitary {
                time: segment_start + span * s,
                defect,
            });
        }
        Ok(complexify(&a).determinant().arg())
    };
    let wrap = |d: f64| {
        let tau = std::f64::consts::TAU;
        d - tau * (d / tau).round()
    };
    let g = tol.grid.max(2);
    let mut total = 0.0;
    let mut prev_s = 0.0;
    let mut prev = phase(0.0)?;
    for i in 1..=g {
        let s = i as f64 / g as f64;
        let next = phase(s)?;
        let mut d = wrap(next - prev);
        if d.abs() > 1.0 {
            // Resolve fast phase motion on a finer subgrid.
            d = 0.0;
            let mut p = prev;
            for k in 1..=64 {
                let u = prev_s + (s - prev_s) * k as f64 / 64.0;
                let q = phase(u)?;
                d += wrap(q - p);
                p = q;
            }
        }
        total += d;
        prev = next;
        prev_s = s;
    }
    Ok(total / std::f64::consts::TAU)
}

/// Winding number of the complex determinant of a unitary loop.
pub fn determinant_loop_degree(path: &SymplecticPath, tol: &CrossingTolerances) -> Result<i64, CzError> {
    let distance = relative_distance(&path.start(), &path.end());
    if distance > tol.continuity {
        return Err(CzError::NotALoop { distance });
    }
    let points = path.breakpoints();
    let mut exact = Rational::zero();
    let mut numeric = 0.0;
    for (i, seg) in path.segments().iter().enumerate() {
        let start = to_f64(&points[i]);
        let span = to_f64(&points[i + 1]) - start;
        match &seg.kind {
            SegmentKind::Rotation { blocks } => {
                for b in blocks {
                    exact += &b.rate;
                }
            }
            SegmentKind::Constant { matrix } => {
                let defect = unitary_defect(&to_dmatrix(matrix));
                if defect > tol.symplectic * 100.0 {
                    return Err(CzError::NotUnitary { time: start, defect });
                }
            }
            other => numeric += numeric_winding(other, start, span, tol)?,
        }
    }
    let total = to_f64(&exact) + numeric;
    let rounded = total.round();
    if (total - rounded).abs() > 1e-6 {
        return Err(CzError::NotALoop {
            distance: (total - rounded).abs(),
        });
    }
    if numeric == 0.0 && !exact.is_integer() {
        return Err(CzError::NotALoop {
            distance: to_f64(&(&exact - exact.round())).abs(),
        });
    }
    Ok(rounded as i64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionBoundReport {
    /// `dim ker(A - I)` at the point the extension starts from.
    pub kernel_dim: usize,
    pub index: IndexValue,
    pub lower: Rational,
    pub upper: Rational,
    pub within: bool,
    /// Largest operator-norm distance from the start point seen on the scan.
    pub max_distance: f64,
}

/// Index of a short extension of `path` against the bound `[-k/2, k/2]`.
pub fn small_extension_bound(
    path: &SymplecticPath,
    extension: &SymplecticPath,
    tol: &CrossingTolerances,
) -> Result<ExtensionBoundReport, CzError> {
    if path.dimension() != extension.dimension() {
        return Err(CzError::DimensionMismatch {
            left: path.dimension(),
            right: extension.dimension(),
        });
    }
    let anchor = path.end();
    let distance = relative_distance(&anchor, &extension.start());
    if distance > tol.continuity {
        return Err(CzError::EndpointMismatch { distance });
    }
    let g = tol.grid.max(2);
    let mut max_distance: f64 = 0.0;
    for seg in extension.segments() {
        let eval = seg.kind.evaluator();
        for i in 0..=g {
            let (m, _) = eval.evaluate(i as f64 / g as f64);
            max_distance = max_distance.max(operator_norm(&(m - &anchor)));
        }
    }
    if max_distance > tol.neighborhood {
        return Err(CzError::ExtensionLeavesNeighborhood {
            distance: max_distance,
            radius: tol.neighborhood,
        });
    }
    let kernel_dim = numeric_kernel_dim(&anchor, tol);
    let index = cz_index(extension, tol)?;
    let upper = Rational::new(BigInt::from(kernel_dim), BigInt::from(2));
    let lower = -upper.clone();
    let within = index.value() >= &lower && index.value() <= &upper;
    Ok(ExtensionBoundReport {
        kernel_dim,
        index,
        lower,
        upper,
        within,
        max_distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::symplectic::path::RotationBlock;

    fn tol() -> CrossingTolerances {
        CrossingTolerances::default()
    }

    fn matrix(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    fn exp_path(generator: Vec<Vec<Rational>>) -> SymplecticPath {
        let n = generator.len();
        SymplecticPath::single(SegmentKind::ExpQuadratic {
            base: crate::symplectic::identity_exact(n),
            generator,
            from: int(0),
            to: int(1),
        })
    }

    fn scalar_generator(c: Rational) -> Vec<Vec<Rational>> {
        vec![vec![c.clone(), int(0)], vec![int(0), c]]
    }

    /// Rotation by `c tau` radians crosses the identity at `tau = 2 pi m / c`.
    fn rotation_oracle(c: f64) -> Rational {
        int(1 + 2 * (c / std::f64::consts::TAU).floor() as i64)
    }

    #[test]
    fn shear_and_its_reverse() {
        for a in [1, 2, 7] {
            let p = SymplecticPath::shear(int(a));
            assert_eq!(cz_index(&p, &tol()).unwrap(), IndexValue::from_halves(-1));
            assert_eq!(cz_index(&p.reversed(), &tol()).unwrap(), IndexValue::from_halves(1));
            let neg = SymplecticPath::shear(int(-a));
            assert_eq!(cz_index(&neg, &tol()).unwrap(), IndexValue::from_halves(1));
        }
    }

    #[test]
    fn unitary_loops_have_index_twice_the_degree() {
        for k in -3..=3 {
            let p = SymplecticPath::unitary_loop(&[k]);
            assert_eq!(cz_index(&p, &tol()).unwrap().value(), &int(2 * k));
            assert_eq!(determinant_loop_degree(&p, &tol()).unwrap(), k);
        }
        let p = SymplecticPath::unitary_loop(&[2, -1, 3]);
        assert_eq!(cz_index(&p, &tol()).unwrap().value(), &int(8));
        assert_eq!(determinant_loop_degree(&p, &tol()).unwrap(), 4);
    }

    #[test]
    fn constant_paths_have_index_zero() {
        let p = SymplecticPath::constant(matrix(&[&[1, 1], &[0, 1]]));
        assert_eq!(cz_index(&p, &tol()).unwrap().value(), &int(0));
        let report = cz_index_report(&SymplecticPath::constant_identity(4), &tol()).unwrap();
        assert!(report.crossings.is_empty());
        assert_eq!(report.dimension, 4);
    }

    #[test]
    fn catenation_adds() {
        let half = SymplecticPath::single(SegmentKind::Rotation {
            blocks: vec![RotationBlock {
                start: int(0),
                rate: ratio(1, 2),
            }],
        });
        let rest = SymplecticPath::single(SegmentKind::Rotation {
            blocks: vec![RotationBlock {
                start: ratio(1, 2),
                rate: ratio(1, 2),
            }],
        });
        let whole = half.catenate(&rest, &tol()).unwrap();
        let a = cz_index(&half, &tol()).unwrap();
        let b = cz_index(&rest, &tol()).unwrap();
        assert_eq!(a.value(), &int(1));
        assert_eq!(b.value(), &int(1));
        assert_eq!(cz_index(&whole, &tol()).unwrap().value(), &int(2));
    }

    #[test]
    fn rotation_crossings_at_exact_times() {
        let p = SymplecticPath::unitary_loop(&[3]);
        let report = cz_index_report(&p, &tol()).unwrap();
        let times: Vec<Rational> = report
            .crossings
            .iter()
            .map(|c| c.exact_time.clone().unwrap())
            .collect();
        assert_eq!(times, vec![int(0), ratio(1, 3), ratio(2, 3), int(1)]);
        assert!(report.crossings[0].endpoint && report.crossings[3].endpoint);
        assert!(report.crossings.iter().all(|c| c.kernel_dim == 2));
    }

    #[test]
    fn positive_scalar_generator_matches_rotation_count() {
        for c in [ratio(1, 2), int(3), int(7), int(13), ratio(40, 3)] {
            let p = exp_path(scalar_generator(c.clone()));
            let expected = rotation_oracle(to_f64(&c));
            assert_eq!(cz_index(&p, &tol()).unwrap().value(), &expected, "c = {c}");
        }
    }

    #[test]
    fn elliptic_generator_frequency() {
        // exp(tau J S) rotates with frequency sqrt(det S) for positive definite S.
        let s = matrix(&[&[8, 1], &[1, 9]]);
        let expected = rotation_oracle(71f64.sqrt());
        assert_eq!(cz_index(&exp_path(s), &tol()).unwrap().value(), &expected);
    }

    #[test]
    fn hyperbolic_generator_has_index_zero() {
        let s = matrix(&[&[1, 0], &[0, -1]]);
        let report = cz_index_report(&exp_path(s), &tol()).unwrap();
        assert_eq!(report.crossings.len(), 1);
        assert_eq!(report.crossings[0].signature, 0);
        assert_eq!(report.index.value(), &int(0));
    }

    #[test]
    fn numeric_segments_add_over_direct_sums() {
        let s = vec![
            vec![int(3), int(0), int(0), int(0)],
            vec![int(0), int(3), int(0), int(0)],
            vec![int(0), int(0), int(8), int(0)],
            vec![int(0), int(0), int(0), int(8)],
        ];
        let expected = rotation_oracle(3.0) + rotation_oracle(8.0);
        assert_eq!(cz_index(&exp_path(s), &tol()).unwrap().value(), &expected);
    }

    #[test]
    fn conjugation_preserves_the_index() {
        let p = exp_path(scalar_generator(int(9)));
        let by = matrix(&[&[1, 2], &[0, 1]]);
        let q = p.conjugated(&by).unwrap();
        assert_eq!(cz_index(&q, &tol()).unwrap(), cz_index(&p, &tol()).unwrap());
    }

    #[test]
    fn degenerate_form_is_an_error() {
        // exp(tau J diag(1, 0)) is a shear with a one-dimensional kernel throughout.
        let s = matrix(&[&[1, 0], &[0, 0]]);
        assert!(matches!(
            cz_index(&exp_path(s), &tol()),
            Err(CzError::DegenerateCrossing { .. })
        ));
    }

    #[test]
    fn numeric_loop_degree() {
        let c = ratio(710 * 2, 113);
        let p = exp_path(scalar_generator(c));
        // 2 * 355/113 is not exactly 2 pi, so the path only nearly closes.
        assert!(matches!(determinant_loop_degree(&p, &tol()), Err(CzError::NotALoop { .. })));
        let k2 = SymplecticPath::unitary_loop(&[2]).conjugated(&matrix(&[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(determinant_loop_degree(&k2, &tol()).unwrap(), 2);
    }

    #[test]
    fn rational_index_divides_by_multiplicity() {
        let p = SymplecticPath::unitary_loop(&[3, 0, 0]);
        let v = cz_rational(&p, 3, &tol()).unwrap();
        assert_eq!(v.value(), &int(2));
        assert_eq!(v.scaled_numerator(), 12.into());
        let v = cz_rational(&SymplecticPath::unitary_loop(&[1]), 3, &tol()).unwrap();
        assert_eq!(v.value(), &ratio(2, 3));
        assert_eq!(cz_rational(&p, 0, &tol()).unwrap_err(), CzError::ZeroMultiplicity);
    }

    #[test]
    fn short_extension_obeys_the_kernel_bound() {
        let anchor = SymplecticPath::constant_identity(2);
        let ext = exp_path(scalar_generator(ratio(1, 1000)));
        let report = small_extension_bound(&anchor, &ext, &tol()).unwrap();
        assert_eq!(report.kernel_dim, 2);
        assert_eq!(report.index.value(), &int(1));
        assert!(report.within);

        let far = exp_path(scalar_generator(int(1)));
        assert!(matches!(
            small_extension_bound(&anchor, &far, &tol()),
            Err(CzError::ExtensionLeavesNeighborhood { .. })
        ));
    }
}
