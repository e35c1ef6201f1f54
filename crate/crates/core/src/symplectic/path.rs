//! Piecewise paths of symplectic matrices.
//!
//! Each segment is parameterized by a local time `s` in `[0, 1]` and carries a
//! positive duration; the whole path is evaluated on `[0, 1]` by normalizing
//! the durations.

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};

use super::matrix::{
    block_diagonal, block_diagonal_exact, identity_exact, is_square, is_symmetric_exact,
    is_symplectic_exact, mul_exact, relative_distance, rotation_block, standard_form,
    symplectic_defect, symplectic_inverse_exact, to_dmatrix, transpose_exact, RationalMatrix,
};
use super::{CrossingTolerances, CzError};
use crate::rational::{int, to_f64, Rational};

const TAU: f64 = std::f64::consts::TAU;

/// One rotation block, `theta(s) = 2 pi (start + rate s)`; angles are in turns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationBlock {
    pub start: Rational,
    pub rate: Rational,
}

/// One shear block `[[1, 0], [-(start + rate s), 1]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShearBlock {
    pub start: Rational,
    pub rate: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub time: Rational,
    pub matrix: RationalMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegmentKind {
    Constant {
        matrix: RationalMatrix,
    },
    Rotation {
        blocks: Vec<RotationBlock>,
    },
    Shear {
        blocks: Vec<ShearBlock>,
    },
    /// `base * exp(tau J S)` with `tau` running affinely from `from` to `to`.
    ExpQuadratic {
        base: RationalMatrix,
        generator: RationalMatrix,
        from: Rational,
        to: Rational,
    },
    /// Piecewise-linear interpolation of samples, traversed from sample time
    /// `from` to sample time `to` (either direction).
    Sampled {
        samples: Vec<Sample>,
        from: Rational,
        to: Rational,
    },
    BlockSum {
        parts: Vec<SegmentKind>,
    },
    /// `P X(s) P^{-1}` for a constant symplectic `P`.
    Conjugated {
        by: RationalMatrix,
        inner: Box<SegmentKind>,
    },
}

/// Floating-point form of a `SegmentKind`.
#[derive(Debug, Clone)]
pub enum SegmentEvaluator {
    Constant(DMatrix<f64>),
    Rotation(Vec<(f64, f64)>),
    Shear(Vec<(f64, f64)>),
    ExpQuadratic {
        base: DMatrix<f64>,
        js: DMatrix<f64>,
        from: f64,
        to: f64,
    },
    Sampled {
        times: Vec<f64>,
        matrices: Vec<DMatrix<f64>>,
        from: f64,
        to: f64,
    },
    BlockSum(Vec<SegmentEvaluator>),
    Conjugated {
        p: DMatrix<f64>,
        p_inv: DMatrix<f64>,
        inner: Box<SegmentEvaluator>,
    },
}

impl SegmentEvaluator {
    /// `A(s)` and `dA/ds` at local time `s`.
    pub fn evaluate(&self, s: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        match self {
            SegmentEvaluator::Constant(m) => {
                let n = m.nrows();
                (m.clone(), DMatrix::zeros(n, n))
            }
            SegmentEvaluator::Rotation(blocks) => {
                let (values, derivs): (Vec<_>, Vec<_>) = blocks
                    .iter()
                    .map(|&(start, rate)| {
                        let r = rotation_block(TAU * (start + rate * s));
                        let d = standard_form(2) * &r * (TAU * rate);
                        (r, d)
                    })
                    .unzip();
                (block_diagonal(&values), block_diagonal(&derivs))
            }
            SegmentEvaluator::Shear(blocks) => {
                let (values, derivs): (Vec<_>, Vec<_>) = blocks
                    .iter()
                    .map(|&(start, rate)| {
                        let c = start + rate * s;
                        let v = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -c, 1.0]);
                        let d = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, -rate, 0.0]);
                        (v, d)
                    })
                    .unzip();
                (block_diagonal(&values), block_diagonal(&derivs))
            }
            SegmentEvaluator::ExpQuadratic { base, js, from, to } => {
                let tau = from + (to - from) * s;
                let a = base * (js * tau).exp();
                let d = &a * js * (to - from);
                (a, d)
            }
            SegmentEvaluator::Sampled {
                times,
                matrices,
                from,
                to,
            } => {
                let t = from + (to - from) * s;
                let k = match times.iter().position(|&x| x > t) {
                    Some(0) => 0,
                    Some(p) => p - 1,
                    None => times.len() - 2,
                }
                .min(times.len() - 2);
                let (t0, t1) = (times[k], times[k + 1]);
                let (m0, m1) = (&matrices[k], &matrices[k + 1]);
                let w = (t - t0) / (t1 - t0);
                let value = m0 * (1.0 - w) + m1 * w;
                let slope = (m1 - m0) / (t1 - t0) * (to - from);
                (value, slope)
            }
            SegmentEvaluator::BlockSum(parts) => {
                let (values, derivs): (Vec<_>, Vec<_>) = parts.iter().map(|p| p.evaluate(s)).unzip();
                (block_diagonal(&values), block_diagonal(&derivs))
            }
            SegmentEvaluator::Conjugated { p, p_inv, inner } => {
                let (a, d) = inner.evaluate(s);
                (p * a * p_inv, p * d * p_inv)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSegment {
    pub duration: Rational,
    pub kind: SegmentKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticPath {
    dimension: usize,
    segments: Vec<PathSegment>,
}

impl SegmentKind {
    pub fn dimension(&self) -> usize {
        match self {
            SegmentKind::Constant { matrix } => matrix.len(),
            SegmentKind::Rotation { blocks } => 2 * blocks.len(),
            SegmentKind::Shear { blocks } => 2 * blocks.len(),
            SegmentKind::ExpQuadratic { generator, .. } => generator.len(),
            SegmentKind::Sampled { samples, .. } => samples.first().map_or(0, |s| s.matrix.len()),
            SegmentKind::BlockSum { parts } => parts.iter().map(SegmentKind::dimension).sum(),
            SegmentKind::Conjugated { by, .. } => by.len(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SegmentKind::Constant { .. } => "constant",
            SegmentKind::Rotation { .. } => "rotation",
            SegmentKind::Shear { .. } => "shear",
            SegmentKind::ExpQuadratic { .. } => "exp_quadratic",
            SegmentKind::Sampled { .. } => "sampled",
            SegmentKind::BlockSum { .. } => "block_sum",
            SegmentKind::Conjugated { .. } => "conjugated",
        }
    }

    /// True when every crossing of this kind is found in closed form.
    pub fn is_symbolic(&self) -> bool {
        match self {
            SegmentKind::Constant { .. } | SegmentKind::Rotation { .. } | SegmentKind::Shear { .. } => true,
            SegmentKind::BlockSum { parts } => parts.iter().all(SegmentKind::is_symbolic),
            _ => false,
        }
    }

    pub(crate) fn validate(&self, segment: usize, tol: &CrossingTolerances) -> Result<(), CzError> {
        let invalid = |reason: String| CzError::InvalidSegment { segment, reason };
        let non_symplectic = |detail: String| CzError::NonSymplecticSegment { segment, detail };
        match self {
            SegmentKind::Constant { matrix } => {
                if !is_symplectic_exact(matrix) {
                    return Err(non_symplectic("constant matrix is not symplectic".into()));
                }
            }
            SegmentKind::Rotation { blocks } => {
                if blocks.is_empty() {
                    return Err(invalid("rotation needs at least one block".into()));
                }
            }
            SegmentKind::Shear { blocks } => {
                if blocks.is_empty() {
                    return Err(invalid("shear needs at least one block".into()));
                }
            }
            SegmentKind::ExpQuadratic { base, generator, .. } => {
                let n = generator.len();
                if n == 0 || n % 2 != 0 || !is_square(generator) {
                    return Err(invalid("generator must be a square matrix of even size".into()));
                }
                if !is_symmetric_exact(generator) {
                    return Err(invalid("generator must be symmetric".into()));
                }
                if base.len() != n || !is_symplectic_exact(base) {
                    return Err(non_symplectic("base matrix is not symplectic".into()));
                }
            }
            SegmentKind::Sampled { samples, from, to } => {
                if samples.len() < 2 {
                    return Err(invalid("sampled segment needs at least two samples".into()));
                }
                let n = samples[0].matrix.len();
                if n == 0 || n % 2 != 0 {
                    return Err(invalid("sample matrices must have even size".into()));
                }
                for (k, pair) in samples.windows(2).enumerate() {
                    if pair[1].time <= pair[0].time {
                        return Err(invalid(format!(
                            "sample times must be strictly increasing (sample {})",
                            k + 1
                        )));
                    }
                }
                let (first, last) = (&samples[0].time, &samples[samples.len() - 1].time);
                for t in [from, to] {
                    if t < first || t > last {
                        return Err(invalid("traversal window lies outside the sample times".into()));
                    }
                }
                for (k, sample) in samples.iter().enumerate() {
                    if sample.matrix.len() != n || !is_square(&sample.matrix) {
                        return Err(invalid(format!("sample {k} has the wrong shape")));
                    }
                    let defect = symplectic_defect(&to_dmatrix(&sample.matrix));
                    if defect > tol.symplectic {
                        return Err(non_symplectic(format!(
                            "sample {k} has symplectic defect {defect:.3e}"
                        )));
                    }
                }
            }
            SegmentKind::BlockSum { parts } => {
                if parts.is_empty() {
                    return Err(invalid("block sum needs at least one part".into()));
                }
                for p in parts {
                    p.validate(segment, tol)?;
                }
            }
            SegmentKind::Conjugated { by, inner } => {
                if !is_symplectic_exact(by) {
                    return Err(non_symplectic("conjugating matrix is not symplectic".into()));
                }
                if by.len() != inner.dimension() {
                    return Err(invalid("conjugating matrix has the wrong size".into()));
                }
                inner.validate(segment, tol)?;
            }
        }
        Ok(())
    }

    /// `A(s)` and `dA/ds` at local time `s`.
    pub fn evaluate(&self, s: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        self.evaluator().evaluate(s)
    }

    /// The segment with its exact data converted to floating point once, for
    /// repeated evaluation.
    pub fn evaluator(&self) -> SegmentEvaluator {
        match self {
            SegmentKind::Constant { matrix } => SegmentEvaluator::Constant(to_dmatrix(matrix)),
            SegmentKind::Rotation { blocks } => SegmentEvaluator::Rotation(
                blocks.iter().map(|b| (to_f64(&b.start), to_f64(&b.rate))).collect(),
            ),
            SegmentKind::Shear { blocks } => SegmentEvaluator::Shear(
                blocks.iter().map(|b| (to_f64(&b.start), to_f64(&b.rate))).collect(),
            ),
            SegmentKind::ExpQuadratic {
                base,
                generator,
                from,
                to,
            } => SegmentEvaluator::ExpQuadratic {
                base: to_dmatrix(base),
                js: standard_form(generator.len()) * to_dmatrix(generator),
                from: to_f64(from),
                to: to_f64(to),
            },
            SegmentKind::Sampled { samples, from, to } => SegmentEvaluator::Sampled {
                times: samples.iter().map(|x| to_f64(&x.time)).collect(),
                matrices: samples.iter().map(|x| to_dmatrix(&x.matrix)).collect(),
                from: to_f64(from),
                to: to_f64(to),
            },
            SegmentKind::BlockSum { parts } => {
                SegmentEvaluator::BlockSum(parts.iter().map(SegmentKind::evaluator).collect())
            }
            SegmentKind::Conjugated { by, inner } => SegmentEvaluator::Conjugated {
                p: to_dmatrix(by),
                p_inv: to_dmatrix(&symplectic_inverse_exact(by)),
                inner: Box::new(inner.evaluator()),
            },
        }
    }

    /// The kind traversed backwards in time.
    pub fn reversed(&self) -> SegmentKind {
        match self {
            SegmentKind::Constant { .. } => self.clone(),
            SegmentKind::Rotation { blocks } => SegmentKind::Rotation {
                blocks: blocks
                    .iter()
                    .map(|b| RotationBlock {
                        start: &b.start + &b.rate,
                        rate: -b.rate.clone(),
                    })
                    .collect(),
            },
            SegmentKind::Shear { blocks } => SegmentKind::Shear {
                blocks: blocks
                    .iter()
                    .map(|b| ShearBlock {
                        start: &b.start + &b.rate,
                        rate: -b.rate.clone(),
                    })
                    .collect(),
            },
            SegmentKind::ExpQuadratic {
                base,
                generator,
                from,
                to,
            } => SegmentKind::ExpQuadratic {
                base: base.clone(),
                generator: generator.clone(),
                from: to.clone(),
                to: from.clone(),
            },
            SegmentKind::Sampled { samples, from, to } => SegmentKind::Sampled {
                samples: samples.clone(),
                from: to.clone(),
                to: from.clone(),
            },
            SegmentKind::BlockSum { parts } => SegmentKind::BlockSum {
                parts: parts.iter().map(SegmentKind::reversed).collect(),
            },
            SegmentKind::Conjugated { by, inner } => SegmentKind::Conjugated {
                by: by.clone(),
                inner: Box::new(inner.reversed()),
            },
        }
    }

    /// The kind restricted to local times `[lo, hi]`, rescaled to `[0, 1]`.
    pub fn window(&self, lo: &Rational, hi: &Rational) -> SegmentKind {
        let affine = |start: &Rational, rate: &Rational| (start + rate * lo, rate * (hi - lo));
        match self {
            SegmentKind::Constant { .. } => self.clone(),
            SegmentKind::Rotation { blocks } => SegmentKind::Rotation {
                blocks: blocks
                    .iter()
                    .map(|b| {
                        let (start, rate) = affine(&b.start, &b.rate);
                        RotationBlock { start, rate }
                    })
                    .collect(),
            },
            SegmentKind::Shear { blocks } => SegmentKind::Shear {
                blocks: blocks
                    .iter()
                    .map(|b| {
                        let (start, rate) = affine(&b.start, &b.rate);
                        ShearBlock { start, rate }
                    })
                    .collect(),
            },
            SegmentKind::ExpQuadratic {
                base,
                generator,
                from,
                to,
            } => {
                let span = to - from;
                SegmentKind::ExpQuadratic {
                    base: base.clone(),
                    generator: generator.clone(),
                    from: from + &span * lo,
                    to: from + &span * hi,
                }
            }
            SegmentKind::Sampled { samples, from, to } => {
                let span = to - from;
                SegmentKind::Sampled {
                    samples: samples.clone(),
                    from: from + &span * lo,
                    to: from + &span * hi,
                }
            }
            SegmentKind::BlockSum { parts } => SegmentKind::BlockSum {
                parts: parts.iter().map(|p| p.window(lo, hi)).collect(),
            },
            SegmentKind::Conjugated { by, inner } => SegmentKind::Conjugated {
                by: by.clone(),
                inner: Box::new(inner.window(lo, hi)),
            },
        }
    }

    /// `P X P^{-1}`, kept in closed form where the kind allows it.
    pub fn conjugated(&self, by: &RationalMatrix) -> SegmentKind {
        let by_inv = symplectic_inverse_exact(by);
        match self {
            SegmentKind::Constant { matrix } => SegmentKind::Constant {
                matrix: mul_exact(by, &mul_exact(matrix, &by_inv)),
            },
            // P B exp(tau J S) P^{-1} = (P B P^{-1}) exp(tau J P^{-T} S P^{-1}).
            SegmentKind::ExpQuadratic {
                base,
                generator,
                from,
                to,
            } => SegmentKind::ExpQuadratic {
                base: mul_exact(by, &mul_exact(base, &by_inv)),
                generator: mul_exact(&transpose_exact(&by_inv), &mul_exact(generator, &by_inv)),
                from: from.clone(),
                to: to.clone(),
            },
            SegmentKind::Sampled { samples, from, to } => SegmentKind::Sampled {
                samples: samples
                    .iter()
                    .map(|x| Sample {
                        time: x.time.clone(),
                        matrix: mul_exact(by, &mul_exact(&x.matrix, &by_inv)),
                    })
                    .collect(),
                from: from.clone(),
                to: to.clone(),
            },
            SegmentKind::Conjugated { by: inner_by, inner } => SegmentKind::Conjugated {
                by: mul_exact(by, inner_by),
                inner: inner.clone(),
            },
            _ => SegmentKind::Conjugated {
                by: by.clone(),
                inner: Box::new(self.clone()),
            },
        }
    }
}

/// Block-diagonal sum of two kinds, merging like kinds.
fn direct_sum_kinds(a: &SegmentKind, b: &SegmentKind) -> SegmentKind {
    use SegmentKind::*;
    match (a, b) {
        (Constant { matrix: x }, Constant { matrix: y }) => Constant {
            matrix: block_diagonal_exact(x, y),
        },
        (Rotation { blocks: x }, Rotation { blocks: y }) => Rotation {
            blocks: x.iter().chain(y).cloned().collect(),
        },
        (Shear { blocks: x }, Shear { blocks: y }) => Shear {
            blocks: x.iter().chain(y).cloned().collect(),
        },
        (
            ExpQuadratic {
                base: b1,
                generator: g1,
                from: f1,
                to: t1,
            },
            ExpQuadratic {
                base: b2,
                generator: g2,
                from: f2,
                to: t2,
            },
        ) if f1.is_zero() && f2.is_zero() => {
            // exp(s t J S) = exp(s J (t S)), so both flows share the unit range.
            let scale = |g: &RationalMatrix, t: &Rational| -> RationalMatrix {
                g.iter().map(|row| row.iter().map(|v| v * t).collect()).collect()
            };
            ExpQuadratic {
                base: block_diagonal_exact(b1, b2),
                generator: block_diagonal_exact(&scale(g1, t1), &scale(g2, t2)),
                from: Rational::zero(),
                to: Rational::one(),
            }
        }
        (BlockSum { parts: x }, BlockSum { parts: y }) => BlockSum {
            parts: x.iter().chain(y).cloned().collect(),
        },
        (BlockSum { parts: x }, other) => BlockSum {
            parts: x.iter().cloned().chain(std::iter::once(other.clone())).collect(),
        },
        (other, BlockSum { parts: y }) => BlockSum {
            parts: std::iter::once(other.clone()).chain(y.iter().cloned()).collect(),
        },
        _ => BlockSum {
            parts: vec![a.clone(), b.clone()],
        },
    }
}

impl SymplecticPath {
    pub fn new(segments: Vec<PathSegment>, tol: &CrossingTolerances) -> Result<Self, CzError> {
        let first = segments.first().ok_or(CzError::EmptyPath)?;
        let dimension = first.kind.dimension();
        if dimension == 0 || dimension % 2 != 0 {
            return Err(CzError::InvalidSegment {
                segment: 0,
                reason: "dimension must be a positive even number".into(),
            });
        }
        for (i, seg) in segments.iter().enumerate() {
            if !seg.duration.is_positive() {
                return Err(CzError::InvalidSegment {
                    segment: i,
                    reason: "duration must be positive".into(),
                });
            }
            if seg.kind.dimension() != dimension {
                return Err(CzError::DimensionMismatch {
                    left: dimension,
                    right: seg.kind.dimension(),
                });
            }
            seg.kind.validate(i, tol)?;
        }
        for (i, pair) in segments.windows(2).enumerate() {
            let end = pair[0].kind.evaluate(1.0).0;
            let start = pair[1].kind.evaluate(0.0).0;
            let gap = relative_distance(&end, &start);
            if gap > tol.continuity {
                return Err(CzError::Discontinuous { segment: i + 1, gap });
            }
        }
        Ok(SymplecticPath { dimension, segments })
    }

    pub fn single(kind: SegmentKind) -> Self {
        let dimension = kind.dimension();
        SymplecticPath {
            dimension,
            segments: vec![PathSegment {
                duration: Rational::one(),
                kind,
            }],
        }
    }

    /// `t -> exp(2 pi i k t)` on each complex coordinate listed in `turns`.
    pub fn unitary_loop(turns: &[i64]) -> Self {
        Self::single(SegmentKind::Rotation {
            blocks: turns
                .iter()
                .map(|&k| RotationBlock {
                    start: Rational::zero(),
                    rate: int(k),
                })
                .collect(),
        })
    }

    /// `t -> [[1, 0], [-t a, 1]]`.
    pub fn shear(a: Rational) -> Self {
        Self::single(SegmentKind::Shear {
            blocks: vec![ShearBlock {
                start: Rational::zero(),
                rate: a,
            }],
        })
    }

    pub fn constant(matrix: RationalMatrix) -> Self {
        Self::single(SegmentKind::Constant { matrix })
    }

    pub fn constant_identity(dimension: usize) -> Self {
        Self::constant(identity_exact(dimension))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn total_duration(&self) -> Rational {
        self.segments.iter().map(|s| s.duration.clone()).sum()
    }

    /// Normalized start time of every segment, plus the final time 1.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let total = self.total_duration();
        let mut acc = Rational::zero();
        let mut out = vec![Rational::zero()];
        for seg in &self.segments {
            acc += &seg.duration;
            out.push(&acc / &total);
        }
        out
    }

    pub fn start(&self) -> DMatrix<f64> {
        self.segments[0].kind.evaluate(0.0).0
    }

    pub fn end(&self) -> DMatrix<f64> {
        self.segments[self.segments.len() - 1].kind.evaluate(1.0).0
    }

    /// `A(t)` at normalized time `t` in `[0, 1]`.
    pub fn evaluate(&self, t: f64) -> DMatrix<f64> {
        let points = self.breakpoints();
        let idx = points[1..]
            .iter()
            .position(|p| t <= to_f64(p))
            .unwrap_or(self.segments.len() - 1);
        let (lo, hi) = (to_f64(&points[idx]), to_f64(&points[idx + 1]));
        let s = ((t - lo) / (hi - lo)).clamp(0.0, 1.0);
        self.segments[idx].kind.evaluate(s).0
    }

    pub fn catenate(&self, other: &SymplecticPath, tol: &CrossingTolerances) -> Result<Self, CzError> {
        if self.dimension != other.dimension {
            return Err(CzError::DimensionMismatch {
                left: self.dimension,
                right: other.dimension,
            });
        }
        let distance = relative_distance(&self.end(), &other.start());
        if distance > tol.continuity {
            return Err(CzError::EndpointMismatch { distance });
        }
        Ok(SymplecticPath {
            dimension: self.dimension,
            segments: self.segments.iter().chain(&other.segments).cloned().collect(),
        })
    }

    /// The path split at the given normalized times (each in `(0, 1)`), with
    /// new segment durations proportional to the normalized lengths.
    pub fn refined(&self, cuts: &[Rational]) -> Self {
        let total = self.total_duration();
        let points = self.breakpoints();
        let mut segments = Vec::new();
        for (i, seg) in self.segments.iter().enumerate() {
            let (lo, hi) = (&points[i], &points[i + 1]);
            let mut local: Vec<Rational> = cuts
                .iter()
                .filter(|c| *c > lo && *c < hi)
                .map(|c| (c - lo) / (hi - lo))
                .collect();
            local.sort();
            local.dedup();
            let mut edges = vec![Rational::zero()];
            edges.extend(local);
            edges.push(Rational::one());
            for w in edges.windows(2) {
                segments.push(PathSegment {
                    duration: &seg.duration * (&w[1] - &w[0]) / &total,
                    kind: if w[0].is_zero() && w[1].is_one() {
                        seg.kind.clone()
                    } else {
                        seg.kind.window(&w[0], &w[1])
                    },
                });
            }
        }
        SymplecticPath {
            dimension: self.dimension,
            segments,
        }
    }

    /// Applies the orientation-preserving piecewise-linear time change through
    /// `knots` (pairs of old and new normalized times, increasing in both,
    /// from `(0, 0)` to `(1, 1)`).
    pub fn reparameterized(&self, knots: &[(Rational, Rational)]) -> Result<Self, CzError> {
        let ok = knots.len() >= 2
            && knots[0] == (Rational::zero(), Rational::zero())
            && knots[knots.len() - 1] == (Rational::one(), Rational::one())
            && knots.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1);
        if !ok {
            return Err(CzError::InvalidReparameterization);
        }
        let old_cuts: Vec<Rational> = knots[1..knots.len() - 1].iter().map(|k| k.0.clone()).collect();
        let refined = self.refined(&old_cuts);
        let points = refined.breakpoints();
        // Map each piece's old length to its new length through the warp.
        let warp = |x: &Rational| -> Rational {
            let k = knots
                .windows(2)
                .position(|w| *x <= w[1].0)
                .unwrap_or(knots.len() - 2);
            let (a, b) = (&knots[k], &knots[k + 1]);
            &a.1 + (x - &a.0) * (&b.1 - &a.1) / (&b.0 - &a.0)
        };
        let segments = refined
            .segments
            .iter()
            .enumerate()
            .map(|(i, seg)| PathSegment {
                duration: warp(&points[i + 1]) - warp(&points[i]),
                kind: seg.kind.clone(),
            })
            .collect();
        Ok(SymplecticPath {
            dimension: self.dimension,
            segments,
        })
    }

    pub fn reversed(&self) -> Self {
        SymplecticPath {
            dimension: self.dimension,
            segments: self
                .segments
                .iter()
                .rev()
                .map(|s| PathSegment {
                    duration: s.duration.clone(),
                    kind: s.kind.reversed(),
                })
                .collect(),
        }
    }

    /// Block-diagonal sum. Both paths are normalized to unit duration and cut
    /// at the union of their breakpoints.
    pub fn direct_sum(&self, other: &SymplecticPath) -> Self {
        let mut cuts: Vec<Rational> = self
            .breakpoints()
            .into_iter()
            .chain(other.breakpoints())
            .filter(|c| !c.is_zero() && !c.is_one())
            .collect();
        cuts.sort();
        cuts.dedup();
        let left = self.refined(&cuts);
        let right = other.refined(&cuts);
        debug_assert_eq!(left.segments.len(), right.segments.len());
        let segments = left
            .segments
            .iter()
            .zip(&right.segments)
            .map(|(l, r)| PathSegment {
                duration: l.duration.clone(),
                kind: direct_sum_kinds(&l.kind, &r.kind),
            })
            .collect();
        SymplecticPath {
            dimension: self.dimension + other.dimension,
            segments,
        }
    }

    /// `t -> P A(t) P^{-1}` for a constant symplectic `P`.
    pub fn conjugated(&self, by: &RationalMatrix) -> Result<Self, CzError> {
        if by.len() != self.dimension || !is_symplectic_exact(by) {
            return Err(CzError::NonSymplecticSegment {
                segment: 0,
                detail: "conjugating matrix is not symplectic of the path's dimension".into(),
            });
        }
        Ok(SymplecticPath {
            dimension: self.dimension,
            segments: self
                .segments
                .iter()
                .map(|s| PathSegment {
                    duration: s.duration.clone(),
                    kind: s.kind.conjugated(by),
                })
                .collect(),
        })
    }
}
