#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use sftmd::rational::{int, ratio, Rational};
use sftmd::symplectic::{
    identity_exact, is_symplectic_exact, CrossingTolerances, PathSegment, RationalMatrix,
    RotationBlock, SegmentKind, ShearBlock, SymplecticPath,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockType {
    Rotation,
    Shear,
}

pub fn small_rational(rng: &mut StdRng, max_num: i64, max_den: i64) -> Rational {
    ratio(rng.gen_range(-max_num..=max_num), rng.gen_range(1..=max_den))
}

pub fn block_types(rng: &mut StdRng, blocks: usize, allow_shear: bool) -> Vec<BlockType> {
    (0..blocks)
        .map(|_| {
            if allow_shear && rng.gen_bool(0.4) {
                BlockType::Shear
            } else {
                BlockType::Rotation
            }
        })
        .collect()
}

fn kind_from_blocks(types: &[BlockType], starts: &[Rational], rates: &[Rational]) -> SegmentKind {
    let single = |t: BlockType, s: &Rational, r: &Rational| match t {
        BlockType::Rotation => SegmentKind::Rotation {
            blocks: vec![RotationBlock {
                start: s.clone(),
                rate: r.clone(),
            }],
        },
        BlockType::Shear => SegmentKind::Shear {
            blocks: vec![ShearBlock {
                start: s.clone(),
                rate: r.clone(),
            }],
        },
    };
    if types.iter().all(|&t| t == BlockType::Rotation) {
        return SegmentKind::Rotation {
            blocks: starts
                .iter()
                .zip(rates)
                .map(|(s, r)| RotationBlock {
                    start: s.clone(),
                    rate: r.clone(),
                })
                .collect(),
        };
    }
    if types.len() == 1 {
        return single(types[0], &starts[0], &rates[0]);
    }
    SegmentKind::BlockSum {
        parts: types
            .iter()
            .zip(starts.iter().zip(rates))
            .map(|(&t, (s, r))| single(t, s, r))
            .collect(),
    }
}

/// A closed-form path of one to three segments that starts at the given
/// block parameters; returns the path and the block parameters at its end.
pub fn random_symbolic_from(
    rng: &mut StdRng,
    types: &[BlockType],
    starts: &[Rational],
    nonzero_rates: bool,
) -> (SymplecticPath, Vec<Rational>) {
    let mut current = starts.to_vec();
    let mut segments = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let rates: Vec<Rational> = types
            .iter()
            .map(|_| loop {
                let r = small_rational(rng, 7, 3);
                if !(nonzero_rates && r == int(0)) {
                    break r;
                }
            })
            .collect();
        let kind = kind_from_blocks(types, &current, &rates);
        current = current.iter().zip(&rates).map(|(s, r)| s + r).collect();
        segments.push(PathSegment {
            duration: ratio(rng.gen_range(1..=4), rng.gen_range(1..=3)),
            kind,
        });
    }
    let path = SymplecticPath::new(segments, &CrossingTolerances::default()).expect("continuous by construction");
    (path, current)
}

pub fn random_symbolic(rng: &mut StdRng, max_blocks: usize) -> SymplecticPath {
    let blocks = rng.gen_range(1..=max_blocks);
    let types = block_types(rng, blocks, true);
    let starts: Vec<Rational> = (0..blocks).map(|_| small_rational(rng, 4, 4)).collect();
    random_symbolic_from(rng, &types, &starts, false).0
}

fn elementary(dim: usize, rng: &mut StdRng) -> RationalMatrix {
    let mut m = identity_exact(dim);
    let blocks = dim / 2;
    let b = loop {
        let b = small_rational(rng, 2, 2);
        if b != int(0) {
            break b;
        }
    };
    let i = rng.gen_range(0..blocks);
    match rng.gen_range(0..3) {
        0 => m[2 * i][2 * i + 1] = b,
        1 => m[2 * i + 1][2 * i] = b,
        _ => {
            let j = rng.gen_range(0..blocks);
            if i == j {
                m[2 * i][2 * i + 1] = b;
            } else {
                // x_i += b y_j and x_j += b y_i
                m[2 * i][2 * j + 1] = b.clone();
                m[2 * j][2 * i + 1] = b;
            }
        }
    }
    m
}

/// A rational symplectic matrix built from elementary symplectic shears.
pub fn random_symplectic(rng: &mut StdRng, dim: usize, factors: usize) -> RationalMatrix {
    let mut m = identity_exact(dim);
    for _ in 0..factors {
        let e = elementary(dim, rng);
        m = multiply(&m, &e);
    }
    assert!(is_symplectic_exact(&m));
    m
}

pub fn multiply(a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn random_symmetric(rng: &mut StdRng, dim: usize, max_num: i64, den: i64) -> RationalMatrix {
    let mut s = vec![vec![int(0); dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let v = ratio(rng.gen_range(-max_num..=max_num), den);
            s[i][j] = v.clone();
            s[j][i] = v;
        }
    }
    s
}

/// Increasing knots `(0, 0) .. (1, 1)` with random interior points.
pub fn random_knots(rng: &mut StdRng) -> Vec<(Rational, Rational)> {
    let count = rng.gen_range(1..=3);
    let mut old: Vec<Rational> = Vec::new();
    let mut new: Vec<Rational> = Vec::new();
    while old.len() < count {
        let x = ratio(rng.gen_range(1..12), 12);
        if !old.contains(&x) {
            old.push(x);
        }
    }
    while new.len() < count {
        let y = ratio(rng.gen_range(1..10), 10);
        if !new.contains(&y) {
            new.push(y);
        }
    }
    old.sort();
    new.sort();
    let mut knots = vec![(int(0), int(0))];
    knots.extend(old.into_iter().zip(new));
    knots.push((int(1), int(1)));
    knots
}
