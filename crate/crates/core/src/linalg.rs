//! Exact linear algebra over the rationals.
//!
//! Rows are cleared of denominators and then reduced with Bareiss'
//! fraction-free elimination, so every intermediate entry is an integer minor
//! of the input and every division is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{lcm_of_denominators, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("system is underdetermined: rank {rank} < {unknowns} unknowns (nullspace dimension {nullity})")]
    Underdetermined {
        rank: usize,
        unknowns: usize,
        nullity: usize,
    },
    #[error("system is inconsistent: rank of augmented matrix exceeds rank {rank}")]
    Inconsistent { rank: usize },
    #[error("system has no equations")]
    Empty,
}

/// Scales each row by the lcm of its denominators, giving an integer matrix
/// with the same row space.
fn clear_denominators(rows: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let scale = Rational::from_integer(lcm_of_denominators(row));
            row.iter().map(|v| (v * &scale).to_integer()).collect()
        })
        .collect()
}

/// Result of fraction-free row reduction: the pivot column of each of the
/// leading `pivots.len()` rows, and the sign of the row permutation applied.
struct Echelon {
    pivots: Vec<usize>,
    swap_sign: i8,
}

/// In-place Bareiss elimination restricted to the first `pivot_cols`
/// columns; the remaining columns are carried along (augmented part).
///
/// Among the candidate rows for a pivot, the entry with the largest bit
/// length is taken, ties going to the lowest row index.
fn bareiss(mat: &mut [Vec<BigInt>], pivot_cols: usize) -> Echelon {
    let rows = mat.len();
    let cols = mat.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut swap_sign = 1i8;
    let mut prev = BigInt::one();
    let mut r = 0;

    for c in 0..pivot_cols {
        if r == rows {
            break;
        }
        let candidate = (r..rows)
            .filter(|&i| !mat[i][c].is_zero())
            .fold(None::<(usize, u64)>, |best, i| {
                let bits = mat[i][c].bits();
                match best {
                    Some((_, b)) if b >= bits => best,
                    _ => Some((i, bits)),
                }
            });
        let Some((p, _)) = candidate else { continue };
        if p != r {
            mat.swap(p, r);
            swap_sign = -swap_sign;
        }
        let (head, tail) = mat.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let pivot = pivot_row[c].clone();
        for row in tail.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..cols {
                let updated = &pivot * &row[j] - &factor * &pivot_row[j];
                let (q, rem) = updated.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                row[j] = q;
            }
            row[c] = BigInt::zero();
        }
        prev = pivot;
        pivots.push(c);
        r += 1;
    }
    Echelon { pivots, swap_sign }
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut mat = clear_denominators(rows);
    let cols = mat[0].len();
    bareiss(&mut mat, cols).pivots.len()
}

/// Solves `A x = b` exactly, requiring a unique solution.
///
/// `a` has one row per equation; every row must have the same length.
pub fn solve_unique(a: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>, SolveError> {
    assert_eq!(a.len(), b.len(), "one right-hand side per equation");
    let Some(first) = a.first() else {
        return Err(SolveError::Empty);
    };
    let unknowns = first.len();
    let augmented: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| row.iter().cloned().chain(std::iter::once(rhs.clone())).collect())
        .collect();
    let mut mat = clear_denominators(&augmented);
    let echelon = bareiss(&mut mat, unknowns);
    let rank = echelon.pivots.len();

    if mat[rank..].iter().any(|row| !row[unknowns].is_zero()) {
        return Err(SolveError::Inconsistent { rank });
    }
    if rank < unknowns {
        return Err(SolveError::Underdetermined {
            rank,
            unknowns,
            nullity: unknowns - rank,
        });
    }

    // Full column rank: pivots sit on the diagonal of the leading block.
    let mut x = vec![Rational::zero(); unknowns];
    for i in (0..unknowns).rev() {
        let row = &mat[i];
        let mut acc = Rational::from_integer(row[unknowns].clone());
        for j in i + 1..unknowns {
            acc -= Rational::from_integer(row[j].clone()) * &x[j];
        }
        x[i] = acc / Rational::from_integer(row[i].clone());
    }
    Ok(x)
}

pub fn determinant(square: &[Vec<Rational>]) -> Rational {
    let n = square.len();
    if n == 0 {
        return Rational::one();
    }
    let scales: Vec<BigInt> = square.iter().map(lcm_of_denominators).collect();
    let mut mat = clear_denominators(square);
    let echelon = bareiss(&mut mat, n);
    if echelon.pivots.len() < n {
        return Rational::zero();
    }
    // The last Bareiss pivot is the determinant of the scaled matrix.
    let scaled = Rational::from_integer(mat[n - 1][n - 1].clone() * BigInt::from(echelon.swap_sign));
    let total_scale = scales.iter().fold(BigInt::one(), |acc, s| acc * s);
    scaled / Rational::from_integer(total_scale)
}

pub fn leading_principal_minors(square: &[Vec<Rational>]) -> Vec<Rational> {
    (1..=square.len())
        .map(|k| {
            let block: Vec<Vec<Rational>> =
                square[..k].iter().map(|row| row[..k].to_vec()).collect();
            determinant(&block)
        })
        .collect()
}

/// Sylvester's criterion for negative definiteness of a symmetric matrix:
/// the k-th leading principal minor has sign (-1)^k.
pub fn is_negative_definite(minors: &[Rational]) -> bool {
    minors.iter().enumerate().all(|(i, m)| {
        if (i + 1) % 2 == 1 {
            m.is_negative()
        } else {
            m.is_positive()
        }
    })
}
