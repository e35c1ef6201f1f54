//! Small dense matrix helpers for symplectic paths.
//!
//! Coordinates are interleaved, `(x_1, y_1, x_2, y_2, ...)`, so the standard
//! symplectic form is block diagonal with blocks `[[0, -1], [1, 0]]` and
//! direct sums of paths are plain block-diagonal sums.

use nalgebra::{Complex, DMatrix};
use num_traits::Zero;

use crate::rational::{to_f64, Rational};

/// Row-major exact matrix.
pub type RationalMatrix = Vec<Vec<Rational>>;

pub fn standard_form(dim: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(dim, dim);
    for b in 0..dim / 2 {
        j[(2 * b, 2 * b + 1)] = -1.0;
        j[(2 * b + 1, 2 * b)] = 1.0;
    }
    j
}

pub fn standard_form_exact(dim: usize) -> RationalMatrix {
    let mut j = vec![vec![Rational::zero(); dim]; dim];
    for b in 0..dim / 2 {
        j[2 * b][2 * b + 1] = -crate::rational::int(1);
        j[2 * b + 1][2 * b] = crate::rational::int(1);
    }
    j
}

pub fn identity_exact(dim: usize) -> RationalMatrix {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { crate::rational::int(1) } else { Rational::zero() })
                .collect()
        })
        .collect()
}

pub fn is_square(m: &RationalMatrix) -> bool {
    m.iter().all(|row| row.len() == m.len())
}

pub fn to_dmatrix(m: &RationalMatrix) -> DMatrix<f64> {
    let n = m.len();
    let c = m.first().map_or(0, Vec::len);
    DMatrix::from_fn(n, c, |i, j| to_f64(&m[i][j]))
}

pub fn mul_exact(a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
    let n = a.len();
    let inner = b.len();
    let c = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..c)
                .map(|j| (0..inner).map(|k| &a[i][k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn transpose_exact(a: &RationalMatrix) -> RationalMatrix {
    let c = a.first().map_or(0, Vec::len);
    (0..c).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn is_symmetric_exact(a: &RationalMatrix) -> bool {
    is_square(a) && (0..a.len()).all(|i| (0..i).all(|j| a[i][j] == a[j][i]))
}

/// `M^T J M == J`, exactly.
pub fn is_symplectic_exact(m: &RationalMatrix) -> bool {
    let n = m.len();
    if n == 0 || !n.is_multiple_of(2) || !is_square(m) {
        return false;
    }
    let j = standard_form_exact(n);
    mul_exact(&transpose_exact(m), &mul_exact(&j, m)) == j
}

/// Inverse of a symplectic matrix: `M^{-1} = -J M^T J`.
pub fn symplectic_inverse_exact(m: &RationalMatrix) -> RationalMatrix {
    let j = standard_form_exact(m.len());
    mul_exact(&j, &mul_exact(&transpose_exact(m), &j))
        .into_iter()
        .map(|row| row.into_iter().map(|v| -v).collect())
        .collect()
}

pub fn block_diagonal_exact(a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![Rational::zero(); n + m]; n + m];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = a[i][j].clone();
        }
    }
    for i in 0..m {
        for j in 0..m {
            out[n + i][n + j] = b[i][j].clone();
        }
    }
    out
}

pub fn block_diagonal(parts: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n: usize = parts.iter().map(|p| p.nrows()).sum();
    let mut out = DMatrix::zeros(n, n);
    let mut offset = 0;
    for p in parts {
        out.view_mut((offset, offset), (p.nrows(), p.ncols())).copy_from(p);
        offset += p.nrows();
    }
    out
}

/// Relative symplecticity defect `|M^T J M - J|_F / max(1, |M|_F^2)`.
pub fn symplectic_defect(m: &DMatrix<f64>) -> f64 {
    let j = standard_form(m.nrows());
    let defect = (m.transpose() * &j * m - &j).norm();
    defect / m.norm_squared().max(1.0)
}

/// Relative Frobenius distance `|A - B|_F / max(1, |A|_F, |B|_F)`.
pub fn relative_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// The complex `m x m` matrix of a complex-linear map in interleaved
/// coordinates: entry `(j, k)` is `A[2j][2k] + i A[2j+1][2k]`.
pub fn complexify(a: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
    let m = a.nrows() / 2;
    DMatrix::from_fn(m, m, |j, k| Complex::new(a[(2 * j, 2 * k)], a[(2 * j + 1, 2 * k)]))
}

/// Distance of `A` from commuting with `J` and from being orthogonal.
pub fn unitary_defect(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let j = standard_form(n);
    let commute = (a * &j - &j * a).norm();
    let orthogonal = (a.transpose() * a - DMatrix::identity(n, n)).norm();
    commute.max(orthogonal)
}

pub fn rotation_block(theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}
