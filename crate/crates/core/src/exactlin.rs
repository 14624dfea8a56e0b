//! Exact rational and integer linear algebra.
//!
//! Everything here works over `BigInt` / `BigRational`; there is no floating
//! point path. Matrices are small and dense (Gram matrices of a handful of
//! curves, relation matrices of a Picard lattice), so the algorithms favour
//! clarity over asymptotics.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational number, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Shorthand for the rational `num/den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integral rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (entry ({row}, {col}) differs from its transpose)")]
    NotSymmetric { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<Rational>;

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![T::zero(); rows * cols],
        }
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }
}

impl<T> Matrix<T> {
    /// Builds a matrix from row-major entries. Panics if the entry count does
    /// not match `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, entries: Vec<T>) -> Self {
        assert_eq!(
            entries.len(),
            rows * cols,
            "entry count does not match a {rows}x{cols} matrix"
        );
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            entries.extend(r.iter().cloned());
        }
        Self {
            rows: rows.len(),
            cols,
            entries,
        }
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self[(i, j)].clone());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// Leading principal `k x k` submatrix.
    pub fn leading(&self, k: usize) -> Self {
        let mut entries = Vec::with_capacity(k * k);
        for i in 0..k {
            entries.extend_from_slice(&self.row(i)[..k]);
        }
        Self {
            rows: k,
            cols: k,
            entries,
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero,
    for<'a> &'a T: std::ops::Mul<&'a T, Output = T>,
{
    pub fn mul(&self, other: &Self) -> Result<Self, LinAlgError> {
        if self.cols != other.rows {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] = out[(i, j)].clone() + prod;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>, LinAlgError> {
        if self.cols != v.len() {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }
}

impl IntMatrix {
    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        Self::from_vec(
            rows,
            cols,
            entries.iter().map(|&x| BigInt::from(x)).collect(),
        )
    }

    pub fn to_rational(&self) -> RatMatrix {
        self.map(|x| Rational::from_integer(x.clone()))
    }

    /// Exact determinant (square matrices only).
    pub fn determinant(&self) -> Result<BigInt, LinAlgError> {
        Ok(determinant(&self.to_rational())?.to_integer())
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        rank(&self.to_rational())
    }
}

impl RatMatrix {
    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        Self::from_vec(rows, cols, entries.iter().map(|&x| int(x)).collect())
    }

    pub fn is_symmetric(&self) -> bool {
        self.first_asymmetry().is_none()
    }

    fn first_asymmetry(&self) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self[(i, j)] != self[(j, i)] {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// Determinant by fraction-free-in-spirit Gaussian elimination over ℚ.
pub fn determinant(m: &RatMatrix) -> Result<Rational, LinAlgError> {
    if !m.is_square() {
        return Err(LinAlgError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
            return Ok(Rational::zero());
        };
        if pivot != col {
            a.swap_rows(pivot, col);
            det = -det;
        }
        let p = a[(col, col)].clone();
        det *= &p;
        for r in (col + 1)..n {
            if a[(r, col)].is_zero() {
                continue;
            }
            let factor = &a[(r, col)] / &p;
            for c in col..n {
                let delta = &factor * &a[(col, c)];
                a[(r, c)] -= delta;
            }
        }
    }
    Ok(det)
}

/// Rank over ℚ via row echelon form.
pub fn rank(m: &RatMatrix) -> usize {
    let mut a = m.clone();
    let mut rank = 0;
    for col in 0..a.cols {
        if rank == a.rows {
            break;
        }
        let Some(pivot) = (rank..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        a.swap_rows(pivot, rank);
        let p = a[(rank, col)].clone();
        for r in (rank + 1)..a.rows {
            if a[(r, col)].is_zero() {
                continue;
            }
            let factor = &a[(r, col)] / &p;
            for c in col..a.cols {
                let delta = &factor * &a[(rank, c)];
                a[(r, c)] -= delta;
            }
        }
        rank += 1;
    }
    rank
}

/// Solves `g · x = b` exactly by Gauss–Jordan elimination.
pub fn solve_linear(g: &RatMatrix, b: &[Rational]) -> Result<Vec<Rational>, LinAlgError> {
    if !g.is_square() {
        return Err(LinAlgError::NotSquare {
            rows: g.rows,
            cols: g.cols,
        });
    }
    if b.len() != g.rows {
        return Err(LinAlgError::DimensionMismatch {
            expected: g.rows,
            actual: b.len(),
        });
    }
    let rhs = Matrix::from_vec(b.len(), 1, b.to_vec());
    Ok(gauss_jordan(g, rhs)?.entries)
}

/// Exact inverse of a nonsingular square matrix.
pub fn inverse(g: &RatMatrix) -> Result<RatMatrix, LinAlgError> {
    if !g.is_square() {
        return Err(LinAlgError::NotSquare {
            rows: g.rows,
            cols: g.cols,
        });
    }
    gauss_jordan(g, RatMatrix::identity(g.rows))
}

/// Reduces `[g | rhs]` until the left block is the identity and returns the
/// transformed right block.
fn gauss_jordan(g: &RatMatrix, mut rhs: RatMatrix) -> Result<RatMatrix, LinAlgError> {
    let n = g.rows;
    let mut a = g.clone();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[(r, col)].is_zero())
            .ok_or(LinAlgError::Singular)?;
        a.swap_rows(pivot, col);
        rhs.swap_rows(pivot, col);
        let inv = a[(col, col)].recip();
        for c in 0..n {
            a[(col, c)] *= &inv;
        }
        for c in 0..rhs.cols {
            rhs[(col, c)] *= &inv;
        }
        for r in 0..n {
            if r == col || a[(r, col)].is_zero() {
                continue;
            }
            let factor = a[(r, col)].clone();
            for c in 0..n {
                let delta = &factor * &a[(col, c)];
                a[(r, c)] -= delta;
            }
            for c in 0..rhs.cols {
                let delta = &factor * &rhs[(col, c)];
                rhs[(r, c)] -= delta;
            }
        }
    }
    Ok(rhs)
}

/// Sylvester's criterion: the `k`-th leading principal minor must have sign `(-1)^k`.
pub fn is_negative_definite(g: &RatMatrix) -> Result<bool, LinAlgError> {
    if let Some((row, col)) = g.first_asymmetry() {
        if !g.is_square() {
            return Err(LinAlgError::NotSquare {
                rows: g.rows,
                cols: g.cols,
            });
        }
        return Err(LinAlgError::NotSymmetric { row, col });
    }
    for k in 1..=g.rows {
        let minor = determinant(&g.leading(k))?;
        let ok = if k % 2 == 1 {
            minor.is_negative()
        } else {
            minor.is_positive()
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Result of [`smith_normal_form`]: `u · m · v = d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SnfDecomposition {
    /// The diagonal of `d` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    /// Number of nonzero invariant factors, i.e. the rank of the input.
    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diagonal()
            .into_iter()
            .filter(|x| *x > BigInt::one())
            .collect()
    }
}

/// Smith normal form over ℤ with unimodular transforms.
///
/// Pivots on the entry of smallest absolute value in the remaining block;
/// the diagonal comes out nonnegative with `d_i | d_{i+1}`.
pub fn smith_normal_form(m: &IntMatrix) -> SnfDecomposition {
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let Some((pr, pc)) = smallest_nonzero(&d, t) else {
                // remaining block is zero
                return finish(u, d, v);
            };
            d.swap_rows(t, pr);
            u.swap_rows(t, pr);
            d.swap_cols(t, pc);
            v.swap_cols(t, pc);

            let mut clean = true;
            for r in (t + 1)..rows {
                if d[(r, t)].is_zero() {
                    continue;
                }
                let q = d[(r, t)].div_floor(&d[(t, t)]);
                add_row_multiple(&mut d, r, t, &-&q);
                add_row_multiple(&mut u, r, t, &-&q);
                if !d[(r, t)].is_zero() {
                    clean = false;
                }
            }
            for c in (t + 1)..cols {
                if d[(t, c)].is_zero() {
                    continue;
                }
                let q = d[(t, c)].div_floor(&d[(t, t)]);
                add_col_multiple(&mut d, c, t, &-&q);
                add_col_multiple(&mut v, c, t, &-&q);
                if !d[(t, c)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Row and column are cleared; enforce divisibility of the rest.
            let pivot = d[(t, t)].clone();
            let offender = ((t + 1)..rows)
                .flat_map(|r| ((t + 1)..cols).map(move |c| (r, c)))
                .find(|&(r, c)| !d[(r, c)].is_multiple_of(&pivot));
            match offender {
                Some((r, _)) => {
                    add_row_multiple(&mut d, t, r, &BigInt::one());
                    add_row_multiple(&mut u, t, r, &BigInt::one());
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
    }
    finish(u, d, v)
}

fn finish(u: IntMatrix, d: IntMatrix, v: IntMatrix) -> SnfDecomposition {
    SnfDecomposition { u, d, v }
}

fn smallest_nonzero(m: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for r in t..m.rows {
        for c in t..m.cols {
            let x = &m[(r, c)];
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            if best.as_ref().is_none_or(|(_, b)| a < *b) {
                best = Some(((r, c), a));
            }
        }
    }
    best.map(|(pos, _)| pos)
}

/// row[target] += k * row[source]
fn add_row_multiple(m: &mut IntMatrix, target: usize, source: usize, k: &BigInt) {
    for c in 0..m.cols {
        let delta = k * &m[(source, c)];
        m[(target, c)] += delta;
    }
}

/// col[target] += k * col[source]
fn add_col_multiple(m: &mut IntMatrix, target: usize, source: usize, k: &BigInt) {
    for r in 0..m.rows {
        let delta = k * &m[(r, source)];
        m[(r, target)] += delta;
    }
}

fn negate_row(m: &mut IntMatrix, r: usize) {
    for c in 0..m.cols {
        let x = -&m[(r, c)];
        m[(r, c)] = x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(xs: &[(i64, i64)]) -> Vec<Rational> {
        xs.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn solve_identity() {
        let g = RatMatrix::identity(2);
        let x = solve_linear(&g, &[int(5), int(-3)]).unwrap();
        assert_eq!(x, vec![int(5), int(-3)]);
    }

    #[test]
    fn solve_a2_block() {
        let g = RatMatrix::from_i64(2, 2, &[-2, 1, 1, -2]);
        let x = solve_linear(&g, &[int(0), int(-1)]).unwrap();
        assert_eq!(x, rv(&[(1, 3), (2, 3)]));
    }

    #[test]
    fn solve_single_minus_three() {
        let g = RatMatrix::from_i64(1, 1, &[-3]);
        assert_eq!(solve_linear(&g, &[int(-1)]).unwrap(), rv(&[(1, 3)]));
    }

    #[test]
    fn solve_singular_is_error() {
        let g = RatMatrix::from_i64(2, 2, &[1, 2, 2, 4]);
        assert_eq!(
            solve_linear(&g, &[int(1), int(1)]),
            Err(LinAlgError::Singular)
        );
    }

    #[test]
    fn solve_dimension_mismatch() {
        let g = RatMatrix::identity(2);
        assert!(matches!(
            solve_linear(&g, &[int(1)]),
            Err(LinAlgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn inverse_roundtrip() {
        let g = RatMatrix::from_i64(3, 3, &[-2, 1, 0, 1, -2, 1, 0, 1, -3]);
        let inv = inverse(&g).unwrap();
        assert_eq!(g.mul(&inv).unwrap(), RatMatrix::identity(3));
    }

    #[test]
    fn snf_identity() {
        let snf = smith_normal_form(&IntMatrix::identity(2));
        assert_eq!(snf.diagonal(), vec![BigInt::from(1), BigInt::from(1)]);
    }

    #[test]
    fn snf_two_by_two() {
        let m = IntMatrix::from_i64(2, 2, &[2, 4, 6, 8]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(snf.u.mul(&m).unwrap().mul(&snf.v).unwrap(), snf.d);
    }

    #[test]
    fn snf_zero() {
        let snf = smith_normal_form(&IntMatrix::from_i64(1, 1, &[0]));
        assert_eq!(snf.diagonal(), vec![BigInt::from(0)]);
        assert_eq!(snf.rank(), 0);
    }

    #[test]
    fn snf_needs_divisibility_fix() {
        // diag(2, 3) is diagonal but not in normal form: 2 does not divide 3.
        let m = IntMatrix::from_i64(2, 2, &[2, 0, 0, 3]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
        assert_eq!(snf.u.mul(&m).unwrap().mul(&snf.v).unwrap(), snf.d);
    }

    #[test]
    fn snf_rectangular() {
        let m = IntMatrix::from_i64(2, 3, &[1, 3, -1, 0, 3, 3]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.diagonal(), vec![BigInt::from(1), BigInt::from(3)]);
        assert_eq!(snf.torsion(), vec![BigInt::from(3)]);
    }

    #[test]
    fn negative_definite_small_cases() {
        assert!(is_negative_definite(&RatMatrix::from_i64(1, 1, &[-1])).unwrap());
        assert!(!is_negative_definite(&RatMatrix::from_i64(1, 1, &[0])).unwrap());
        assert!(is_negative_definite(&RatMatrix::from_i64(2, 2, &[-2, 1, 1, -2])).unwrap());
        // E8-style violation: two (-1)-curves meeting once
        assert!(!is_negative_definite(&RatMatrix::from_i64(2, 2, &[-1, 1, 1, -1])).unwrap());
    }

    #[test]
    fn negative_definite_rejects_asymmetric() {
        let g = RatMatrix::from_i64(2, 2, &[-2, 1, 0, -2]);
        assert_eq!(
            is_negative_definite(&g),
            Err(LinAlgError::NotSymmetric { row: 0, col: 1 })
        );
    }

    #[test]
    fn determinant_and_rank() {
        let m = IntMatrix::from_i64(3, 3, &[1, 2, 3, 4, 5, 6, 7, 8, 10]);
        assert_eq!(m.determinant().unwrap(), BigInt::from(-3));
        let singular = IntMatrix::from_i64(3, 3, &[1, 2, 3, 2, 4, 6, 0, 0, 1]);
        assert_eq!(singular.rank(), 2);
    }
}
