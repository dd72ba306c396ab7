//! Dense exact matrices over arbitrary-precision integers and rationals.
//!
//! Everything here is fraction-free where possible: rank and determinant of
//! integer matrices go through Bareiss elimination, rational matrices are
//! scaled to integer ones first.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<Int>;
pub type RatMatrix = Matrix<Rat>;

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.data[r * self.cols + c])?;
            }
        }
        write!(f, "]")
    }
}

impl<T> Matrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&T> {
        if r < self.rows && c < self.cols {
            Some(&self.data[r * self.cols + c])
        } else {
            None
        }
    }
}

impl<T: Clone> Matrix<T> {
    /// Builds a matrix from row vectors. Panics on ragged input; callers that
    /// read untrusted data check row lengths first.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged matrix rows");
        Matrix { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() }
    }

    /// Empty matrix with an explicit column count (`from_rows` cannot infer it).
    pub fn with_shape(rows: usize, cols: usize, fill: T) -> Self {
        Matrix { rows, cols, data: vec![fill; rows * cols] }
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.iter_rows().map(<[T]>::to_vec).collect()
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self[(r, c)].clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    /// Submatrix keeping the listed rows and columns, in the listed order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                data.push(self[(r, c)].clone());
            }
        }
        Matrix { rows: rows.len(), cols: cols.len(), data }
    }

    pub fn without(&self, row: Option<usize>, col: Option<usize>) -> Self {
        let rows: Vec<usize> = (0..self.rows).filter(|&r| Some(r) != row).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&c| Some(c) != col).collect();
        self.select(&rows, &cols)
    }

    /// Rows reordered so that output row `i` is input row `order[i]`.
    pub fn permute_rows(&self, order: &[usize]) -> Self {
        let cols: Vec<usize> = (0..self.cols).collect();
        self.select(order, &cols)
    }

    pub fn map<U, F: FnMut(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    /// Appends a column on the right.
    pub fn with_column(&self, column: &[T]) -> Self {
        assert_eq!(column.len(), self.rows);
        let mut out = Matrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = self[(r, c)].clone();
            }
            out[(r, self.cols)] = column[r].clone();
        }
        out
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Block-diagonal sum `self ⊕ I_k`.
    pub fn direct_sum_identity(&self, k: usize) -> Self {
        let mut m = Matrix::zeros(self.rows + k, self.cols + k);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m[(r, c)] = self[(r, c)].clone();
            }
        }
        for i in 0..k {
            m[(self.rows + i, self.cols + i)] = T::one();
        }
        m
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero,
    for<'a> &'a T: std::ops::Mul<&'a T, Output = T>,
{
    /// Matrix product. Panics on shape mismatch.
    pub fn mul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut out: Matrix<T> = Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let prod = a * &rhs[(k, c)];
                    out[(r, c)] = out[(r, c)].clone() + prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix-vector product");
        (0..self.rows).map(|r| self.row(r).iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a * b)).collect()
    }
}

impl IntMatrix {
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect())
    }

    pub fn to_rat(&self) -> RatMatrix {
        self.map(|x| Rat::from_integer(x.clone()))
    }

    /// Rank over the rationals by fraction-free (Bareiss) elimination.
    pub fn rank(&self) -> usize {
        bareiss(self.clone()).0
    }

    /// Determinant by Bareiss elimination. Panics if not square.
    pub fn det(&self) -> Int {
        assert!(self.is_square(), "determinant of a non-square matrix");
        if self.rows == 0 {
            return Int::one();
        }
        let (rank, det) = bareiss(self.clone());
        if rank < self.rows {
            Int::zero()
        } else {
            det
        }
    }

    /// Classical adjoint: transpose of the cofactor matrix.
    pub fn adjugate(&self) -> IntMatrix {
        assert!(self.is_square(), "adjugate of a non-square matrix");
        let n = self.rows;
        if n == 1 {
            return IntMatrix::identity(1);
        }
        let mut adj = IntMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let minor = self.without(Some(r), Some(c)).det();
                let signed = if (r + c) % 2 == 0 { minor } else { -minor };
                adj[(c, r)] = signed;
            }
        }
        adj
    }

    /// Exact inverse over the rationals, `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        self.to_rat().inverse()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }
}

impl RatMatrix {
    /// Multiplies each row by the lcm of its denominators; rank and
    /// singularity are unchanged.
    pub fn clear_denominators(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            let l = self.row(r).iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()));
            for c in 0..self.cols {
                let x = &self[(r, c)];
                out[(r, c)] = x.numer() * (&l / x.denom());
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.clear_denominators().rank()
    }

    pub fn det(&self) -> Rat {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut scale = Int::one();
        for r in 0..self.rows {
            scale *= self.row(r).iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()));
        }
        Rat::new(self.clear_denominators().det(), scale)
    }

    /// Gauss-Jordan inverse, `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[(r, col)].is_zero())?;
            if pivot != col {
                for c in 0..n {
                    a.data.swap(pivot * n + c, col * n + c);
                    inv.data.swap(pivot * n + c, col * n + c);
                }
            }
            let p = a[(col, col)].clone();
            for c in 0..n {
                a[(col, c)] = &a[(col, c)] / &p;
                inv[(col, c)] = &inv[(col, c)] / &p;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone();
                for c in 0..n {
                    let da = &factor * &a[(col, c)];
                    let di = &factor * &inv[(col, c)];
                    a[(r, c)] = &a[(r, c)] - da;
                    inv[(r, c)] = &inv[(r, c)] - di;
                }
            }
        }
        Some(inv)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn to_int(&self) -> Option<IntMatrix> {
        if !self.is_integral() {
            return None;
        }
        Some(self.map(|x| x.to_integer()))
    }
}

/// Returns `(rank, last pivot)`; for full-rank square input the last pivot is
/// the determinant (sign tracked through row swaps).
fn bareiss(mut m: IntMatrix) -> (usize, Int) {
    let (rows, cols) = (m.rows, m.cols);
    let mut prev = Int::one();
    let mut rank = 0;
    let mut sign_flip = false;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !m[(r, col)].is_zero()) else {
            continue;
        };
        if pivot != rank {
            for c in 0..cols {
                m.data.swap(pivot * cols + c, rank * cols + c);
            }
            sign_flip = !sign_flip;
        }
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let v = &m[(rank, col)] * &m[(r, c)] - &m[(r, col)] * &m[(rank, c)];
                m[(r, c)] = v / &prev;
            }
            m[(r, col)] = Int::zero();
        }
        prev = m[(rank, col)].clone();
        rank += 1;
    }
    let det = if sign_flip { -prev } else { prev };
    (rank, det)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_vec(v: &[Int]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from_integer(x.clone())).collect()
}

pub fn int_vec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

/// `Some` when every entry is an integer.
pub fn integral(v: &[Rat]) -> Option<Vec<Int>> {
    v.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect()
}

/// A reordering of `0..n`; `order[i]` is the source index placed at position `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Panics unless `order` is a permutation of `0..order.len()`.
    pub fn from_order(order: Vec<usize>) -> Self {
        let mut seen = vec![false; order.len()];
        for &i in &order {
            assert!(i < order.len() && !seen[i], "not a permutation: {order:?}");
            seen[i] = true;
        }
        Permutation(order)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    /// Source index placed at position `i`.
    pub fn source(&self, i: usize) -> usize {
        self.0[i]
    }

    /// Position that source index `s` is moved to.
    pub fn position_of(&self, s: usize) -> usize {
        self.0.iter().position(|&x| x == s).expect("index not in permutation")
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (pos, &src) in self.0.iter().enumerate() {
            inv[src] = pos;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// The permutation matrix `P` with `(P·M)` row `i` equal to `M` row `order[i]`.
    pub fn matrix(&self) -> IntMatrix {
        let n = self.0.len();
        let mut p = IntMatrix::zeros(n, n);
        for (i, &s) in self.0.iter().enumerate() {
            p[(i, s)] = Int::one();
        }
        p
    }
}
