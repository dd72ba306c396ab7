//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's elimination, inversion or enumeration routines.
#![allow(dead_code, clippy::needless_range_loop)]

use brattice::diagram::MultiplicityMatrix;
use brattice::linalg::{Int, IntMatrix, Rat, RatMatrix};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

pub fn to_q(rows: &[Vec<i64>]) -> Vec<Vec<Rat>> {
    rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
}

pub fn from_int(m: &IntMatrix) -> Vec<Vec<Rat>> {
    m.iter_rows().map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect()
}

pub fn from_rat(m: &RatMatrix) -> Vec<Vec<Rat>> {
    m.iter_rows().map(<[Rat]>::to_vec).collect()
}

/// Row echelon form by plain Gaussian elimination; returns (rank, sign-adjusted pivot product).
fn eliminate(rows: &[Vec<Rat>]) -> (usize, Rat) {
    let mut a: Vec<Vec<Rat>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut det = Rat::one();
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else {
            det = Rat::zero();
            continue;
        };
        if p != rank {
            a.swap(p, rank);
            det = -det;
        }
        let pivot = a[rank][c].clone();
        det *= &pivot;
        for r in rank + 1..a.len() {
            if a[r][c].is_zero() {
                continue;
            }
            let factor = &a[r][c] / &pivot;
            for k in c..cols {
                let sub = &factor * &a[rank][k];
                a[r][k] -= sub;
            }
        }
        rank += 1;
    }
    (rank, det)
}

pub fn rank(rows: &[Vec<Rat>]) -> usize {
    eliminate(rows).0
}

pub fn det(rows: &[Vec<Rat>]) -> Rat {
    assert!(rows.iter().all(|r| r.len() == rows.len()), "det of a non-square matrix");
    if rows.is_empty() {
        return Rat::one();
    }
    eliminate(rows).1
}

pub fn rank_i(rows: &[Vec<i64>]) -> usize {
    rank(&to_q(rows))
}

pub fn matmul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "shape mismatch");
            (0..cols).map(|c| (0..inner).fold(Rat::zero(), |acc, k| acc + &row[k] * &b[k][c])).collect()
        })
        .collect()
}

pub fn matvec(a: &[Vec<Rat>], v: &[Rat]) -> Vec<Rat> {
    a.iter().map(|row| row.iter().zip(v).fold(Rat::zero(), |acc, (x, y)| acc + x * y)).collect()
}

pub fn identity(n: usize) -> Vec<Vec<Rat>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect()
}

pub fn submatrix(a: &[Vec<Rat>], rows: &[usize], cols: &[usize]) -> Vec<Vec<Rat>> {
    rows.iter().map(|&r| cols.iter().map(|&c| a[r][c].clone()).collect()).collect()
}

/// Rank as the size of the largest nonsingular square minor.
pub fn minor_rank(a: &[Vec<Rat>]) -> usize {
    let (rows, cols) = (a.len(), a.first().map_or(0, Vec::len));
    for k in (1..=rows.min(cols)).rev() {
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                if !det(&submatrix(a, &rs, &cs)).is_zero() {
                    return k;
                }
            }
        }
    }
    0
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Every parent assignment that uses only edges and covers every column,
/// in lexicographic order of the parent vector.
pub fn brute_reductions(m: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut parent = vec![0usize; rows];
    fn go(m: &[Vec<i64>], r: usize, cols: usize, parent: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if r == m.len() {
            if (0..cols).all(|c| parent.contains(&c)) {
                out.push(parent.clone());
            }
            return;
        }
        for c in 0..cols {
            if m[r][c] != 0 {
                parent[r] = c;
                go(m, r + 1, cols, parent, out);
            }
        }
    }
    go(m, 0, cols, &mut parent, &mut out);
    out
}

pub fn is_valid_reduction(m: &[Vec<i64>], parent: &[usize]) -> bool {
    let cols = m.first().map_or(0, Vec::len);
    parent.len() == m.len()
        && parent.iter().enumerate().all(|(r, &c)| c < cols && m[r][c] != 0)
        && (0..cols).all(|c| parent.contains(&c))
}

pub fn mm(rows: &[Vec<i64>]) -> MultiplicityMatrix {
    let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
    MultiplicityMatrix::from_i64(&refs)
}

pub fn to_i64(m: &IntMatrix) -> Vec<Vec<i64>> {
    m.iter_rows().map(|r| r.iter().map(|x| i64::try_from(x.clone()).expect("small entry")).collect()).collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, max: i64) -> Vec<Vec<i64>> {
    (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0..=max)).collect()).collect()
}

/// Random matrix with no zero row and full column rank.
pub fn random_full_rank(rng: &mut ChaCha8Rng, rows: usize, cols: usize, max: i64) -> Vec<Vec<i64>> {
    loop {
        let m = random_matrix(rng, rows, cols, max);
        if m.iter().all(|r| r.iter().any(|&x| x != 0)) && rank_i(&m) == cols {
            return m;
        }
    }
}

pub fn is_integer_vec(v: &[Rat]) -> bool {
    v.iter().all(Rat::is_integer)
}

pub fn abs_int(x: &Rat) -> Int {
    assert!(x.is_integer());
    x.to_integer().abs()
}
