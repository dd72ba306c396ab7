//! Minimal reductions of multiplicity graphs.
//!
//! A reduction keeps exactly one incoming edge per lower vertex, recorded as
//! a parent map from lower-level to upper-level vertices. All indices are
//! 0-based in the API and 1-based in the text format.

use std::fmt;

use num_traits::Zero;

use crate::diagram::{BratteliDiagram, MultiplicityMatrix, ShapeClass};
use crate::error::{Error, Result};
use crate::linalg::{Permutation, RatMatrix};
use crate::pathspace::{MinimalDiagram, TreeFamily};

/// Default cap for [`enumerate_minimal_reductions`].
pub const DEFAULT_ENUMERATION_LIMIT: usize = 1_000_000;

/// Parent map of one level pair: `parent[j]` is the upper vertex feeding lower vertex `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParentMap {
    /// Index of the lower level.
    pub level: usize,
    pub parent: Vec<usize>,
}

impl ParentMap {
    pub fn new(level: usize, parent: Vec<usize>) -> Self {
        ParentMap { level, parent }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Children of each of the `upper` vertices, in increasing order.
    pub fn children(&self, upper: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); upper];
        for (j, &p) in self.parent.iter().enumerate() {
            if p < upper {
                out[p].push(j);
            }
        }
        out
    }

    /// Every selected edge exists in `m`.
    pub fn is_supported(&self, m: &MultiplicityMatrix) -> bool {
        self.parent.len() == m.rows() && self.parent.iter().enumerate().all(|(j, &p)| p < m.cols() && m.has_edge(j, p))
    }

    pub fn is_surjective(&self, upper: usize) -> bool {
        self.children(upper).iter().all(|c| !c.is_empty())
    }

    /// Checks support and, where the shape allows it, surjectivity against `m`.
    pub fn check(&self, m: &MultiplicityMatrix) -> Result<()> {
        let fail = |detail: String| Err(Error::UnsupportedUserMap { level: self.level, detail });
        if self.parent.len() != m.rows() {
            return fail(format!("map covers {} vertices, level has {}", self.parent.len(), m.rows()));
        }
        for (j, &p) in self.parent.iter().enumerate() {
            if p >= m.cols() || !m.has_edge(j, p) {
                return fail(format!("no edge {}->{}", j + 1, p + 1));
            }
        }
        if m.rows() >= m.cols() {
            if let Some(i) = self.children(m.cols()).iter().position(Vec::is_empty) {
                return fail(format!("upper vertex {} has no child", i + 1));
            }
        }
        Ok(())
    }

    /// Parses `level <n>: j->i j->i …` with 1-based labels.
    pub fn parse_line(line: &str) -> Result<ParentMap> {
        let bad = |msg: String| Error::parse(0, msg);
        let rest =
            line.trim().strip_prefix("level ").ok_or_else(|| bad(format!("expected `level <n>:`, found `{line}`")))?;
        let (level, pairs) = rest.split_once(':').ok_or_else(|| bad(format!("missing `:` in `{line}`")))?;
        let level: usize = level.trim().parse().map_err(|_| bad(format!("bad level `{level}`")))?;
        let mut parent = Vec::new();
        for (idx, tok) in pairs.split_whitespace().enumerate() {
            let (j, i) = tok.split_once("->").ok_or_else(|| bad(format!("bad pair `{tok}`")))?;
            let j: usize = j.parse().map_err(|_| bad(format!("bad vertex in `{tok}`")))?;
            let i: usize = i.parse().map_err(|_| bad(format!("bad vertex in `{tok}`")))?;
            if j != idx + 1 || i == 0 {
                return Err(bad(format!("pair `{tok}` out of order or not 1-based")));
            }
            parent.push(i - 1);
        }
        Ok(ParentMap { level, parent })
    }

    /// Parses one map per non-empty line.
    pub fn parse_lines(text: &str) -> Result<Vec<ParentMap>> {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim().starts_with('#'))
            .map(|(n, l)| {
                ParentMap::parse_line(l).map_err(|e| match e {
                    Error::Parse { message, .. } => Error::parse(n + 1, message),
                    other => other,
                })
            })
            .collect()
    }
}

impl fmt::Display for ParentMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "level {}:", self.level)?;
        for (j, p) in self.parent.iter().enumerate() {
            write!(f, " {}->{}", j + 1, p + 1)?;
        }
        Ok(())
    }
}

/// A single-level reduction together with the relabelling used to find it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutcome {
    pub parent_map: ParentMap,
    /// Position `i` of the working matrix holds original row `row_order[i]`.
    pub row_order: Permutation,
    /// Position `j` of the working matrix holds original column `col_order[j]`.
    pub col_order: Permutation,
}

impl ReductionOutcome {
    /// The parent map in working labels.
    pub fn permuted_map(&self) -> Vec<usize> {
        let cols = self.col_order.inverse();
        (0..self.row_order.len()).map(|i| cols.source(self.parent_map.parent[self.row_order.source(i)])).collect()
    }

    /// Maps working labels back to original labels.
    pub fn restore(&self, permuted: &[usize]) -> Vec<usize> {
        let rows = self.row_order.inverse();
        (0..permuted.len()).map(|j| self.col_order.source(permuted[rows.source(j)])).collect()
    }
}

/// First `k` such that deleting row `k` and the last column leaves a
/// nonsingular matrix and `b[k, last] != 0`.
pub fn pivot_row(b: &RatMatrix) -> Result<usize> {
    let n = b.rows();
    if !b.is_square() || n == 0 || b.rank() < n {
        return Err(Error::Singular);
    }
    let last = n - 1;
    (0..n).find(|&k| !b[(k, last)].is_zero() && b.without(Some(k), Some(last)).rank() == n - 1).ok_or(Error::Singular)
}

fn rank_error(m: &MultiplicityMatrix, needed: usize) -> Error {
    Error::RankDeficient { level: None, rank: m.rank(), needed }
}

/// Constructive minimal reduction of a full-rank matrix with one more row than columns.
pub fn minimal_reduce(m: &MultiplicityMatrix) -> Result<ReductionOutcome> {
    if m.rows() != m.cols() + 1 {
        return Err(Error::shape(format!("expected rows = cols + 1, found {}x{}", m.rows(), m.cols())));
    }
    if m.rank() != m.cols() {
        return Err(rank_error(m, m.cols()));
    }
    if let Some(&row) = m.zero_rows().first() {
        return Err(Error::ZeroRow { level: 0, row });
    }
    let rows: Vec<usize> = (0..m.rows()).collect();
    let cols: Vec<usize> = (0..m.cols()).collect();
    let mut parent = vec![usize::MAX; m.rows()];
    let (row_order, col_order) = reduce_rec(m, rows, cols, &mut parent);
    Ok(ReductionOutcome {
        parent_map: ParentMap::new(0, parent),
        row_order: Permutation::from_order(row_order),
        col_order: Permutation::from_order(col_order),
    })
}

/// Reduces the submatrix on `rows` x `cols` (`rows.len() == cols.len() + 1`, full
/// rank, no zero rows). Returns the working row and column orders.
fn reduce_rec(
    m: &MultiplicityMatrix,
    rows: Vec<usize>,
    cols: Vec<usize>,
    parent: &mut [usize],
) -> (Vec<usize>, Vec<usize>) {
    let n = cols.len();
    if n == 1 {
        for &r in &rows {
            parent[r] = cols[0];
        }
        return (rows, cols);
    }

    let case_a = cols.iter().position(|&c0| rows.iter().all(|&r| cols.iter().any(|&c| c != c0 && m.has_edge(r, c))));
    let Some(j0) = case_a else {
        return reduce_monomial(m, rows, cols, parent);
    };
    let c0 = cols[j0];
    let rest_cols: Vec<usize> = cols.iter().copied().filter(|&c| c != c0).collect();

    // Drop the highest-index row that keeps the remaining rows independent.
    let sub = m.as_matrix().select(&rows, &cols);
    let drop = (0..rows.len())
        .rev()
        .find(|&d| sub.without(Some(d), None).rank() == n)
        .expect("full-rank matrix has an independent row subset");
    let top: Vec<usize> = rows.iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, &r)| r).collect();

    let mut block_cols = rest_cols.clone();
    block_cols.push(c0);
    let block = m.as_matrix().select(&top, &block_cols).to_rat();
    let k = pivot_row(&block).expect("independent rows form a nonsingular block");
    let pivot = top[k];
    parent[pivot] = c0;

    let mut sub_rows: Vec<usize> = top.iter().copied().filter(|&r| r != pivot).collect();
    sub_rows.push(rows[drop]);
    let (mut row_order, mut col_order) = reduce_rec(m, sub_rows, rest_cols, parent);
    row_order.push(pivot);
    col_order.push(c0);
    (row_order, col_order)
}

/// Every column is the only support of some row: pair each column with its
/// first monomial row; remaining rows take their first edge.
fn reduce_monomial(
    m: &MultiplicityMatrix,
    rows: Vec<usize>,
    cols: Vec<usize>,
    parent: &mut [usize],
) -> (Vec<usize>, Vec<usize>) {
    let support = |r: usize| cols.iter().copied().filter(|&c| m.has_edge(r, c)).collect::<Vec<_>>();
    let mut row_order = Vec::with_capacity(rows.len());
    for &c in &cols {
        let r = *rows.iter().find(|&&r| support(r) == [c]).expect("column without a monomial row in the monomial case");
        parent[r] = c;
        row_order.push(r);
    }
    for &r in &rows {
        if !row_order.contains(&r) {
            parent[r] = support(r)[0];
            row_order.push(r);
        }
    }
    (row_order, cols)
}

/// Bijective reduction of a nonsingular square matrix.
pub fn minimal_reduce_square(m: &MultiplicityMatrix) -> Result<ReductionOutcome> {
    if m.rows() != m.cols() {
        return Err(Error::shape(format!("expected a square matrix, found {}x{}", m.rows(), m.cols())));
    }
    if m.rank() != m.cols() {
        return Err(rank_error(m, m.cols()));
    }
    let mut rows: Vec<usize> = (0..m.rows()).collect();
    let mut cols: Vec<usize> = (0..m.cols()).collect();
    let mut parent = vec![0; m.rows()];
    let mut row_tail = Vec::new();
    let mut col_tail = Vec::new();
    while let Some(&c) = cols.last() {
        let block = m.as_matrix().select(&rows, &cols).to_rat();
        let k = pivot_row(&block)?;
        let r = rows.remove(k);
        parent[r] = c;
        cols.pop();
        row_tail.push(r);
        col_tail.push(c);
    }
    row_tail.reverse();
    col_tail.reverse();
    Ok(ReductionOutcome {
        parent_map: ParentMap::new(0, parent),
        row_order: Permutation::from_order(row_tail),
        col_order: Permutation::from_order(col_tail),
    })
}

/// All supported surjective parent maps of `m`, in lexicographic order, at most `limit`.
pub fn enumerate_minimal_reductions(m: &MultiplicityMatrix, limit: usize) -> Vec<ParentMap> {
    let supports: Vec<Vec<usize>> =
        (0..m.rows()).map(|r| (0..m.cols()).filter(|&c| m.has_edge(r, c)).collect()).collect();
    let mut out = Vec::new();
    if m.rows() < m.cols() || limit == 0 {
        return out;
    }
    let mut current = Vec::with_capacity(m.rows());
    let mut hits = vec![0usize; m.cols()];
    enumerate_rec(&supports, &mut current, &mut hits, limit, &mut out);
    out
}

fn enumerate_rec(
    supports: &[Vec<usize>],
    current: &mut Vec<usize>,
    hits: &mut [usize],
    limit: usize,
    out: &mut Vec<ParentMap>,
) {
    let row = current.len();
    let missing = hits.iter().filter(|&&h| h == 0).count();
    if missing > supports.len() - row {
        return;
    }
    if row == supports.len() {
        out.push(ParentMap::new(0, current.clone()));
        return;
    }
    for &c in &supports[row] {
        if out.len() >= limit {
            return;
        }
        current.push(c);
        hits[c] += 1;
        enumerate_rec(supports, current, hits, limit, out);
        hits[c] -= 1;
        current.pop();
    }
}

/// Near-diagonal test: every row has one edge and exactly one column has two
/// child rows. Returns that column.
pub fn is_unique_minimal(m: &MultiplicityMatrix) -> Option<usize> {
    if m.rows() != m.cols() + 1 {
        return None;
    }
    let mut per_col = vec![0usize; m.cols()];
    for r in 0..m.rows() {
        let support: Vec<usize> = (0..m.cols()).filter(|&c| m.has_edge(r, c)).collect();
        let [c] = support.as_slice() else { return None };
        per_col[*c] += 1;
    }
    let doubled: Vec<usize> = (0..m.cols()).filter(|&c| per_col[c] == 2).collect();
    match doubled.as_slice() {
        [j] if per_col.iter().all(|&k| k >= 1) => Some(*j),
        _ => None,
    }
}

/// Unique-minimal and already in the near-diagonal order, where column `j`
/// feeds rows `j` and `j + 1`.
pub fn near_diagonal_branch(m: &MultiplicityMatrix) -> Option<usize> {
    let j = is_unique_minimal(m)?;
    let ok = (0..m.rows()).all(|r| {
        let c = if r <= j { r } else { r - 1 };
        m.has_edge(r, c)
    });
    ok.then_some(j)
}

/// How to choose one incoming edge per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionStrategy {
    /// The constructive proof: [`minimal_reduce`] or [`minimal_reduce_square`].
    Theorem,
    /// The first map found by [`enumerate_minimal_reductions`].
    LexFirst,
    /// Explicit maps for levels `1..=maps.len()`.
    UserMap(Vec<ParentMap>),
    /// A built-in branching rule, checked against the diagram level by level.
    Family(TreeFamily),
}

impl ReductionStrategy {
    /// Strategy names accepted on the command line.
    pub fn from_name(name: &str) -> Option<ReductionStrategy> {
        Some(match name {
            "theorem" => ReductionStrategy::Theorem,
            "lexfirst" => ReductionStrategy::LexFirst,
            "rightmost" => ReductionStrategy::Family(TreeFamily::Rightmost),
            "leftmost" => ReductionStrategy::Family(TreeFamily::Leftmost),
            "alternating" => ReductionStrategy::Family(TreeFamily::Alternating),
            _ => return None,
        })
    }
}

/// Parent map for lower level `level` (1-based level index) of `d` under `strategy`.
pub(crate) fn reduce_level(d: &BratteliDiagram, strategy: &ReductionStrategy, level: usize) -> Result<ParentMap> {
    let m = d.matrix(level - 1)?;
    let with_level = |mut p: ParentMap| {
        p.level = level;
        p
    };
    match strategy {
        ReductionStrategy::Theorem => {
            let outcome = match d.shape() {
                ShapeClass::Type1(_) => minimal_reduce_square(&m),
                ShapeClass::Type2 => minimal_reduce(&m),
                ShapeClass::Irregular => Err(Error::shape("theorem strategy needs a type1 or type2 diagram")),
            };
            outcome.map(|o| with_level(o.parent_map)).map_err(|e| match e {
                Error::RankDeficient { rank, needed, .. } => {
                    Error::RankDeficient { level: Some(level - 1), rank, needed }
                }
                other => other,
            })
        }
        ReductionStrategy::LexFirst => enumerate_minimal_reductions(&m, 1)
            .into_iter()
            .next()
            .map(with_level)
            .ok_or(Error::RankDeficient { level: Some(level - 1), rank: m.rank(), needed: m.cols() }),
        ReductionStrategy::UserMap(maps) => {
            let p = maps
                .iter()
                .find(|p| p.level == level)
                .ok_or(Error::DepthExceeded { requested: level, available: maps.len() })?;
            p.check(&m)?;
            Ok(p.clone())
        }
        ReductionStrategy::Family(family) => {
            let p = family.parent_map(level, m.cols())?;
            p.check(&m)?;
            Ok(p)
        }
    }
}

/// Minimal diagram of `d` under `strategy`, materialized to `depth` levels
/// (clamped to the diagram depth). Infinite diagrams deepen lazily afterwards.
pub fn build_minimal_diagram(d: &BratteliDiagram, strategy: ReductionStrategy, depth: usize) -> Result<MinimalDiagram> {
    if d.shape() == ShapeClass::Irregular
        && matches!(strategy, ReductionStrategy::Theorem | ReductionStrategy::Family(_))
    {
        return Err(Error::shape("irregular diagrams need a lexfirst or user map strategy"));
    }
    let depth = match &strategy {
        ReductionStrategy::UserMap(maps) => depth.min(maps.len()),
        _ => depth,
    };
    let mut t = MinimalDiagram::from_diagram(d.clone(), strategy)?;
    t.ensure_depth(d.clamp_depth(depth))?;
    Ok(t)
}
