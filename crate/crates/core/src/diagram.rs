//! Bratteli diagrams as chains of multiplicity matrices.
//!
//! Level `n` of a diagram has `m_n` vertices. The multiplicity matrix between
//! level `n` and `n + 1` has one row per vertex of the lower level `n + 1` and
//! one column per vertex of the upper level `n`, so the size vectors obey
//! `sizes(n + 1) = A(n) · sizes(n)`.
//!
//! A diagram is stored as a list of matrix blocks. Blocks may be literal or
//! level-parameterized templates; an optional periodic tail repeats the last
//! `p` blocks forever, so infinite diagrams are rules and are only ever
//! materialized to a finite depth.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Int, IntMatrix, Permutation};

/// Nonnegative integer matrix of edge multiplicities, rows = lower level.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiplicityMatrix(IntMatrix);

impl fmt::Debug for MultiplicityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl MultiplicityMatrix {
    pub fn new(m: IntMatrix) -> Result<Self> {
        if !m.is_nonnegative() {
            return Err(Error::shape("multiplicity matrices have nonnegative entries"));
        }
        Ok(MultiplicityMatrix(m))
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        MultiplicityMatrix::new(IntMatrix::from_i64(rows)).expect("negative multiplicity")
    }

    pub fn identity(n: usize) -> Self {
        MultiplicityMatrix(IntMatrix::identity(n))
    }

    pub fn as_matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.rows()
    }

    pub fn cols(&self) -> usize {
        self.0.cols()
    }

    pub fn entry(&self, row: usize, col: usize) -> &Int {
        &self.0[(row, col)]
    }

    /// True when there is at least one edge between lower vertex `row` and upper vertex `col`.
    pub fn has_edge(&self, row: usize, col: usize) -> bool {
        !self.0[(row, col)].is_zero()
    }

    pub fn zero_rows(&self) -> Vec<usize> {
        (0..self.rows()).filter(|&r| self.0.row(r).iter().all(Zero::is_zero)).collect()
    }

    pub fn zero_cols(&self) -> Vec<usize> {
        (0..self.cols()).filter(|&c| (0..self.rows()).all(|r| self.0[(r, c)].is_zero())).collect()
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        self.0.rank()
    }

    /// Product `self · lower`, i.e. the matrix from `lower`'s upper level to `self`'s lower level.
    pub fn compose(&self, lower: &MultiplicityMatrix) -> MultiplicityMatrix {
        MultiplicityMatrix(self.0.mul(&lower.0))
    }

    pub fn apply(&self, v: &[Int]) -> Vec<Int> {
        self.0.mul_vec(v)
    }
}

/// Integer rank of a multiplicity matrix over the rationals.
pub fn multiplicity_rank(m: &MultiplicityMatrix) -> usize {
    m.rank()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeClass {
    /// `m_n = n + 1` at every level.
    Type2,
    /// `m_n = L` at every level, including the root level.
    Type1(usize),
    Irregular,
}

impl ShapeClass {
    /// Classifies a size sequence `m_0, m_1, …`.
    pub fn detect(level_sizes: &[usize]) -> ShapeClass {
        if level_sizes.iter().enumerate().all(|(n, &m)| m == n + 1) && level_sizes.len() > 1 {
            ShapeClass::Type2
        } else if let Some(&first) = level_sizes.first() {
            if level_sizes.iter().all(|&m| m == first) {
                ShapeClass::Type1(first)
            } else {
                ShapeClass::Irregular
            }
        } else {
            ShapeClass::Irregular
        }
    }

    /// Vertex count of the root level.
    pub fn root_size(&self) -> usize {
        match self {
            ShapeClass::Type1(l) => *l,
            _ => 1,
        }
    }
}

impl fmt::Display for ShapeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeClass::Type2 => write!(f, "type2"),
            ShapeClass::Type1(l) => write!(f, "type1 {l}"),
            ShapeClass::Irregular => write!(f, "irregular"),
        }
    }
}

/// Exponent `coef·n + offset` in a level-indexed entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LevelAffine {
    pub coef: i64,
    pub offset: i64,
}

impl LevelAffine {
    pub fn eval(&self, level: usize) -> i64 {
        self.coef * level as i64 + self.offset
    }
}

impl fmt::Display for LevelAffine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.coef {
            0 => return write!(f, "{}", self.offset),
            1 => write!(f, "n")?,
            c => write!(f, "{c}n")?,
        }
        match self.offset {
            0 => Ok(()),
            o if o > 0 => write!(f, "+{o}"),
            o => write!(f, "{o}"),
        }
    }
}

/// A matrix entry that may depend on the level index `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Entry {
    Lit(Int),
    Pow { base: Int, exponent: LevelAffine },
}

impl Entry {
    pub fn eval(&self, level: usize) -> Result<Int> {
        match self {
            Entry::Lit(v) => Ok(v.clone()),
            Entry::Pow { base, exponent } => {
                let e = exponent.eval(level);
                if e < 0 {
                    return Err(Error::shape(format!("negative exponent {e} at level {level}")));
                }
                let e = u32::try_from(e).map_err(|_| Error::shape("exponent too large"))?;
                Ok(num_traits::pow::Pow::pow(base, e))
            }
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Lit(v) => write!(f, "{v}"),
            Entry::Pow { base, exponent } => write!(f, "{base}^{{{exponent}}}"),
        }
    }
}

/// 1-based position counted from the start (positive) or from the end (negative).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgePos(pub i64);

impl EdgePos {
    fn resolve(&self, len: usize) -> Option<usize> {
        let len = len as i64;
        let idx = if self.0 > 0 { self.0 - 1 } else { len + self.0 };
        (self.0 != 0 && (0..len).contains(&idx)).then_some(idx as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BandRule {
    /// Sets every entry `(c + offset, c)`.
    Diag { offset: i64, value: Entry },
    /// Sets a single entry.
    At { row: EdgePos, col: EdgePos, value: Entry },
}

/// One matrix block of a diagram description.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MatrixTemplate {
    /// Fixed-size rows, entries possibly level-indexed.
    Rows(Vec<Vec<Entry>>),
    /// Size taken from the shape class; rules applied in order over zeros.
    Banded(Vec<BandRule>),
}

impl MatrixTemplate {
    pub fn literal(m: &MultiplicityMatrix) -> Self {
        MatrixTemplate::Rows(m.as_matrix().iter_rows().map(|r| r.iter().cloned().map(Entry::Lit).collect()).collect())
    }

    fn eval(&self, level: usize, dims: (usize, usize)) -> Result<MultiplicityMatrix> {
        let (rows, cols) = dims;
        let mut m = IntMatrix::zeros(rows, cols);
        match self {
            MatrixTemplate::Rows(entries) => {
                for (r, row) in entries.iter().enumerate() {
                    for (c, e) in row.iter().enumerate() {
                        m[(r, c)] = e.eval(level)?;
                    }
                }
            }
            MatrixTemplate::Banded(rules) => {
                for rule in rules {
                    match rule {
                        BandRule::Diag { offset, value } => {
                            let v = value.eval(level)?;
                            for c in 0..cols {
                                let r = c as i64 + offset;
                                if (0..rows as i64).contains(&r) {
                                    m[(r as usize, c)] = v.clone();
                                }
                            }
                        }
                        BandRule::At { row, col, value } => {
                            let (Some(r), Some(c)) = (row.resolve(rows), col.resolve(cols)) else {
                                return Err(Error::shape(format!(
                                    "band entry ({}, {}) outside a {rows}x{cols} matrix at level {level}",
                                    row.0, col.0
                                )));
                            };
                            m[(r, c)] = value.eval(level)?;
                        }
                    }
                }
            }
        }
        MultiplicityMatrix::new(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tail {
    None,
    /// The last `p` blocks repeat forever, evaluated at their own level.
    Periodic(usize),
}

/// Default completion rule recorded with a diagram description.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompletionDefault {
    Auto,
    Weight,
}

/// Completion columns requested by a diagram description.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CompletionHints {
    pub default: Option<CompletionDefault>,
    pub explicit: BTreeMap<usize, Vec<Int>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SizeVector {
    pub level: usize,
    pub entries: Vec<Int>,
}

/// A Bratteli diagram given by its multiplicity matrices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BratteliDiagram {
    shape: ShapeClass,
    blocks: Vec<MatrixTemplate>,
    tail: Tail,
    completions: CompletionHints,
}

impl BratteliDiagram {
    pub fn new(shape: ShapeClass, blocks: Vec<MatrixTemplate>, tail: Tail) -> Result<Self> {
        if let Tail::Periodic(p) = tail {
            if p == 0 || p > blocks.len() {
                return Err(Error::shape(format!(
                    "periodic tail of length {p} needs between 1 and {} blocks",
                    blocks.len()
                )));
            }
        }
        if shape == ShapeClass::Irregular && blocks.iter().any(|b| matches!(b, MatrixTemplate::Banded(_))) {
            return Err(Error::shape("banded blocks need a type1 or type2 shape"));
        }
        Ok(BratteliDiagram { shape, blocks, tail, completions: CompletionHints::default() })
    }

    /// Finite diagram from literal matrices, shape class detected from the sizes.
    pub fn from_matrices(matrices: Vec<MultiplicityMatrix>) -> Self {
        let mut sizes = vec![matrices.first().map_or(1, MultiplicityMatrix::cols)];
        sizes.extend(matrices.iter().map(MultiplicityMatrix::rows));
        let shape = ShapeClass::detect(&sizes);
        BratteliDiagram {
            shape,
            blocks: matrices.iter().map(MatrixTemplate::literal).collect(),
            tail: Tail::None,
            completions: CompletionHints::default(),
        }
    }

    pub fn with_shape(mut self, shape: ShapeClass) -> Self {
        self.shape = shape;
        self
    }

    pub fn with_completions(mut self, hints: CompletionHints) -> Self {
        self.completions = hints;
        self
    }

    pub fn shape(&self) -> ShapeClass {
        self.shape
    }

    pub fn blocks(&self) -> &[MatrixTemplate] {
        &self.blocks
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn completions(&self) -> &CompletionHints {
        &self.completions
    }

    /// Number of matrices, `None` for diagrams with a periodic tail.
    pub fn depth(&self) -> Option<usize> {
        match self.tail {
            Tail::None => Some(self.blocks.len()),
            Tail::Periodic(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.depth().is_some()
    }

    /// Depth usable for a request: the finite depth, or `requested` for infinite diagrams.
    pub fn clamp_depth(&self, requested: usize) -> usize {
        self.depth().map_or(requested, |d| d.min(requested))
    }

    fn block_index(&self, level: usize) -> Result<usize> {
        if level < self.blocks.len() {
            return Ok(level);
        }
        match self.tail {
            Tail::Periodic(p) => {
                let start = self.blocks.len() - p;
                Ok(start + (level - start) % p)
            }
            Tail::None => {
                Err(Error::IndexOutOfRange(format!("level {level} beyond diagram depth {}", self.blocks.len())))
            }
        }
    }

    fn block_dims(&self, level: usize, block: &MatrixTemplate) -> (usize, usize) {
        match block {
            MatrixTemplate::Rows(rows) => (rows.len(), rows.first().map_or(0, Vec::len)),
            MatrixTemplate::Banded(_) => match self.shape {
                ShapeClass::Type1(l) => (l, l),
                _ => (level + 2, level + 1),
            },
        }
    }

    /// The multiplicity matrix between level `level` and `level + 1`.
    pub fn matrix(&self, level: usize) -> Result<MultiplicityMatrix> {
        let block = &self.blocks[self.block_index(level)?];
        block.eval(level, self.block_dims(level, block))
    }

    /// The first `depth` matrices.
    pub fn matrices(&self, depth: usize) -> Result<Vec<MultiplicityMatrix>> {
        (0..depth).map(|n| self.matrix(n)).collect()
    }

    /// Vertex count of level `level`, read from block shapes only.
    pub fn level_size(&self, level: usize) -> Result<usize> {
        if level == 0 {
            return Ok(match self.blocks.first() {
                Some(b @ MatrixTemplate::Rows(_)) => self.block_dims(0, b).1,
                _ => self.shape.root_size(),
            });
        }
        let block = &self.blocks[self.block_index(level - 1)?];
        Ok(self.block_dims(level - 1, block).0)
    }

    /// Size vectors `k(·, n)` for `n = 0..=depth`.
    pub fn size_vectors(&self, depth: usize) -> Result<Vec<SizeVector>> {
        let mut current = vec![Int::one(); self.level_size(0)?];
        let mut out = vec![SizeVector { level: 0, entries: current.clone() }];
        for n in 0..depth {
            let m = self.matrix(n)?;
            if m.cols() != current.len() {
                return Err(Error::shape(format!(
                    "matrix {n} has {} columns but level {n} has {} vertices",
                    m.cols(),
                    current.len()
                )));
            }
            current = m.apply(&current);
            out.push(SizeVector { level: n + 1, entries: current.clone() });
        }
        Ok(out)
    }

    /// A finite literal copy of the first `depth` levels.
    pub fn truncated(&self, depth: usize) -> Result<BratteliDiagram> {
        let d = BratteliDiagram::from_matrices(self.matrices(depth)?).with_shape(self.shape);
        Ok(d.with_completions(self.completions.clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    ZeroRow {
        row: usize,
    },
    ZeroColumn {
        col: usize,
    },
    /// Column count disagrees with the size of the level above.
    ChainMismatch {
        expected_cols: usize,
        found_cols: usize,
    },
    RootNotSingleton {
        cols: usize,
    },
    ShapeClassMismatch {
        expected: usize,
        found: usize,
    },
    Unreadable(String),
}

/// A validation finding; coordinates are 0-based internally, printed 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub level: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "matrix {}: ", self.level)?;
        match &self.kind {
            ViolationKind::ZeroRow { row } => write!(f, "zero row at row {}", row + 1),
            ViolationKind::ZeroColumn { col } => write!(f, "zero column at column {}", col + 1),
            ViolationKind::ChainMismatch { expected_cols, found_cols } => {
                write!(f, "shape mismatch: {found_cols} columns but the level above has {expected_cols} vertices")
            }
            ViolationKind::RootNotSingleton { cols } => {
                write!(f, "root level must have 1 vertex, matrix has {cols} columns")
            }
            ViolationKind::ShapeClassMismatch { expected, found } => {
                write!(f, "declared shape expects {expected} lower vertices, found {found}")
            }
            ViolationKind::Unreadable(msg) => write!(f, "{msg}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub checked_depth: usize,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks all structural invariants on the finite part of `d`, or on the
/// literal prefix plus two tail periods for infinite diagrams.
pub fn validate_diagram(d: &BratteliDiagram) -> ValidationReport {
    let depth = match d.tail() {
        Tail::None => d.blocks().len(),
        Tail::Periodic(p) => d.blocks().len() + 2 * p,
    };
    validate_to_depth(d, depth)
}

pub fn validate_to_depth(d: &BratteliDiagram, depth: usize) -> ValidationReport {
    let depth = d.clamp_depth(depth);
    let mut report = ValidationReport { violations: Vec::new(), checked_depth: depth };
    let mut push = |level, kind| report.violations.push(Violation { level, kind });
    let mut above: Option<usize> = None;
    for n in 0..depth {
        let m = match d.matrix(n) {
            Ok(m) => m,
            Err(e) => {
                push(n, ViolationKind::Unreadable(e.to_string()));
                above = None;
                continue;
            }
        };
        match above {
            None if n == 0 => {
                let root = d.shape().root_size();
                if m.cols() != root {
                    if root == 1 {
                        push(n, ViolationKind::RootNotSingleton { cols: m.cols() });
                    } else {
                        push(n, ViolationKind::ChainMismatch { expected_cols: root, found_cols: m.cols() });
                    }
                }
            }
            Some(prev_rows) if prev_rows != m.cols() => {
                push(n, ViolationKind::ChainMismatch { expected_cols: prev_rows, found_cols: m.cols() })
            }
            _ => {}
        }
        let expected_rows = match d.shape() {
            ShapeClass::Type2 => Some(n + 2),
            ShapeClass::Type1(l) => Some(l),
            ShapeClass::Irregular => None,
        };
        if let Some(expected) = expected_rows {
            if expected != m.rows() {
                push(n, ViolationKind::ShapeClassMismatch { expected, found: m.rows() });
            }
        }
        for row in m.zero_rows() {
            push(n, ViolationKind::ZeroRow { row });
        }
        for col in m.zero_cols() {
            push(n, ViolationKind::ZeroColumn { col });
        }
        above = Some(m.rows());
    }
    report
}

/// Contracts `d` to the listed levels; the matrix between consecutive kept
/// levels is the ordered product of the intermediate matrices.
pub fn telescope(d: &BratteliDiagram, levels: &[usize]) -> Result<BratteliDiagram> {
    if levels.first() != Some(&0) {
        return Err(Error::IndexOutOfRange("telescoping levels must start at 0".into()));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::IndexOutOfRange("telescoping levels must be strictly increasing".into()));
    }
    let last = *levels.last().unwrap();
    if let Some(depth) = d.depth() {
        if last > depth {
            return Err(Error::IndexOutOfRange(format!("level {last} beyond diagram depth {depth}")));
        }
    }
    let mut out = Vec::with_capacity(levels.len() - 1);
    for w in levels.windows(2) {
        let mut acc = d.matrix(w[0])?;
        for n in w[0] + 1..w[1] {
            let next = d.matrix(n)?;
            if next.cols() != acc.rows() {
                return Err(Error::shape(format!("matrix {n} does not chain onto matrix {}", n - 1)));
            }
            acc = next.compose(&acc);
        }
        out.push(acc);
    }
    let mut t = BratteliDiagram::from_matrices(out);
    if let ShapeClass::Type1(l) = d.shape() {
        t.shape = ShapeClass::Type1(l);
    }
    Ok(t)
}

/// Result of splitting a tall full-rank matrix into one-row-at-a-time steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dilation {
    /// Row order `P`: row `i` of `P·M` is row `order.source(i)` of `M`.
    pub order: Permutation,
    /// `B_1, …, B_d` with `P·M = B_d ⋯ B_1`.
    pub factors: Vec<MultiplicityMatrix>,
}

impl Dilation {
    /// `B_d ⋯ B_1`.
    pub fn product(&self) -> IntMatrix {
        let mut it = self.factors.iter();
        let first = it.next().expect("dilation has at least one factor").as_matrix().clone();
        it.fold(first, |acc, b| b.as_matrix().mul(&acc))
    }

    /// The chain `B_1, …, B_{d-1}, P⁻¹·B_d`, whose product is the original matrix.
    pub fn chain(&self) -> Vec<MultiplicityMatrix> {
        let mut out = self.factors.clone();
        if let Some(last) = out.last_mut() {
            let inv = self.order.inverse();
            *last = MultiplicityMatrix(last.as_matrix().permute_rows(inv.order()));
        }
        out
    }
}

/// Factors a tall full-rank matrix as `P·M = B_d ⋯ B_1`, each `B_i` adding one row.
///
/// `P` moves a set of `cols` linearly independent rows to the bottom. The set
/// is chosen greedily scanning rows from the last one upwards; the remaining
/// rows keep their relative order on top.
pub fn dilate_step(m: &MultiplicityMatrix) -> Result<Dilation> {
    let (rows, cols) = (m.rows(), m.cols());
    let rank = m.rank();
    if rank != cols || rows <= cols {
        return Err(Error::RankDeficient { level: None, rank, needed: cols });
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(cols);
    for r in (0..rows).rev() {
        if chosen.len() == cols {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(r);
        trial.sort_unstable();
        let all_cols: Vec<usize> = (0..cols).collect();
        if m.as_matrix().select(&trial, &all_cols).rank() == trial.len() {
            chosen = trial;
        }
    }
    let mut order: Vec<usize> = (0..rows).filter(|r| !chosen.contains(r)).collect();
    order.extend(&chosen);
    let order = Permutation::from_order(order);
    let pm = m.as_matrix().permute_rows(order.order());

    let d = rows - cols;
    let mut factors = Vec::with_capacity(d);
    for i in 1..=d {
        let (b_rows, b_cols) = (cols + i, cols + i - 1);
        let mut b = IntMatrix::zeros(b_rows, b_cols);
        for k in 0..i - 1 {
            b[(k, k)] = Int::one();
        }
        if i < d {
            for c in 0..cols {
                b[(i - 1, i - 1 + c)] = pm[(i - 1, c)].clone();
            }
            for k in 0..cols {
                b[(i + k, i - 1 + k)] = Int::one();
            }
        } else {
            for k in 0..=cols {
                for c in 0..cols {
                    b[(i - 1 + k, i - 1 + c)] = pm[(i - 1 + k, c)].clone();
                }
            }
        }
        factors.push(MultiplicityMatrix(b));
    }
    Ok(Dilation { order, factors })
}

/// Checks that `b` has the block shape of the `i`-th of `d` dilation factors
/// built from the permuted matrix `pm`.
pub fn has_dilation_block_shape(b: &IntMatrix, i: usize, d: usize, pm: &IntMatrix) -> bool {
    let cols = pm.cols();
    if b.rows() != cols + i || b.cols() != cols + i - 1 {
        return false;
    }
    for r in 0..b.rows() {
        for c in 0..b.cols() {
            let expected = if r < i - 1 {
                if r == c {
                    Int::one()
                } else {
                    Int::zero()
                }
            } else if c < i - 1 {
                Int::zero()
            } else if r == i - 1 || i == d {
                pm[(r, c - (i - 1))].clone()
            } else if r - i == c - (i - 1) {
                Int::one()
            } else {
                Int::zero()
            };
            if b[(r, c)] != expected {
                return false;
            }
        }
    }
    true
}

/// A diagram rewritten to `m_n = n + 1`, remembering where the input levels went.
#[derive(Debug, Clone)]
pub struct Normalization {
    pub diagram: BratteliDiagram,
    /// Levels of the input that survived contraction.
    pub contracted_levels: Vec<usize>,
    /// Position of each surviving input level in the output diagram.
    pub embedded_levels: Vec<usize>,
}

/// Contracts to strictly increasing level sizes, then dilates every step
/// that grows by more than one vertex.
pub fn normalize_type2(d: &BratteliDiagram) -> Result<Normalization> {
    let Some(depth) = d.depth() else {
        if d.shape() == ShapeClass::Type2 {
            return Ok(Normalization {
                diagram: d.clone(),
                contracted_levels: Vec::new(),
                embedded_levels: Vec::new(),
            });
        }
        return Err(Error::shape("normalization needs a finite diagram; truncate first"));
    };
    let sizes: Vec<usize> = (0..=depth).map(|n| d.level_size(n)).collect::<Result<_>>()?;
    if sizes[0] != 1 {
        return Err(Error::shape("normalization needs a single root vertex"));
    }
    let mut kept = vec![0];
    for (n, &m) in sizes.iter().enumerate().skip(1) {
        if m > sizes[*kept.last().unwrap()] {
            kept.push(n);
        }
    }
    let contracted = telescope(d, &kept)?;
    let mut out = Vec::new();
    let mut embedded = vec![0];
    for (k, m) in contracted.matrices(kept.len() - 1)?.into_iter().enumerate() {
        let rank = m.rank();
        if rank != m.cols() {
            return Err(Error::NotDilatable { level: kept[k], rank, cols: m.cols() });
        }
        if m.rows() == m.cols() + 1 {
            out.push(m);
        } else {
            out.extend(dilate_step(&m)?.chain());
        }
        embedded.push(out.len());
    }
    let diagram =
        BratteliDiagram::from_matrices(out).with_shape(ShapeClass::Type2).with_completions(d.completions().clone());
    Ok(Normalization { diagram, contracted_levels: kept, embedded_levels: embedded })
}

/// DOT rendering of the first `depth` levels; multiple edges are labelled with their count.
pub fn diagram_dot(d: &BratteliDiagram, depth: usize) -> Result<String> {
    let depth = d.clamp_depth(depth);
    let mut out = String::from("digraph bratteli {\n  rankdir=TB;\n  node [shape=circle, label=\"\"];\n");
    for level in 0..=depth {
        let _ = write!(out, "  {{ rank=same;");
        for v in 0..d.level_size(level)? {
            let _ = write!(out, " v{level}_{v};");
        }
        out.push_str(" }\n");
    }
    for level in 0..depth {
        let m = d.matrix(level)?;
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let e = m.entry(r, c);
                if e.is_one() {
                    let _ = writeln!(out, "  v{level}_{c} -> v{}_{r};", level + 1);
                } else if !e.is_zero() {
                    let _ = writeln!(out, "  v{level}_{c} -> v{}_{r} [label=\"{e}\"];", level + 1);
                }
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gicar(depth: usize) -> BratteliDiagram {
        let blocks = vec![MatrixTemplate::Banded(vec![
            BandRule::Diag { offset: 0, value: Entry::Lit(Int::one()) },
            BandRule::Diag { offset: 1, value: Entry::Lit(Int::one()) },
        ])];
        BratteliDiagram::new(ShapeClass::Type2, blocks, Tail::Periodic(1)).unwrap().truncated(depth).unwrap()
    }

    #[test]
    fn gicar_prefix_is_valid() {
        let d = gicar(4);
        assert!(validate_diagram(&d).is_empty());
        assert_eq!(d.matrix(1).unwrap(), MultiplicityMatrix::from_i64(&[&[1, 0], &[1, 1], &[0, 1]]));
    }

    #[test]
    fn zero_row_is_reported_one_based() {
        let d = BratteliDiagram::from_matrices(vec![MultiplicityMatrix::from_i64(&[&[0], &[1]])]);
        let report = validate_diagram(&d);
        assert_eq!(report.violations, vec![Violation { level: 0, kind: ViolationKind::ZeroRow { row: 0 } }]);
        assert_eq!(report.violations[0].to_string(), "matrix 0: zero row at row 1");
    }

    #[test]
    fn chain_mismatch_is_reported() {
        let d = BratteliDiagram::from_matrices(vec![
            MultiplicityMatrix::from_i64(&[&[1], &[1], &[1]]),
            MultiplicityMatrix::from_i64(&[&[1, 1], &[1, 0]]),
        ]);
        let report = validate_diagram(&d);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v.kind, ViolationKind::ChainMismatch { expected_cols: 3, found_cols: 2 })));
    }

    #[test]
    fn telescope_gicar_two_levels() {
        let t = telescope(&gicar(3), &[0, 2]).unwrap();
        assert_eq!(t.matrix(0).unwrap(), MultiplicityMatrix::from_i64(&[&[1], &[2], &[1]]));
    }

    #[test]
    fn telescope_all_levels_is_identity() {
        let d = gicar(4);
        let t = telescope(&d, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(t.matrices(4).unwrap(), d.matrices(4).unwrap());
    }

    #[test]
    fn telescope_uhf2() {
        let d = BratteliDiagram::from_matrices(vec![
            MultiplicityMatrix::from_i64(&[&[2]]),
            MultiplicityMatrix::from_i64(&[&[2]]),
        ]);
        let t = telescope(&d, &[0, 2]).unwrap();
        assert_eq!(t.matrix(0).unwrap(), MultiplicityMatrix::from_i64(&[&[4]]));
    }

    #[test]
    fn telescope_rejects_bad_levels() {
        let d = gicar(3);
        assert!(matches!(telescope(&d, &[0, 4]), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(telescope(&d, &[1, 2]), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(telescope(&d, &[0, 2, 2]), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn dilate_worked_example() {
        let m = MultiplicityMatrix::from_i64(&[&[1, 1], &[2, 1], &[1, 0], &[0, 1]]);
        let dil = dilate_step(&m).unwrap();
        assert!(dil.order.is_identity());
        assert_eq!(dil.factors[0], MultiplicityMatrix::from_i64(&[&[1, 1], &[1, 0], &[0, 1]]));
        assert_eq!(dil.factors[1], MultiplicityMatrix::from_i64(&[&[1, 0, 0], &[0, 2, 1], &[0, 1, 0], &[0, 0, 1]]));
        assert_eq!(&dil.product(), m.as_matrix());
    }

    #[test]
    fn dilate_one_extra_row_is_single_factor() {
        let m = MultiplicityMatrix::from_i64(&[&[1, 0], &[1, 1], &[0, 1]]);
        let dil = dilate_step(&m).unwrap();
        assert_eq!(dil.factors.len(), 1);
        assert_eq!(dil.factors[0].as_matrix(), &m.as_matrix().permute_rows(dil.order.order()));
    }

    #[test]
    fn dilate_rejects_rank_deficient() {
        let m = MultiplicityMatrix::from_i64(&[&[1, 0], &[1, 0], &[1, 0]]);
        assert!(matches!(dilate_step(&m), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn normalize_inserts_intermediate_level() {
        let d = BratteliDiagram::from_matrices(vec![
            MultiplicityMatrix::from_i64(&[&[1], &[1]]),
            MultiplicityMatrix::from_i64(&[&[1, 1], &[2, 1], &[1, 0], &[0, 1]]),
        ]);
        let norm = normalize_type2(&d).unwrap();
        let sizes: Vec<usize> = (0..=3).map(|n| norm.diagram.level_size(n).unwrap()).collect();
        assert_eq!(sizes, vec![1, 2, 3, 4]);
        assert_eq!(norm.embedded_levels, vec![0, 1, 3]);
        let back = telescope(&norm.diagram, &norm.embedded_levels).unwrap();
        assert_eq!(back.matrices(2).unwrap(), d.matrices(2).unwrap());
        assert_eq!(norm.diagram.shape(), ShapeClass::Type2);
    }

    #[test]
    fn normalize_keeps_type2() {
        let d = gicar(4);
        let norm = normalize_type2(&d).unwrap();
        assert_eq!(norm.diagram.matrices(4).unwrap(), d.matrices(4).unwrap());
    }

    #[test]
    fn normalize_rejects_rank_deficient_step() {
        let d = BratteliDiagram::from_matrices(vec![
            MultiplicityMatrix::from_i64(&[&[1], &[1]]),
            MultiplicityMatrix::from_i64(&[&[1, 0], &[1, 1], &[0, 1]]),
            MultiplicityMatrix::from_i64(&[&[0, 0, 1], &[1, 1, 1], &[0, 0, 1], &[0, 0, 1]]),
        ]);
        assert!(matches!(normalize_type2(&d), Err(Error::NotDilatable { level: 2, rank: 2, cols: 3 })));
    }

    #[test]
    fn level_indexed_entries() {
        let e = Entry::Pow { base: Int::from(2), exponent: LevelAffine { coef: 1, offset: 1 } };
        assert_eq!(e.eval(3).unwrap(), Int::from(16));
        assert_eq!(e.to_string(), "2^{n+1}");
    }

    #[test]
    fn size_vectors_follow_recursion() {
        let d = gicar(3);
        let sizes = d.size_vectors(3).unwrap();
        let last: Vec<i64> = sizes[3].entries.iter().map(|x| i64::try_from(x).unwrap()).collect();
        assert_eq!(last, vec![1, 3, 3, 1]);
    }
}
