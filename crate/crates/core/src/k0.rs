//! The dimension group as locally constant functions on `X_min`.
//!
//! Each multiplicity matrix is completed to a nonsingular square
//! `A_{n,n+1}`. The cumulative matrices `A_n` turn integer vectors at level
//! `n` into coefficients over the cylinders `B(r_l, l)`, and
//! `Φ_n = R_n ∘ A_n` realizes level `n` of the direct limit as functions.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::diagram::{BratteliDiagram, CompletionDefault, MultiplicityMatrix, ShapeClass};
use crate::error::{Error, Result};
use crate::linalg::{integral, rat_vec, Int, IntMatrix, Permutation, Rat, RatMatrix};
use crate::pathspace::{refine, Cylinder, LocallyConstantFunction, MinimalDiagram};
use crate::reduction::{is_unique_minimal, near_diagonal_branch};

/// How to append the missing column to a multiplicity matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompletionHint {
    /// First standard basis column giving a nonsingular square.
    Auto,
    /// `b · e_{j+1}` where `j` is the branching column.
    WeightColumn(Int),
    Explicit(Vec<Int>),
}

/// Appends a column to `m` (`rows = cols + 1`) so the result is nonsingular.
pub fn complete_matrix(m: &MultiplicityMatrix, hint: &CompletionHint) -> Result<IntMatrix> {
    if m.rows() != m.cols() + 1 {
        return Err(Error::shape(format!("completion needs rows = cols + 1, found {}x{}", m.rows(), m.cols())));
    }
    let rank = m.rank();
    if rank != m.cols() {
        return Err(Error::RankDeficient { level: None, rank, needed: m.cols() });
    }
    let column = match hint {
        CompletionHint::Auto => {
            // det [M | c] is linear in c, so if no basis column works none does.
            let cofactors: Vec<Int> = (0..m.rows()).map(|i| m.as_matrix().without(Some(i), None).det()).collect();
            let i = cofactors.iter().position(|c| !c.is_zero()).ok_or(Error::CompletionNotFound { level: 0 })?;
            basis(m.rows(), i, Int::one())
        }
        CompletionHint::WeightColumn(b) => {
            let j = is_unique_minimal(m).ok_or(Error::NotUniqueMinimal { level: 0 })?;
            basis(m.rows(), j + 1, b.clone())
        }
        CompletionHint::Explicit(c) => {
            if c.len() != m.rows() {
                return Err(Error::shape(format!("completion column has {} entries, need {}", c.len(), m.rows())));
            }
            c.clone()
        }
    };
    let square = m.as_matrix().with_column(&column);
    if square.det().is_zero() {
        return Err(Error::SingularCompletion { level: 0 });
    }
    Ok(square)
}

fn basis(len: usize, i: usize, scale: Int) -> Vec<Int> {
    let mut v = vec![Int::zero(); len];
    v[i] = scale;
    v
}

fn at_level(e: Error, level: usize) -> Error {
    match e {
        Error::RankDeficient { rank, needed, .. } => Error::RankDeficient { level: Some(level), rank, needed },
        Error::CompletionNotFound { .. } => Error::CompletionNotFound { level },
        Error::SingularCompletion { .. } => Error::SingularCompletion { level },
        Error::NotUniqueMinimal { .. } => Error::NotUniqueMinimal { level },
        other => other,
    }
}

/// The denominator `|A_n⁻¹|` of the lattice `G_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupScale {
    pub level: usize,
    pub denominator: Int,
}

/// Completed squares with their exact cumulative products.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletedChain {
    shape: ShapeClass,
    originals: Vec<MultiplicityMatrix>,
    squares: Vec<IntMatrix>,
    dets: Vec<Int>,
    /// `cumulative[n] = A_n`.
    cumulative: Vec<RatMatrix>,
    /// `inverses[n] = A_n⁻¹`.
    inverses: Vec<IntMatrix>,
    denominators: Vec<Int>,
}

impl CompletedChain {
    fn empty(shape: ShapeClass) -> Result<Self> {
        let root = match shape {
            ShapeClass::Type2 => 1,
            ShapeClass::Type1(l) => l,
            ShapeClass::Irregular => {
                return Err(Error::shape("dimension group computations need a type1 or type2 diagram"))
            }
        };
        Ok(CompletedChain {
            shape,
            originals: Vec::new(),
            squares: Vec::new(),
            dets: Vec::new(),
            cumulative: vec![RatMatrix::identity(root)],
            inverses: vec![IntMatrix::identity(root)],
            denominators: vec![Int::one()],
        })
    }

    /// Appends one level; `square` need not extend `original` (mutation tests rely on that).
    fn push_unchecked(&mut self, original: MultiplicityMatrix, square: IntMatrix) -> Result<()> {
        let level = self.squares.len();
        let det = square.det();
        let inv = square.inverse().ok_or(Error::SingularCompletion { level })?;
        let prev_a = self.cumulative.last().expect("chain starts with A_0");
        let prev_inv = self.inverses.last().expect("chain starts with A_0");
        let (a, a_inv) = match self.shape {
            ShapeClass::Type1(_) => (prev_a.mul(&inv), square.mul(prev_inv)),
            _ => (prev_a.direct_sum_identity(1).mul(&inv), square.mul(&prev_inv.direct_sum_identity(1))),
        };
        if a.rows() != square.rows() {
            return Err(Error::shape(format!(
                "square {level} is {}x{}, chain expects {}",
                square.rows(),
                square.cols(),
                a.rows()
            )));
        }
        let denom = self.denominators.last().expect("chain starts with A_0") * det.abs();
        self.originals.push(original);
        self.squares.push(square);
        self.dets.push(det);
        self.cumulative.push(a);
        self.inverses.push(a_inv);
        self.denominators.push(denom);
        Ok(())
    }

    /// Appends a completed level, checking that `square` extends `original`.
    pub fn push_level(&mut self, original: MultiplicityMatrix, square: IntMatrix) -> Result<()> {
        let level = self.squares.len();
        let extends = square.rows() == original.rows()
            && (0..original.rows()).all(|r| (0..original.cols()).all(|c| square[(r, c)] == *original.entry(r, c)));
        if !extends {
            return Err(Error::shape(format!("square {level} does not extend the multiplicity matrix")));
        }
        self.push_unchecked(original, square)
    }

    /// Chain of `squares`, reading each multiplicity matrix off its leading columns.
    pub fn build_chain(shape: ShapeClass, squares: Vec<IntMatrix>) -> Result<Self> {
        let mut chain = Self::empty(shape)?;
        for (level, s) in squares.into_iter().enumerate() {
            if !s.is_square() {
                return Err(Error::shape(format!("completion {level} is not square")));
            }
            let original = match shape {
                ShapeClass::Type1(_) => s.clone(),
                _ => s.without(None, Some(s.cols() - 1)),
            };
            let original = MultiplicityMatrix::new(original)?;
            chain.push_unchecked(original, s)?;
        }
        Ok(chain)
    }

    /// Completes the first `depth` matrices of `d` using its completion hints.
    pub fn from_diagram(d: &BratteliDiagram, depth: usize) -> Result<Self> {
        let depth = d.clamp_depth(depth);
        let mut chain = Self::empty(d.shape())?;
        let scheme = match d.completions().default {
            Some(CompletionDefault::Weight) if matches!(d.shape(), ShapeClass::Type2) => Some(weight_scheme(d, depth)?),
            _ => None,
        };
        for level in 0..depth {
            let m = d.matrix(level)?;
            let square = if let ShapeClass::Type1(_) = d.shape() {
                m.as_matrix().clone()
            } else {
                let hint = match (d.completions().explicit.get(&level), &scheme) {
                    (Some(col), _) => CompletionHint::Explicit(col.clone()),
                    (None, Some(s)) => CompletionHint::WeightColumn(s.b[level].clone()),
                    (None, None) => CompletionHint::Auto,
                };
                complete_matrix(&m, &hint).map_err(|e| at_level(e, level))?
            };
            chain.push_unchecked(m, square)?;
        }
        Ok(chain)
    }

    /// Copy with square `level` replaced and later cumulatives recomputed.
    /// The multiplicity matrices are kept, so the copy may break the
    /// completion invariant; intended for negative controls.
    pub fn with_square(&self, level: usize, square: IntMatrix) -> Result<Self> {
        let mut out = Self::empty(self.shape)?;
        for (k, (orig, s)) in self.originals.iter().zip(&self.squares).enumerate() {
            let s = if k == level { square.clone() } else { s.clone() };
            out.push_unchecked(orig.clone(), s)?;
        }
        Ok(out)
    }

    pub fn shape(&self) -> ShapeClass {
        self.shape
    }

    /// Number of completed levels.
    pub fn depth(&self) -> usize {
        self.squares.len()
    }

    pub fn squares(&self) -> &[IntMatrix] {
        &self.squares
    }

    pub fn dets(&self) -> &[Int] {
        &self.dets
    }

    pub fn original(&self, level: usize) -> Result<&MultiplicityMatrix> {
        self.originals.get(level).ok_or(Error::DepthExceeded { requested: level + 1, available: self.depth() })
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.depth() {
            return Err(Error::DepthExceeded { requested: n, available: self.depth() });
        }
        Ok(())
    }

    /// `A_n`.
    pub fn cumulative(&self, n: usize) -> Result<&RatMatrix> {
        self.check(n)?;
        Ok(&self.cumulative[n])
    }

    /// `A_n⁻¹`, an integer matrix.
    pub fn cumulative_inverse(&self, n: usize) -> Result<&IntMatrix> {
        self.check(n)?;
        Ok(&self.inverses[n])
    }

    pub fn group_scale(&self, n: usize) -> Result<GroupScale> {
        self.check(n)?;
        Ok(GroupScale { level: n, denominator: self.denominators[n].clone() })
    }

    /// `A_n A_n⁻¹ = I`, `det(A_n⁻¹) A_n = adj(A_n⁻¹)` with `|det(A_n⁻¹)| = |A_n⁻¹|`.
    pub fn check_exactness(&self, n: usize) -> Result<bool> {
        self.check(n)?;
        let (a, inv) = (&self.cumulative[n], &self.inverses[n]);
        let det = inv.det();
        let identity = a.mul(&inv.to_rat()) == RatMatrix::identity(a.rows());
        let scaled = a.map(|x| x * Rat::from_integer(det.clone()));
        let adjugate = scaled.to_int().is_some_and(|s| s == inv.adjugate());
        Ok(identity && adjugate && det.abs() == self.denominators[n])
    }
}

fn write_int_rows(out: &mut String, m: &IntMatrix) {
    let rows: Vec<String> = m.iter_rows().map(|r| r.iter().map(Int::to_string).collect::<Vec<_>>().join(" ")).collect();
    out.push_str(&rows.join("; "));
}

/// `chain v1` dump; `cumulative` adds the exact `A_n` per level.
pub fn dump_chain(chain: &CompletedChain, cumulative: bool) -> String {
    let mut out = format!("chain v1\nshape: {}\n", chain.shape);
    for (n, (s, d)) in chain.squares.iter().zip(&chain.dets).enumerate() {
        let _ = write!(out, "A {n}: ");
        write_int_rows(&mut out, s);
        let _ = writeln!(out, " det={d}");
    }
    if cumulative {
        for n in 1..=chain.depth() {
            let rows: Vec<String> = chain.cumulative[n]
                .iter_rows()
                .map(|r| r.iter().map(Rat::to_string).collect::<Vec<_>>().join(" "))
                .collect();
            let _ = writeln!(out, "cumulative {n}: {}", rows.join("; "));
        }
    }
    out
}

/// Parses a `chain v1` dump; recorded determinants and cumulatives must match.
pub fn parse_chain(text: &str) -> Result<CompletedChain> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, "chain v1")) => {}
        Some((n, l)) => return Err(Error::parse(n, format!("expected `chain v1`, found `{l}`"))),
        None => return Err(Error::parse(1, "empty input")),
    }
    let shape = match lines.next() {
        Some((n, l)) => match l.strip_prefix("shape:").map(str::trim) {
            Some("type2") => ShapeClass::Type2,
            Some(s) if s.starts_with("type1 ") => ShapeClass::Type1(
                s[6..].trim().parse().map_err(|_| Error::parse(n, format!("bad level size in `{l}`")))?,
            ),
            _ => return Err(Error::parse(n, format!("expected `shape: type2|type1 <L>`, found `{l}`"))),
        },
        None => return Err(Error::parse(2, "missing `shape:` line")),
    };
    let mut squares = Vec::new();
    let mut dets = Vec::new();
    let mut cumulative = Vec::new();
    for (n, line) in lines {
        if let Some(rest) = line.strip_prefix("A ") {
            let (idx, body) = rest.split_once(':').ok_or_else(|| Error::parse(n, "missing `:`"))?;
            if idx.trim().parse::<usize>().ok() != Some(squares.len()) {
                return Err(Error::parse(n, format!("expected `A {}:`", squares.len())));
            }
            let (rows, det) = body.rsplit_once("det=").ok_or_else(|| Error::parse(n, "missing `det=`"))?;
            let det: Int = det.trim().parse().map_err(|_| Error::parse(n, format!("bad determinant `{det}`")))?;
            let rows = parse_rows::<Int>(n, rows)?;
            squares.push(IntMatrix::from_rows(rows));
            dets.push((n, det));
        } else if let Some(rest) = line.strip_prefix("cumulative ") {
            let (idx, body) = rest.split_once(':').ok_or_else(|| Error::parse(n, "missing `:`"))?;
            let idx: usize = idx.trim().parse().map_err(|_| Error::parse(n, format!("bad level `{idx}`")))?;
            cumulative.push((n, idx, RatMatrix::from_rows(parse_rows::<Rat>(n, body)?)));
        } else {
            return Err(Error::parse(n, format!("unexpected line `{line}`")));
        }
    }
    let chain = CompletedChain::build_chain(shape, squares).map_err(|e| Error::parse(0, e.to_string()))?;
    for ((n, det), actual) in dets.iter().zip(&chain.dets) {
        if det != actual {
            return Err(Error::parse(*n, format!("recorded det={det}, actual {actual}")));
        }
    }
    for (n, idx, a) in cumulative {
        if chain.cumulative.get(idx) != Some(&a) {
            return Err(Error::parse(n, format!("cumulative {idx} disagrees with the squares")));
        }
    }
    Ok(chain)
}

fn parse_rows<T: FromStr>(line: usize, body: &str) -> Result<Vec<Vec<T>>> {
    let rows = body
        .split(';')
        .map(|r| {
            r.split_whitespace()
                .map(|t| t.parse::<T>().map_err(|_| Error::parse(line, format!("unknown token `{t}`"))))
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(Error::parse(line, "ragged or empty matrix"));
    }
    Ok(rows)
}

/// An integer vector at level `depth` whose image under `Φ_depth` is the witnessed function.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct K0Witness {
    pub depth: usize,
    pub alpha: Vec<Int>,
}

impl fmt::Display for K0Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "witness depth={}:", self.depth)?;
        for a in &self.alpha {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

impl FromStr for K0Witness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rest = s
            .trim()
            .strip_prefix("witness depth=")
            .ok_or_else(|| Error::parse(1, format!("expected `witness depth=<n>:`, found `{s}`")))?;
        let (depth, values) = rest.split_once(':').ok_or_else(|| Error::parse(1, "missing `:`"))?;
        let depth = depth.trim().parse().map_err(|_| Error::parse(1, format!("bad depth `{depth}`")))?;
        let alpha = values
            .split_whitespace()
            .map(|t| t.parse::<Int>().map_err(|_| Error::parse(1, format!("unknown token `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(K0Witness { depth, alpha })
    }
}

fn require_type2(t: &MinimalDiagram) -> Result<()> {
    match t.shape() {
        ShapeClass::Type2 => Ok(()),
        other => Err(Error::shape(format!("R_n needs a type2 tree, found {other}"))),
    }
}

/// `R_n(β) = Σ β_{l+1} χ_{B(r_l, l)}` with `r_0` the root, as a depth-`n` function.
pub fn r_map(beta: &[Rat], t: &MinimalDiagram) -> Result<LocallyConstantFunction> {
    require_type2(t)?;
    let (first, rest) = beta.split_first().ok_or_else(|| Error::shape("R_n of an empty vector"))?;
    let mut values = vec![first.clone()];
    for (l, b) in rest.iter().enumerate() {
        let level = l + 1;
        let r = t.branch(level)?.r;
        values = t.map(level)?.parent.iter().map(|&p| values[p].clone()).collect();
        values[r] += b;
    }
    Ok(LocallyConstantFunction::new(rest.len(), values))
}

/// Inverse of [`r_map`] on depth-`f.depth` functions.
pub fn to_r_basis(f: &LocallyConstantFunction, t: &MinimalDiagram) -> Result<Vec<Rat>> {
    require_type2(t)?;
    let size = t.level_size(f.depth)?;
    if f.coeffs.len() != size {
        return Err(Error::shape(format!("function has {} coefficients, level has {size}", f.coeffs.len())));
    }
    let mut beta = vec![Rat::zero(); f.depth + 1];
    let mut gamma = f.coeffs.clone();
    for level in (1..=f.depth).rev() {
        let b = t.branch(level)?;
        beta[level] = &gamma[b.r] - &gamma[b.r_prime];
        gamma[b.r] = gamma[b.r_prime].clone();
        let upper = t.level_size(level - 1)?;
        let children = t.map(level)?.children(upper);
        gamma = children.iter().map(|c| gamma[c[0]].clone()).collect();
    }
    beta[0] = gamma[0].clone();
    Ok(beta)
}

/// Type 1 functions are determined by their values on the `L` rays, indexed by root vertex.
fn on_rays(f: &LocallyConstantFunction, t: &MinimalDiagram) -> Result<Vec<Rat>> {
    let size = t.level_size(f.depth)?;
    if f.coeffs.len() != size {
        return Err(Error::shape(format!("function has {} coefficients, level has {size}", f.coeffs.len())));
    }
    let mut out = vec![Rat::zero(); t.level_size(0)?];
    for (v, c) in f.coeffs.iter().enumerate() {
        out[t.ancestor(f.depth, v, 0)?] = c.clone();
    }
    Ok(out)
}

/// `Φ_n(α)`: a depth-`n` function for type 2, a depth-0 function on the rays for type 1.
pub fn phi(n: usize, alpha: &[Int], chain: &CompletedChain, t: &MinimalDiagram) -> Result<LocallyConstantFunction> {
    let a = chain.cumulative(n)?;
    if alpha.len() != a.cols() {
        return Err(Error::shape(format!("level {n} vectors have {} entries, found {}", a.cols(), alpha.len())));
    }
    let x = a.mul_vec(&rat_vec(alpha));
    match chain.shape() {
        ShapeClass::Type1(_) => Ok(LocallyConstantFunction::new(0, x)),
        _ => r_map(&x, t),
    }
}

/// `Φ̄_n(a)` for type 1 chains.
pub fn phi_type1(n: usize, a: &[Int], chain: &CompletedChain, t: &MinimalDiagram) -> Result<LocallyConstantFunction> {
    if !matches!(chain.shape(), ShapeClass::Type1(_)) {
        return Err(Error::shape("phi_type1 needs a type1 chain"));
    }
    phi(n, a, chain, t)
}

/// `Φ_n(α) = Φ_{n+1}(Ā_{n,n+1} α)` as functions.
pub fn commuting_check(n: usize, alpha: &[Int], chain: &CompletedChain, t: &MinimalDiagram) -> Result<bool> {
    let pushed = chain.original(n)?.apply(alpha);
    let lhs = phi(n, alpha, chain, t)?;
    let rhs = phi(n + 1, &pushed, chain, t)?;
    lhs.equivalent(&rhs, t)
}

/// Every coefficient lies in `(1/denominator) ℤ`.
pub fn in_lattice(f: &LocallyConstantFunction, denominator: &Int) -> bool {
    let d = Rat::from_integer(denominator.clone());
    f.coeffs.iter().all(|c| (c * &d).is_integer())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Member(K0Witness),
    /// No integral preimage at any depth up to `checked_to`.
    NotMember {
        checked_to: usize,
    },
}

/// Searches depths `f.depth ..= min(chain, tree depth)` for an integral preimage.
pub fn membership(f: &LocallyConstantFunction, chain: &CompletedChain, t: &MinimalDiagram) -> Result<Membership> {
    let top = match chain.shape() {
        ShapeClass::Type1(_) => chain.depth(),
        _ => chain.depth().min(t.depth()),
    };
    if f.depth > top {
        return Err(Error::DepthExceeded { requested: f.depth, available: top });
    }
    let rays = match chain.shape() {
        ShapeClass::Type1(_) => Some(on_rays(f, t)?),
        _ => None,
    };
    for n in f.depth..=top {
        let beta = match &rays {
            Some(v) => v.clone(),
            None => to_r_basis(&refine(f, n, t)?, t)?,
        };
        let x = chain.cumulative_inverse(n)?.to_rat().mul_vec(&beta);
        if let Some(alpha) = integral(&x) {
            return Ok(Membership::Member(K0Witness { depth: n, alpha }));
        }
    }
    Ok(Membership::NotMember { checked_to: top })
}

/// Membership of the indicator of a union of cylinders at one level.
pub fn indicator_membership(u: &[Cylinder], chain: &CompletedChain, t: &MinimalDiagram) -> Result<Membership> {
    membership(&LocallyConstantFunction::indicator(t, u)?, chain, t)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Positivity {
    Positive(K0Witness),
    /// Decided exactly by the weight-scheme closed form.
    NotPositive,
    /// No nonnegative pushforward up to this depth.
    NotPositiveUpTo(usize),
}

/// Semi-decides `f ∈ K₀⁺` by pushing its witness forward up to `bound`;
/// decides exactly when `scheme` is given.
pub fn positivity(
    f: &LocallyConstantFunction,
    chain: &CompletedChain,
    t: &MinimalDiagram,
    bound: usize,
    scheme: Option<&WeightScheme>,
) -> Result<Positivity> {
    let mut w = match membership(f, chain, t)? {
        Membership::Member(w) => w,
        Membership::NotMember { checked_to } => return Err(Error::NotInK0 { checked_to }),
    };
    let nonnegative = |v: &[Int]| v.iter().all(|x| !x.is_negative());
    if scheme.is_some() {
        return Ok(if nonnegative(&w.alpha) { Positivity::Positive(w) } else { Positivity::NotPositive });
    }
    let bound = bound.min(chain.depth());
    while w.depth <= bound {
        if nonnegative(&w.alpha) {
            return Ok(Positivity::Positive(w));
        }
        if w.depth == bound {
            break;
        }
        w = K0Witness { depth: w.depth + 1, alpha: chain.original(w.depth)?.apply(&w.alpha) };
    }
    Ok(Positivity::NotPositiveUpTo(bound))
}

/// Branch columns, completion weights and the size table of a unique-minimal diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightScheme {
    /// 0-based branching column `j(n)` of each matrix.
    pub j: Vec<usize>,
    pub b: Vec<Int>,
    /// `k[n][i] = k(i, n)`.
    pub k: Vec<Vec<Int>>,
}

impl WeightScheme {
    pub fn depth(&self) -> usize {
        self.j.len()
    }

    /// `Σ α_i / k(i,n) χ_{B(i,n)}`.
    pub fn closed_form(&self, n: usize, alpha: &[Int]) -> Result<LocallyConstantFunction> {
        let k = self.k.get(n).ok_or(Error::DepthExceeded { requested: n, available: self.depth() })?;
        if alpha.len() != k.len() {
            return Err(Error::shape(format!("level {n} vectors have {} entries, found {}", k.len(), alpha.len())));
        }
        let coeffs = alpha.iter().zip(k).map(|(a, k)| Rat::new(a.clone(), k.clone())).collect();
        Ok(LocallyConstantFunction::new(n, coeffs))
    }

    /// Witness `k(i,n)` on each cylinder of `u`, zero elsewhere.
    pub fn indicator_witness(&self, u: &[Cylinder]) -> Result<K0Witness> {
        let n = u.first().map(|c| c.level).ok_or_else(|| Error::shape("indicator of an empty cylinder list"))?;
        let k = self.k.get(n).ok_or(Error::DepthExceeded { requested: n, available: self.depth() })?;
        let mut alpha = vec![Int::zero(); k.len()];
        for c in u {
            if c.level != n || c.vertex >= k.len() {
                return Err(Error::shape(format!("{c} is not a cylinder of level {n}")));
            }
            alpha[c.vertex] = k[c.vertex].clone();
        }
        Ok(K0Witness { depth: n, alpha })
    }
}

/// Weight scheme of the first `depth` levels of a near-diagonal unique-minimal diagram.
pub fn weight_scheme(d: &BratteliDiagram, depth: usize) -> Result<WeightScheme> {
    let depth = d.clamp_depth(depth);
    let sizes = d.size_vectors(depth)?;
    let mut j = Vec::with_capacity(depth);
    let mut b = Vec::with_capacity(depth);
    for (level, size) in sizes.iter().take(depth).enumerate() {
        let m = d.matrix(level)?;
        let jn = match near_diagonal_branch(&m) {
            Some(jn) => jn,
            None if is_unique_minimal(&m).is_some() => return Err(Error::NotNearDiagonal { level }),
            None => return Err(Error::NotUniqueMinimal { level }),
        };
        b.push(m.entry(jn + 1, jn) * &size.entries[jn]);
        j.push(jn);
    }
    Ok(WeightScheme { j, b, k: sizes.into_iter().map(|s| s.entries).collect() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeOutcome {
    /// No candidate at this depth detected a break.
    Preserved { depth: usize, candidates: usize },
    /// `function` is in K₀ but `pullback = function ∘ θ⁻¹` is not.
    Broken { function: LocallyConstantFunction, pullback: LocallyConstantFunction },
}

/// Tests whether `f ↦ f ∘ θ⁻¹` for a bijection `θ` of the level-`depth`
/// cylinders keeps K₀ members inside K₀. Candidates, in order: `Φ(e_i + e_θ(i))`
/// for moved `i`, `Φ(e_i)`, member cylinder indicators, `Φ(e_i + e_j)`.
pub fn automorphism_probe(
    theta: &Permutation,
    depth: usize,
    chain: &CompletedChain,
    t: &MinimalDiagram,
) -> Result<ProbeOutcome> {
    let size = t.level_size(depth)?;
    if theta.len() != size {
        return Err(Error::shape(format!("permutation of {} points, level {depth} has {size} cylinders", theta.len())));
    }
    if theta.is_identity() {
        return Ok(ProbeOutcome::Preserved { depth, candidates: 0 });
    }
    let width = chain.cumulative(depth)?.cols();
    let unit = |idx: &[usize]| {
        let mut v = vec![Int::zero(); width];
        for &i in idx {
            v[i] += 1;
        }
        v
    };
    let mut alphas: Vec<Vec<Int>> = Vec::new();
    for i in (0..width.min(size)).filter(|&i| theta.source(i) != i) {
        alphas.push(unit(&[i, theta.source(i)]));
    }
    alphas.extend((0..width).map(|i| unit(&[i])));

    let mut candidates: Vec<LocallyConstantFunction> = Vec::new();
    for alpha in &alphas {
        candidates.push(refine(&phi(depth, alpha, chain, t)?, depth, t)?);
    }
    for v in 0..size {
        let f = LocallyConstantFunction::indicator(t, &[Cylinder::new(depth, v)])?;
        if matches!(membership(&f, chain, t)?, Membership::Member(_)) {
            candidates.push(f);
        }
    }
    for i in 0..width {
        for j in i + 1..width {
            candidates.push(refine(&phi(depth, &unit(&[i, j]), chain, t)?, depth, t)?);
        }
    }

    let mut seen = std::collections::HashSet::new();
    let mut tried = 0;
    for f in candidates {
        if !seen.insert(f.clone()) {
            continue;
        }
        tried += 1;
        let mut pulled = vec![Rat::zero(); size];
        for (i, c) in f.coeffs.iter().enumerate() {
            pulled[theta.source(i)] = c.clone();
        }
        let pullback = LocallyConstantFunction::new(depth, pulled);
        if let Membership::NotMember { .. } = membership(&pullback, chain, t)? {
            return Ok(ProbeOutcome::Broken { function: f, pullback });
        }
    }
    Ok(ProbeOutcome::Preserved { depth, candidates: tried })
}
