//! The minimal path space as the boundary of a rooted tree.
//!
//! A [`MinimalDiagram`] holds one parent map per level. Levels are
//! materialized on demand with [`MinimalDiagram::ensure_depth`]; every read
//! accessor works on the materialized prefix only and reports
//! [`Error::DepthExceeded`] beyond it.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_traits::Zero;

use crate::diagram::{BratteliDiagram, ShapeClass};
use crate::error::{Error, Result};
use crate::linalg::Rat;
use crate::reduction::{reduce_level, ParentMap, ReductionStrategy};

/// Built-in branching rules for trees with `m_n = n + 1`, plus disjoint rays.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TreeFamily {
    /// The last vertex branches at every level.
    Rightmost,
    /// The first vertex branches at every level.
    Leftmost,
    /// First vertex at odd levels, last vertex at even levels.
    Alternating,
    /// 1-based branch positions repeated with period `positions.len()`.
    PositionList(Vec<usize>),
    /// `L` disjoint rays.
    Rays(usize),
}

impl TreeFamily {
    /// 1-based branching vertex of level `level - 1`, for `level >= 1`.
    pub fn branch_position(&self, level: usize) -> Option<usize> {
        Some(match self {
            TreeFamily::Rightmost => level,
            TreeFamily::Leftmost => 1,
            TreeFamily::Alternating if level.is_multiple_of(2) => level,
            TreeFamily::Alternating => 1,
            TreeFamily::PositionList(ps) if ps.is_empty() => return None,
            TreeFamily::PositionList(ps) => ps[(level - 1) % ps.len()],
            TreeFamily::Rays(_) => return None,
        })
    }

    /// Parent map for lower level `level` given `upper` vertices above it.
    pub fn parent_map(&self, level: usize, upper: usize) -> Result<ParentMap> {
        if let TreeFamily::Rays(l) = self {
            if upper != *l {
                return Err(Error::shape(format!("rays need {l} vertices per level, found {upper}")));
            }
            return Ok(ParentMap::new(level, (0..*l).collect()));
        }
        let a = self.branch_position(level).ok_or_else(|| Error::shape("empty branch position list"))?;
        if a == 0 || a > upper {
            return Err(Error::shape(format!("branch position {a} outside 1..={upper} at level {level}")));
        }
        let a0 = a - 1;
        let parent = (0..=upper).map(|i| if i <= a0 { i } else { i - 1 }).collect();
        Ok(ParentMap::new(level, parent))
    }
}

impl fmt::Display for TreeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeFamily::Rightmost => f.write_str("rightmost"),
            TreeFamily::Leftmost => f.write_str("leftmost"),
            TreeFamily::Alternating => f.write_str("alternating"),
            TreeFamily::PositionList(ps) => {
                let ps: Vec<String> = ps.iter().map(usize::to_string).collect();
                write!(f, "positions {}", ps.join(" "))
            }
            TreeFamily::Rays(l) => write!(f, "rays {l}"),
        }
    }
}

/// Where levels beyond the materialized prefix come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeSource {
    /// No levels beyond the ones given.
    Finite,
    Family(TreeFamily),
    Diagram {
        diagram: BratteliDiagram,
        strategy: ReductionStrategy,
    },
}

/// The branching data of one level of a tree with `m_n = n + 1`
/// (0-based): vertex `a` of level `n - 1` has children `r_prime < r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Branch {
    pub a: usize,
    pub r_prime: usize,
    pub r: usize,
}

/// A rooted tree given by per-level parent maps; its ends form `X_min`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalDiagram {
    shape: ShapeClass,
    root: usize,
    source: TreeSource,
    maps: Vec<ParentMap>,
}

impl MinimalDiagram {
    /// Finite tree from explicit maps; `maps[k]` is lower level `k + 1`.
    pub fn from_maps(root: usize, maps: Vec<ParentMap>) -> Result<MinimalDiagram> {
        let mut upper = root;
        let mut sizes = vec![root];
        for (k, p) in maps.iter().enumerate() {
            if p.level != k + 1 {
                return Err(Error::shape(format!(
                    "map for level {} found where level {} was expected",
                    p.level,
                    k + 1
                )));
            }
            if let Some(&bad) = p.parent.iter().find(|&&i| i >= upper) {
                return Err(Error::shape(format!("level {}: parent {} outside 1..={upper}", p.level, bad + 1)));
            }
            upper = p.len();
            sizes.push(upper);
        }
        Ok(MinimalDiagram { shape: ShapeClass::detect(&sizes), root, source: TreeSource::Finite, maps })
    }

    /// A built-in family materialized to `depth` levels.
    pub fn from_family(family: TreeFamily, depth: usize) -> Result<MinimalDiagram> {
        let (shape, root) = match family {
            TreeFamily::Rays(l) => (ShapeClass::Type1(l), l),
            _ => (ShapeClass::Type2, 1),
        };
        let mut t = MinimalDiagram { shape, root, source: TreeSource::Family(family), maps: Vec::new() };
        t.ensure_depth(depth)?;
        Ok(t)
    }

    pub(crate) fn from_diagram(diagram: BratteliDiagram, strategy: ReductionStrategy) -> Result<MinimalDiagram> {
        let root = diagram.level_size(0)?;
        Ok(MinimalDiagram {
            shape: diagram.shape(),
            root,
            source: TreeSource::Diagram { diagram, strategy },
            maps: Vec::new(),
        })
    }

    pub fn shape(&self) -> ShapeClass {
        self.shape
    }

    pub fn source(&self) -> &TreeSource {
        &self.source
    }

    /// Number of materialized levels below the root.
    pub fn depth(&self) -> usize {
        self.maps.len()
    }

    /// Largest reachable depth, `None` when unbounded.
    pub fn max_depth(&self) -> Option<usize> {
        match &self.source {
            TreeSource::Finite => Some(self.maps.len()),
            TreeSource::Family(_) => None,
            TreeSource::Diagram { diagram, strategy } => match (diagram.depth(), strategy) {
                (Some(d), ReductionStrategy::UserMap(maps)) => Some(d.min(maps.len())),
                (None, ReductionStrategy::UserMap(maps)) => Some(maps.len()),
                (d, _) => d,
            },
        }
    }

    /// Materializes levels up to `depth`; idempotent.
    pub fn ensure_depth(&mut self, depth: usize) -> Result<()> {
        if let Some(max) = self.max_depth() {
            if depth > max {
                return Err(Error::DepthExceeded { requested: depth, available: max });
            }
        }
        while self.maps.len() < depth {
            let level = self.maps.len() + 1;
            let upper = self.level_size(level - 1)?;
            let p = match &self.source {
                TreeSource::Finite => unreachable!("bounded by max_depth"),
                TreeSource::Family(f) => f.parent_map(level, upper)?,
                TreeSource::Diagram { diagram, strategy } => reduce_level(diagram, strategy, level)?,
            };
            self.maps.push(p);
        }
        Ok(())
    }

    fn need(&self, depth: usize) -> Result<()> {
        if depth > self.maps.len() {
            return Err(Error::DepthExceeded { requested: depth, available: self.maps.len() });
        }
        Ok(())
    }

    /// Vertex count of a materialized level.
    pub fn level_size(&self, level: usize) -> Result<usize> {
        if level == 0 {
            return Ok(self.root);
        }
        self.need(level)?;
        Ok(self.maps[level - 1].len())
    }

    /// Parent map of lower level `level >= 1`.
    pub fn map(&self, level: usize) -> Result<&ParentMap> {
        if level == 0 {
            return Err(Error::IndexOutOfRange("the root level has no parent map".into()));
        }
        self.need(level)?;
        Ok(&self.maps[level - 1])
    }

    pub fn maps(&self) -> &[ParentMap] {
        &self.maps
    }

    /// Ancestor at `level` of vertex `vertex` at `from`.
    pub fn ancestor(&self, from: usize, vertex: usize, level: usize) -> Result<usize> {
        self.need(from)?;
        let mut v = vertex;
        for l in (level + 1..=from).rev() {
            v = self.maps[l - 1].parent[v];
        }
        Ok(v)
    }

    /// Branching data at lower level `level >= 1`: exactly one vertex above
    /// has two children, all others one.
    pub fn branch(&self, level: usize) -> Result<Branch> {
        let upper = self.level_size(level - 1)?;
        let children = self.map(level)?.children(upper);
        let mut found = None;
        for (a, c) in children.iter().enumerate() {
            match c.len() {
                1 => {}
                2 if found.is_none() => found = Some(Branch { a, r_prime: c[0], r: c[1] }),
                _ => {
                    return Err(Error::shape(format!(
                        "level {level}: vertex {} has {} children; expected one branch per level",
                        a + 1,
                        c.len()
                    )))
                }
            }
        }
        found.ok_or_else(|| Error::shape(format!("level {level} has no branching vertex")))
    }

    /// Branch data for levels `1..=depth`.
    pub fn branches(&self, depth: usize) -> Result<Vec<Branch>> {
        (1..=depth).map(|l| self.branch(l)).collect()
    }

    /// Family generating every level, if known.
    fn family(&self) -> Option<&TreeFamily> {
        match &self.source {
            TreeSource::Family(f) => Some(f),
            TreeSource::Diagram { strategy: ReductionStrategy::Family(f), diagram } if !diagram.is_finite() => Some(f),
            _ => None,
        }
    }

    /// Every level of an infinite type 1 tree is a bijection.
    fn is_infinite_rays(&self) -> bool {
        match (&self.source, self.shape) {
            (TreeSource::Family(TreeFamily::Rays(_)), _) => true,
            (TreeSource::Diagram { diagram, strategy }, ShapeClass::Type1(_)) => {
                !diagram.is_finite() && !matches!(strategy, ReductionStrategy::UserMap(_))
            }
            _ => false,
        }
    }
}

/// The clopen set of paths through vertex `vertex` at level `level` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cylinder {
    pub level: usize,
    pub vertex: usize,
}

impl Cylinder {
    pub fn new(level: usize, vertex: usize) -> Self {
        Cylinder { level, vertex }
    }
}

impl fmt::Display for Cylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B({},{})", self.vertex + 1, self.level)
    }
}

/// Cylinders one level down whose union is `c`.
pub fn cylinder_children(t: &MinimalDiagram, c: Cylinder) -> Result<Vec<Cylinder>> {
    let size = t.level_size(c.level)?;
    if c.vertex >= size {
        return Err(Error::IndexOutOfRange(format!("{c} at a level with {size} vertices")));
    }
    let map = t.map(c.level + 1)?;
    Ok(map
        .parent
        .iter()
        .enumerate()
        .filter(|&(_, &p)| p == c.vertex)
        .map(|(j, _)| Cylinder::new(c.level + 1, j))
        .collect())
}

/// A function constant on every cylinder of one level.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocallyConstantFunction {
    pub depth: usize,
    pub coeffs: Vec<Rat>,
}

impl LocallyConstantFunction {
    pub fn new(depth: usize, coeffs: Vec<Rat>) -> Self {
        LocallyConstantFunction { depth, coeffs }
    }

    pub fn zero(t: &MinimalDiagram, depth: usize) -> Result<Self> {
        Ok(Self::new(depth, vec![Rat::zero(); t.level_size(depth)?]))
    }

    /// The constant function `value` at depth 0.
    pub fn constant(t: &MinimalDiagram, value: Rat) -> Self {
        Self::new(0, vec![value; t.root])
    }

    /// Indicator of a union of cylinders at one level.
    pub fn indicator(t: &MinimalDiagram, cylinders: &[Cylinder]) -> Result<Self> {
        let depth =
            cylinders.first().map(|c| c.level).ok_or_else(|| Error::shape("indicator of an empty cylinder list"))?;
        let mut f = Self::zero(t, depth)?;
        for c in cylinders {
            if c.level != depth {
                return Err(Error::shape("cylinders of an indicator must share a level"));
            }
            let slot =
                f.coeffs.get_mut(c.vertex).ok_or_else(|| Error::IndexOutOfRange(format!("{c} at depth {depth}")))?;
            *slot = Rat::from_integer(1.into());
        }
        Ok(f)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Pointwise sum after refining both to the deeper depth.
    pub fn add(&self, other: &Self, t: &MinimalDiagram) -> Result<Self> {
        let depth = self.depth.max(other.depth);
        let (a, b) = (refine(self, depth, t)?, refine(other, depth, t)?);
        Ok(Self::new(depth, a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect()))
    }

    pub fn scale(&self, s: &Rat) -> Self {
        Self::new(self.depth, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Equal as functions on the path space.
    pub fn equivalent(&self, other: &Self, t: &MinimalDiagram) -> Result<bool> {
        let depth = self.depth.max(other.depth);
        Ok(refine(self, depth, t)? == refine(other, depth, t)?)
    }
}

impl fmt::Display for LocallyConstantFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "func depth={}:", self.depth)?;
        for c in &self.coeffs {
            write!(f, " {c}")?;
        }
        Ok(())
    }
}

impl FromStr for LocallyConstantFunction {
    type Err = Error;

    /// Parses `func depth=<n>: <p/q> …`; the `func ` prefix is optional.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix("func ").unwrap_or(s);
        let rest =
            s.strip_prefix("depth=").ok_or_else(|| Error::parse(1, format!("expected `depth=<n>:`, found `{s}`")))?;
        let (depth, values) = rest.split_once(':').ok_or_else(|| Error::parse(1, "missing `:` after depth"))?;
        let depth = depth.trim().parse().map_err(|_| Error::parse(1, format!("bad depth `{depth}`")))?;
        let coeffs = values
            .split_whitespace()
            .map(|t| {
                let r = t.parse::<Rat>().map_err(|_| Error::parse(1, format!("unknown token `{t}`")))?;
                if t.contains('/') && r.to_string() != t {
                    return Err(Error::parse(1, format!("`{t}` is not in lowest terms")));
                }
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(depth, coeffs))
    }
}

/// The same function written over the cylinders of level `depth`.
pub fn refine(f: &LocallyConstantFunction, depth: usize, t: &MinimalDiagram) -> Result<LocallyConstantFunction> {
    if depth < f.depth {
        return Err(Error::IndexOutOfRange(format!("cannot refine depth {} to {depth}", f.depth)));
    }
    let size = t.level_size(f.depth)?;
    if f.coeffs.len() != size {
        return Err(Error::shape(format!(
            "function has {} coefficients, level {} has {size} vertices",
            f.coeffs.len(),
            f.depth
        )));
    }
    let mut coeffs = f.coeffs.clone();
    for level in f.depth + 1..=depth {
        let map = t.map(level)?;
        coeffs = map.parent.iter().map(|&p| coeffs[p].clone()).collect();
    }
    Ok(LocallyConstantFunction::new(depth, coeffs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EndCount {
    Finite(usize),
    /// Lower bound from a finite depth.
    AtLeast(usize),
    CountablyInfinite,
    Uncountable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CondensationCount {
    Finite(usize),
    Infinite,
}

/// Counts of ends and of non-isolated ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EndCensus {
    pub end_count: EndCount,
    pub condensation_ends: CondensationCount,
    pub certified: bool,
    /// Depth the uncertified figures were read at.
    pub inspected_depth: Option<usize>,
}

impl fmt::Display for EndCensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let (EndCount::Finite(n), CondensationCount::Finite(0), true) =
            (self.end_count, self.condensation_ends, self.certified)
        {
            return write!(f, "ends: {n}; discrete");
        }
        match self.end_count {
            EndCount::Finite(n) => write!(f, "ends: {n}")?,
            EndCount::AtLeast(n) => write!(f, "ends: at least {n}")?,
            EndCount::CountablyInfinite => f.write_str("ends: countably infinite")?,
            EndCount::Uncountable => f.write_str("ends: uncountable")?,
        }
        match self.condensation_ends {
            CondensationCount::Finite(k) => write!(f, "; condensation: {k}")?,
            CondensationCount::Infinite => f.write_str("; condensation: infinite")?,
        }
        match (self.certified, self.inspected_depth) {
            (true, _) => f.write_str("; certified"),
            (false, Some(d)) => write!(f, "; uncertified (depth {d})"),
            (false, None) => f.write_str("; uncertified"),
        }
    }
}

/// End-space invariants of `X_min`. Built-in families and infinite ray
/// trees get exact values; anything else gets figures read off the
/// materialized levels.
pub fn end_census(t: &MinimalDiagram) -> EndCensus {
    let exact = |end_count, k| EndCensus {
        end_count,
        condensation_ends: CondensationCount::Finite(k),
        certified: true,
        inspected_depth: None,
    };
    if t.is_infinite_rays() {
        return exact(EndCount::Finite(t.root), 0);
    }
    match t.family() {
        Some(TreeFamily::Rightmost | TreeFamily::Leftmost) => return exact(EndCount::CountablyInfinite, 1),
        Some(TreeFamily::Alternating) => return exact(EndCount::CountablyInfinite, 2),
        _ => {}
    }

    let depth = t.depth();
    let leaves = t.level_size(depth).unwrap_or(t.root);
    let half = depth / 2;
    let mut condensation = 0;
    for v in 0..t.level_size(half).unwrap_or(0) {
        let mut frontier = vec![v];
        let mut events = 0;
        for level in half + 1..=depth {
            let children = t.maps[level - 1].children(t.level_size(level - 1).unwrap_or(0));
            let mut next = Vec::new();
            for &u in &frontier {
                let c = &children[u];
                if c.len() >= 2 {
                    events += 1;
                }
                next.extend_from_slice(c);
            }
            frontier = next;
        }
        if events >= 2 {
            condensation += 1;
        }
    }
    EndCensus {
        end_count: EndCount::AtLeast(leaves),
        condensation_ends: CondensationCount::Finite(condensation),
        certified: false,
        inspected_depth: Some(depth),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    Distinct,
    /// Same invariants; not a proof of homeomorphism.
    Indistinguishable,
}

/// Compares certified censuses.
pub fn compare_invariants(t1: &MinimalDiagram, t2: &MinimalDiagram) -> Result<Comparison> {
    let (c1, c2) = (end_census(t1), end_census(t2));
    if !c1.certified || !c2.certified {
        return Err(Error::Uncertified);
    }
    Ok(if c1.end_count == c2.end_count && c1.condensation_ends == c2.condensation_ends {
        Comparison::Indistinguishable
    } else {
        Comparison::Distinct
    })
}

/// `tree v1` dump of the materialized levels.
pub fn dump_tree(t: &MinimalDiagram) -> String {
    let mut out = String::from("tree v1\n");
    for p in &t.maps {
        let _ = write!(out, "level {}:", p.level);
        for (j, i) in p.parent.iter().enumerate() {
            let _ = write!(out, " parent({})={}", j + 1, i + 1);
        }
        out.push('\n');
    }
    for level in 1..=t.depth() {
        if let Ok(b) = t.branch(level) {
            let _ = writeln!(out, "branch {level}: a={} r'={} r={}", b.a + 1, b.r_prime + 1, b.r + 1);
        }
    }
    out
}

/// Parses a `tree v1` dump into a finite tree; branch lines must agree with the maps.
pub fn parse_tree(text: &str) -> Result<MinimalDiagram> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, "tree v1")) => {}
        Some((n, l)) => return Err(Error::parse(n, format!("expected `tree v1`, found `{l}`"))),
        None => return Err(Error::parse(1, "empty input")),
    }
    let mut maps = Vec::new();
    let mut branches = Vec::new();
    for (n, line) in lines {
        if let Some(rest) = line.strip_prefix("level ") {
            let (level, body) = rest.split_once(':').ok_or_else(|| Error::parse(n, "missing `:`"))?;
            let level: usize = level.trim().parse().map_err(|_| Error::parse(n, format!("bad level `{level}`")))?;
            let mut parent = Vec::new();
            for (idx, tok) in body.split_whitespace().enumerate() {
                let parsed = tok
                    .strip_prefix("parent(")
                    .and_then(|t| t.split_once(")="))
                    .and_then(|(j, i)| Some((j.parse::<usize>().ok()?, i.parse::<usize>().ok()?)));
                match parsed {
                    Some((j, i)) if j == idx + 1 && i >= 1 => parent.push(i - 1),
                    _ => return Err(Error::parse(n, format!("unknown token `{tok}`"))),
                }
            }
            maps.push(ParentMap::new(level, parent));
        } else if let Some(rest) = line.strip_prefix("branch ") {
            let (level, body) = rest.split_once(':').ok_or_else(|| Error::parse(n, "missing `:`"))?;
            let level: usize = level.trim().parse().map_err(|_| Error::parse(n, format!("bad level `{level}`")))?;
            let mut vals = [0usize; 3];
            let keys = ["a=", "r'=", "r="];
            let toks: Vec<&str> = body.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::parse(n, "expected `a=<i> r'=<i> r=<i>`"));
            }
            for (slot, (tok, key)) in vals.iter_mut().zip(toks.iter().zip(keys)) {
                *slot = tok
                    .strip_prefix(key)
                    .and_then(|v| v.parse::<usize>().ok())
                    .filter(|&v| v >= 1)
                    .ok_or_else(|| Error::parse(n, format!("unknown token `{tok}`")))?
                    - 1;
            }
            branches.push((n, level, Branch { a: vals[0], r_prime: vals[1], r: vals[2] }));
        } else {
            return Err(Error::parse(n, format!("unexpected line `{line}`")));
        }
    }
    let root = maps.first().map_or(1, |p| p.parent.iter().max().map_or(1, |m| m + 1));
    let t = MinimalDiagram::from_maps(root, maps).map_err(|e| Error::parse(0, e.to_string()))?;
    for (n, level, b) in branches {
        if t.branch(level).ok() != Some(b) {
            return Err(Error::parse(n, format!("branch line disagrees with level {level}")));
        }
    }
    Ok(t)
}

/// DOT rendering of the first `depth` levels; branching vertices are filled.
pub fn tree_dot(t: &MinimalDiagram, depth: usize) -> Result<String> {
    let depth = depth.min(t.depth());
    let mut out = String::from("digraph xmin {\n  rankdir=TB;\n  node [shape=circle, label=\"\"];\n");
    for level in 0..=depth {
        let size = t.level_size(level)?;
        let branching: Vec<usize> = if level < depth {
            t.map(level + 1)?.children(size).iter().enumerate().filter(|(_, c)| c.len() >= 2).map(|(a, _)| a).collect()
        } else {
            Vec::new()
        };
        let _ = write!(out, "  {{ rank=same;");
        for v in 0..size {
            let _ = write!(out, " v{level}_{v};");
        }
        out.push_str(" }\n");
        for v in branching {
            let _ = writeln!(out, "  v{level}_{v} [style=filled, fillcolor=\"#f4a261\"];");
        }
    }
    for level in 1..=depth {
        for (j, p) in t.map(level)?.parent.iter().enumerate() {
            let _ = writeln!(out, "  v{}_{p} -> v{level}_{j};", level - 1);
        }
    }
    out.push_str("}\n");
    Ok(out)
}
