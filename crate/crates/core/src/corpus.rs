//! Built-in example diagrams with expected invariant records.

use std::fmt;

use crate::bdspec;
use crate::diagram::{validate_diagram, BratteliDiagram};
use crate::error::{Error, Result};
use crate::k0::{self, CompletedChain, Membership, Positivity, ProbeOutcome};
use crate::linalg::{int_vec, Permutation};
use crate::pathspace::{end_census, LocallyConstantFunction, MinimalDiagram};
use crate::reduction::{
    build_minimal_diagram, enumerate_minimal_reductions, minimal_reduce, ParentMap, ReductionStrategy,
    DEFAULT_ENUMERATION_LIMIT,
};

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// A worked example in the source material.
    Worked,
    /// An independent computation (brute force or hand derivation).
    Oracle,
    /// Immediate from the definitions.
    Definition,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Worked => "worked",
            Basis::Oracle => "oracle",
            Basis::Definition => "definition",
        })
    }
}

/// A computed invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Validate,
    Census {
        depth: usize,
    },
    /// 1-based vertices lying on a path that reaches `depth`, per level.
    Paths {
        depth: usize,
    },
    Rank {
        level: usize,
    },
    Reductions {
        level: usize,
    },
    Reduce {
        level: usize,
    },
    Denominators {
        depth: usize,
    },
    Cumulative {
        n: usize,
    },
    Member {
        func: &'static str,
    },
    Positive {
        depth: usize,
        alpha: &'static [i64],
        bound: usize,
    },
    /// Swap of two 1-based cylinders at `depth`.
    Probe {
        swap: (usize, usize),
        depth: usize,
    },
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Validate => f.write_str("validate"),
            Query::Census { depth } => write!(f, "census@{depth}"),
            Query::Paths { depth } => write!(f, "paths@{depth}"),
            Query::Rank { level } => write!(f, "rank[{level}]"),
            Query::Reductions { level } => write!(f, "reductions[{level}]"),
            Query::Reduce { level } => write!(f, "reduce[{level}]"),
            Query::Denominators { depth } => write!(f, "denominators@{depth}"),
            Query::Cumulative { n } => write!(f, "A_{n}"),
            Query::Member { func } => write!(f, "member({func})"),
            Query::Positive { depth, alpha, bound } => write!(f, "positive({depth}: {alpha:?}, bound {bound})"),
            Query::Probe { swap, depth } => write!(f, "probe(swap {} {}, depth {depth})", swap.0, swap.1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedRecord {
    pub query: Query,
    pub value: &'static str,
    pub basis: Basis,
}

/// A named diagram plus the strategy used for its path space.
#[derive(Debug, Clone)]
pub struct ExampleCorpusEntry {
    pub name: &'static str,
    pub file: &'static str,
    pub source: &'static str,
    pub strategy: &'static str,
    pub maps: Option<&'static str>,
    pub expected: Vec<ExpectedRecord>,
}

impl ExampleCorpusEntry {
    pub fn diagram(&self) -> Result<BratteliDiagram> {
        bdspec::parse(self.source)
    }

    pub fn reduction_strategy(&self) -> Result<ReductionStrategy> {
        match self.maps {
            Some(text) => Ok(ReductionStrategy::UserMap(ParentMap::parse_lines(text)?)),
            None => ReductionStrategy::from_name(self.strategy)
                .ok_or_else(|| Error::shape(format!("unknown strategy `{}`", self.strategy))),
        }
    }
}

fn rec(query: Query, value: &'static str, basis: Basis) -> ExpectedRecord {
    ExpectedRecord { query, value, basis }
}

/// The built-in corpus.
pub fn corpus() -> Vec<ExampleCorpusEntry> {
    use Basis::*;
    let entry = |name, file, source, strategy, maps, expected| ExampleCorpusEntry {
        name,
        file,
        source,
        strategy,
        maps,
        expected,
    };
    let gicar = include_str!("../corpus/gicar.bd");
    let ex22 = include_str!("../corpus/ex22.bd");
    let pow2 = include_str!("../corpus/pow2.bd");
    vec![
        entry(
            "gicar-rightmost",
            "gicar.bd",
            gicar,
            "rightmost",
            None,
            vec![
                rec(Query::Validate, "ok", Definition),
                rec(Query::Census { depth: 8 }, "ends: countably infinite; condensation: 1; certified", Worked),
                rec(Query::Denominators { depth: 6 }, "1 1 1 1 1 1 1", Oracle),
                rec(Query::Member { func: "depth=2: 0 1 -3" }, "witness depth=2: -3 1 0", Oracle),
            ],
        ),
        entry(
            "gicar-alternating",
            "gicar.bd",
            gicar,
            "alternating",
            None,
            vec![rec(Query::Census { depth: 8 }, "ends: countably infinite; condensation: 2; certified", Worked)],
        ),
        entry(
            "ex22-left",
            "ex22.bd",
            ex22,
            "usermap",
            Some(include_str!("../corpus/ex22_left.maps")),
            vec![rec(Query::Validate, "ok", Definition), rec(Query::Paths { depth: 4 }, "1 / 1 / 1 / 1 / 1", Worked)],
        ),
        entry(
            "ex22-right",
            "ex22.bd",
            ex22,
            "usermap",
            Some(include_str!("../corpus/ex22_right.maps")),
            vec![rec(Query::Paths { depth: 4 }, "1 / 2 / 1 / 1 / 1", Worked)],
        ),
        entry(
            "g2",
            "g2.bd",
            include_str!("../corpus/g2.bd"),
            "lexfirst",
            None,
            vec![rec(Query::Rank { level: 0 }, "2", Definition), rec(Query::Reductions { level: 0 }, "1", Oracle)],
        ),
        entry(
            "ex35",
            "ex35.bd",
            include_str!("../corpus/ex35.bd"),
            "lexfirst",
            None,
            vec![
                rec(Query::Rank { level: 0 }, "2", Worked),
                rec(Query::Reductions { level: 0 }, "0", Worked),
                rec(Query::Reduce { level: 0 }, "matrix is rank deficient (rank 2, need 3)", Worked),
            ],
        ),
        entry(
            "strictsub",
            "strictsub.bd",
            include_str!("../corpus/strictsub.bd"),
            "rightmost",
            None,
            vec![
                rec(Query::Denominators { depth: 5 }, "1 2 2 2 2 2", Oracle),
                rec(Query::Member { func: "depth=1: 0 1/2" }, "not a member (checked to 10)", Worked),
            ],
        ),
        entry(
            "pow2",
            "pow2.bd",
            pow2,
            "rightmost",
            None,
            vec![
                rec(Query::Census { depth: 8 }, "ends: countably infinite; condensation: 1; certified", Definition),
                rec(Query::Cumulative { n: 2 }, "1/2 0 0; -1/2 1/4 0; 0 -1/4 1", Worked),
                rec(Query::Denominators { depth: 4 }, "1 2 8 64 1024", Oracle),
                rec(Query::Member { func: "depth=3: 1/2 1/4 0 0" }, "witness depth=3: 1 1 0 0", Worked),
                rec(Query::Probe { swap: (1, 2), depth: 3 }, "broken: depth=3: 1/2 1/4 0 0", Worked),
            ],
        ),
        entry(
            "uhf2",
            "uhf2.bd",
            include_str!("../corpus/uhf2.bd"),
            "theorem",
            None,
            vec![
                rec(Query::Census { depth: 8 }, "ends: 1; discrete", Definition),
                rec(Query::Denominators { depth: 4 }, "1 2 4 8 16", Definition),
                rec(Query::Member { func: "depth=0: 1/2" }, "witness depth=1: 1", Definition),
            ],
        ),
        entry(
            "uhf3",
            "uhf3.bd",
            include_str!("../corpus/uhf3.bd"),
            "theorem",
            None,
            vec![
                rec(Query::Denominators { depth: 4 }, "1 3 9 27 81", Definition),
                rec(Query::Member { func: "depth=0: 1/2" }, "not a member (checked to 10)", Definition),
            ],
        ),
        entry(
            "discrete3",
            "discrete3.bd",
            include_str!("../corpus/discrete3.bd"),
            "theorem",
            None,
            vec![
                rec(Query::Census { depth: 8 }, "ends: 3; discrete", Definition),
                rec(Query::Denominators { depth: 3 }, "1 2 4 8", Oracle),
            ],
        ),
        entry(
            "mixing",
            "mixing.bd",
            include_str!("../corpus/mixing.bd"),
            "theorem",
            None,
            vec![
                rec(Query::Validate, "ok", Definition),
                rec(
                    Query::Positive { depth: 1, alpha: &[1, -1], bound: 3 },
                    "positive: witness depth=3: 1 0 0 0",
                    Oracle,
                ),
                rec(Query::Positive { depth: 1, alpha: &[1, -1], bound: 2 }, "not positive up to depth 2", Oracle),
            ],
        ),
    ]
}

/// Depth used for membership searches in corpus runs.
pub const CORPUS_DEPTH: usize = 10;

/// Computes `query` for `entry` as a display string; errors are rendered.
pub fn evaluate(entry: &ExampleCorpusEntry, query: &Query) -> String {
    compute(entry, query).unwrap_or_else(|e| e.to_string())
}

fn tree(entry: &ExampleCorpusEntry, d: &BratteliDiagram, depth: usize) -> Result<MinimalDiagram> {
    build_minimal_diagram(d, entry.reduction_strategy()?, depth)
}

fn compute(entry: &ExampleCorpusEntry, query: &Query) -> Result<String> {
    let d = entry.diagram()?;
    let join = |v: Vec<String>| v.join(" ");
    Ok(match query {
        Query::Validate => {
            let report = validate_diagram(&d);
            if report.is_empty() {
                "ok".into()
            } else {
                format!("{} violations", report.violations.len())
            }
        }
        Query::Census { depth } => end_census(&tree(entry, &d, *depth)?).to_string(),
        Query::Paths { depth } => {
            let t = tree(entry, &d, *depth)?;
            let mut alive: Vec<usize> = (0..t.level_size(*depth)?).collect();
            let mut levels = vec![alive.clone()];
            for level in (1..=*depth).rev() {
                let map = t.map(level)?;
                alive = alive.iter().map(|&v| map.parent[v]).collect();
                alive.sort_unstable();
                alive.dedup();
                levels.push(alive.clone());
            }
            levels.reverse();
            levels.iter().map(|l| join(l.iter().map(|v| (v + 1).to_string()).collect())).collect::<Vec<_>>().join(" / ")
        }
        Query::Rank { level } => d.matrix(*level)?.rank().to_string(),
        Query::Reductions { level } => {
            enumerate_minimal_reductions(&d.matrix(*level)?, DEFAULT_ENUMERATION_LIMIT).len().to_string()
        }
        Query::Reduce { level } => {
            let outcome = minimal_reduce(&d.matrix(*level)?)?;
            outcome.parent_map.to_string()
        }
        Query::Denominators { depth } => {
            let chain = CompletedChain::from_diagram(&d, *depth)?;
            join((0..=*depth).map(|n| chain.group_scale(n).map(|g| g.denominator.to_string())).collect::<Result<_>>()?)
        }
        Query::Cumulative { n } => {
            let chain = CompletedChain::from_diagram(&d, *n)?;
            chain
                .cumulative(*n)?
                .iter_rows()
                .map(|r| join(r.iter().map(ToString::to_string).collect()))
                .collect::<Vec<_>>()
                .join("; ")
        }
        Query::Member { func } => {
            let f: LocallyConstantFunction = func.parse()?;
            let chain = CompletedChain::from_diagram(&d, CORPUS_DEPTH)?;
            let t = tree(entry, &d, CORPUS_DEPTH)?;
            match k0::membership(&f, &chain, &t)? {
                Membership::Member(w) => w.to_string(),
                Membership::NotMember { checked_to } => format!("not a member (checked to {checked_to})"),
            }
        }
        Query::Positive { depth, alpha, bound } => {
            let chain = CompletedChain::from_diagram(&d, *bound)?;
            let t = tree(entry, &d, *bound)?;
            let f = k0::phi(*depth, &int_vec(alpha), &chain, &t)?;
            match k0::positivity(&f, &chain, &t, *bound, None)? {
                Positivity::Positive(w) => format!("positive: {w}"),
                Positivity::NotPositive => "not positive".into(),
                Positivity::NotPositiveUpTo(n) => format!("not positive up to depth {n}"),
            }
        }
        Query::Probe { swap, depth } => {
            let chain = CompletedChain::from_diagram(&d, CORPUS_DEPTH)?;
            let t = tree(entry, &d, CORPUS_DEPTH)?;
            let theta = swap_permutation(t.level_size(*depth)?, swap.0 - 1, swap.1 - 1)?;
            match k0::automorphism_probe(&theta, *depth, &chain, &t)? {
                ProbeOutcome::Broken { function, .. } => format!("broken: {function}").replace("func ", ""),
                ProbeOutcome::Preserved { .. } => "preserved".into(),
            }
        }
    })
}

/// Transposition of two 0-based points.
pub fn swap_permutation(len: usize, a: usize, b: usize) -> Result<Permutation> {
    if a >= len || b >= len {
        return Err(Error::IndexOutOfRange(format!("swap {} {} of {len} points", a + 1, b + 1)));
    }
    let mut order: Vec<usize> = (0..len).collect();
    order.swap(a, b);
    Ok(Permutation::from_order(order))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordResult {
    pub query: Query,
    pub expected: &'static str,
    pub actual: String,
    pub basis: Basis,
}

impl RecordResult {
    pub fn ok(&self) -> bool {
        self.expected == self.actual
    }
}

#[derive(Debug, Clone)]
pub struct EntryReport {
    pub name: &'static str,
    pub results: Vec<RecordResult>,
}

impl EntryReport {
    pub fn ok(&self) -> bool {
        self.results.iter().all(RecordResult::ok)
    }
}

/// Evaluates every expected record; entries run on separate threads.
pub fn run_corpus(entries: &[ExampleCorpusEntry]) -> Vec<EntryReport> {
    std::thread::scope(|s| {
        let handles: Vec<_> = entries
            .iter()
            .map(|e| {
                s.spawn(move || EntryReport {
                    name: e.name,
                    results: e
                        .expected
                        .iter()
                        .map(|r| RecordResult {
                            query: r.query.clone(),
                            expected: r.value,
                            actual: evaluate(e, &r.query),
                            basis: r.basis,
                        })
                        .collect(),
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("corpus entry panicked")).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_expected_record_reproduces() {
        for report in run_corpus(&corpus()) {
            for r in &report.results {
                assert!(r.ok(), "{} {}: expected `{}`, got `{}`", report.name, r.query, r.expected, r.actual);
            }
        }
    }
}
