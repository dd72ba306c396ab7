use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use brattice::corpus::{self, swap_permutation};
use brattice::diagram::{diagram_dot, dilate_step, telescope, validate_diagram, validate_to_depth, BratteliDiagram};
use brattice::k0::{self, CompletedChain, Membership, Positivity, ProbeOutcome};
use brattice::linalg::{Int, IntMatrix};
use brattice::pathspace::{
    compare_invariants, dump_tree, end_census, tree_dot, Comparison, LocallyConstantFunction, MinimalDiagram,
};
use brattice::reduction::{build_minimal_diagram, enumerate_minimal_reductions, ParentMap, ReductionStrategy};
use brattice::{bdspec, Error, ShapeClass};

const DEFAULT_DEPTH_LIMIT: usize = 64;
const DEFAULT_DEPTH: usize = 8;
const DEFAULT_SEARCH_DEPTH: usize = 10;

#[derive(Parser)]
#[command(name = "brattice", version, about = "Exact computations on Bratteli diagrams")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check shapes, zero rows and zero columns.
    Validate {
        spec: PathBuf,
        /// Levels to check on infinite diagrams.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Contract to the listed levels (comma separated, starting at 0).
    Telescope {
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Factor one multiplicity matrix into single-row steps.
    Dilate {
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
    /// Build a minimal reduction, or enumerate them at one level.
    Reduce {
        spec: PathBuf,
        #[command(flatten)]
        strategy: StrategyArgs,
        #[arg(long)]
        depth: Option<usize>,
        /// List up to N minimal reductions of matrix `--level` instead.
        #[arg(long)]
        enumerate: Option<usize>,
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// End census of the minimal path space.
    Pathspace {
        spec: PathBuf,
        #[command(flatten)]
        strategy: StrategyArgs,
        #[arg(long)]
        depth: Option<usize>,
        /// Accepted for compatibility; the census is always printed.
        #[arg(long)]
        census: bool,
        /// Compare against the tree from a second strategy.
        #[arg(long)]
        compare: Option<String>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Dimension group computations.
    K0 {
        #[command(subcommand)]
        command: K0Command,
    },
    /// Run the built-in example corpus.
    Corpus {
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        list: bool,
        /// Write the corpus diagram files into this directory.
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum K0Command {
    /// Completed squares and determinants.
    Chain {
        spec: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        /// Also print the cumulative matrices.
        #[arg(long)]
        cumulative: bool,
    },
    /// Image of an integer vector at one level.
    Phi {
        spec: PathBuf,
        #[command(flatten)]
        strategy: StrategyArgs,
        #[arg(long)]
        level: usize,
        /// Space-separated integers.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Decide membership of a locally constant function.
    Member {
        spec: PathBuf,
        #[command(flatten)]
        strategy: StrategyArgs,
        /// For example `depth=1: 0 1/2`.
        #[arg(long, allow_hyphen_values = true)]
        func: String,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Search for a nonnegative witness.
    Positive {
        spec: PathBuf,
        #[command(flatten)]
        strategy: StrategyArgs,
        #[arg(long, allow_hyphen_values = true)]
        func: String,
        #[arg(long)]
        bound: Option<usize>,
        /// Decide exactly through the weight scheme.
        #[arg(long)]
        weight: bool,
    },
    /// Test whether swapping two cylinders preserves the group.
    Probe {
        spec: PathBuf,
        #[command(flatten)]
        strategy: StrategyArgs,
        /// Two 1-based cylinder indices.
        #[arg(long, num_args = 2, required = true)]
        swap: Vec<usize>,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        search_depth: Option<usize>,
    },
}

#[derive(Args)]
struct StrategyArgs {
    /// theorem, lexfirst, rightmost, leftmost, alternating or auto.
    #[arg(long, default_value = "auto")]
    strategy: String,
    /// Parent map file; overrides --strategy.
    #[arg(long)]
    maps: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Shape(_) | Error::IndexOutOfRange(_) | Error::DepthExceeded { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Domain(other.to_string()),
        }
    }
}

/// Text and JSON renderings of one command result.
struct Report {
    text: String,
    json: Value,
    code: u8,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { text, json, code: 0 }
    }

    fn verdict(text: String, json: Value) -> Self {
        Report { text, json, code: 1 }
    }
}

type Outcome = std::result::Result<Report, Failure>;

fn depth_limit() -> usize {
    std::env::var("BRATTICE_DEPTH_LIMIT").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_DEPTH_LIMIT)
}

fn capped(requested: Option<usize>, default: usize) -> usize {
    let limit = depth_limit();
    let depth = requested.unwrap_or(default);
    if depth > limit {
        eprintln!("note: depth {depth} capped at BRATTICE_DEPTH_LIMIT={limit}");
    }
    depth.min(limit)
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> std::result::Result<BratteliDiagram, Failure> {
    bdspec::parse(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_dot(
    path: &Option<PathBuf>,
    dot: impl FnOnce() -> brattice::Result<String>,
) -> std::result::Result<(), Failure> {
    if let Some(path) = path {
        fs::write(path, dot()?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn strategy(args: &StrategyArgs, d: &BratteliDiagram) -> std::result::Result<ReductionStrategy, Failure> {
    if let Some(path) = &args.maps {
        return Ok(ReductionStrategy::UserMap(ParentMap::parse_lines(&read(path)?)?));
    }
    match args.strategy.as_str() {
        "auto" if d.shape() == ShapeClass::Irregular => Ok(ReductionStrategy::LexFirst),
        "auto" => Ok(ReductionStrategy::Theorem),
        name => ReductionStrategy::from_name(name).ok_or_else(|| Failure::Usage(format!("unknown strategy `{name}`"))),
    }
}

fn tree(args: &StrategyArgs, d: &BratteliDiagram, depth: usize) -> std::result::Result<MinimalDiagram, Failure> {
    Ok(build_minimal_diagram(d, strategy(args, d)?, depth)?)
}

fn int_rows(m: &IntMatrix) -> Value {
    Value::Array(m.iter_rows().map(|r| Value::Array(r.iter().map(|x| json!(x.to_string())).collect())).collect())
}

fn parse_ints(s: &str) -> std::result::Result<Vec<Int>, Failure> {
    s.split_whitespace().map(|t| t.parse().map_err(|_| Failure::Usage(format!("bad integer `{t}`")))).collect()
}

fn parse_func(s: &str) -> std::result::Result<LocallyConstantFunction, Failure> {
    Ok(s.parse::<LocallyConstantFunction>()?)
}

fn validate(spec: &Path, depth: Option<usize>, dot: &Option<PathBuf>) -> Outcome {
    let d = load(spec)?;
    let report = match depth {
        Some(n) => validate_to_depth(&d, capped(Some(n), n)),
        None => validate_diagram(&d),
    };
    write_dot(dot, || diagram_dot(&d, capped(depth, DEFAULT_DEPTH)))?;
    let lines: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
    let json = json!({ "checked_depth": report.checked_depth, "violations": lines });
    if report.is_empty() {
        Ok(Report::ok(format!("ok: {} levels checked", report.checked_depth), json))
    } else {
        Ok(Report::verdict(lines.join("\n"), json))
    }
}

fn telescope_cmd(spec: &Path, levels: &[usize], dot: &Option<PathBuf>) -> Outcome {
    let d = load(spec)?;
    let t = telescope(&d, levels)?;
    write_dot(dot, || diagram_dot(&t, DEFAULT_DEPTH))?;
    let text = bdspec::print(&t);
    Ok(Report::ok(text.trim_end().to_string(), json!({ "levels": levels, "bdspec": text })))
}

fn dilate_cmd(spec: &Path, level: usize) -> Outcome {
    let d = load(spec)?;
    let dil = dilate_step(&d.matrix(level)?)?;
    let order: Vec<usize> = dil.order.order().iter().map(|i| i + 1).collect();
    let mut text = format!("P: {}", order.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "));
    for (i, b) in dil.factors.iter().enumerate() {
        let rows: Vec<String> = b
            .as_matrix()
            .iter_rows()
            .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
            .collect();
        text.push_str(&format!("\nB{}: {}", i + 1, rows.join("; ")));
    }
    let factors: Vec<Value> = dil.factors.iter().map(|b| int_rows(b.as_matrix())).collect();
    Ok(Report::ok(text, json!({ "order": order, "factors": factors })))
}

fn rank_deficient(d: &BratteliDiagram, level: usize, rank: usize, needed: usize) -> Outcome {
    let found = enumerate_minimal_reductions(&d.matrix(level)?, 1).len();
    Ok(Report::verdict(
        format!("matrix {level}: rank {rank} < {needed}: rank deficient; brute force found {found} reductions"),
        json!({ "level": level, "rank": rank, "needed": needed, "reductions": found }),
    ))
}

fn reduce_cmd(
    spec: &Path,
    args: &StrategyArgs,
    depth: Option<usize>,
    enumerate: Option<usize>,
    level: usize,
    dot: &Option<PathBuf>,
) -> Outcome {
    let d = load(spec)?;
    if let Some(limit) = enumerate {
        let m = d.matrix(level)?;
        let mut maps = enumerate_minimal_reductions(&m, limit);
        for p in &mut maps {
            p.level = level + 1;
        }
        if maps.is_empty() {
            return rank_deficient(&d, level, m.rank(), m.cols());
        }
        let lines: Vec<String> = maps.iter().map(ToString::to_string).collect();
        return Ok(Report::ok(lines.join("\n"), json!({ "level": level, "reductions": lines })));
    }
    let depth = capped(depth, DEFAULT_DEPTH);
    match build_minimal_diagram(&d, strategy(args, &d)?, depth) {
        Ok(t) => {
            write_dot(dot, || tree_dot(&t, depth))?;
            let dump = dump_tree(&t);
            Ok(Report::ok(dump.trim_end().to_string(), json!({ "depth": t.depth(), "tree": dump })))
        }
        Err(Error::RankDeficient { level: Some(l), rank, needed }) => rank_deficient(&d, l, rank, needed),
        Err(e) => Err(e.into()),
    }
}

fn pathspace_cmd(
    spec: &Path,
    args: &StrategyArgs,
    depth: Option<usize>,
    compare: &Option<String>,
    dot: &Option<PathBuf>,
) -> Outcome {
    let d = load(spec)?;
    let depth = capped(depth, DEFAULT_DEPTH);
    let t = tree(args, &d, depth)?;
    write_dot(dot, || tree_dot(&t, depth))?;
    let census = end_census(&t);
    let mut text = census.to_string();
    let mut json = json!({ "census": text, "certified": census.certified });
    if let Some(other) = compare {
        let other_args = StrategyArgs { strategy: other.clone(), maps: None };
        let u = tree(&other_args, &d, depth)?;
        let verdict = match compare_invariants(&t, &u) {
            Ok(Comparison::Distinct) => "distinct".to_string(),
            Ok(Comparison::Indistinguishable) => "indistinguishable".to_string(),
            Err(Error::Uncertified) => "uncertified".to_string(),
            Err(e) => return Err(e.into()),
        };
        text.push_str(&format!("\n{other}: {}\ncompare: {verdict}", end_census(&u)));
        json["compare"] = json!(verdict);
        json["other_census"] = json!(end_census(&u).to_string());
    }
    Ok(Report::ok(text, json))
}

fn k0_cmd(command: &K0Command) -> Outcome {
    match command {
        K0Command::Chain { spec, depth, cumulative } => {
            let d = load(spec)?;
            let chain = CompletedChain::from_diagram(&d, capped(*depth, DEFAULT_DEPTH))?;
            let text = k0::dump_chain(&chain, *cumulative);
            let denominators: Vec<String> = (0..=chain.depth())
                .map(|n| chain.group_scale(n).map(|g| g.denominator.to_string()))
                .collect::<brattice::Result<_>>()?;
            let json = json!({
                "shape": chain.shape().to_string(),
                "squares": chain.squares().iter().map(int_rows).collect::<Vec<_>>(),
                "dets": chain.dets().iter().map(ToString::to_string).collect::<Vec<_>>(),
                "denominators": denominators,
            });
            Ok(Report::ok(text.trim_end().to_string(), json))
        }
        K0Command::Phi { spec, strategy, level, alpha } => {
            let d = load(spec)?;
            let chain = CompletedChain::from_diagram(&d, *level)?;
            let t = tree(strategy, &d, *level)?;
            let f = k0::phi(*level, &parse_ints(alpha)?, &chain, &t)?;
            Ok(Report::ok(f.to_string(), json!({ "function": f.to_string() })))
        }
        K0Command::Member { spec, strategy, func, depth } => {
            let d = load(spec)?;
            let f = parse_func(func)?;
            let depth = capped(*depth, DEFAULT_SEARCH_DEPTH.max(f.depth));
            let chain = CompletedChain::from_diagram(&d, depth)?;
            let t = tree(strategy, &d, depth)?;
            match k0::membership(&f, &chain, &t)? {
                Membership::Member(w) => {
                    Ok(Report::ok(format!("member: {w}"), json!({ "member": true, "witness": w.to_string() })))
                }
                Membership::NotMember { checked_to } => Ok(Report::verdict(
                    format!("NOT a member (checked exactly): no integral witness through depth {checked_to}"),
                    json!({ "member": false, "checked_to": checked_to }),
                )),
            }
        }
        K0Command::Positive { spec, strategy, func, bound, weight } => {
            let d = load(spec)?;
            let f = parse_func(func)?;
            let bound = capped(*bound, DEFAULT_SEARCH_DEPTH.max(f.depth));
            let chain = CompletedChain::from_diagram(&d, bound)?;
            let t = tree(strategy, &d, bound)?;
            let scheme = if *weight { Some(k0::weight_scheme(&d, bound)?) } else { None };
            match k0::positivity(&f, &chain, &t, bound, scheme.as_ref()) {
                Ok(Positivity::Positive(w)) => {
                    Ok(Report::ok(format!("positive: {w}"), json!({ "positive": true, "witness": w.to_string() })))
                }
                Ok(Positivity::NotPositive) => Ok(Report::verdict("not positive".into(), json!({ "positive": false }))),
                Ok(Positivity::NotPositiveUpTo(n)) => Ok(Report::verdict(
                    format!("no nonnegative witness through depth {n}"),
                    json!({ "positive": null, "checked_to": n }),
                )),
                Err(Error::NotInK0 { checked_to }) => Ok(Report::verdict(
                    format!("NOT a member (checked exactly): no integral witness through depth {checked_to}"),
                    json!({ "member": false, "checked_to": checked_to }),
                )),
                Err(e) => Err(e.into()),
            }
        }
        K0Command::Probe { spec, strategy, swap, depth, search_depth } => {
            let d = load(spec)?;
            let search = capped(*search_depth, DEFAULT_SEARCH_DEPTH.max(*depth));
            let chain = CompletedChain::from_diagram(&d, search)?;
            let t = tree(strategy, &d, search)?;
            let (a, b) = (swap[0], swap[1]);
            if a == 0 || b == 0 {
                return Err(Failure::Usage("cylinder indices are 1-based".into()));
            }
            let theta = swap_permutation(t.level_size(*depth)?, a - 1, b - 1)?;
            match k0::automorphism_probe(&theta, *depth, &chain, &t)? {
                ProbeOutcome::Broken { function, pullback } => Ok(Report::ok(
                    format!("Broken: witness {function}\npullback {pullback} is not in the group"),
                    json!({ "broken": true, "function": function.to_string(), "pullback": pullback.to_string() }),
                )),
                ProbeOutcome::Preserved { depth, candidates } => Ok(Report::ok(
                    format!("Preserved: {candidates} candidates at depth {depth}"),
                    json!({ "broken": false, "candidates": candidates }),
                )),
            }
        }
    }
}

fn corpus_cmd(name: &Option<String>, list: bool, export: &Option<PathBuf>) -> Outcome {
    let mut entries = corpus::corpus();
    if let Some(name) = name {
        entries.retain(|e| e.name == *name);
        if entries.is_empty() {
            return Err(Failure::Usage(format!("no corpus entry named `{name}`")));
        }
    }
    if let Some(dir) = export {
        fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
        for e in &entries {
            let io = |e: std::io::Error| Failure::Usage(format!("{}: {e}", dir.display()));
            fs::write(dir.join(e.file), e.source).map_err(io)?;
            if let Some(maps) = e.maps {
                fs::write(dir.join(format!("{}.maps", e.name)), maps).map_err(io)?;
            }
        }
    }
    if list {
        let lines: Vec<String> = entries.iter().map(|e| format!("{} {} {}", e.name, e.file, e.strategy)).collect();
        let names: Vec<&str> = entries.iter().map(|e| e.name).collect();
        return Ok(Report::ok(lines.join("\n"), json!({ "entries": names })));
    }
    let reports = corpus::run_corpus(&entries);
    let mut lines = Vec::new();
    let mut records = Vec::new();
    for report in &reports {
        for r in &report.results {
            let status = if r.ok() { "ok" } else { "DRIFT" };
            let mut line = format!("{status} {} {} [{}]", report.name, r.query, r.basis);
            if !r.ok() {
                line.push_str(&format!(": expected `{}`, got `{}`", r.expected, r.actual));
            }
            lines.push(line);
            records.push(json!({
                "entry": report.name,
                "query": r.query.to_string(),
                "basis": r.basis.to_string(),
                "expected": r.expected,
                "actual": r.actual,
                "ok": r.ok(),
            }));
        }
    }
    let json = json!({ "records": records });
    if reports.iter().all(|r| r.ok()) {
        lines.push(format!("corpus: {} records reproduced", records.len()));
        Ok(Report::ok(lines.join("\n"), json))
    } else {
        Ok(Report::verdict(lines.join("\n"), json))
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate { spec, depth, dot } => validate(spec, *depth, dot),
        Command::Telescope { spec, levels, dot } => telescope_cmd(spec, levels, dot),
        Command::Dilate { spec, level } => dilate_cmd(spec, *level),
        Command::Reduce { spec, strategy, depth, enumerate, level, dot } => {
            reduce_cmd(spec, strategy, *depth, *enumerate, *level, dot)
        }
        Command::Pathspace { spec, strategy, depth, census: _, compare, dot } => {
            pathspace_cmd(spec, strategy, *depth, compare, dot)
        }
        Command::K0 { command } => k0_cmd(command),
        Command::Corpus { name, list, export } => corpus_cmd(name, *list, export),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let body = match cli.format {
                Format::Text => report.text,
                Format::Json => serde_json::to_string_pretty(&report.json).expect("report serializes"),
            };
            // A closed pipe (`| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            ExitCode::from(report.code)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
