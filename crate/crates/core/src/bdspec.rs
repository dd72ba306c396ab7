//! The `bdspec v1` diagram text format.
//!
//! ```text
//! bdspec v1
//! shape: type2
//! completion: weight
//! matrix 0:
//! diag 0 = 1
//! at -2 -1 = 2^{n+1}
//! at -1 -1 = 1
//! tail: periodic 1
//! ```
//!
//! A block body is either rows of space-separated entries or band rules
//! (`diag <offset> = <entry>`, `at <row> <col> = <entry>`, negative
//! positions counting from the end). Entries are nonnegative integers or
//! level-indexed powers such as `2^{n+1}`. Blank lines and lines starting
//! with `#` are ignored; anything else unrecognized is an error.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::diagram::{
    BandRule, BratteliDiagram, CompletionDefault, CompletionHints, EdgePos, Entry, LevelAffine, MatrixTemplate,
    ShapeClass, Tail,
};
use crate::error::{Error, Result};

pub fn parse(text: &str) -> Result<BratteliDiagram> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match lines.next() {
        Some((_, "bdspec v1")) => {}
        Some((n, other)) => return Err(Error::parse(n, format!("expected `bdspec v1`, found `{other}`"))),
        None => return Err(Error::parse(1, "empty input")),
    }
    let shape = match lines.next() {
        Some((n, l)) => parse_shape(n, l)?,
        None => return Err(Error::parse(2, "missing `shape:` line")),
    };

    let mut blocks: Vec<(usize, Vec<(usize, &str)>)> = Vec::new();
    let mut tail = Tail::None;
    let mut hints = CompletionHints::default();
    for (n, line) in lines {
        if let Some(rest) = line.strip_prefix("matrix ") {
            let idx = rest
                .strip_suffix(':')
                .and_then(|s| s.trim().parse::<usize>().ok())
                .ok_or_else(|| Error::parse(n, format!("malformed block header `{line}`")))?;
            if idx != blocks.len() {
                return Err(Error::parse(n, format!("expected `matrix {}:`, found `{line}`", blocks.len())));
            }
            blocks.push((n, Vec::new()));
        } else if let Some(rest) = line.strip_prefix("tail:") {
            tail = parse_tail(n, rest.trim())?;
        } else if let Some(rest) = line.strip_prefix("completion:") {
            hints.default = Some(match rest.trim() {
                "auto" => CompletionDefault::Auto,
                "weight" => CompletionDefault::Weight,
                other => return Err(Error::parse(n, format!("unknown completion mode `{other}`"))),
            });
        } else if let Some(rest) = line.strip_prefix("complete ") {
            let (idx, col) =
                rest.split_once(':').ok_or_else(|| Error::parse(n, "expected `complete <n>: <integers>`"))?;
            let idx: usize = idx.trim().parse().map_err(|_| Error::parse(n, format!("bad level `{idx}`")))?;
            let col = col.split_whitespace().map(|t| parse_int(n, t)).collect::<Result<Vec<_>>>()?;
            if hints.explicit.insert(idx, col).is_some() {
                return Err(Error::parse(n, format!("duplicate completion for level {idx}")));
            }
        } else if let Some((_, body)) = blocks.last_mut() {
            body.push((n, line));
        } else {
            return Err(Error::parse(n, format!("unexpected line `{line}` before the first block")));
        }
    }

    let mut templates = Vec::with_capacity(blocks.len());
    for (header_line, body) in blocks {
        templates.push(parse_block(header_line, &body)?);
    }
    let d = BratteliDiagram::new(shape, templates, tail).map_err(|e| Error::parse(0, e.to_string()))?;
    Ok(d.with_completions(hints))
}

fn parse_shape(n: usize, line: &str) -> Result<ShapeClass> {
    let rest =
        line.strip_prefix("shape:").ok_or_else(|| Error::parse(n, format!("expected `shape:`, found `{line}`")))?;
    let tokens: Vec<&str> = rest.split_whitespace().collect();
    match tokens.as_slice() {
        ["type2"] => Ok(ShapeClass::Type2),
        ["irregular"] => Ok(ShapeClass::Irregular),
        ["type1", l] => {
            let l: usize = l.parse().map_err(|_| Error::parse(n, format!("bad level size `{l}`")))?;
            if l == 0 {
                return Err(Error::parse(n, "type1 needs at least one vertex per level"));
            }
            Ok(ShapeClass::Type1(l))
        }
        _ => Err(Error::parse(n, format!("unknown shape `{}`", rest.trim()))),
    }
}

fn parse_tail(n: usize, rest: &str) -> Result<Tail> {
    let tokens: Vec<&str> = rest.split_whitespace().collect();
    match tokens.as_slice() {
        ["none"] => Ok(Tail::None),
        ["periodic", p] => {
            let p: usize = p.parse().map_err(|_| Error::parse(n, format!("bad period `{p}`")))?;
            Ok(Tail::Periodic(p))
        }
        _ => Err(Error::parse(n, format!("unknown tail `{rest}`"))),
    }
}

fn parse_block(header_line: usize, body: &[(usize, &str)]) -> Result<MatrixTemplate> {
    if body.is_empty() {
        return Err(Error::parse(header_line, "empty matrix block"));
    }
    let banded = body[0].1.starts_with("diag ") || body[0].1.starts_with("at ");
    if banded {
        let rules = body.iter().map(|&(n, l)| parse_band_rule(n, l)).collect::<Result<Vec<_>>>()?;
        return Ok(MatrixTemplate::Banded(rules));
    }
    let mut rows = Vec::with_capacity(body.len());
    for &(n, line) in body {
        let row = line.split_whitespace().map(|t| parse_entry(n, t)).collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            let first: &Vec<Entry> = first;
            if first.len() != row.len() {
                return Err(Error::parse(n, format!("row has {} entries, expected {}", row.len(), first.len())));
            }
        }
        rows.push(row);
    }
    Ok(MatrixTemplate::Rows(rows))
}

fn parse_band_rule(n: usize, line: &str) -> Result<BandRule> {
    let (lhs, rhs) = line.split_once('=').ok_or_else(|| Error::parse(n, format!("band rule without `=`: `{line}`")))?;
    let value = parse_entry(n, rhs.trim())?;
    let tokens: Vec<&str> = lhs.split_whitespace().collect();
    let pos = |t: &str| -> Result<i64> {
        let v: i64 = t.parse().map_err(|_| Error::parse(n, format!("bad position `{t}`")))?;
        if v == 0 {
            return Err(Error::parse(n, "positions are 1-based or negative from the end"));
        }
        Ok(v)
    };
    match tokens.as_slice() {
        ["diag", k] => {
            let offset: i64 = k.parse().map_err(|_| Error::parse(n, format!("bad diagonal `{k}`")))?;
            Ok(BandRule::Diag { offset, value })
        }
        ["at", r, c] => Ok(BandRule::At { row: EdgePos(pos(r)?), col: EdgePos(pos(c)?), value }),
        _ => Err(Error::parse(n, format!("unknown band rule `{line}`"))),
    }
}

fn parse_int(n: usize, token: &str) -> Result<BigInt> {
    token.parse::<BigInt>().map_err(|_| Error::parse(n, format!("unknown token `{token}`")))
}

pub(crate) fn parse_entry(n: usize, token: &str) -> Result<Entry> {
    if let Some((base, exp)) = token.split_once('^') {
        let base = parse_int(n, base)?;
        if base.is_negative() {
            return Err(Error::parse(n, format!("negative base in `{token}`")));
        }
        let exp = exp.strip_prefix('{').and_then(|e| e.strip_suffix('}')).unwrap_or(exp);
        let exponent = parse_affine(exp).ok_or_else(|| Error::parse(n, format!("bad exponent in `{token}`")))?;
        return Ok(Entry::Pow { base, exponent });
    }
    let v = parse_int(n, token)?;
    if v.is_negative() {
        return Err(Error::parse(n, format!("negative multiplicity `{token}`")));
    }
    Ok(Entry::Lit(v))
}

/// `n`, `3n`, `n+1`, `2n-1`, `4`.
fn parse_affine(s: &str) -> Option<LevelAffine> {
    let s = s.trim();
    let Some(npos) = s.find('n') else {
        return Some(LevelAffine { coef: 0, offset: s.parse().ok()? });
    };
    let coef = match &s[..npos] {
        "" => 1,
        "-" => -1,
        c => c.parse().ok()?,
    };
    let rest = &s[npos + 1..];
    let offset = if rest.is_empty() {
        0
    } else {
        let rest = rest.strip_prefix('+').unwrap_or(rest);
        rest.parse().ok()?
    };
    Some(LevelAffine { coef, offset })
}

/// Canonical text; `parse(&print(d)) == d`.
pub fn print(d: &BratteliDiagram) -> String {
    let mut out = String::from("bdspec v1\n");
    let _ = writeln!(out, "shape: {}", d.shape());
    let hints = d.completions();
    match hints.default {
        Some(CompletionDefault::Auto) => out.push_str("completion: auto\n"),
        Some(CompletionDefault::Weight) => out.push_str("completion: weight\n"),
        None => {}
    }
    for (i, block) in d.blocks().iter().enumerate() {
        let _ = writeln!(out, "matrix {i}:");
        match block {
            MatrixTemplate::Rows(rows) => {
                for row in rows {
                    let line: Vec<String> = row.iter().map(Entry::to_string).collect();
                    let _ = writeln!(out, "{}", line.join(" "));
                }
            }
            MatrixTemplate::Banded(rules) => {
                for rule in rules {
                    let _ = match rule {
                        BandRule::Diag { offset, value } => writeln!(out, "diag {offset} = {value}"),
                        BandRule::At { row, col, value } => writeln!(out, "at {} {} = {value}", row.0, col.0),
                    };
                }
            }
        }
    }
    if let Tail::Periodic(p) = d.tail() {
        let _ = writeln!(out, "tail: periodic {p}");
    }
    for (level, col) in &hints.explicit {
        let col: Vec<String> = col.iter().map(BigInt::to_string).collect();
        let _ = writeln!(out, "complete {level}: {}", col.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::MultiplicityMatrix;

    const POW2: &str = "bdspec v1\nshape: type2\ncompletion: weight\nmatrix 0:\ndiag 0 = 1\nat -2 -1 = 2^{n+1}\nat -1 -1 = 1\ntail: periodic 1\n";

    #[test]
    fn parses_level_indexed_band_template() {
        let d = parse(POW2).unwrap();
        assert_eq!(d.depth(), None);
        assert_eq!(d.matrix(0).unwrap(), MultiplicityMatrix::from_i64(&[&[2], &[1]]));
        assert_eq!(
            d.matrix(2).unwrap(),
            MultiplicityMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 8], &[0, 0, 1]])
        );
        assert_eq!(print(&d), POW2);
    }

    #[test]
    fn literal_blocks_and_completions_round_trip() {
        let text =
            "bdspec v1\nshape: type2\nmatrix 0:\n2\n2\nmatrix 1:\n1 0\n0 1\n0 1\ntail: periodic 1\ncomplete 0: 0 1\n";
        let d = parse(text).unwrap();
        assert_eq!(print(&d), text);
        assert_eq!(parse(&print(&d)).unwrap(), d);
    }

    #[test]
    fn malformed_token_reports_line() {
        let err = parse("bdspec v1\nshape: irregular\nmatrix 0:\n1\nx\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 5, message: "unknown token `x`".into() });
    }

    #[test]
    fn rejects_unknown_header_and_shape() {
        assert!(matches!(parse("bdspec v2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("bdspec v1\nshape: type3\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn rejects_out_of_order_blocks() {
        assert!(matches!(parse("bdspec v1\nshape: irregular\nmatrix 1:\n1\n"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn affine_exponents() {
        assert_eq!(parse_affine("n+1"), Some(LevelAffine { coef: 1, offset: 1 }));
        assert_eq!(parse_affine("2n-3"), Some(LevelAffine { coef: 2, offset: -3 }));
        assert_eq!(parse_affine("5"), Some(LevelAffine { coef: 0, offset: 5 }));
        assert_eq!(parse_affine("n"), Some(LevelAffine { coef: 1, offset: 0 }));
        assert_eq!(parse_affine("x"), None);
    }
}
