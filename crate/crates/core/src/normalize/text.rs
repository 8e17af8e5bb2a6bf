//! Line format: one clause per line, literals `x3` / `!x3`, optional
//! `weight :` prefix, e.g. `10 : x1 !x2`.

use std::fmt;
use std::str::FromStr;

use super::{Clause, ClauseSet, Literal, WeightedClauseSet};
use crate::error::{Error, Result};

impl fmt::Display for ClauseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.clauses() {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Display for WeightedClauseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in self.entries() {
            writeln!(f, "{} : {}", e.weight, e.clause)?;
        }
        Ok(())
    }
}

fn parse_literal(tok: &str) -> Result<Literal> {
    let (positive, rest) = match tok.strip_prefix('!') {
        Some(r) => (false, r),
        None => (true, tok),
    };
    let var = rest
        .strip_prefix('x')
        .and_then(|d| d.parse::<usize>().ok())
        .ok_or_else(|| Error::InvalidArgument(format!("bad literal `{tok}`")))?;
    Ok(Literal { var, positive })
}

fn parse_line(line: &str) -> Result<(Option<f64>, Clause)> {
    let (weight, body) = match line.split_once(':') {
        Some((w, rest)) => {
            let w: f64 = w
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad weight `{}`", w.trim())))?;
            (Some(w), rest)
        }
        None => (None, line),
    };
    let lits = body.split_whitespace().map(parse_literal).collect::<Result<Vec<_>>>()?;
    let clause = Clause::from_literals(lits).ok_or_else(|| Error::InvalidArgument("contradictory clause".into()))?;
    Ok((weight, clause))
}

fn lines(src: &str) -> impl Iterator<Item = (usize, &str)> {
    src.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

impl FromStr for ClauseSet {
    type Err = Error;

    fn from_str(src: &str) -> Result<Self> {
        let mut clauses = Vec::new();
        for (line, text) in lines(src) {
            let (w, c) = parse_line(text).map_err(|e| e.at_line(line))?;
            if w.is_some() {
                return Err(Error::InvalidArgument("unexpected weight in unweighted clause set".into()).at_line(line));
            }
            clauses.push(c);
        }
        Ok(ClauseSet::from_clauses(0, clauses))
    }
}

impl FromStr for WeightedClauseSet {
    type Err = Error;

    /// Lines without a weight get weight 1.
    fn from_str(src: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (line, text) in lines(src) {
            let (w, c) = parse_line(text).map_err(|e| e.at_line(line))?;
            pairs.push((w.unwrap_or(1.0), c));
        }
        WeightedClauseSet::from_pairs(0, pairs)
    }
}
