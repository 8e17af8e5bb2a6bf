//! Recursive-descent parser for the formula grammar:
//!
//! ```text
//! formula := iff
//! iff     := impl (("<->" | "^") impl)*      left-associative
//! impl    := or (("->" | "<-") or)*          right-associative
//! or      := and ("|" and)*
//! and     := not ("&" not)*
//! not     := "~" not | atom
//! atom    := IDENT | "(" formula ")"
//! ```

use super::{Formula, VarTable};
use crate::error::{Error, ParseError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok<'a> {
    Ident(&'a str),
    Not,
    And,
    Or,
    Arrow,
    BackArrow,
    Iff,
    Xor,
    LParen,
    RParen,
}

impl Tok<'_> {
    fn text(&self) -> &str {
        match self {
            Tok::Ident(s) => s,
            Tok::Not => "~",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Arrow => "->",
            Tok::BackArrow => "<-",
            Tok::Iff => "<->",
            Tok::Xor => "^",
            Tok::LParen => "(",
            Tok::RParen => ")",
        }
    }
}

const OPERAND: &[&str] = &["identifier", "`~`", "`(`"];

fn tokenize(src: &str) -> Result<Vec<(usize, Tok<'_>)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'~' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'^' => Tok::Xor,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'<' if src[i..].starts_with("<->") => {
                i += 2;
                Tok::Iff
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') => {
                i += 1;
                Tok::BackArrow
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                Tok::Ident(&src[start..=i])
            }
            _ => {
                let found = src[start..].chars().next().map(String::from);
                return Err(ParseError {
                    offset: start,
                    expected: vec!["a token"],
                    found,
                }
                .into());
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a, 'v> {
    toks: Vec<(usize, Tok<'a>)>,
    pos: usize,
    end: usize,
    vars: &'v mut VarTable,
    open: Vec<usize>,
}

impl<'a> Parser<'a, '_> {
    fn peek(&self) -> Option<Tok<'a>> {
        self.toks.get(self.pos).map(|&(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |&(o, _)| o)
    }

    fn error(&self, expected: &[&'static str]) -> Error {
        ParseError {
            offset: self.offset(),
            expected: expected.to_vec(),
            found: self.peek().map(|t| t.text().to_owned()),
        }
        .into()
    }

    fn iff(&mut self) -> Result<Formula> {
        let mut left = self.implication()?;
        while let Some(op @ (Tok::Iff | Tok::Xor)) = self.peek() {
            self.pos += 1;
            let right = self.implication()?;
            left = if op == Tok::Iff {
                Formula::iff(left, right)
            } else {
                Formula::xor(left, right)
            };
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Formula> {
        let mut operands = vec![self.disjunction()?];
        let mut ops = Vec::new();
        while let Some(op @ (Tok::Arrow | Tok::BackArrow)) = self.peek() {
            self.pos += 1;
            ops.push(op);
            operands.push(self.disjunction()?);
        }
        let mut acc = operands.pop().unwrap();
        while let Some(op) = ops.pop() {
            let left = operands.pop().unwrap();
            acc = match op {
                Tok::Arrow => Formula::implies(acc, left),
                _ => Formula::implies(left, acc),
            };
        }
        Ok(acc)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut children = vec![self.conjunction()?];
        while self.peek() == Some(Tok::Or) {
            self.pos += 1;
            children.push(self.conjunction()?);
        }
        Ok(Formula::or(children))
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut children = vec![self.negation()?];
        while self.peek() == Some(Tok::And) {
            self.pos += 1;
            children.push(self.negation()?);
        }
        Ok(Formula::and(children))
    }

    fn negation(&mut self) -> Result<Formula> {
        if self.peek() == Some(Tok::Not) {
            self.pos += 1;
            return Ok(Formula::not(self.negation()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Formula::Var(self.vars.intern(name)))
            }
            Some(Tok::LParen) => {
                self.open.push(self.offset());
                self.pos += 1;
                let inner = self.iff()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        self.open.pop();
                        Ok(inner)
                    }
                    None => Err(Error::UnbalancedParens(format!(
                        "`(` at offset {} is never closed",
                        self.open.last().unwrap()
                    ))),
                    Some(_) => Err(self.error(&["`)`", "operator"])),
                }
            }
            _ => Err(self.error(OPERAND)),
        }
    }
}

/// Parses `src` into a formula, interning variables into `vars`.
pub fn parse_with(src: &str, vars: &mut VarTable) -> Result<Formula> {
    if src.trim().is_empty() {
        return Err(Error::EmptyInput);
    }
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.len(),
        vars,
        open: Vec::new(),
    };
    let f = p.iff()?;
    match p.peek() {
        None => Ok(f),
        Some(Tok::RParen) => Err(Error::UnbalancedParens(format!(
            "unmatched `)` at offset {}",
            p.offset()
        ))),
        Some(_) => Err(p.error(&["operator", "end of input"])),
    }
}

/// Parses `src` with a fresh variable table (indices in order of first occurrence).
pub fn parse(src: &str) -> Result<(Formula, VarTable)> {
    let mut vars = VarTable::new();
    let f = parse_with(src, &mut vars)?;
    Ok((f, vars))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::arb_formula;
    use proptest::prelude::*;

    fn v(i: usize) -> Formula {
        Formula::Var(i)
    }

    #[test]
    fn precedence() {
        let (f, vt) = parse("x & ~y | z").unwrap();
        assert_eq!(vt.names(), ["x", "y", "z"]);
        assert_eq!(f, Formula::or(vec![Formula::and(vec![v(0), Formula::not(v(1))]), v(2)]));
    }

    #[test]
    fn iff_of_xor() {
        let (f, _) = parse("(x ^ y) <-> z").unwrap();
        assert_eq!(f, Formula::iff(Formula::xor(v(0), v(1)), v(2)));
    }

    #[test]
    fn incomplete_input() {
        let err = parse("x &").unwrap_err();
        match err {
            Error::Syntax(e) => {
                assert_eq!(e.offset, 3);
                assert_eq!(e.found, None);
                assert_eq!(e.expected, OPERAND);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_and_unbalanced() {
        assert!(matches!(parse("   "), Err(Error::EmptyInput)));
        assert!(matches!(parse("(a & b"), Err(Error::UnbalancedParens(_))));
        assert!(matches!(parse("a & b)"), Err(Error::UnbalancedParens(_))));
        assert!(matches!(
            parse("a $ b"),
            Err(Error::Syntax(ParseError { offset: 2, .. }))
        ));
    }

    #[test]
    fn arrows_keep_direction() {
        let (f, _) = parse("a -> b").unwrap();
        assert_eq!(f, Formula::implies(v(1), v(0)));
        let (g, _) = parse("b <- a").unwrap();
        assert_eq!(g, Formula::implies(v(0), v(1)));
        // right associative
        let (h, _) = parse("a -> b -> c").unwrap();
        assert_eq!(h, Formula::implies(Formula::implies(v(2), v(1)), v(0)));
    }

    #[test]
    fn whitespace_insensitive() {
        assert_eq!(parse("a&~b|c").unwrap(), parse("  a &  ~ b\n| c ").unwrap());
        assert_eq!(parse("x<->y").unwrap().0, Formula::iff(v(0), v(1)));
    }

    #[test]
    fn nary_chains_flatten() {
        let (f, _) = parse("a & b & c | d | e").unwrap();
        assert_eq!(f, Formula::or(vec![Formula::and(vec![v(0), v(1), v(2)]), v(3), v(4)]));
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in arb_formula(6)) {
            let vt = VarTable::from_names(["a", "b", "c", "d", "e", "f"]).unwrap();
            let text = f.display(&vt).to_string();
            let mut vt2 = vt.clone();
            let g = parse_with(&text, &mut vt2).unwrap();
            prop_assert_eq!(g, f);
        }
    }
}
