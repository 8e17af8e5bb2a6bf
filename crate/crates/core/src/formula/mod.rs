//! Propositional formulas: AST, variable interning, assignments and the
//! brute-force semantics every compiled artefact is checked against.

mod kb;
mod parser;

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

pub use kb::{parse_kb, parse_kb_with, KnowledgeBase, Rule};
pub use parser::{parse, parse_with};

/// Largest variable count [`truth_table`] will enumerate.
pub const TRUTH_TABLE_LIMIT: usize = 24;

/// Propositional formula over interned variable indices.
///
/// `And`/`Or` carry at least two children. `Implies` keeps the rule
/// direction (`head <- body`) so rule-shaped inputs can be recognised
/// downstream.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(usize),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies { head: Box<Formula>, body: Box<Formula> },
    Iff(Box<Formula>, Box<Formula>),
    Xor(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(index: usize) -> Self {
        Formula::Var(index)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(child: Formula) -> Self {
        Formula::Not(Box::new(child))
    }

    /// Conjunction; a single child is returned unchanged.
    ///
    /// # Panics
    /// If `children` is empty.
    pub fn and(mut children: Vec<Formula>) -> Self {
        assert!(!children.is_empty(), "conjunction needs at least one child");
        if children.len() == 1 {
            children.pop().unwrap()
        } else {
            Formula::And(children)
        }
    }

    /// Disjunction; a single child is returned unchanged.
    ///
    /// # Panics
    /// If `children` is empty.
    pub fn or(mut children: Vec<Formula>) -> Self {
        assert!(!children.is_empty(), "disjunction needs at least one child");
        if children.len() == 1 {
            children.pop().unwrap()
        } else {
            Formula::Or(children)
        }
    }

    /// `head <- body`, i.e. `body -> head`.
    pub fn implies(head: Formula, body: Formula) -> Self {
        Formula::Implies {
            head: Box::new(head),
            body: Box::new(body),
        }
    }

    pub fn iff(left: Formula, right: Formula) -> Self {
        Formula::Iff(Box::new(left), Box::new(right))
    }

    pub fn xor(left: Formula, right: Formula) -> Self {
        Formula::Xor(Box::new(left), Box::new(right))
    }

    /// Largest variable index plus one (0 for no variables).
    pub fn var_bound(&self) -> usize {
        match self {
            Formula::Var(i) => i + 1,
            Formula::Not(c) => c.var_bound(),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().map(Formula::var_bound).max().unwrap_or(0),
            Formula::Implies { head, body } => head.var_bound().max(body.var_bound()),
            Formula::Iff(l, r) | Formula::Xor(l, r) => l.var_bound().max(r.var_bound()),
        }
    }

    /// Sorted, deduplicated variable indices occurring in the formula.
    pub fn vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            Formula::Var(i) => out.push(*i),
            Formula::Not(c) => c.collect_vars(out),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.collect_vars(out)),
            Formula::Implies { head, body } => {
                head.collect_vars(out);
                body.collect_vars(out);
            }
            Formula::Iff(l, r) | Formula::Xor(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Renders the formula in the parser's surface syntax.
    pub fn display<'a>(&'a self, vars: &'a VarTable) -> FormulaDisplay<'a> {
        FormulaDisplay { formula: self, vars }
    }

    // Callers guarantee every index is in range.
    pub(crate) fn eval_bits(&self, bits: &[u8]) -> bool {
        match self {
            Formula::Var(i) => bits[*i] == 1,
            Formula::Not(c) => !c.eval_bits(bits),
            Formula::And(cs) => cs.iter().all(|c| c.eval_bits(bits)),
            Formula::Or(cs) => cs.iter().any(|c| c.eval_bits(bits)),
            Formula::Implies { head, body } => !body.eval_bits(bits) || head.eval_bits(bits),
            Formula::Iff(l, r) => l.eval_bits(bits) == r.eval_bits(bits),
            Formula::Xor(l, r) => l.eval_bits(bits) != r.eval_bits(bits),
        }
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    vars: &'a VarTable,
}

impl FormulaDisplay<'_> {
    fn child(&self, f: &mut fmt::Formatter<'_>, child: &Formula) -> fmt::Result {
        match child {
            Formula::Var(_) | Formula::Not(_) => write!(f, "{}", child.display(self.vars)),
            _ => write!(f, "({})", child.display(self.vars)),
        }
    }

    fn joined(&self, f: &mut fmt::Formatter<'_>, children: &[Formula], op: &str) -> fmt::Result {
        for (k, c) in children.iter().enumerate() {
            if k > 0 {
                write!(f, " {op} ")?;
            }
            self.child(f, c)?;
        }
        Ok(())
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.formula {
            Formula::Var(i) => match self.vars.name(*i) {
                Some(name) => f.write_str(name),
                None => write!(f, "_v{i}"),
            },
            Formula::Not(c) => {
                f.write_str("~")?;
                self.child(f, c)
            }
            Formula::And(cs) => self.joined(f, cs, "&"),
            Formula::Or(cs) => self.joined(f, cs, "|"),
            Formula::Implies { head, body } => {
                self.child(f, head)?;
                f.write_str(" <- ")?;
                self.child(f, body)
            }
            Formula::Iff(l, r) => {
                self.child(f, l)?;
                f.write_str(" <-> ")?;
                self.child(f, r)
            }
            Formula::Xor(l, r) => {
                self.child(f, l)?;
                f.write_str(" ^ ")?;
                self.child(f, r)
            }
        }
    }
}

/// Bidirectional name <-> dense index map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl VarTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a table from names in index order.
    pub fn from_names<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut table = VarTable::new();
        for name in names {
            let name = name.into();
            if !is_identifier(&name) {
                return Err(Error::InvalidArgument(format!("invalid variable name `{name}`")));
            }
            if table.index.contains_key(&name) {
                return Err(Error::InvalidArgument(format!("duplicate variable `{name}`")));
            }
            table.intern(&name);
        }
        Ok(table)
    }

    /// Returns the index of `name`, allocating the next one if unseen.
    pub fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), i);
        i
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn lookup(&self, name: &str) -> Result<usize> {
        self.get(name).ok_or_else(|| Error::UnknownVariable(name.to_owned()))
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names.get(index).map(String::as_str)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Truth values for every variable; 1 = True, 0 = False.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    bits: Vec<u8>,
}

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Assignment { bits: vec![0; n] }
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidArgument(format!("bit value {b} is not 0 or 1")));
        }
        Ok(Assignment { bits })
    }

    pub fn from_bools(bools: &[bool]) -> Self {
        Assignment {
            bits: bools.iter().map(|&b| b as u8).collect(),
        }
    }

    /// The `k`-th assignment of `n` variables in lexicographic order
    /// (variable 0 is the most significant bit).
    pub fn from_index(n: usize, k: u64) -> Self {
        Assignment {
            bits: (0..n).map(|i| ((k >> (n - 1 - i)) & 1) as u8).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i] == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value as u8;
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.bits
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Truth value (1 or 0) of `formula` under `assignment`.
pub fn evaluate(formula: &Formula, assignment: &Assignment, vars: &VarTable) -> Result<u8> {
    if assignment.len() != vars.len() {
        return Err(Error::DimensionMismatch {
            expected: vars.len(),
            got: assignment.len(),
        });
    }
    let bound = formula.var_bound();
    if bound > vars.len() {
        return Err(Error::VariableOutOfRange {
            index: bound - 1,
            len: vars.len(),
        });
    }
    Ok(formula.eval_bits(assignment.bits()) as u8)
}

/// Every assignment over `vars`, in lexicographic order, with its truth value.
pub fn truth_table(formula: &Formula, vars: &VarTable) -> Result<Vec<(Assignment, u8)>> {
    let n = vars.len();
    if n > TRUTH_TABLE_LIMIT {
        return Err(Error::EnumerationGuard {
            vars: n,
            limit: TRUTH_TABLE_LIMIT,
        });
    }
    let bound = formula.var_bound();
    if bound > n {
        return Err(Error::VariableOutOfRange {
            index: bound - 1,
            len: n,
        });
    }
    Ok((0..1u64 << n)
        .map(|k| {
            let a = Assignment::from_index(n, k);
            let s = formula.eval_bits(a.bits()) as u8;
            (a, s)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor_iff() -> (Formula, VarTable) {
        parse("(x ^ y) <-> z").unwrap()
    }

    #[test]
    fn xor_iff_rows() {
        let (f, vt) = xor_iff();
        let a = Assignment::from_bits(vec![1, 1, 0]).unwrap();
        assert_eq!(evaluate(&f, &a, &vt).unwrap(), 1);
        let a = Assignment::from_bits(vec![0, 0, 1]).unwrap();
        assert_eq!(evaluate(&f, &a, &vt).unwrap(), 0);
    }

    #[test]
    fn truth_table_matches_reference_column() {
        let (f, vt) = xor_iff();
        let s: Vec<u8> = truth_table(&f, &vt).unwrap().into_iter().map(|(_, s)| s).collect();
        assert_eq!(s, vec![1, 0, 0, 1, 0, 1, 1, 0]);
    }

    #[test]
    fn single_variable_table() {
        let (f, vt) = parse("x").unwrap();
        let rows = truth_table(&f, &vt).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0].0.bits(), rows[0].1), (&[0u8][..], 0));
        assert_eq!((rows[1].0.bits(), rows[1].1), (&[1u8][..], 1));
    }

    #[test]
    fn enumeration_guard() {
        let src: Vec<String> = (0..25).map(|i| format!("v{i}")).collect();
        let (f, vt) = parse(&src.join(" & ")).unwrap();
        assert!(matches!(
            truth_table(&f, &vt),
            Err(Error::EnumerationGuard { vars: 25, .. })
        ));
    }

    #[test]
    fn evaluate_rejects_bad_inputs() {
        let (f, vt) = parse("a & b").unwrap();
        let short = Assignment::zeros(1);
        assert!(matches!(
            evaluate(&f, &short, &vt),
            Err(Error::DimensionMismatch { .. })
        ));
        let small = VarTable::from_names(["a"]).unwrap();
        assert!(matches!(
            evaluate(&f, &Assignment::zeros(1), &small),
            Err(Error::VariableOutOfRange { .. })
        ));
    }

    #[test]
    fn lexicographic_index() {
        assert_eq!(Assignment::from_index(3, 6).bits(), &[1, 1, 0]);
        assert_eq!(Assignment::from_index(3, 1).bits(), &[0, 0, 1]);
    }

    #[test]
    fn var_table_rejects_duplicates() {
        assert!(VarTable::from_names(["a", "a"]).is_err());
        assert!(VarTable::from_names(["1a"]).is_err());
    }
}
