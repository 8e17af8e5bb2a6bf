//! Conversion of formulas into (strict) disjunctive normal form.
//!
//! A strict DNF has at most one true conjunctive clause under any
//! assignment, which is what makes a one-hidden-unit-per-clause energy
//! encoding exact. General formulas go through a plain DNF expansion
//! followed by full-DNF expansion of each group of mutually overlapping
//! clauses; rule-shaped implications and single disjunctive clauses have
//! linear-size encodings via variable elimination.

mod clause;
mod text;

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::formula::{Formula, KnowledgeBase};

pub use clause::{Clause, Literal};

/// Default cap on intermediate clause counts.
pub const DEFAULT_CLAUSE_CAP: usize = 1 << 20;

/// Largest variable count for which strictness is checked by enumeration.
pub const STRICTNESS_CHECK_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy)]
pub struct NormalizeOptions {
    pub clause_cap: usize,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions {
            clause_cap: DEFAULT_CLAUSE_CAP,
        }
    }
}

/// Disjunction of conjunctive clauses over `var_count` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseSet {
    clauses: Vec<Clause>,
    var_count: usize,
    strict: bool,
    dropped_contradictions: usize,
}

impl ClauseSet {
    /// Builds a non-strict set, removing duplicates but keeping first-occurrence order.
    pub fn from_clauses(var_count: usize, clauses: Vec<Clause>) -> Self {
        let mut seen = HashSet::with_capacity(clauses.len());
        let clauses: Vec<Clause> = clauses.into_iter().filter(|c| seen.insert(c.clone())).collect();
        let var_count = clauses.iter().map(Clause::var_bound).fold(var_count, usize::max);
        ClauseSet {
            clauses,
            var_count,
            strict: false,
            dropped_contradictions: 0,
        }
    }

    /// Builds a set flagged strict after checking that every pair of
    /// clauses contains complementary literals.
    pub fn from_exclusive(var_count: usize, clauses: Vec<Clause>) -> Result<Self> {
        let cs = ClauseSet::from_clauses(var_count, clauses);
        for (i, a) in cs.clauses.iter().enumerate() {
            if let Some(b) = cs.clauses[i + 1..].iter().find(|b| a.overlaps(b)) {
                return Err(Error::InvalidArgument(format!(
                    "clauses `{a}` and `{b}` can hold together"
                )));
            }
        }
        Ok(ClauseSet { strict: true, ..cs })
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    /// Flagged strict by the construction that produced it.
    pub fn is_strict(&self) -> bool {
        self.strict
    }

    /// Contradictory clauses discarded while building this set.
    pub fn dropped_contradictions(&self) -> usize {
        self.dropped_contradictions
    }

    /// Widens the variable range (never narrows it).
    pub fn with_var_count(mut self, n: usize) -> Self {
        self.var_count = self.var_count.max(n);
        self
    }

    /// Sorts clauses into canonical order.
    pub fn canonicalize(&mut self) {
        self.clauses.sort();
    }

    pub fn true_count(&self, bits: &[u8]) -> usize {
        self.clauses.iter().filter(|c| c.holds(bits)).count()
    }

    pub fn holds(&self, bits: &[u8]) -> bool {
        self.clauses.iter().any(|c| c.holds(bits))
    }

    /// Exhaustively checks that no assignment makes two clauses true.
    pub fn verify_strict(&self) -> Result<bool> {
        let n = self.var_count;
        if n > STRICTNESS_CHECK_LIMIT {
            return Err(Error::EnumerationGuard {
                vars: n,
                limit: STRICTNESS_CHECK_LIMIT,
            });
        }
        let mut bits = vec![0u8; n];
        for k in 0..1u64 << n {
            fill_bits(&mut bits, k);
            if self.true_count(&bits) > 1 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn strict(var_count: usize, clauses: Vec<Clause>, dropped: usize) -> Self {
        ClauseSet {
            clauses,
            var_count,
            strict: true,
            dropped_contradictions: dropped,
        }
    }
}

/// A clause with its weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedClause {
    pub weight: f64,
    pub clause: Clause,
}

/// Weighted clauses with no duplicate clause.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightedClauseSet {
    entries: Vec<WeightedClause>,
    var_count: usize,
}

impl WeightedClauseSet {
    /// Every clause of `cs` with the same weight.
    pub fn uniform(cs: &ClauseSet, weight: f64) -> Self {
        WeightedClauseSet {
            entries: cs
                .clauses()
                .iter()
                .map(|c| WeightedClause {
                    weight,
                    clause: c.clone(),
                })
                .collect(),
            var_count: cs.var_count(),
        }
    }

    /// Builds a set from raw pairs, merging duplicates by summing weights.
    pub fn from_pairs(var_count: usize, pairs: Vec<(f64, Clause)>) -> Result<Self> {
        let mut out = WeightedClauseSet {
            entries: Vec::with_capacity(pairs.len()),
            var_count,
        };
        for (weight, clause) in pairs {
            if !weight.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite clause weight {weight}")));
            }
            out.var_count = out.var_count.max(clause.var_bound());
            match out.entries.iter_mut().find(|e| e.clause == clause) {
                Some(e) => e.weight += weight,
                None => out.entries.push(WeightedClause { weight, clause }),
            }
        }
        Ok(out)
    }

    pub fn entries(&self) -> &[WeightedClause] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn with_var_count(mut self, n: usize) -> Self {
        self.var_count = self.var_count.max(n);
        self
    }

    /// Sum of the weights of the clauses true under `bits`.
    pub fn score(&self, bits: &[u8]) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.clause.holds(bits))
            .map(|e| e.weight)
            .sum()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MergeOptions {
    /// Fold a clause into any clause whose literals are a strict subset of its own.
    pub subsumption: bool,
}

impl Default for MergeOptions {
    fn default() -> Self {
        MergeOptions { subsumption: true }
    }
}

/// Merges weighted clause sets: identical clauses are combined with
/// summed weights, then every clause subsumed by a more general one is
/// removed and its weight added to the general clause.
///
/// Subsumption is syntactic: `a` subsumes `a & b`. Clauses keep the order
/// of their first appearance.
pub fn merge_weighted(sets: &[(f64, ClauseSet)]) -> Result<WeightedClauseSet> {
    merge_weighted_with(sets, MergeOptions::default())
}

pub fn merge_weighted_with(sets: &[(f64, ClauseSet)], opts: MergeOptions) -> Result<WeightedClauseSet> {
    let var_count = sets.iter().map(|(_, cs)| cs.var_count()).max().unwrap_or(0);
    let pairs = sets
        .iter()
        .flat_map(|(w, cs)| cs.clauses().iter().map(move |c| (*w, c.clone())))
        .collect();
    let mut merged = WeightedClauseSet::from_pairs(var_count, pairs)?;
    if opts.subsumption {
        absorb_subsumed(&mut merged.entries);
    }
    Ok(merged)
}

/// Converts every rule of a knowledge base to SDNF and merges the results.
/// Rules without an explicit weight take `default_weight`.
pub fn kb_clauses(kb: &KnowledgeBase, default_weight: f64, opts: MergeOptions) -> Result<WeightedClauseSet> {
    let sets = kb
        .rules
        .iter()
        .map(|r| {
            let cs = to_sdnf(&r.formula).map_err(|e| e.at_line(r.line))?;
            Ok((r.weight.unwrap_or(default_weight), cs))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(merge_weighted_with(&sets, opts)?.with_var_count(kb.vars.len()))
}

fn absorb_subsumed(entries: &mut Vec<WeightedClause>) {
    loop {
        let hit = entries.iter().enumerate().find_map(|(b, sub)| {
            entries
                .iter()
                .position(|gen| gen.clause != sub.clause && gen.clause.is_subset_of(&sub.clause))
                .map(|a| (a, b))
        });
        let Some((general, subsumed)) = hit else { break };
        let w = entries[subsumed].weight;
        entries[general].weight += w;
        entries.remove(subsumed);
    }
}

/// Strict clause set equivalent to the disjunction `lits[0] | lits[1] | ...`.
///
/// Literals are eliminated left to right: clause `i` is the negation of
/// literals `0..i` conjoined with literal `i`.
pub fn eliminate_disjunction(lits: &[Literal]) -> Result<ClauseSet> {
    if lits.is_empty() {
        return Err(Error::InvalidArgument("empty disjunction".into()));
    }
    let var_count = lits.iter().map(|l| l.var + 1).max().unwrap();
    let mut clauses = Vec::with_capacity(lits.len());
    let mut dropped = 0;
    for (i, &lit) in lits.iter().enumerate() {
        let conj = lits[..i].iter().map(|l| l.negate()).chain(std::iter::once(lit));
        match Clause::from_literals(conj) {
            Some(c) => clauses.push(c),
            None => dropped += 1,
        }
    }
    Ok(ClauseSet::strict(var_count, clauses, dropped))
}

/// Strict clause set for the rule `head <- body[0] & body[1] & ...`.
///
/// The first clause is the head conjoined with the body; the rest
/// eliminate the negated body literals in order, giving `|body| + 1`
/// clauses. An empty body yields the unit clause `{head}`.
pub fn implication_sdnf(head: Literal, body: &[Literal]) -> Result<ClauseSet> {
    let mut seen: Vec<Literal> = Vec::with_capacity(body.len());
    for &l in body {
        if l.var == head.var {
            return Err(Error::InvalidArgument("head variable occurs in the rule body".into()));
        }
        if seen.contains(&l.negate()) {
            return Err(Error::InvalidArgument("rule body is contradictory".into()));
        }
        if !seen.contains(&l) {
            seen.push(l);
        }
    }
    let var_count = seen.iter().chain([&head]).map(|l| l.var + 1).max().unwrap();
    let first = Clause::from_literals(std::iter::once(head).chain(seen.iter().copied())).unwrap();
    if seen.is_empty() {
        return Ok(ClauseSet::strict(var_count, vec![first], 0));
    }
    let negated: Vec<Literal> = seen.iter().map(|l| l.negate()).collect();
    let rest = eliminate_disjunction(&negated)?;
    let mut clauses = Vec::with_capacity(seen.len() + 1);
    clauses.push(first);
    clauses.extend(rest.clauses);
    Ok(ClauseSet::strict(var_count, clauses, rest.dropped_contradictions))
}

/// A DNF truth-table-equivalent to `f` (not necessarily strict).
pub fn to_dnf(f: &Formula) -> Result<ClauseSet> {
    to_dnf_with(f, &NormalizeOptions::default())
}

pub fn to_dnf_with(f: &Formula, opts: &NormalizeOptions) -> Result<ClauseSet> {
    let mut b = DnfBuilder {
        cap: opts.clause_cap,
        dropped: 0,
    };
    let mut clauses = b.dnf(f, true)?;
    absorb(&mut clauses);
    clauses.sort();
    Ok(ClauseSet {
        clauses,
        var_count: f.var_bound(),
        strict: false,
        dropped_contradictions: b.dropped,
    })
}

/// A strict DNF equivalent to `f`.
pub fn to_sdnf(f: &Formula) -> Result<ClauseSet> {
    to_sdnf_with(f, &NormalizeOptions::default())
}

pub fn to_sdnf_with(f: &Formula, opts: &NormalizeOptions) -> Result<ClauseSet> {
    if let Some((head, body)) = as_rule(f) {
        if let Ok(cs) = implication_sdnf(head, &body) {
            return Ok(cs.with_var_count(f.var_bound()));
        }
    }
    let dnf = to_dnf_with(f, opts)?;
    let mut out = strictify(&dnf, opts.clause_cap)?;
    out.dropped_contradictions = dnf.dropped_contradictions;
    Ok(out)
}

/// Expands every group of mutually overlapping clauses into full DNF over
/// the group's variables. Clauses in different groups never share a model.
fn strictify(dnf: &ClauseSet, cap: usize) -> Result<ClauseSet> {
    let clauses = dnf.clauses();
    let n = clauses.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if clauses[i].overlaps(&clauses[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let root = find(&mut parent, i);
        groups[root].push(i);
    }

    let mut out = Vec::new();
    let mut bits = vec![0u8; dnf.var_count()];
    for group in groups.into_iter().filter(|g| !g.is_empty()) {
        if group.len() == 1 {
            out.push(clauses[group[0]].clone());
            continue;
        }
        let mut vars: Vec<usize> = group.iter().flat_map(|&i| clauses[i].vars()).collect();
        vars.sort_unstable();
        vars.dedup();
        if vars.len() >= usize::BITS as usize - 1 || (1usize << vars.len()) > cap {
            return Err(Error::ClauseBlowUp { cap });
        }
        for k in 0..1u64 << vars.len() {
            for (pos, &v) in vars.iter().enumerate() {
                bits[v] = ((k >> (vars.len() - 1 - pos)) & 1) as u8;
            }
            if group.iter().any(|&i| clauses[i].holds(&bits)) {
                let (p, q): (Vec<usize>, Vec<usize>) = vars.iter().partition(|&&v| bits[v] == 1);
                out.push(Clause::new(p, q).unwrap());
            }
            if out.len() > cap {
                return Err(Error::ClauseBlowUp { cap });
            }
        }
    }
    out.sort();
    Ok(ClauseSet::strict(dnf.var_count(), out, 0))
}

/// Recognises `head <- l1 & l2 & ...` with literal head and literal body.
fn as_rule(f: &Formula) -> Option<(Literal, Vec<Literal>)> {
    let Formula::Implies { head, body } = f else {
        return None;
    };
    let head = as_literal(head)?;
    let body = match body.as_ref() {
        Formula::And(cs) => cs.iter().map(as_literal).collect::<Option<Vec<_>>>()?,
        other => vec![as_literal(other)?],
    };
    Some((head, body))
}

fn as_literal(f: &Formula) -> Option<Literal> {
    match f {
        Formula::Var(i) => Some(Literal::pos(*i)),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Var(i) => Some(Literal::neg(*i)),
            _ => None,
        },
        _ => None,
    }
}

struct DnfBuilder {
    cap: usize,
    dropped: usize,
}

impl DnfBuilder {
    fn dnf(&mut self, f: &Formula, positive: bool) -> Result<Vec<Clause>> {
        match f {
            Formula::Var(i) => Ok(vec![Clause::unit(Literal { var: *i, positive })]),
            Formula::Not(c) => self.dnf(c, !positive),
            Formula::And(cs) if positive => self.product_all(cs, true),
            Formula::And(cs) => self.union_all(cs, false),
            Formula::Or(cs) if positive => self.union_all(cs, true),
            Formula::Or(cs) => self.product_all(cs, false),
            Formula::Implies { head, body } => {
                if positive {
                    let a = self.dnf(body, false)?;
                    let b = self.dnf(head, true)?;
                    self.union(a, b)
                } else {
                    let a = self.dnf(body, true)?;
                    let b = self.dnf(head, false)?;
                    self.product(&a, &b)
                }
            }
            Formula::Iff(l, r) => self.biconditional(l, r, positive),
            Formula::Xor(l, r) => self.biconditional(l, r, !positive),
        }
    }

    fn biconditional(&mut self, l: &Formula, r: &Formula, same: bool) -> Result<Vec<Clause>> {
        let lp = self.dnf(l, true)?;
        let ln = self.dnf(l, false)?;
        let rp = self.dnf(r, true)?;
        let rn = self.dnf(r, false)?;
        let (a, b) = if same {
            (self.product(&lp, &rp)?, self.product(&ln, &rn)?)
        } else {
            (self.product(&lp, &rn)?, self.product(&ln, &rp)?)
        };
        self.union(a, b)
    }

    fn product_all(&mut self, cs: &[Formula], positive: bool) -> Result<Vec<Clause>> {
        let mut acc = self.dnf(&cs[0], positive)?;
        for c in &cs[1..] {
            let next = self.dnf(c, positive)?;
            acc = self.product(&acc, &next)?;
        }
        Ok(acc)
    }

    fn union_all(&mut self, cs: &[Formula], positive: bool) -> Result<Vec<Clause>> {
        let mut acc = Vec::new();
        for c in cs {
            let next = self.dnf(c, positive)?;
            acc = self.union(acc, next)?;
        }
        Ok(acc)
    }

    fn product(&mut self, a: &[Clause], b: &[Clause]) -> Result<Vec<Clause>> {
        let mut out = Vec::with_capacity(a.len() * b.len());
        for x in a {
            for y in b {
                match x.conjoin(y) {
                    Some(c) => out.push(c),
                    None => self.dropped += 1,
                }
            }
            if out.len() > self.cap {
                return Err(Error::ClauseBlowUp { cap: self.cap });
            }
        }
        out.sort();
        out.dedup();
        if out.len() <= 4096 {
            absorb(&mut out);
        }
        Ok(out)
    }

    fn union(&mut self, mut a: Vec<Clause>, b: Vec<Clause>) -> Result<Vec<Clause>> {
        a.extend(b);
        a.sort();
        a.dedup();
        if a.len() > self.cap {
            return Err(Error::ClauseBlowUp { cap: self.cap });
        }
        Ok(a)
    }
}

/// Drops clauses implied by a more general clause in the same disjunction.
fn absorb(clauses: &mut Vec<Clause>) {
    if clauses.len() > 10_000 {
        return;
    }
    clauses.sort();
    clauses.dedup();
    let keep: Vec<bool> = clauses
        .iter()
        .enumerate()
        .map(|(i, c)| {
            !clauses
                .iter()
                .enumerate()
                .any(|(j, d)| j != i && d.len() < c.len() && d.is_subset_of(c))
        })
        .collect();
    let mut k = 0;
    clauses.retain(|_| {
        k += 1;
        keep[k - 1]
    });
}

pub(crate) fn fill_bits(bits: &mut [u8], k: u64) {
    let n = bits.len();
    for (i, b) in bits.iter_mut().enumerate() {
        *b = ((k >> (n - 1 - i)) & 1) as u8;
    }
}
