use std::fmt;

/// A variable or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, positive: false }
    }

    pub fn negate(self) -> Self {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }

    pub fn holds(self, bits: &[u8]) -> bool {
        (bits[self.var] == 1) == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "x{}", self.var)
        } else {
            write!(f, "!x{}", self.var)
        }
    }
}

/// Conjunction of literals: positive indices `pos`, negated indices `neg`.
///
/// Both lists are sorted and disjoint. The derived ordering (by `pos`, then
/// `neg`) is the canonical clause order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    pos: Vec<usize>,
    neg: Vec<usize>,
}

impl Clause {
    /// Returns `None` when some variable occurs both positively and negatively.
    pub fn new(mut pos: Vec<usize>, mut neg: Vec<usize>) -> Option<Self> {
        pos.sort_unstable();
        pos.dedup();
        neg.sort_unstable();
        neg.dedup();
        if intersects(&pos, &neg) {
            return None;
        }
        Some(Clause { pos, neg })
    }

    pub fn from_literals<I: IntoIterator<Item = Literal>>(lits: I) -> Option<Self> {
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for l in lits {
            if l.positive {
                pos.push(l.var);
            } else {
                neg.push(l.var);
            }
        }
        Clause::new(pos, neg)
    }

    pub fn unit(lit: Literal) -> Self {
        Clause::from_literals([lit]).unwrap()
    }

    pub fn pos(&self) -> &[usize] {
        &self.pos
    }

    pub fn neg(&self) -> &[usize] {
        &self.neg
    }

    pub fn len(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty()
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.pos
            .iter()
            .map(|&v| Literal::pos(v))
            .chain(self.neg.iter().map(|&v| Literal::neg(v)))
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.pos.iter().chain(&self.neg).copied()
    }

    pub fn var_bound(&self) -> usize {
        self.vars().max().map_or(0, |v| v + 1)
    }

    pub fn holds(&self, bits: &[u8]) -> bool {
        self.pos.iter().all(|&v| bits[v] == 1) && self.neg.iter().all(|&v| bits[v] == 0)
    }

    /// Conjunction of two clauses, `None` if contradictory.
    pub fn conjoin(&self, other: &Clause) -> Option<Clause> {
        let pos = union(&self.pos, &other.pos);
        let neg = union(&self.neg, &other.neg);
        if intersects(&pos, &neg) {
            None
        } else {
            Some(Clause { pos, neg })
        }
    }

    /// Every literal of `self` also occurs in `other`.
    pub fn is_subset_of(&self, other: &Clause) -> bool {
        is_sorted_subset(&self.pos, &other.pos) && is_sorted_subset(&self.neg, &other.neg)
    }

    /// Some assignment satisfies both clauses.
    pub fn overlaps(&self, other: &Clause) -> bool {
        !intersects(&self.pos, &other.neg) && !intersects(&self.neg, &other.pos)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.literals().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

fn intersects(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn is_sorted_subset(small: &[usize], big: &[usize]) -> bool {
    let mut j = 0;
    for &x in small {
        while j < big.len() && big[j] < x {
            j += 1;
        }
        if j == big.len() || big[j] != x {
            return false;
        }
        j += 1;
    }
    true
}
