use std::fmt;

use super::assignment::{words_for, Assignment};
use crate::error::{usage, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    /// 1-based variable index.
    pub var: u32,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: u32) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: u32) -> Self {
        Literal { var, negated: true }
    }

    pub fn from_dimacs(x: i64) -> Self {
        debug_assert!(x != 0);
        Literal {
            var: x.unsigned_abs() as u32,
            negated: x < 0,
        }
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -(self.var as i64)
        } else {
            self.var as i64
        }
    }

    /// 0-based index of the variable.
    #[inline]
    pub fn index(self) -> usize {
        self.var as usize - 1
    }

    #[inline]
    pub fn is_true_under(self, z: &Assignment) -> bool {
        z.get(self.index()) != self.negated
    }

    pub fn negate(self) -> Self {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Literals sorted by variable, no repeats, never both polarities of one variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    lits: Vec<Literal>,
}

impl Clause {
    /// Normalizes `lits`; `None` for a tautology.
    pub fn new(mut lits: Vec<Literal>) -> Option<Self> {
        lits.sort();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var == w[1].var) {
            return None;
        }
        Some(Clause { lits })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn is_satisfied_by(&self, z: &Assignment) -> bool {
        self.lits.iter().any(|l| l.is_true_under(z))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    n: usize,
    clauses: Vec<Clause>,
    k: usize,
}

impl CnfFormula {
    /// Builds a formula from signed DIMACS-style literals; tautologies are dropped.
    pub fn new(n: usize, clauses: Vec<Vec<i64>>) -> Result<Self> {
        let mut out = Vec::with_capacity(clauses.len());
        for c in clauses {
            let mut lits = Vec::with_capacity(c.len());
            for x in c {
                if x == 0 {
                    return usage("literal 0 is not a variable");
                }
                if x.unsigned_abs() as usize > n {
                    return usage(format!("variable {} exceeds n={n}", x.unsigned_abs()));
                }
                lits.push(Literal::from_dimacs(x));
            }
            if let Some(cl) = Clause::new(lits) {
                out.push(cl);
            }
        }
        Ok(Self::from_clauses(n, out))
    }

    pub(crate) fn from_clauses(n: usize, clauses: Vec<Clause>) -> Self {
        debug_assert!(clauses
            .iter()
            .all(|c| c.lits.iter().all(|l| l.var >= 1 && l.index() < n)));
        let k = clauses.iter().map(Clause::len).max().unwrap_or(0);
        CnfFormula { n, clauses, k }
    }

    pub fn trivially_true(n: usize) -> Self {
        Self::from_clauses(n, Vec::new())
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Maximum clause width.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    pub fn evaluate(&self, z: &Assignment) -> Result<bool> {
        if z.len() != self.n {
            return usage(format!("assignment has length {}, formula has n={}", z.len(), self.n));
        }
        Ok(self.satisfies(z))
    }

    /// `evaluate` without the length check.
    pub fn satisfies(&self, z: &Assignment) -> bool {
        debug_assert_eq!(z.len(), self.n);
        self.clauses.iter().all(|c| c.is_satisfied_by(z))
    }

    /// Sets variable `v` (1-based) to `b`: satisfied clauses vanish, false literals are deleted.
    pub fn condition(&self, v: usize, b: bool) -> Result<Self> {
        if v == 0 || v > self.n {
            return usage(format!("variable {v} out of range 1..={}", self.n));
        }
        let var = v as u32;
        let mut out = Vec::with_capacity(self.clauses.len());
        for c in &self.clauses {
            match c.lits.iter().find(|l| l.var == var) {
                Some(l) if l.negated != b => {}
                Some(_) => out.push(Clause {
                    lits: c.lits.iter().copied().filter(|l| l.var != var).collect(),
                }),
                None => out.push(c.clone()),
            }
        }
        Ok(Self::from_clauses(self.n, out))
    }

    /// Flips the polarity of every variable `j` with `z_j = 0`.
    ///
    /// `u` satisfies `self` iff `u ^ !z` satisfies the result.
    pub fn rotate(&self, z: &Assignment) -> Result<Self> {
        if z.len() != self.n {
            return usage(format!("rotation point has length {}, formula has n={}", z.len(), self.n));
        }
        let clauses = self
            .clauses
            .iter()
            .map(|c| {
                let lits = c
                    .lits
                    .iter()
                    .map(|&l| if z.get(l.index()) { l } else { l.negate() })
                    .collect();
                Clause { lits }
            })
            .collect();
        Ok(Self::from_clauses(self.n, clauses))
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.n, self.clauses.len());
        for c in &self.clauses {
            for l in &c.lits {
                s.push_str(&l.to_string());
                s.push(' ');
            }
            s.push_str("0\n");
        }
        s
    }

    pub fn evaluator(&self) -> Evaluator {
        Evaluator::new(self)
    }
}

/// Clause bitmasks over assignment words for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct Evaluator {
    words: usize,
    pos: Vec<u64>,
    neg: Vec<u64>,
    vars: Vec<Vec<usize>>,
}

impl Evaluator {
    fn new(f: &CnfFormula) -> Self {
        let words = words_for(f.n).max(1);
        let m = f.clauses.len();
        let mut pos = vec![0u64; m * words];
        let mut neg = vec![0u64; m * words];
        for (ci, c) in f.clauses.iter().enumerate() {
            for l in &c.lits {
                let i = l.index();
                let slot = ci * words + i / 64;
                if l.negated {
                    neg[slot] |= 1 << (i % 64);
                } else {
                    pos[slot] |= 1 << (i % 64);
                }
            }
        }
        let vars = f
            .clauses
            .iter()
            .map(|c| c.lits.iter().map(|l| l.index()).collect())
            .collect();
        Evaluator {
            words,
            pos,
            neg,
            vars,
        }
    }

    pub fn num_clauses(&self) -> usize {
        self.vars.len()
    }

    #[inline]
    pub fn clause_satisfied(&self, ci: usize, z: &[u64]) -> bool {
        let base = ci * self.words;
        (0..z.len()).any(|w| {
            (z[w] & self.pos[base + w]) | (!z[w] & self.neg[base + w]) != 0
        })
    }

    /// 0-based variables of clause `ci`, in literal order.
    pub fn clause_vars(&self, ci: usize) -> &[usize] {
        &self.vars[ci]
    }

    pub fn first_violated(&self, z: &Assignment) -> Option<usize> {
        let zw = z.words();
        (0..self.num_clauses()).find(|&ci| !self.clause_satisfied(ci, zw))
    }

    pub fn satisfies(&self, z: &Assignment) -> bool {
        self.first_violated(z).is_none()
    }
}

/// Clause masks in index space (variable 1 is the most significant bit); n ≤ 64.
#[derive(Clone, Debug)]
pub struct IndexEvaluator {
    pos: Vec<u64>,
    neg: Vec<u64>,
}

impl IndexEvaluator {
    pub fn new(f: &CnfFormula) -> Self {
        assert!(f.n <= 64);
        let n = f.n;
        let mut pos = Vec::with_capacity(f.clauses.len());
        let mut neg = Vec::with_capacity(f.clauses.len());
        for c in &f.clauses {
            let (mut p, mut q) = (0u64, 0u64);
            for l in &c.lits {
                let bit = 1u64 << (n - 1 - l.index());
                if l.negated {
                    q |= bit;
                } else {
                    p |= bit;
                }
            }
            pos.push(p);
            neg.push(q);
        }
        IndexEvaluator { pos, neg }
    }

    #[inline]
    pub fn satisfies(&self, idx: u64) -> bool {
        self.pos
            .iter()
            .zip(&self.neg)
            .all(|(&p, &q)| (idx & p) | (!idx & q) != 0)
    }
}
