use std::fmt;

use super::assignment::Assignment;
use crate::error::{usage, Result};

/// Ordered set (`distinct`) or multiset of hypercube points, kept in insertion order.
#[derive(Clone, PartialEq, Eq)]
pub struct SolutionCollection {
    members: Vec<Assignment>,
    distinct: bool,
}

impl SolutionCollection {
    pub fn new_set() -> Self {
        SolutionCollection {
            members: Vec::new(),
            distinct: true,
        }
    }

    pub fn new_multiset() -> Self {
        SolutionCollection {
            members: Vec::new(),
            distinct: false,
        }
    }

    pub fn from_members(members: Vec<Assignment>, distinct: bool) -> Result<Self> {
        let mut c = SolutionCollection {
            members: Vec::with_capacity(members.len()),
            distinct,
        };
        for m in members {
            c.push(m)?;
        }
        Ok(c)
    }

    pub fn singleton(a: Assignment) -> Self {
        SolutionCollection {
            members: vec![a],
            distinct: true,
        }
    }

    pub fn is_distinct(&self) -> bool {
        self.distinct
    }

    pub fn members(&self) -> &[Assignment] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Assignment> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Common dimension of the members, if any.
    pub fn dim(&self) -> Option<usize> {
        self.members.first().map(Assignment::len)
    }

    pub fn contains(&self, a: &Assignment) -> bool {
        self.members.contains(a)
    }

    pub fn push(&mut self, a: Assignment) -> Result<()> {
        if let Some(n) = self.dim() {
            if a.len() != n {
                return usage(format!("member of length {} in a collection of length {n}", a.len()));
            }
        }
        if self.distinct && self.contains(&a) {
            return usage(format!("duplicate member {a} in a set"));
        }
        self.members.push(a);
        Ok(())
    }

    /// Replaces member `i`; keeps the set invariant.
    pub fn replace(&mut self, i: usize, a: Assignment) -> Result<()> {
        if self.distinct && self.members.iter().enumerate().any(|(j, m)| j != i && *m == a) {
            return usage(format!("duplicate member {a} in a set"));
        }
        self.members[i] = a;
        Ok(())
    }

    /// Copy with member `i` removed.
    pub fn without(&self, i: usize) -> Self {
        let mut members = self.members.clone();
        members.remove(i);
        SolutionCollection {
            members,
            distinct: self.distinct,
        }
    }

    /// Copy with members sorted lexicographically.
    pub fn sorted(&self) -> Self {
        let mut members = self.members.clone();
        members.sort();
        SolutionCollection {
            members,
            distinct: self.distinct,
        }
    }

    pub fn min_distance_to(&self, x: &Assignment) -> Option<usize> {
        self.members.iter().map(|m| m.distance(x)).min()
    }

    pub fn sum_distance_to(&self, x: &Assignment) -> usize {
        self.members.iter().map(|m| m.distance(x)).sum()
    }
}

impl fmt::Debug for SolutionCollection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.members.iter().map(|m| m.to_string()).collect();
        let (l, r) = if self.distinct { ("{", "}") } else { ("{{", "}}") };
        write!(f, "{l}{}{r}", names.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DispersionObjective {
    MinPd,
    SumPd,
    SumPdDistinct,
}

impl DispersionObjective {
    pub fn needs_distinct(self) -> bool {
        !matches!(self, DispersionObjective::SumPd)
    }

    pub fn value(self, m: &Measures) -> u64 {
        match self {
            DispersionObjective::MinPd => m.min_pd,
            DispersionObjective::SumPd | DispersionObjective::SumPdDistinct => m.sum_pd,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum WeightConstraint {
    #[default]
    None,
    AtLeast(usize),
    AtMost(usize),
}

impl WeightConstraint {
    pub fn admits(self, z: &Assignment) -> bool {
        match self {
            WeightConstraint::None => true,
            WeightConstraint::AtLeast(w) => z.weight() >= w,
            WeightConstraint::AtMost(w) => z.weight() <= w,
        }
    }

    pub fn validate(self, n: usize) -> Result<()> {
        match self {
            WeightConstraint::AtLeast(w) | WeightConstraint::AtMost(w) if w > n => {
                usage(format!("weight bound {w} exceeds n={n}"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measures {
    /// n+1 for a singleton.
    pub min_pd: u64,
    pub sum_pd: u64,
    pub min_to_x: Option<u64>,
    pub sum_to_x: Option<u64>,
}

pub fn dispersion_measures(s: &SolutionCollection, x: Option<&Assignment>) -> Result<Measures> {
    let Some(n) = s.dim() else {
        return usage("dispersion measures of an empty collection");
    };
    if let Some(x) = x {
        if x.len() != n {
            return usage(format!("point of length {} against collection of length {n}", x.len()));
        }
    }
    let m = s.members();
    let mut min_pd = n as u64 + 1;
    let mut sum_pd = 0u64;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let d = m[i].distance(&m[j]) as u64;
            min_pd = min_pd.min(d);
            sum_pd += d;
        }
    }
    Ok(Measures {
        min_pd,
        sum_pd,
        min_to_x: x.map(|x| s.min_distance_to(x).unwrap() as u64),
        sum_to_x: x.map(|x| s.sum_distance_to(x) as u64),
    })
}
