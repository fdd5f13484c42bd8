//! Exhaustive oracles. Everything here enumerates the whole cube and serves as ground truth.

use super::assignment::Assignment;
use super::collection::{DispersionObjective, SolutionCollection, WeightConstraint};
use super::formula::{CnfFormula, IndexEvaluator};
use crate::error::{usage, Error, Result};

pub const DEFAULT_ENUMERATION_LIMIT: usize = 24;

/// Optimal value together with a witness attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Optimum {
    pub value: u64,
    pub witness: SolutionCollection,
}

fn check_limit(f: &CnfFormula, limit: usize) -> Result<()> {
    if f.num_vars() > limit.min(63) {
        return Err(Error::Capability(format!(
            "n={} exceeds the enumeration limit {limit}",
            f.num_vars()
        )));
    }
    Ok(())
}

/// Indices (variable 1 as MSB) of all satisfying assignments, ascending.
pub fn solution_indices(f: &CnfFormula, limit: usize) -> Result<Vec<u64>> {
    check_limit(f, limit)?;
    let ev = IndexEvaluator::new(f);
    Ok((0..1u64 << f.num_vars()).filter(|&i| ev.satisfies(i)).collect())
}

/// All satisfying assignments in lexicographic order.
pub fn enumerate_solutions(f: &CnfFormula) -> Result<SolutionCollection> {
    enumerate_solutions_with_limit(f, DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_solutions_with_limit(f: &CnfFormula, limit: usize) -> Result<SolutionCollection> {
    let n = f.num_vars();
    let members = solution_indices(f, limit)?
        .into_iter()
        .map(|i| Assignment::from_index(n, i))
        .collect();
    SolutionCollection::from_members(members, true)
}

/// Exact dispersion optimum over Ω_F filtered by `w`.
///
/// Ties are broken towards the lexicographically smallest sorted witness.
pub fn brute_opt(
    f: &CnfFormula,
    s: usize,
    obj: DispersionObjective,
    w: WeightConstraint,
) -> Result<Optimum> {
    if s == 0 {
        return usage("s must be at least 1");
    }
    w.validate(f.num_vars())?;
    let all = enumerate_solutions(f)?;
    if all.is_empty() {
        return Err(Error::Unsat);
    }
    let pts: Vec<Assignment> = all.into_members().into_iter().filter(|z| w.admits(z)).collect();
    opt_over_points(&pts, f.num_vars(), s, obj)
}

/// Exact optimum over an explicit, lexicographically sorted, duplicate-free point list.
pub fn opt_over_points(
    pts: &[Assignment],
    n: usize,
    s: usize,
    obj: DispersionObjective,
) -> Result<Optimum> {
    debug_assert!(pts.windows(2).all(|p| p[0] < p[1]));
    if pts.is_empty() || (obj.needs_distinct() && pts.len() < s) {
        return Err(Error::Infeasible(format!(
            "{} admissible solutions, {s} requested",
            pts.len()
        )));
    }
    let (value, idx) = match obj {
        DispersionObjective::MinPd => max_min_pd(pts, n, s),
        DispersionObjective::SumPd => max_sum_pd(pts, n, s, false),
        DispersionObjective::SumPdDistinct => max_sum_pd(pts, n, s, true),
    };
    let witness = SolutionCollection::from_members(
        idx.iter().map(|&i| pts[i].clone()).collect(),
        obj.needs_distinct(),
    )?;
    Ok(Optimum { value, witness })
}

struct Bitset(Vec<u64>);

impl Bitset {
    fn zeros(len: usize) -> Self {
        Bitset(vec![0; len.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Lexicographically first s-clique of the graph "distance ≥ d", extending `chosen`.
fn first_clique(adj: &[Bitset], cand: &Bitset, s: usize, chosen: &mut Vec<usize>) -> bool {
    if chosen.len() == s {
        return true;
    }
    for (wi, &word) in cand.0.iter().enumerate() {
        let mut word = word;
        while word != 0 {
            let i = wi * 64 + word.trailing_zeros() as usize;
            word &= word - 1;
            let mut next = Bitset(
                cand.0
                    .iter()
                    .zip(&adj[i].0)
                    .map(|(a, b)| a & b)
                    .collect(),
            );
            // keep only indices above i
            for (wj, w) in next.0.iter_mut().enumerate() {
                let lo = wj * 64;
                if lo + 64 <= i + 1 {
                    *w = 0;
                } else if lo <= i {
                    *w &= !((1u64 << (i + 1 - lo)) - 1);
                }
            }
            if next.count() + chosen.len() + 1 < s {
                continue;
            }
            chosen.push(i);
            if first_clique(adj, &next, s, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

fn clique_at(pts: &[Assignment], s: usize, d: usize) -> Option<Vec<usize>> {
    let p = pts.len();
    let adj: Vec<Bitset> = (0..p)
        .map(|i| {
            let mut b = Bitset::zeros(p);
            for j in 0..p {
                if j != i && pts[i].distance(&pts[j]) >= d {
                    b.set(j);
                }
            }
            b
        })
        .collect();
    let mut all = Bitset::zeros(p);
    for i in 0..p {
        all.set(i);
    }
    let mut chosen = Vec::with_capacity(s);
    first_clique(&adj, &all, s, &mut chosen).then_some(chosen)
}

fn max_min_pd(pts: &[Assignment], n: usize, s: usize) -> (u64, Vec<usize>) {
    if s == 1 {
        return (n as u64 + 1, vec![0]);
    }
    // feasibility of "distance >= d" is monotone in d; d = 0 always holds
    let (mut lo, mut hi) = (0usize, n + 1);
    let mut best: Vec<usize> = (0..s).collect();
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match clique_at(pts, s, mid) {
            Some(c) => {
                lo = mid;
                best = c;
            }
            None => hi = mid,
        }
    }
    (lo as u64, best)
}

struct SumSearch<'a> {
    pts: &'a [Assignment],
    n: usize,
    s: usize,
    distinct: bool,
    counts: Vec<usize>,
    chosen: Vec<usize>,
    best: i64,
    best_idx: Vec<usize>,
}

impl SumSearch<'_> {
    /// Upper bound on the final sumPD given the current per-coordinate one-counts.
    fn bound(&self) -> i64 {
        let r = self.s - self.chosen.len();
        let s = self.s as i64;
        self.counts
            .iter()
            .map(|&c| {
                let half = self.s / 2;
                let x = half.clamp(c, c + r) as i64;
                x * (s - x)
            })
            .sum()
    }

    fn go(&mut self, start: usize, current: i64) {
        if self.chosen.len() == self.s {
            if current > self.best {
                self.best = current;
                self.best_idx = self.chosen.clone();
            }
            return;
        }
        if self.bound() <= self.best {
            return;
        }
        for i in start..self.pts.len() {
            let gain: usize = self.chosen.iter().map(|&j| self.pts[i].distance(&self.pts[j])).sum();
            for b in 0..self.n {
                if self.pts[i].get(b) {
                    self.counts[b] += 1;
                }
            }
            self.chosen.push(i);
            let next = if self.distinct { i + 1 } else { i };
            self.go(next, current + gain as i64);
            self.chosen.pop();
            for b in 0..self.n {
                if self.pts[i].get(b) {
                    self.counts[b] -= 1;
                }
            }
        }
    }
}

fn max_sum_pd(pts: &[Assignment], n: usize, s: usize, distinct: bool) -> (u64, Vec<usize>) {
    let mut search = SumSearch {
        pts,
        n,
        s,
        distinct,
        counts: vec![0; n],
        chosen: Vec::with_capacity(s),
        best: -1,
        best_idx: Vec::new(),
    };
    search.go(0, 0);
    (search.best as u64, search.best_idx)
}

/// Minimum-weight solution, lexicographically first among ties.
pub fn min_ones_brute(f: &CnfFormula) -> Result<Assignment> {
    let n = f.num_vars();
    solution_indices(f, DEFAULT_ENUMERATION_LIMIT)?
        .into_iter()
        .min_by_key(|&i| (i.count_ones(), i))
        .map(|i| Assignment::from_index(n, i))
        .ok_or(Error::Unsat)
}

/// Rotates a solution α to 1ⁿ and solves Min-Ones there; the result is a farthest point from α,
/// hence at least half the diameter away.
pub fn diameter_via_min_ones(f: &CnfFormula) -> Result<(Assignment, Assignment)> {
    let n = f.num_vars();
    let first = solution_indices(f, DEFAULT_ENUMERATION_LIMIT)?
        .first()
        .copied()
        .ok_or(Error::Unsat)?;
    let alpha = Assignment::from_index(n, first);
    let rotated = f.rotate(&alpha)?;
    let beta = min_ones_brute(&rotated)?.xor(&alpha.complement());
    debug_assert!(f.satisfies(&beta));
    Ok((alpha, beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{bits, dispersion_measures};
    use itertools::Itertools;
    use proptest::prelude::*;

    fn f(n: usize, cl: &[&[i64]]) -> CnfFormula {
        CnfFormula::new(n, cl.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    fn names(c: &SolutionCollection) -> Vec<String> {
        c.members().iter().map(|m| m.to_string()).collect()
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(names(&enumerate_solutions(&f(2, &[&[1, 2]])).unwrap()), ["01", "10", "11"]);
        assert_eq!(names(&enumerate_solutions(&f(2, &[&[1], &[-2]])).unwrap()), ["10"]);
        assert!(enumerate_solutions(&f(1, &[&[1], &[-1]])).unwrap().is_empty());
        assert!(matches!(
            enumerate_solutions(&CnfFormula::trivially_true(25)),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn brute_opt_examples() {
        use DispersionObjective::*;
        let g = f(2, &[&[1, 2]]);
        let o = brute_opt(&g, 2, MinPd, WeightConstraint::None).unwrap();
        assert_eq!(o.value, 2);
        assert_eq!(names(&o.witness), ["01", "10"]);
        assert_eq!(brute_opt(&g, 3, SumPd, WeightConstraint::None).unwrap().value, 4);
        let h = f(3, &[&[1, 2, 3]]);
        let o = brute_opt(&h, 2, MinPd, WeightConstraint::AtLeast(2)).unwrap();
        assert_eq!(o.value, 2);
        assert_eq!(names(&o.witness), ["011", "101"]);
        assert!(matches!(
            brute_opt(&g, 4, MinPd, WeightConstraint::None),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            brute_opt(&f(1, &[&[1], &[-1]]), 2, SumPd, WeightConstraint::None),
            Err(Error::Unsat)
        ));
        assert_eq!(brute_opt(&g, 1, MinPd, WeightConstraint::None).unwrap().value, 3);
    }

    #[test]
    fn min_ones_and_rotation_examples() {
        assert_eq!(min_ones_brute(&f(2, &[&[1, 2]])).unwrap(), bits("01"));
        assert_eq!(min_ones_brute(&CnfFormula::trivially_true(3)).unwrap(), bits("000"));
        let (a, b) = diameter_via_min_ones(&f(2, &[&[1, 2]])).unwrap();
        assert_eq!(a.distance(&b), 2);

        let g = f(2, &[&[1, 2]]);
        let z = bits("10");
        let zbar = z.complement();
        let mut mapped: Vec<Assignment> = enumerate_solutions(&g)
            .unwrap()
            .members()
            .iter()
            .map(|u| u.xor(&zbar))
            .collect();
        mapped.sort();
        assert_eq!(enumerate_solutions(&g.rotate(&z).unwrap()).unwrap().members(), &mapped[..]);
    }

    /// Plain enumeration over all index tuples; the reference for the pruned searches.
    fn naive_opt(pts: &[Assignment], s: usize, obj: DispersionObjective) -> Option<u64> {
        let tuples: Vec<Vec<usize>> = match obj {
            DispersionObjective::SumPd => {
                (0..pts.len()).combinations_with_replacement(s).collect()
            }
            _ => (0..pts.len()).combinations(s).collect(),
        };
        tuples
            .into_iter()
            .map(|t| {
                let c = SolutionCollection::from_members(
                    t.iter().map(|&i| pts[i].clone()).collect(),
                    false,
                )
                .unwrap();
                obj.value(&dispersion_measures(&c, None).unwrap())
            })
            .max()
    }

    fn arb_formula() -> impl Strategy<Value = CnfFormula> {
        (2usize..=5).prop_flat_map(|n| {
            let lit = (1..=n as i64, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
            proptest::collection::vec(proptest::collection::vec(lit, 1..=3), 0..8)
                .prop_map(move |cl| CnfFormula::new(n, cl).unwrap())
        })
    }

    proptest! {
        #[test]
        fn pruned_search_matches_naive(g in arb_formula(), s in 1usize..=4, w in 0usize..=3) {
            let wc = if w == 0 { WeightConstraint::None } else { WeightConstraint::AtLeast(w - 1) };
            let pts: Vec<Assignment> = enumerate_solutions(&g).unwrap().into_members()
                .into_iter().filter(|z| wc.admits(z)).collect();
            for obj in [DispersionObjective::MinPd, DispersionObjective::SumPd, DispersionObjective::SumPdDistinct] {
                let expect = if pts.is_empty() || (obj.needs_distinct() && pts.len() < s) { None } else { naive_opt(&pts, s, obj) };
                match brute_opt(&g, s, obj, wc) {
                    Ok(o) => {
                        prop_assert_eq!(Some(o.value), expect);
                        prop_assert_eq!(o.witness.len(), s);
                        prop_assert_eq!(obj.value(&dispersion_measures(&o.witness, None).unwrap()), o.value);
                        prop_assert!(o.witness.members().iter().all(|z| g.satisfies(z) && wc.admits(z)));
                    }
                    Err(_) => prop_assert_eq!(expect, None),
                }
            }
        }

        #[test]
        fn diameter_via_min_ones_is_half_approximate(g in arb_formula()) {
            if let Ok(o) = brute_opt(&g, 2, DispersionObjective::MinPd, WeightConstraint::None) {
                let (a, b) = diameter_via_min_ones(&g).unwrap();
                prop_assert!(g.satisfies(&a) && g.satisfies(&b));
                prop_assert!(2 * a.distance(&b) as u64 >= o.value);
            }
        }

        #[test]
        fn rotation_is_an_isometry(g in arb_formula(), zi in any::<u64>()) {
            let n = g.num_vars();
            let z = Assignment::from_index(n, zi % (1 << n));
            let zbar = z.complement();
            let src = enumerate_solutions(&g).unwrap();
            let dst = enumerate_solutions(&g.rotate(&z).unwrap()).unwrap();
            prop_assert_eq!(src.len(), dst.len());
            for u in src.members() {
                prop_assert!(dst.contains(&u.xor(&zbar)));
                for v in src.members() {
                    prop_assert_eq!(u.xor(&zbar).distance(&v.xor(&zbar)), u.distance(v));
                }
            }
        }
    }
}
