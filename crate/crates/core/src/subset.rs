//! Subset problems as point sets of the hypercube: graphs and set families, their isometric
//! CNF encodings, monotone extension search and diverse minimum solutions.

use std::collections::BTreeSet;

use crate::cnf::{Assignment, CnfFormula, SolutionCollection};
use crate::dispersion::DispersionRun;
use crate::error::{usage, Error, Result};
use crate::ppz::OracleConfig;
use crate::rng::Rng;
use crate::schoning::{anchored_best, BudgetPlan, LsVariant, Plfs};

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        msg: msg.into(),
    })
}

/// Simple undirected graph on vertices 0..n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Edges are 0-based; each is stored as (min, max), sorted and deduplicated.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return usage(format!("edge ({u}, {v}) out of range for n={n}"));
            }
            if u == v {
                return usage(format!("self-loop on vertex {u}"));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Graph {
            n,
            edges: set.into_iter().collect(),
        })
    }

    /// Header "n m" followed by m lines "u v" with 1-based endpoints; 'c' lines are comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('c'));
        let Some((hl, header)) = lines.next() else {
            return parse_err(1, "empty graph input");
        };
        let nums = parse_nums(hl, header)?;
        let [n, m] = nums[..] else {
            return parse_err(hl, "header must be \"n m\"");
        };
        let mut edges = Vec::with_capacity(m);
        for (ln, l) in lines {
            let e = parse_nums(ln, l)?;
            let [u, v] = e[..] else {
                return parse_err(ln, "edge line must hold two vertices");
            };
            if u == 0 || v == 0 || u > n || v > n {
                return parse_err(ln, format!("vertex out of range 1..{n}"));
            }
            if u == v {
                return parse_err(ln, "self-loop");
            }
            edges.push((u - 1, v - 1));
        }
        if edges.len() != m {
            return parse_err(hl, format!("header declares {m} edges, found {}", edges.len()));
        }
        Graph::new(n, edges)
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

fn parse_nums(line: usize, text: &str) -> Result<Vec<usize>> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .or_else(|_| parse_err(line, format!("not a non-negative integer: {t:?}")))
        })
        .collect()
}

/// Family of subsets of 0..n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    n: usize,
    sets: Vec<Vec<usize>>,
}

impl SetFamily {
    /// Sets hold 0-based elements; each is sorted and deduplicated.
    pub fn new(n: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut out = Vec::with_capacity(sets.len());
        for mut s in sets {
            if let Some(&e) = s.iter().find(|&&e| e >= n) {
                return usage(format!("element {e} out of range for n={n}"));
            }
            s.sort_unstable();
            s.dedup();
            out.push(s);
        }
        Ok(SetFamily { n, sets: out })
    }

    /// One set per line of 1-based elements; 'c' lines are comments; an optional "p hs n" header
    /// fixes the ground size, which otherwise is the largest element.
    pub fn parse(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut sets = Vec::new();
        for (i, l) in text.lines().enumerate() {
            let ln = i + 1;
            let l = l.trim();
            if l.is_empty() || l.starts_with('c') {
                continue;
            }
            if let Some(rest) = l.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                match parts[..] {
                    ["hs", n] if declared.is_none() && sets.is_empty() => {
                        declared = Some(n.parse::<usize>().or_else(|_| parse_err(ln, "bad ground size"))?);
                    }
                    _ => return parse_err(ln, "header must be \"p hs n\" and come first"),
                }
                continue;
            }
            let nums = parse_nums(ln, l)?;
            if nums.contains(&0) {
                return parse_err(ln, "elements are 1-based");
            }
            if let Some(n) = declared {
                if let Some(e) = nums.iter().find(|&&e| e > n) {
                    return parse_err(ln, format!("element {e} exceeds n={n}"));
                }
            }
            sets.push(nums.into_iter().map(|e| e - 1).collect::<Vec<_>>());
        }
        let n = declared.unwrap_or_else(|| sets.iter().flatten().map(|e| e + 1).max().unwrap_or(0));
        SetFamily::new(n, sets)
    }

    /// Edges as 2-sets: hitting sets are exactly vertex covers.
    pub fn from_graph(g: &Graph) -> Self {
        SetFamily {
            n: g.n,
            sets: g.edges.iter().map(|&(u, v)| vec![u, v]).collect(),
        }
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    /// Largest set size.
    pub fn d(&self) -> usize {
        self.sets.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_hit_by(&self, a: &Assignment) -> bool {
        self.first_unhit(a).is_none()
    }

    fn first_unhit(&self, a: &Assignment) -> Option<&[usize]> {
        self.sets
            .iter()
            .find(|s| !s.iter().any(|&e| a.get(e)))
            .map(Vec::as_slice)
    }
}

/// A CNF encoding whose solutions are the feasible sets, bit i standing for element i.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub formula: CnfFormula,
}

impl Reduction {
    /// The subset (0-based elements) encoded by a solution.
    pub fn back_map(&self, z: &Assignment) -> Vec<usize> {
        (0..z.len()).filter(|&i| z.get(i)).collect()
    }
}

fn lit(i: usize, positive: bool) -> i64 {
    let v = i as i64 + 1;
    if positive {
        v
    } else {
        -v
    }
}

/// One clause (x_u ∨ x_v) per edge.
pub fn reduce_vertex_cover(g: &Graph) -> Result<Reduction> {
    let clauses = g.edges.iter().map(|&(u, v)| vec![lit(u, true), lit(v, true)]).collect();
    Ok(Reduction {
        formula: CnfFormula::new(g.n, clauses)?,
    })
}

/// One clause (¬x_u ∨ ¬x_v) per edge.
pub fn reduce_independent_set(g: &Graph) -> Result<Reduction> {
    let clauses = g.edges.iter().map(|&(u, v)| vec![lit(u, false), lit(v, false)]).collect();
    Ok(Reduction {
        formula: CnfFormula::new(g.n, clauses)?,
    })
}

/// One positive clause per set.
pub fn reduce_hitting_set(f: &SetFamily) -> Result<Reduction> {
    let clauses = f
        .sets
        .iter()
        .map(|s| s.iter().map(|&e| lit(e, true)).collect())
        .collect();
    Ok(Reduction {
        formula: CnfFormula::new(f.n, clauses)?,
    })
}

/// Extension search inside the cone {B ⊇ A : |B \ A| ≤ t}.
pub trait MonotoneSearch: Sync {
    /// Branching base: the search costs cᵗ·poly(n).
    fn base(&self) -> f64;
    fn extend(&self, a: &Assignment, t: usize) -> Option<Assignment>;
}

/// A family of feasible subsets of 0..n given by a membership test.
pub trait ImplicitSetSystem: Sync {
    fn n(&self) -> usize;
    fn feasible(&self, a: &Assignment) -> bool;
    /// Feasibility is closed under taking supersets.
    fn hereditary(&self) -> bool;
    fn monotone_search(&self) -> Option<&dyn MonotoneSearch> {
        None
    }
}

/// Depth-t branching on the elements of the first set `a` misses.
pub fn hitting_set_monotone_search(f: &SetFamily, a: &Assignment, t: usize) -> Option<Assignment> {
    let Some(set) = f.first_unhit(a) else {
        return Some(a.clone());
    };
    if t == 0 {
        return None;
    }
    let mut b = a.clone();
    for &e in set {
        b.set(e, true);
        if let Some(found) = hitting_set_monotone_search(f, &b, t - 1) {
            return Some(found);
        }
        b.set(e, false);
    }
    None
}

/// Hitting sets of a family; vertex covers via [`SetFamily::from_graph`].
pub struct HittingSetSystem {
    family: SetFamily,
}

impl HittingSetSystem {
    pub fn new(family: SetFamily) -> Self {
        HittingSetSystem { family }
    }

    pub fn vertex_cover(g: &Graph) -> Self {
        Self::new(SetFamily::from_graph(g))
    }

    pub fn family(&self) -> &SetFamily {
        &self.family
    }
}

impl MonotoneSearch for HittingSetSystem {
    fn base(&self) -> f64 {
        self.family.d().max(2) as f64
    }

    fn extend(&self, a: &Assignment, t: usize) -> Option<Assignment> {
        hitting_set_monotone_search(&self.family, a, t)
    }
}

impl ImplicitSetSystem for HittingSetSystem {
    fn n(&self) -> usize {
        self.family.n
    }

    fn feasible(&self, a: &Assignment) -> bool {
        self.family.is_hit_by(a)
    }

    fn hereditary(&self) -> bool {
        true
    }

    fn monotone_search(&self) -> Option<&dyn MonotoneSearch> {
        Some(self)
    }
}

/// Solutions of a CNF formula as a set system; not hereditary in general and without a
/// monotone search.
pub struct CnfSystem {
    formula: CnfFormula,
}

impl CnfSystem {
    pub fn new(formula: CnfFormula) -> Self {
        CnfSystem { formula }
    }
}

impl ImplicitSetSystem for CnfSystem {
    fn n(&self) -> usize {
        self.formula.num_vars()
    }

    fn feasible(&self, a: &Assignment) -> bool {
        self.formula.satisfies(a)
    }

    fn hereditary(&self) -> bool {
        false
    }
}

/// Local feasibility search obtained from a monotone search; α = 1, c = the branching base.
pub struct MonotonePlfs<'a> {
    n: usize,
    search: &'a dyn MonotoneSearch,
    variant: LsVariant,
}

impl MonotonePlfs<'_> {
    /// A feasible set within distance t of `a`, if one exists.
    pub fn find(&self, a: &Assignment, t: usize) -> Option<Assignment> {
        self.search.extend(a, t)
    }
}

impl Plfs for MonotonePlfs<'_> {
    fn n(&self) -> usize {
        self.n
    }

    fn variant(&self) -> LsVariant {
        self.variant
    }

    fn search(&self, y: &Assignment, t: usize, _rng: &mut Rng) -> Option<Assignment> {
        self.search.extend(y, t)
    }
}

/// For superset-closed systems a feasible set within distance t of A exists iff one exists in
/// the cone above A, so the monotone search is itself a local feasibility search.
pub fn plfs_from_monotone(sys: &dyn ImplicitSetSystem) -> Result<MonotonePlfs<'_>> {
    if !sys.hereditary() {
        return Err(Error::Capability("set system is not superset-closed".into()));
    }
    let Some(search) = sys.monotone_search() else {
        return Err(Error::Capability("set system has no monotone extension search".into()));
    };
    Ok(MonotonePlfs {
        n: sys.n(),
        search,
        variant: LsVariant::custom(1.0, search.base())?,
    })
}

/// s feasible sets of size at most (1+δ)·w₀, where w₀ is the smallest feasible size found from
/// the empty anchor, spread out by farthest insertion with anchored PLFS queries.
pub fn diverse_min(
    sys: &dyn ImplicitSetSystem,
    s: usize,
    delta: f64,
    cfg: &OracleConfig,
) -> Result<DispersionRun> {
    if s == 0 {
        return usage("s must be at least 1");
    }
    cfg.validate()?;
    let plfs = plfs_from_monotone(sys)?;
    let n = sys.n();
    let plan = BudgetPlan::new(n, plfs.variant, delta)?;
    let empty = Assignment::zeros(n);
    let mut calls = 1u64;
    let lightest = anchored_best(
        &plfs,
        std::slice::from_ref(&empty),
        &plan,
        &cfg.child(calls),
        &|u| sys.feasible(u).then(|| (-(u.weight() as i64), 0)),
    )
    .ok_or(Error::NotFound)?;
    let cap = ((1.0 + delta) * lightest.weight() as f64 + 1e-12).floor() as usize;
    let mut coll = SolutionCollection::new_set();
    coll.push(lightest)?;
    let mut retries = 0;
    while coll.len() < s {
        calls += 1;
        let mut anchors = coll.members().to_vec();
        anchors.push(empty.clone());
        let snapshot = &coll;
        let found = anchored_best(&plfs, &anchors, &plan, &cfg.child(calls), &|u| {
            (u.weight() <= cap && sys.feasible(u) && !snapshot.contains(u))
                .then(|| (snapshot.min_distance_to(u).unwrap() as i64, -(u.weight() as i64)))
        });
        match found {
            Some(u) => coll.push(u)?,
            None => {
                retries += 1;
                if retries > 3 * s {
                    return Err(Error::Infeasible(format!(
                        "found {} of {s} feasible sets of size <= {cap}",
                        coll.len()
                    )));
                }
            }
        }
    }
    Ok(DispersionRun {
        solutions: coll,
        oracle_calls: calls,
        rounds: 0,
        converged: true,
    })
}

/// Diverse large independent sets: complements of diverse small vertex covers. Complementing
/// preserves every pairwise distance.
pub fn diverse_max_independent_set(
    g: &Graph,
    s: usize,
    delta: f64,
    cfg: &OracleConfig,
) -> Result<DispersionRun> {
    let mut run = diverse_min(&HittingSetSystem::vertex_cover(g), s, delta, cfg)?;
    let flipped = run.solutions.members().iter().map(Assignment::complement).collect();
    run.solutions = SolutionCollection::from_members(flipped, true)?;
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{bits, dispersion_measures, enumerate_solutions, min_ones_brute};
    use crate::rng::{stream, Rng};
    use itertools::Itertools;
    use proptest::prelude::*;
    use rand::Rng as _;

    fn triangle() -> Graph {
        Graph::parse("3 3\n1 2\n2 3\n1 3\n").unwrap()
    }

    fn random_family(n: usize, m: usize, d: usize, rng: &mut Rng) -> SetFamily {
        let sets = (0..m)
            .map(|_| (0..rng.gen_range(1..=d)).map(|_| rng.gen_range(0..n)).collect())
            .collect();
        SetFamily::new(n, sets).unwrap()
    }

    fn min_feasible_weight(sys: &dyn ImplicitSetSystem) -> usize {
        (0..1u64 << sys.n())
            .map(|i| Assignment::from_index(sys.n(), i))
            .filter(|a| sys.feasible(a))
            .map(|a| a.weight())
            .min()
            .unwrap()
    }

    #[test]
    fn parsers() {
        let g = triangle();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
        assert!(Graph::parse("2 1\n1 3\n").is_err());
        assert!(Graph::parse("2 2\n1 2\n").is_err());
        let f = SetFamily::parse("c demo\np hs 5\n1 2 3\n3 4 5\n").unwrap();
        assert_eq!(f.ground_size(), 5);
        assert_eq!(f.d(), 3);
        assert_eq!(SetFamily::parse("1 2\n4\n").unwrap().ground_size(), 4);
        assert!(SetFamily::parse("p hs 2\n1 3\n").is_err());
    }

    #[test]
    fn reduction_examples() {
        let vc = reduce_vertex_cover(&triangle()).unwrap();
        assert_eq!(vc.formula.k(), 2);
        let covers = enumerate_solutions(&vc.formula).unwrap();
        assert_eq!(min_ones_brute(&vc.formula).unwrap().weight(), 2);
        assert_eq!(covers.len(), 4);
        let is = reduce_independent_set(&triangle()).unwrap();
        let sets = enumerate_solutions(&is.formula).unwrap();
        let strs: Vec<String> = sets.members().iter().map(|z| z.to_string()).collect();
        assert_eq!(strs, ["000", "001", "010", "100"]);
        let hs = reduce_hitting_set(&SetFamily::parse("1 2 3\n3 4 5\n").unwrap()).unwrap();
        let best = min_ones_brute(&hs.formula).unwrap();
        assert_eq!(hs.back_map(&best), vec![2]);
    }

    #[test]
    fn monotone_search_examples() {
        let f = SetFamily::parse("1 2\n2 3\n").unwrap();
        assert_eq!(hitting_set_monotone_search(&f, &bits("000"), 1), Some(bits("010")));
        assert_eq!(hitting_set_monotone_search(&f, &bits("000"), 0), None);
        let sys = HittingSetSystem::new(f);
        let p = plfs_from_monotone(&sys).unwrap();
        assert_eq!(p.find(&bits("111"), 0), Some(bits("111")));
        let cnf = CnfSystem::new(reduce_vertex_cover(&triangle()).unwrap().formula);
        assert!(matches!(plfs_from_monotone(&cnf), Err(Error::Capability(_))));
    }

    #[test]
    fn diverse_examples() {
        let cfg = OracleConfig::seeded(1);
        let run = diverse_min(&HittingSetSystem::vertex_cover(&triangle()), 2, 0.5, &cfg).unwrap();
        let m = dispersion_measures(&run.solutions, None).unwrap();
        assert!(m.min_pd >= 1);
        assert!(run.solutions.members().iter().all(|a| a.weight() <= 3));

        let fam = HittingSetSystem::new(SetFamily::parse("1 2\n3 4\n").unwrap());
        let run = diverse_min(&fam, 2, 0.5, &cfg).unwrap();
        assert!(dispersion_measures(&run.solutions, None).unwrap().min_pd >= 1);
        for a in run.solutions.members() {
            assert!(fam.feasible(a) && a.weight() <= 3);
        }
        let one = diverse_min(&fam, 1, 0.5, &cfg).unwrap();
        assert_eq!(one.solutions.members()[0].weight(), 2);

        let is = diverse_max_independent_set(&triangle(), 2, 0.5, &cfg).unwrap();
        let g = reduce_independent_set(&triangle()).unwrap().formula;
        assert!(is.solutions.members().iter().all(|a| g.satisfies(a)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn monotone_search_matches_cone_scan(seed in any::<u64>(), n in 3usize..11, t in 0usize..5) {
            let mut rng = stream(seed, 0);
            let f = random_family(n, 6, 3, &mut rng);
            let a = Assignment::from_bits(&(0..n).map(|_| rng.gen_bool(0.2)).collect::<Vec<_>>());
            let got = hitting_set_monotone_search(&f, &a, t);
            let free: Vec<usize> = (0..n).filter(|&i| !a.get(i)).collect();
            let exists = (0..=t.min(free.len())).any(|k| {
                free.iter().combinations(k).any(|add| {
                    let mut b = a.clone();
                    for &&i in &add {
                        b.set(i, true);
                    }
                    f.is_hit_by(&b)
                })
            });
            prop_assert_eq!(got.is_some(), exists);
            if let Some(b) = got {
                prop_assert!(f.is_hit_by(&b));
                prop_assert!(b.distance(&a) <= t);
                prop_assert!((0..n).all(|i| !a.get(i) || b.get(i)));
            }
        }

        #[test]
        fn plfs_complete_against_ball_scan(seed in any::<u64>(), n in 3usize..11, t in 0usize..4) {
            let mut rng = stream(seed, 1);
            let sys = HittingSetSystem::new(random_family(n, 5, 3, &mut rng));
            let p = plfs_from_monotone(&sys).unwrap();
            let a = Assignment::uniform(n, &mut rng);
            let in_ball = (0..1u64 << n)
                .map(|i| Assignment::from_index(n, i))
                .any(|b| b.distance(&a) <= t && sys.feasible(&b));
            prop_assert_eq!(p.find(&a, t).is_some(), in_ball);
        }

        #[test]
        fn diverse_min_meets_bound(seed in any::<u64>(), n in 4usize..9, s in 1usize..4) {
            let mut rng = stream(seed, 2);
            let sys = HittingSetSystem::new(random_family(n, 4, 3, &mut rng));
            let delta = 0.5;
            let opt_w = min_feasible_weight(&sys);
            let mins: Vec<Assignment> = (0..1u64 << n)
                .map(|i| Assignment::from_index(n, i))
                .filter(|a| sys.feasible(a) && a.weight() == opt_w)
                .collect();
            let opt = if s == 1 || mins.len() < s {
                0
            } else {
                mins.iter()
                    .combinations(s)
                    .map(|c| c.iter().tuple_combinations().map(|(x, y)| x.distance(y)).min().unwrap())
                    .max()
                    .unwrap() as u64
            };
            match diverse_min(&sys, s, delta, &OracleConfig::seeded(seed)) {
                Ok(run) => {
                    for a in run.solutions.members() {
                        prop_assert!(sys.feasible(a));
                        prop_assert!(a.weight() as f64 <= (1.0 + delta) * opt_w as f64);
                    }
                    if s > 1 {
                        let got = dispersion_measures(&run.solutions, None).unwrap().min_pd;
                        prop_assert!(4 * got >= opt, "got {} opt {}", got, opt);
                    }
                }
                Err(Error::Infeasible(_)) => {
                    let cap = ((1.0 + delta) * opt_w as f64).floor() as usize;
                    let pool = (0..1u64 << n)
                        .map(|i| Assignment::from_index(n, i))
                        .filter(|a| sys.feasible(a) && a.weight() <= cap)
                        .count();
                    prop_assert!(pool < s);
                }
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }
}
