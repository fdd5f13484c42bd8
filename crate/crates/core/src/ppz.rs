//! PPZ iterations, the exact output distribution for small n, and PPZ farthest-point oracles.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::cnf::{Assignment, CnfFormula, SolutionCollection};
use crate::error::{usage, Error, Result};
use crate::rng::{derive, stream, Rng};
use crate::schoning::inverse_entropy;

/// Largest n for which `tau_exact` enumerates all 2ⁿ·n! samples.
pub const TAU_EXACT_LIMIT: usize = 7;
pub const DEFAULT_CEILING: u64 = 1 << 32;

/// A PPZ input: random bits `y` and a variable order `pi` (0-based variable indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PpzSample {
    pub y: Assignment,
    pub pi: Vec<usize>,
}

impl PpzSample {
    pub fn new(y: Assignment, pi: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; y.len()];
        if pi.len() != y.len() {
            return usage("permutation length differs from n");
        }
        for &v in &pi {
            if v >= y.len() || std::mem::replace(&mut seen[v], true) {
                return usage("pi is not a permutation of the variables");
            }
        }
        Ok(PpzSample { y, pi })
    }

    pub fn random(n: usize, rng: &mut Rng) -> Self {
        let y = Assignment::uniform(n, rng);
        let mut pi: Vec<usize> = (0..n).collect();
        pi.shuffle(rng);
        PpzSample { y, pi }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Repetitions {
    Auto,
    Fixed(u64),
}

/// Randomness and budget knobs shared by all randomized oracles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig {
    pub seed: u64,
    pub repetitions: Repetitions,
    /// Multiplier on the automatic budget.
    pub effort: f64,
    /// Hard cap on any automatic repetition count.
    pub ceiling: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            seed: 0,
            repetitions: Repetitions::Auto,
            effort: 1.0,
            ceiling: DEFAULT_CEILING,
        }
    }
}

impl OracleConfig {
    pub fn seeded(seed: u64) -> Self {
        OracleConfig {
            seed,
            ..Self::default()
        }
    }

    pub fn with_effort(self, effort: f64) -> Self {
        OracleConfig { effort, ..self }
    }

    pub fn with_repetitions(self, r: u64) -> Self {
        OracleConfig {
            repetitions: Repetitions::Fixed(r),
            ..self
        }
    }

    /// Same knobs, independent randomness for sub-call `tag`.
    pub fn child(&self, tag: u64) -> Self {
        OracleConfig {
            seed: derive(self.seed, tag),
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.effort.is_finite() && self.effort > 0.0) {
            return usage(format!("effort must be positive, got {}", self.effort));
        }
        if matches!(self.repetitions, Repetitions::Fixed(0)) {
            return usage("repetitions must be at least 1");
        }
        Ok(())
    }

    /// `auto` scaled by effort and capped, or the fixed count.
    pub fn resolve(&self, auto: f64) -> u64 {
        match self.repetitions {
            Repetitions::Fixed(r) => r.max(1),
            Repetitions::Auto => {
                let r = (self.effort * auto).ceil();
                if r >= self.ceiling as f64 {
                    self.ceiling
                } else {
                    (r as u64).max(1)
                }
            }
        }
    }

    /// ⌈effort·4n²·2^{n-n/k}⌉ at AUTO.
    pub fn ppz_repetitions(&self, n: usize, k: usize) -> u64 {
        let k = k.max(1) as f64;
        let n = n as f64;
        self.resolve(4.0 * n * n * (n - n / k).exp2())
    }
}

/// Occurrence lists for incremental unit detection.
pub(crate) struct PpzEngine {
    n: usize,
    occ: Vec<Vec<(u32, bool)>>,
    lens: Vec<u32>,
    has_empty: bool,
}

pub(crate) struct PpzScratch {
    sat: Vec<bool>,
    open: Vec<u32>,
    pub(crate) out: Assignment,
    y: Assignment,
    pi: Vec<usize>,
}

impl PpzEngine {
    pub(crate) fn new(f: &CnfFormula) -> Self {
        let mut occ = vec![Vec::new(); f.num_vars()];
        for (ci, c) in f.clauses().iter().enumerate() {
            for l in c.literals() {
                occ[l.index()].push((ci as u32, l.negated));
            }
        }
        PpzEngine {
            n: f.num_vars(),
            occ,
            lens: f.clauses().iter().map(|c| c.len() as u32).collect(),
            has_empty: f.has_empty_clause(),
        }
    }

    pub(crate) fn scratch(&self) -> PpzScratch {
        PpzScratch {
            sat: vec![false; self.lens.len()],
            open: self.lens.clone(),
            out: Assignment::zeros(self.n),
            y: Assignment::zeros(self.n),
            pi: (0..self.n).collect(),
        }
    }

    /// One pass in order `pi`; result lands in `sc.out`. Returns whether the output satisfies F.
    /// With `stop_on_conflict` the pass ends at the first emptied clause and `sc.out` is partial.
    pub(crate) fn run(
        &self,
        y: &Assignment,
        pi: &[usize],
        sc: &mut PpzScratch,
        stop_on_conflict: bool,
    ) -> bool {
        sc.sat.fill(false);
        sc.open.copy_from_slice(&self.lens);
        let mut ok = !self.has_empty;
        if !ok && stop_on_conflict {
            return false;
        }
        for &v in pi {
            // an open count of 1 on an unsatisfied clause containing v means the clause is (v) now
            let forced = self.occ[v]
                .iter()
                .find(|&&(c, _)| !sc.sat[c as usize] && sc.open[c as usize] == 1)
                .map(|&(_, neg)| !neg);
            let b = forced.unwrap_or_else(|| y.get(v));
            sc.out.set(v, b);
            for &(c, neg) in &self.occ[v] {
                let c = c as usize;
                if sc.sat[c] {
                    continue;
                }
                if b != neg {
                    sc.sat[c] = true;
                } else {
                    sc.open[c] -= 1;
                    if sc.open[c] == 0 {
                        ok = false;
                        if stop_on_conflict {
                            return false;
                        }
                    }
                }
            }
        }
        ok
    }

    /// Fresh random sample from `rng`, then a conflict-stopping pass.
    pub(crate) fn run_random(&self, rng: &mut Rng, sc: &mut PpzScratch) -> bool {
        sc.y.randomize(rng);
        sc.pi.sort_unstable();
        sc.pi.shuffle(rng);
        let (y, pi) = (std::mem::replace(&mut sc.y, Assignment::zeros(0)), std::mem::take(&mut sc.pi));
        let ok = self.run(&y, &pi, sc, true);
        sc.y = y;
        sc.pi = pi;
        ok
    }
}

fn check_len(f: &CnfFormula, z: &Assignment) -> Result<()> {
    if z.len() != f.num_vars() {
        return usage(format!("point of length {} for n={}", z.len(), f.num_vars()));
    }
    Ok(())
}

/// Deterministic PPZ pass: unit clauses on the current variable force it (first clause wins on
/// contradictions), otherwise the bit of `y` is copied. The output need not satisfy F.
pub fn ppz_modify(f: &CnfFormula, sample: &PpzSample) -> Result<Assignment> {
    check_len(f, &sample.y)?;
    let engine = PpzEngine::new(f);
    let mut sc = engine.scratch();
    engine.run(&sample.y, &sample.pi, &mut sc, false);
    Ok(sc.out)
}

/// Exact output distribution of `ppz_modify` under uniform (y, π).
#[derive(Clone, Debug)]
pub struct PpzDistribution {
    total: u64,
    counts: HashMap<Assignment, u64>,
}

impl PpzDistribution {
    pub fn new(f: &CnfFormula) -> Result<Self> {
        let n = f.num_vars();
        if n > TAU_EXACT_LIMIT {
            return Err(Error::Capability(format!(
                "exact PPZ distribution needs n <= {TAU_EXACT_LIMIT}, got {n}"
            )));
        }
        let engine = PpzEngine::new(f);
        let mut sc = engine.scratch();
        let mut counts = HashMap::new();
        let mut total = 0u64;
        for pi in (0..n).permutations(n) {
            for yi in 0..1u64 << n {
                let y = Assignment::from_index(n, yi);
                engine.run(&y, &pi, &mut sc, false);
                *counts.entry(sc.out.clone()).or_insert(0) += 1;
                total += 1;
            }
        }
        Ok(PpzDistribution { total, counts })
    }

    /// 2ⁿ·n!
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, z: &Assignment) -> u64 {
        self.counts.get(z).copied().unwrap_or(0)
    }

    /// Number of samples landing in `a` (members counted once).
    pub fn count_set<'a>(&self, a: impl IntoIterator<Item = &'a Assignment>) -> u64 {
        a.into_iter().unique().map(|z| self.count(z)).sum()
    }

    pub fn tau<'a>(&self, a: impl IntoIterator<Item = &'a Assignment>) -> BigRational {
        BigRational::new(BigInt::from(self.count_set(a)), BigInt::from(self.total))
    }
}

/// Exact probability that `ppz_modify` outputs a member of `a`.
pub fn tau_exact(f: &CnfFormula, a: &SolutionCollection) -> Result<BigRational> {
    Ok(PpzDistribution::new(f)?.tau(a.members()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOutcome {
    pub assignment: Option<Assignment>,
    /// Repetitions used, including the successful one.
    pub iterations: u64,
}

/// First satisfying PPZ output over the repetition budget, repetition i drawing stream i.
pub fn ppz_solve(f: &CnfFormula, cfg: &OracleConfig) -> Result<SolveOutcome> {
    cfg.validate()?;
    let reps = cfg.ppz_repetitions(f.num_vars(), f.k());
    let engine = PpzEngine::new(f);
    let found = (0..reps)
        .into_par_iter()
        .map_init(
            || engine.scratch(),
            |sc, i| {
                let mut rng = stream(cfg.seed, i);
                engine.run_random(&mut rng, sc).then(|| (i, sc.out.clone()))
            },
        )
        .find_map_first(|x| x);
    Ok(match found {
        Some((i, z)) => {
            debug_assert!(f.satisfies(&z));
            SolveOutcome {
                assignment: Some(z),
                iterations: i + 1,
            }
        }
        None => SolveOutcome {
            assignment: None,
            iterations: reps,
        },
    })
}

/// Best candidate under the total order (score descending, then assignment ascending).
pub(crate) fn better(a: &(i64, Assignment), b: &(i64, Assignment)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

pub(crate) fn merge_best(
    a: Option<(i64, Assignment)>,
    b: Option<(i64, Assignment)>,
) -> Option<(i64, Assignment)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(p), Some(q)) => Some(if better(&q, &p) { q } else { p }),
    }
}

/// Max of `score` over satisfying PPZ outputs that pass `accept`.
fn ppz_best(
    f: &CnfFormula,
    cfg: &OracleConfig,
    score: &(dyn Fn(&Assignment) -> i64 + Sync),
    accept: &(dyn Fn(&Assignment) -> bool + Sync),
) -> Option<(i64, Assignment)> {
    let reps = cfg.ppz_repetitions(f.num_vars(), f.k());
    let engine = PpzEngine::new(f);
    (0..reps)
        .into_par_iter()
        .fold(
            || (engine.scratch(), None::<(i64, Assignment)>),
            |(mut sc, best), i| {
                let mut rng = stream(cfg.seed, i);
                if !engine.run_random(&mut rng, &mut sc) || !accept(&sc.out) {
                    return (sc, best);
                }
                let v = score(&sc.out);
                let improves = match &best {
                    None => true,
                    Some((bv, bz)) => v > *bv || (v == *bv && sc.out < *bz),
                };
                let best = if improves { Some((v, sc.out.clone())) } else { best };
                (sc, best)
            },
        )
        .map(|(_, b)| b)
        .reduce(|| None, merge_best)
}

/// Satisfying output farthest from `z`; (1-1/k)-approximate at full budget.
pub fn ppz_farthest(f: &CnfFormula, z: &Assignment, cfg: &OracleConfig) -> Result<Option<Assignment>> {
    check_len(f, z)?;
    cfg.validate()?;
    Ok(ppz_best(f, cfg, &|u| u.distance(z) as i64, &|_| true).map(|(_, u)| u))
}

/// Satisfying output maximizing the summed distance to `s`; with `exclude`, members of `s` are
/// never returned.
pub fn ppz_farthest_sum(
    f: &CnfFormula,
    s: &SolutionCollection,
    cfg: &OracleConfig,
    exclude: bool,
) -> Result<Option<Assignment>> {
    let Some(z) = s.members().first() else {
        return usage("anchor collection is empty");
    };
    check_len(f, z)?;
    cfg.validate()?;
    let accept = |u: &Assignment| !exclude || !s.contains(u);
    Ok(ppz_best(f, cfg, &|u| s.sum_distance_to(u) as i64, &accept).map(|(_, u)| u))
}

/// Largest r with Σ_{i≤r} C(n,i) ≤ 2^{n-n/k}.
pub fn ball_radius(n: usize, k: usize) -> usize {
    let k = k.max(1) as f64;
    let cap = (n as f64 - n as f64 / k).exp2() * (1.0 + 1e-12);
    let mut sum = 0.0f64;
    let mut binom = 1.0f64;
    let mut r = 0;
    for i in 0..=n {
        if i > 0 {
            binom = binom * (n - i + 1) as f64 / i as f64;
        }
        sum += binom;
        if sum > cap {
            break;
        }
        r = i;
    }
    r
}

/// All points within Hamming distance `r` of `z`, visiting each flip set once.
fn for_each_in_ball(z: &Assignment, r: usize, mut visit: impl FnMut(&Assignment)) {
    let n = z.len();
    let mut u = z.clone();
    visit(&u);
    for size in 1..=r.min(n) {
        for flips in (0..n).combinations(size) {
            for &i in &flips {
                u.flip(i);
            }
            visit(&u);
            for &i in &flips {
                u.flip(i);
            }
        }
    }
}

/// Two phases: exhaustive search of the radius-R balls around `s`, then PPZ repetitions; the
/// result maximizes the minimum distance to `s` over everything seen.
pub fn ppz_farthest_min(
    f: &CnfFormula,
    s: &SolutionCollection,
    cfg: &OracleConfig,
) -> Result<Option<Assignment>> {
    let Some(z0) = s.members().first() else {
        return usage("anchor collection is empty");
    };
    check_len(f, z0)?;
    cfg.validate()?;
    let score = |u: &Assignment| s.min_distance_to(u).unwrap() as i64;
    let ev = f.evaluator();
    let radius = ball_radius(f.num_vars(), f.k());
    let mut phase1: Option<(i64, Assignment)> = None;
    for z in s.members() {
        for_each_in_ball(z, radius, |u| {
            if ev.satisfies(u) {
                phase1 = merge_best(phase1.take(), Some((score(u), u.clone())));
            }
        });
    }
    let phase2 = ppz_best(f, cfg, &score, &|_| true);
    Ok(merge_best(phase1, phase2).map(|(_, u)| u))
}

/// 1 - 1/(k·H⁻¹(1-1/k)): the max-min approximation factor of the PPZ farthest-min oracle.
pub fn ppz_min_factor(k: usize) -> f64 {
    let k = k as f64;
    1.0 - 1.0 / (k * inverse_entropy(1.0 - 1.0 / k))
}
