//! Measures how the number of well-separated solutions affects PPZ and Schöning
//! iterations-to-first-solution on planted instances.

use itertools::Itertools;
use rand::Rng as _;

use crate::cnf::{Assignment, Clause, CnfFormula, Literal};
use crate::error::{usage, Error, Result};
use crate::ppz::{ppz_solve, OracleConfig};
use crate::rng::{derive, stream, Rng};
use crate::schoning::schoning_solve;

/// Largest n the planting generator accepts (it tracks the solution space explicitly).
pub const PROBE_MAX_N: usize = 20;
const KILL_ATTEMPTS: usize = 400;
const PLANT_ATTEMPTS: usize = 10_000;
const PLANT_REDRAWS: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSpec {
    pub n: usize,
    pub k: usize,
    /// One measurement series per planted count.
    pub planted_counts: Vec<usize>,
    /// Required pairwise distance between planted solutions.
    pub min_separation: usize,
    pub trials: usize,
    pub seed: u64,
    /// Repetition cap for each solver run.
    pub max_iterations: u64,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec {
            n: 16,
            k: 3,
            planted_counts: vec![1, 8],
            min_separation: 5,
            trials: 100,
            seed: 0,
            max_iterations: 1 << 24,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeRecord {
    pub trial: usize,
    pub algo: &'static str,
    pub iterations: u64,
    pub planted_count: usize,
    /// Smallest pairwise distance among planted solutions; n+1 for a single one.
    pub min_separation: usize,
}

fn random_separated(n: usize, count: usize, sep: usize, rng: &mut Rng) -> Result<Vec<Assignment>> {
    let mut pts: Vec<Assignment> = Vec::with_capacity(count);
    let mut attempts = 0;
    while pts.len() < count {
        attempts += 1;
        if attempts > PLANT_ATTEMPTS {
            return Err(Error::Infeasible(format!(
                "could not place {count} points at pairwise distance >= {sep} in n={n}"
            )));
        }
        let u = Assignment::uniform(n, rng);
        if pts.iter().all(|p| p.distance(&u) >= sep) {
            pts.push(u);
        }
    }
    Ok(pts)
}

/// Random k-CNF whose solutions are exactly `count` planted points at pairwise distance ≥ `sep`.
/// Each added clause is falsified by a surviving non-planted point and satisfied by every planted
/// point.
pub fn planted_separated(
    n: usize,
    k: usize,
    count: usize,
    sep: usize,
    rng: &mut Rng,
) -> Result<(CnfFormula, Vec<Assignment>)> {
    if n == 0 || n > PROBE_MAX_N || k == 0 || k > n || count == 0 {
        return usage(format!("probe needs 1 <= k <= n <= {PROBE_MAX_N} and count >= 1"));
    }
    for _ in 0..PLANT_REDRAWS {
        let planted = random_separated(n, count, sep, rng)?;
        if let Some(clauses) = carve(n, k, &planted, rng) {
            return Ok((CnfFormula::from_clauses(n, clauses), planted));
        }
    }
    Err(Error::Infeasible(format!(
        "no planted set of {count} points at distance >= {sep} is cut out by width-{k} clauses"
    )))
}

/// Clauses removing every non-planted point, or None when some point has no separating clause.
fn carve(n: usize, k: usize, planted: &[Assignment], rng: &mut Rng) -> Option<Vec<Clause>> {
    let planted_idx: Vec<u64> = planted.iter().map(Assignment::to_index).collect();
    let bit = |v: usize| 1u64 << (n - 1 - v);
    let mask_of = |vars: &[usize]| vars.iter().map(|&v| bit(v)).sum::<u64>();
    // x falsifies the clause on `mask`; a planted point satisfies it iff it differs from x there
    let separates = |x: u64, mask: u64| planted_idx.iter().all(|p| (p ^ x) & mask != 0);
    let mut alive: Vec<u64> = (0..1u64 << n).collect();
    let mut clauses = Vec::new();
    while alive.len() > planted.len() {
        let x = loop {
            let x = alive[rng.gen_range(0..alive.len())];
            if !planted_idx.contains(&x) {
                break x;
            }
        };
        let vars = (0..KILL_ATTEMPTS)
            .map(|_| rand::seq::index::sample(rng, n, k).into_vec())
            .find(|v| separates(x, mask_of(v)))
            .or_else(|| (0..n).combinations(k).find(|v| separates(x, mask_of(v))))?;
        let mask = mask_of(&vars);
        let lits = vars
            .iter()
            .map(|&v| Literal {
                var: v as u32 + 1,
                negated: x & bit(v) != 0,
            })
            .collect();
        clauses.push(Clause::new(lits).expect("distinct variables"));
        alive.retain(|y| (y ^ x) & mask != 0);
    }
    Some(clauses)
}

fn min_pairwise(n: usize, pts: &[Assignment]) -> usize {
    let mut best = n + 1;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            best = best.min(a.distance(b));
        }
    }
    best
}

/// Per trial and planted count: one fresh instance, then iterations-to-first for both solvers.
pub fn probe_speedup(spec: &ProbeSpec) -> Result<Vec<ProbeRecord>> {
    let mut out = Vec::new();
    for trial in 0..spec.trials {
        for (ci, &count) in spec.planted_counts.iter().enumerate() {
            let tag = derive(derive(spec.seed, trial as u64), ci as u64);
            let mut rng = stream(tag, 0);
            let (f, planted) = planted_separated(spec.n, spec.k, count, spec.min_separation, &mut rng)?;
            let sep = min_pairwise(spec.n, &planted);
            let cfg = OracleConfig::seeded(derive(tag, 1)).with_repetitions(spec.max_iterations);
            let runs = [
                ("ppz", ppz_solve(&f, &cfg)?),
                ("schoning", schoning_solve(&f, &cfg)?),
            ];
            for (algo, r) in runs {
                if let Some(z) = &r.assignment {
                    assert!(planted.contains(z));
                }
                out.push(ProbeRecord {
                    trial,
                    algo,
                    iterations: r.iterations,
                    planted_count: count,
                    min_separation: sep,
                });
            }
        }
    }
    Ok(out)
}

pub const CSV_HEADER: &str = "trial,algo,iterations,planted_count,min_separation";

pub fn to_csv(records: &[ProbeRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.trial, r.algo, r.iterations, r.planted_count, r.min_separation
        ));
    }
    s
}

/// Median iterations of `algo` at `planted_count` (upper median for even counts).
pub fn median_iterations(records: &[ProbeRecord], algo: &str, planted_count: usize) -> Option<u64> {
    let mut v: Vec<u64> = records
        .iter()
        .filter(|r| r.algo == algo && r.planted_count == planted_count)
        .map(|r| r.iterations)
        .collect();
    if v.is_empty() {
        return None;
    }
    v.sort_unstable();
    Some(v[v.len() / 2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::enumerate_solutions;

    #[test]
    fn planted_solution_space_is_exact() {
        let mut rng = stream(1, 0);
        let (f, planted) = planted_separated(10, 3, 4, 3, &mut rng).unwrap();
        let mut sols = enumerate_solutions(&f).unwrap().into_members();
        let mut want = planted.clone();
        want.sort();
        sols.sort();
        assert_eq!(sols, want);
        assert_eq!(f.k(), 3);
        assert!(min_pairwise(10, &planted) >= 3);
    }

    #[test]
    fn empty_probe_is_header_only() {
        let spec = ProbeSpec {
            trials: 0,
            ..ProbeSpec::default()
        };
        let recs = probe_speedup(&spec).unwrap();
        assert_eq!(to_csv(&recs), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn small_probe_is_deterministic() {
        let spec = ProbeSpec {
            n: 10,
            min_separation: 3,
            trials: 3,
            ..ProbeSpec::default()
        };
        let a = probe_speedup(&spec).unwrap();
        assert_eq!(a.len(), 12);
        assert_eq!(a, probe_speedup(&spec).unwrap());
    }
}
