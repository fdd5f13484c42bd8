//! Random instance generators shared by tests, benchmarks and the speedup probe.

use rand::seq::index::sample;
use rand::Rng;

use crate::cnf::{Assignment, Clause, CnfFormula, Literal};

/// Clause over `k` distinct variables with uniform signs.
pub fn random_clause<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Clause {
    assert!(k <= n && k > 0);
    let lits = sample(rng, n, k)
        .into_iter()
        .map(|v| Literal {
            var: v as u32 + 1,
            negated: rng.gen(),
        })
        .collect();
    Clause::new(lits).expect("distinct variables never form a tautology")
}

/// Uniform random k-CNF with `m` clauses of width exactly `k`.
pub fn random_kcnf<R: Rng + ?Sized>(n: usize, k: usize, m: usize, rng: &mut R) -> CnfFormula {
    let clauses = (0..m).map(|_| random_clause(n, k, rng)).collect();
    CnfFormula::from_clauses(n, clauses)
}

/// Random k-CNF with `m` clauses, each satisfied by every point of `planted`.
pub fn planted_kcnf<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    m: usize,
    planted: &[Assignment],
    rng: &mut R,
) -> CnfFormula {
    let mut clauses = Vec::with_capacity(m);
    while clauses.len() < m {
        let c = random_clause(n, k, rng);
        if planted.iter().all(|z| c.is_satisfied_by(z)) {
            clauses.push(c);
        }
    }
    CnfFormula::from_clauses(n, clauses)
}
