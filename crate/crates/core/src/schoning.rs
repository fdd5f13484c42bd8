//! Schöning walks, parameterized local search, annulus-anchored search and the Schöning
//! farthest-point oracles, together with the budget arithmetic behind them.

use rand::seq::index::sample;
use rand::Rng as _;
use rayon::prelude::*;

use crate::cnf::{Assignment, CnfFormula, Evaluator, SolutionCollection};
use crate::error::{usage, Result};
use crate::ppz::{OracleConfig, SolveOutcome};
use crate::rng::{derive, stream, Rng};

const DELTA_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Stretch {
    Identity,
    /// ⌈k·t/(k-2)⌉
    Ratio(usize),
    Alpha,
}

/// A local-search routine that finds a solution within ⌈αt⌉ of its start after ⌈cᵗ⌉ walks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LsVariant {
    pub alpha: f64,
    pub c: f64,
    stretch: Stretch,
}

impl LsVariant {
    /// α = 1, c = k. Widths below 2 are treated as 2.
    pub fn v1(k: usize) -> Self {
        LsVariant {
            alpha: 1.0,
            c: k.max(2) as f64,
            stretch: Stretch::Identity,
        }
    }

    /// α = k/(k-2), c = k-1.
    pub fn v2(k: usize) -> Result<Self> {
        if k < 3 {
            return usage(format!("variant v2 needs k >= 3, got {k}"));
        }
        Ok(LsVariant {
            alpha: k as f64 / (k - 2) as f64,
            c: (k - 1) as f64,
            stretch: Stretch::Ratio(k),
        })
    }

    /// Arbitrary (α, c), used for PLFS routines of subset problems.
    pub fn custom(alpha: f64, c: f64) -> Result<Self> {
        if !(alpha >= 1.0 && alpha.is_finite()) || !(c > 1.0 && c.is_finite()) {
            return usage(format!("need alpha >= 1 and c > 1, got alpha={alpha} c={c}"));
        }
        Ok(LsVariant {
            alpha,
            c,
            stretch: Stretch::Alpha,
        })
    }

    pub fn walk_length(&self, t: usize) -> usize {
        match self.stretch {
            Stretch::Identity => t,
            Stretch::Ratio(k) => (k * t).div_ceil(k - 2),
            Stretch::Alpha => (self.alpha * t as f64 - DELTA_SLACK).ceil().max(0.0) as usize,
        }
    }

    /// ⌈cᵗ⌉, saturating.
    pub fn attempts(&self, t: usize) -> u64 {
        let a = (self.c.powi(t as i32) - 1e-9).ceil();
        if a >= u64::MAX as f64 {
            u64::MAX
        } else {
            (a as u64).max(1)
        }
    }

    /// min{1, 2(1+α)/(c-1)}.
    pub fn max_delta(&self) -> f64 {
        (2.0 * (1.0 + self.alpha) / (self.c - 1.0)).min(1.0)
    }
}

/// Radius cap and repetition rule for anchored search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BudgetPlan {
    pub n: usize,
    pub delta: f64,
    /// ⌊δn / (2(1+α+δ))⌋
    pub radius: usize,
    pub variant: LsVariant,
}

impl BudgetPlan {
    pub fn new(n: usize, variant: LsVariant, delta: f64) -> Result<Self> {
        let max = variant.max_delta();
        if !(delta > 0.0 && delta <= max + DELTA_SLACK) && delta != 1.0 {
            return usage(format!("delta must lie in (0, {max:.6}], got {delta}"));
        }
        let radius =
            (delta * n as f64 / (2.0 * (1.0 + variant.alpha + delta)) + DELTA_SLACK).floor() as usize;
        Ok(BudgetPlan {
            n,
            delta,
            radius,
            variant,
        })
    }

    /// Plan at the variant's largest admissible δ.
    pub fn max_delta(n: usize, variant: LsVariant) -> Self {
        Self::new(n, variant, variant.max_delta()).expect("max delta is admissible")
    }

    /// min{⌊δr/(1+α)⌋, R}
    pub fn t_for(&self, r: usize) -> usize {
        let t = (self.delta * r as f64 / (1.0 + self.variant.alpha) + DELTA_SLACK).floor() as usize;
        t.min(self.radius)
    }

    /// n·|A_{r-t,r+t}|/C(n,t) before the effort multiplier.
    pub fn base_repetitions(&self, r: usize) -> f64 {
        let t = self.t_for(r);
        let n = self.n;
        self.n.max(1) as f64 * annulus_size(n, r.saturating_sub(t), r + t) / binom(n, t)
    }

    pub fn repetitions(&self, r: usize, cfg: &OracleConfig) -> u64 {
        cfg.resolve(self.base_repetitions(r))
    }
}

/// A procedure that, given y and t, looks for a feasible point near y in ⌈cᵗ⌉·poly(n) time.
pub trait Plfs: Sync {
    fn n(&self) -> usize;
    fn variant(&self) -> LsVariant;
    /// Any returned point is feasible and within `variant().walk_length(t)` of `y`.
    fn search(&self, y: &Assignment, t: usize, rng: &mut Rng) -> Option<Assignment>;
}

/// Schöning local search on a CNF formula as a [`Plfs`].
pub struct SchoningPlfs {
    n: usize,
    ev: Evaluator,
    variant: LsVariant,
}

impl SchoningPlfs {
    pub fn new(f: &CnfFormula, variant: LsVariant) -> Self {
        SchoningPlfs {
            n: f.num_vars(),
            ev: f.evaluator(),
            variant,
        }
    }
}

impl Plfs for SchoningPlfs {
    fn n(&self) -> usize {
        self.n
    }

    fn variant(&self) -> LsVariant {
        self.variant
    }

    fn search(&self, y: &Assignment, t: usize, rng: &mut Rng) -> Option<Assignment> {
        local_search_ev(&self.ev, y, t, &self.variant, rng)
    }
}

fn walk_ev(ev: &Evaluator, z: &Assignment, steps: usize, rng: &mut Rng) -> Option<Assignment> {
    let mut u = z.clone();
    for _ in 0..steps {
        let Some(ci) = ev.first_violated(&u) else {
            return Some(u);
        };
        let lits = ev.clause_vars(ci);
        if lits.is_empty() {
            return None;
        }
        u.flip(lits[rng.gen_range(0..lits.len())]);
    }
    ev.satisfies(&u).then_some(u)
}

/// Up to `steps` flips, each inside the first violated clause; the first satisfying point reached.
pub fn schoning_walk(
    f: &CnfFormula,
    z: &Assignment,
    steps: usize,
    rng: &mut Rng,
) -> Result<Option<Assignment>> {
    if z.len() != f.num_vars() {
        return usage("start point length differs from n");
    }
    Ok(walk_ev(&f.evaluator(), z, steps, rng))
}

fn local_search_ev(
    ev: &Evaluator,
    y: &Assignment,
    t: usize,
    v: &LsVariant,
    rng: &mut Rng,
) -> Option<Assignment> {
    let len = v.walk_length(t);
    for _ in 0..v.attempts(t) {
        if let Some(u) = walk_ev(ev, y, len, rng) {
            assert!(u.distance(y) <= len);
            return Some(u);
        }
    }
    None
}

/// ⌈cᵗ⌉ walks of the variant's length from `y`.
pub fn local_search(
    f: &CnfFormula,
    y: &Assignment,
    t: usize,
    v: &LsVariant,
    rng: &mut Rng,
) -> Result<Option<Assignment>> {
    if y.len() != f.num_vars() {
        return usage("start point length differs from n");
    }
    if t > f.num_vars() {
        return usage(format!("radius {t} exceeds n={}", f.num_vars()));
    }
    Ok(local_search_ev(&f.evaluator(), y, t, v, rng))
}

/// C(n, t) as a float.
pub fn binom(n: usize, t: usize) -> f64 {
    if t > n {
        return 0.0;
    }
    let t = t.min(n - t);
    (0..t).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// |{x : lo ≤ d(x, z) ≤ min(hi, n)}|
pub fn annulus_size(n: usize, lo: usize, hi: usize) -> f64 {
    (lo..=hi.min(n)).map(|x| binom(n, x)).sum()
}

/// Uniform draw from the annulus lo ≤ d(x, z) ≤ min(hi, n).
pub fn sample_annulus(z: &Assignment, lo: usize, hi: usize, rng: &mut Rng) -> Result<Assignment> {
    let n = z.len();
    if lo > n || lo > hi {
        return usage(format!("empty annulus [{lo}, {hi}] for n={n}"));
    }
    Ok(sample_annulus_unchecked(z, lo, hi.min(n), rng))
}

fn sample_annulus_unchecked(z: &Assignment, lo: usize, hi: usize, rng: &mut Rng) -> Assignment {
    let n = z.len();
    // log-weights relative to radius lo keep the computation finite for large n
    let mut logs = Vec::with_capacity(hi - lo + 1);
    let mut l = 0.0f64;
    for x in lo..=hi {
        if x > lo {
            l += ((n - x + 1) as f64).ln() - (x as f64).ln();
        }
        logs.push(l);
    }
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut pick = rng.gen::<f64>() * total;
    let mut x = hi;
    for (i, w) in weights.iter().enumerate() {
        if pick < *w {
            x = lo + i;
            break;
        }
        pick -= w;
    }
    let mut u = z.clone();
    for i in sample(rng, n, x) {
        u.flip(i);
    }
    u
}

/// Generic anchored step: y uniform in A_{r-t,r+t}(z), then the PLFS from y with radius t.
pub fn anchored_search<P: Plfs + ?Sized>(
    p: &P,
    z: &Assignment,
    r: usize,
    plan: &BudgetPlan,
    rng: &mut Rng,
) -> Option<Assignment> {
    let t = plan.t_for(r);
    let y = sample_annulus_unchecked(z, r.saturating_sub(t).min(p.n()), (r + t).min(p.n()), rng);
    p.search(&y, t, rng)
}

/// Anchored local search on a CNF formula.
pub fn anchored_ls(
    f: &CnfFormula,
    z: &Assignment,
    r: usize,
    plan: &BudgetPlan,
    rng: &mut Rng,
) -> Result<Option<Assignment>> {
    if z.len() != f.num_vars() || plan.n != f.num_vars() {
        return usage("anchor or plan dimension differs from n");
    }
    if r > f.num_vars() {
        return usage(format!("radius {r} exceeds n={}", f.num_vars()));
    }
    Ok(anchored_search(&SchoningPlfs::new(f, plan.variant), z, r, plan, rng))
}

type Scored = (i64, i64, Assignment);

fn better(a: &Scored, b: &Scored) -> bool {
    (a.0, a.1) > (b.0, b.1) || ((a.0, a.1) == (b.0, b.1) && a.2 < b.2)
}

fn merge(a: Option<Scored>, b: Option<Scored>) -> Option<Scored> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(p), Some(q)) => Some(if better(&q, &p) { q } else { p }),
    }
}

/// Runs every (anchor, r) task with its own stream and keeps the best scored output.
/// `score` returns None for outputs that do not qualify.
pub(crate) fn anchored_best<P: Plfs + ?Sized>(
    p: &P,
    anchors: &[Assignment],
    plan: &BudgetPlan,
    cfg: &OracleConfig,
    score: &(dyn Fn(&Assignment) -> Option<(i64, i64)> + Sync),
) -> Option<Assignment> {
    let n = p.n();
    let tasks: Vec<(usize, usize)> = (0..anchors.len())
        .flat_map(|a| (0..=n).map(move |r| (a, r)))
        .collect();
    tasks
        .par_iter()
        .map(|&(a, r)| {
            let mut rng = stream(derive(cfg.seed, a as u64), r as u64);
            let mut best = None;
            for _ in 0..plan.repetitions(r, cfg) {
                if let Some(u) = anchored_search(p, &anchors[a], r, plan, &mut rng) {
                    if let Some((s1, s2)) = score(&u) {
                        best = merge(best, Some((s1, s2, u)));
                    }
                }
            }
            best
        })
        .reduce(|| None, merge)
        .map(|(_, _, u)| u)
}

fn check_anchors(f: &CnfFormula, s: &SolutionCollection, plan: &BudgetPlan) -> Result<()> {
    let Some(z) = s.members().first() else {
        return usage("anchor collection is empty");
    };
    if z.len() != f.num_vars() || plan.n != f.num_vars() {
        return usage("anchor or plan dimension differs from n");
    }
    Ok(())
}

/// Inclusive weight window [(1-δ)W, (1+δ)W]; W = 0 means every weight.
pub fn weight_window(n: usize, w: usize, delta: f64) -> (usize, usize) {
    if w == 0 {
        return (0, n);
    }
    let lo = ((1.0 - delta) * w as f64 - DELTA_SLACK).ceil().max(0.0) as usize;
    let hi = ((1.0 + delta) * w as f64 + DELTA_SLACK).floor() as usize;
    (lo, hi.min(n))
}

fn dedup_anchors(s: &SolutionCollection) -> Vec<Assignment> {
    let mut out: Vec<Assignment> = Vec::new();
    for z in s.members() {
        if !out.contains(z) {
            out.push(z.clone());
        }
    }
    out
}

/// Satisfying point in the weight window maximizing the min distance to `s`, anchored at every
/// member of `s` and at 0ⁿ.
pub fn schoning_farthest_weighted(
    f: &CnfFormula,
    s: &SolutionCollection,
    w: usize,
    plan: &BudgetPlan,
    cfg: &OracleConfig,
) -> Result<Option<Assignment>> {
    check_anchors(f, s, plan)?;
    cfg.validate()?;
    if w > f.num_vars() {
        return usage(format!("weight {w} exceeds n={}", f.num_vars()));
    }
    let (lo, hi) = weight_window(f.num_vars(), w, plan.delta);
    let mut anchors = dedup_anchors(s);
    let zero = Assignment::zeros(f.num_vars());
    if !anchors.contains(&zero) {
        anchors.push(zero);
    }
    let score = |u: &Assignment| {
        let wt = u.weight();
        (lo..=hi)
            .contains(&wt)
            .then(|| (s.min_distance_to(u).unwrap() as i64, wt as i64))
    };
    let p = SchoningPlfs::new(f, plan.variant);
    Ok(anchored_best(&p, &anchors, plan, cfg, &score))
}

/// Satisfying point maximizing the summed distance to `s`; with `exclude`, members of `s` never
/// qualify.
pub fn schoning_farthest_sum(
    f: &CnfFormula,
    s: &SolutionCollection,
    plan: &BudgetPlan,
    cfg: &OracleConfig,
    exclude: bool,
) -> Result<Option<Assignment>> {
    check_anchors(f, s, plan)?;
    cfg.validate()?;
    let anchors = dedup_anchors(s);
    let score = |u: &Assignment| {
        (!exclude || !s.contains(u)).then(|| (s.sum_distance_to(u) as i64, 0))
    };
    let p = SchoningPlfs::new(f, plan.variant);
    Ok(anchored_best(&p, &anchors, plan, cfg, &score))
}

/// Random restarts with walks of length 3n; AUTO budget ⌈effort·n·(2(1-1/k))ⁿ⌉.
pub fn schoning_solve(f: &CnfFormula, cfg: &OracleConfig) -> Result<SolveOutcome> {
    cfg.validate()?;
    let n = f.num_vars();
    let k = f.k().max(2) as f64;
    let reps = cfg.resolve(n.max(1) as f64 * (2.0 * (1.0 - 1.0 / k)).powi(n as i32));
    let ev = f.evaluator();
    let found = (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(cfg.seed, i);
            let z = Assignment::uniform(n, &mut rng);
            walk_ev(&ev, &z, 3 * n, &mut rng).map(|u| (i, u))
        })
        .find_map_first(|x| x);
    Ok(match found {
        Some((i, z)) => SolveOutcome {
            assignment: Some(z),
            iterations: i + 1,
        },
        None => SolveOutcome {
            assignment: None,
            iterations: reps,
        },
    })
}

/// Binary entropy in bits.
pub fn entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// The x in [0, 1/2] with H(x) = y, by bisection.
pub fn inverse_entropy(y: f64) -> f64 {
    let y = y.clamp(0.0, 1.0);
    // H is flat at 1/2, so bisection cannot resolve the top endpoint
    if y >= 1.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if entropy(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// 2·c^ρ / 2^{H(ρ)} with ρ = δ/(2(1+α+δ)).
pub fn growth_base(alpha: f64, c: f64, delta: f64) -> f64 {
    let rho = delta / (2.0 * (1.0 + alpha + delta));
    2.0 * c.powf(rho) / entropy(rho).exp2()
}

/// log₂ of 2ⁿ·c^t / C(n,t).
pub fn log2_tau(n: usize, c: f64, t: usize) -> f64 {
    n as f64 + t as f64 * c.log2() - binom(n, t).log2()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BudgetEstimate {
    pub radius: usize,
    pub log2_tau: f64,
    pub base: f64,
}

/// Radius, τ = 2ⁿcᴿ/C(n,R) (as log₂) and the per-n growth base for a plan.
pub fn budget_math(n: usize, variant: LsVariant, delta: f64) -> Result<BudgetEstimate> {
    let plan = BudgetPlan::new(n, variant, delta)?;
    Ok(BudgetEstimate {
        radius: plan.radius,
        log2_tau: log2_tau(n, variant.c, plan.radius),
        base: growth_base(variant.alpha, variant.c, delta),
    })
}

/// The t in 1..=n minimizing 2ⁿcᵗ/C(n,t).
pub fn binommax_argmin(n: usize, c: f64) -> usize {
    (1..=n)
        .min_by(|&a, &b| log2_tau(n, c, a).total_cmp(&log2_tau(n, c, b)))
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{bits, enumerate_solutions};
    use crate::gen::random_kcnf;
    use proptest::prelude::*;

    fn f(n: usize, cl: &[&[i64]]) -> CnfFormula {
        CnfFormula::new(n, cl.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    #[test]
    fn variant_parameters() {
        let v = LsVariant::v2(3).unwrap();
        assert_eq!(v.walk_length(5), 15);
        assert_eq!(LsVariant::v2(7).unwrap().walk_length(2), 3);
        assert_eq!(v.attempts(3), 8);
        assert_eq!(LsVariant::v1(3).attempts(2), 9);
        assert!((LsVariant::v1(7).max_delta() - 2.0 / 3.0).abs() < 1e-12);
        assert!((LsVariant::v2(7).unwrap().max_delta() - 0.96).abs() < 1e-12);
        assert!(LsVariant::v2(2).is_err());
        assert!(BudgetPlan::new(10, LsVariant::v1(7), 0.9).is_err());
        assert!(BudgetPlan::new(10, LsVariant::v1(7), 1.0).is_ok());
        assert_eq!(BudgetPlan::new(100, LsVariant::v1(3), 0.5).unwrap().radius, 10);
    }

    #[test]
    fn walk_examples() {
        let g = f(3, &[&[1, 2, 3]]);
        let mut rng = stream(1, 0);
        for _ in 0..20 {
            assert!(schoning_walk(&g, &bits("000"), 1, &mut rng).unwrap().is_some());
        }
        assert_eq!(schoning_walk(&g, &bits("010"), 0, &mut rng).unwrap(), Some(bits("010")));
        assert_eq!(
            local_search(&g, &bits("100"), 0, &LsVariant::v1(3), &mut rng).unwrap(),
            Some(bits("100"))
        );
    }

    #[test]
    fn walk_success_rate_meets_bound() {
        let g = f(3, &[&[1, 2, 3], &[-1, 2, 3]]);
        let trials = 100_000;
        let mut rng = stream(2, 0);
        let z = bits("100");
        let hits = (0..trials)
            .filter(|_| schoning_walk(&g, &z, 2, &mut rng).unwrap().is_some())
            .count() as f64;
        let p = 1.0 / 9.0;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        assert!(hits >= trials as f64 * p - 3.0 * sigma);
    }

    #[test]
    fn annulus_goodness_of_fit() {
        let mut rng = stream(3, 0);
        let z = bits("000");
        let mut counts = std::collections::HashMap::new();
        let draws = 10_000;
        for _ in 0..draws {
            let x = sample_annulus(&z, 2, 2, &mut rng).unwrap();
            *counts.entry(x.to_string()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 3);
        let e = draws as f64 / 3.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // df = 2, p = 0.001
        assert!(chi2 < 13.82, "chi2 = {chi2}");

        let mut cube = vec![0usize; 1 << 6];
        let z = Assignment::zeros(6);
        for _ in 0..64_000 {
            cube[sample_annulus(&z, 0, 6, &mut rng).unwrap().to_index() as usize] += 1;
        }
        let chi2: f64 = cube.iter().map(|&c| (c as f64 - 1000.0).powi(2) / 1000.0).sum();
        // df = 63, p = 0.001
        assert!(chi2 < 103.4, "chi2 = {chi2}");
        assert!(sample_annulus(&z, 7, 9, &mut rng).is_err());
    }

    #[test]
    fn weighted_example() {
        let g = f(3, &[&[1, 2, 3]]);
        let s = SolutionCollection::singleton(bits("111"));
        let plan = BudgetPlan::new(3, LsVariant::v1(3), 0.5).unwrap();
        let u = schoning_farthest_weighted(&g, &s, 1, &plan, &OracleConfig::seeded(4))
            .unwrap()
            .unwrap();
        assert_eq!(u.weight(), 1);
        assert_eq!(u.distance(&bits("111")), 2);
        assert_eq!(u, bits("001"));
    }

    #[test]
    fn sum_examples() {
        let g = f(2, &[&[1, 2]]);
        let plan = BudgetPlan::new(2, LsVariant::v1(2), 1.0).unwrap();
        let cfg = OracleConfig::seeded(5);
        let one = SolutionCollection::singleton(bits("11"));
        let u = schoning_farthest_sum(&g, &one, &plan, &cfg, false).unwrap().unwrap();
        assert_eq!(one.sum_distance_to(&u), 1);
        let two = SolutionCollection::from_members(vec![bits("11"), bits("11")], false).unwrap();
        let v = schoning_farthest_sum(&g, &two, &plan, &cfg, false).unwrap().unwrap();
        assert_eq!(two.sum_distance_to(&v), 2);
    }

    #[test]
    fn table_bases() {
        let cases = [(2.0, 1.5486), (3.592, 1.6420), (2.0755, 1.5544)];
        for (c, want) in cases {
            assert!((growth_base(1.0, c, 0.5) - want).abs() < 5e-5, "c={c}");
        }
        assert!((growth_base(1.0, 1.5538, 0.5) - 1.51).abs() < 5e-3);
    }

    #[test]
    fn entropy_endpoints() {
        assert_eq!(entropy(0.0), 0.0);
        assert!((entropy(0.5) - 1.0).abs() < 1e-15);
        assert!((inverse_entropy(1.0) - 0.5).abs() < 1e-11);
        assert!(inverse_entropy(0.0) < 1e-11);
    }

    #[test]
    fn binommax_near_prediction() {
        for c in [2.0, 3.0, 7.0] {
            let t = binommax_argmin(40, c);
            let pred = (40.0 / (c + 1.0)).floor() as i64;
            assert!((t as i64 - pred).abs() <= 1, "c={c} t={t}");
        }
    }

    #[test]
    fn solve_finds_solution() {
        let mut rng = stream(6, 0);
        let g = random_kcnf(12, 3, 45, &mut rng);
        let out = schoning_solve(&g, &OracleConfig::seeded(1)).unwrap();
        assert_eq!(out.assignment.is_some(), !enumerate_solutions(&g).unwrap().is_empty());
        assert_eq!(out, schoning_solve(&g, &OracleConfig::seeded(1)).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn local_search_respects_walk_cap(seed in any::<u64>(), t in 0usize..5, v2 in any::<bool>()) {
            let mut rng = stream(seed, 0);
            let g = random_kcnf(10, 3, 30, &mut rng);
            let v = if v2 { LsVariant::v2(3).unwrap() } else { LsVariant::v1(3) };
            let y = Assignment::uniform(10, &mut rng);
            if let Some(u) = local_search(&g, &y, t, &v, &mut rng).unwrap() {
                prop_assert!(g.satisfies(&u));
                prop_assert!(u.distance(&y) <= v.walk_length(t));
            }
        }

        #[test]
        fn annulus_membership(seed in any::<u64>(), n in 1usize..40, lo in 0usize..40, span in 0usize..10) {
            let lo = lo % (n + 1);
            let mut rng = stream(seed, 0);
            let z = Assignment::uniform(n, &mut rng);
            let x = sample_annulus(&z, lo, lo + span, &mut rng).unwrap();
            let d = x.distance(&z);
            prop_assert!(lo <= d && d <= (lo + span).min(n));
        }
    }
}
