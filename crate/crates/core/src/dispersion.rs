//! Dispersion drivers on top of farthest-point oracles: farthest insertion for the min objective,
//! insertion followed by swap local search for the sum objectives, and the weighted wrappers.

use crate::cnf::{
    dispersion_measures, enumerate_solutions_with_limit, Assignment, CnfFormula,
    SolutionCollection, WeightConstraint, DEFAULT_ENUMERATION_LIMIT,
};
use crate::error::{usage, Error, Result};
use crate::ppz::{
    ppz_farthest_min, ppz_farthest_sum, ppz_min_factor, ppz_solve, OracleConfig,
};
use crate::schoning::{
    schoning_farthest_sum, schoning_farthest_weighted, schoning_solve, weight_window, BudgetPlan,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Min,
    Sum,
}

/// A procedure returning a satisfying assignment far from a given collection.
pub trait FarthestOracle {
    fn flavor(&self) -> Flavor;
    /// Declared approximation factor of a single call.
    fn quality(&self) -> f64;
    /// Whether members of the query collection are excluded from answers.
    fn distinct(&self) -> bool {
        self.flavor() == Flavor::Min
    }
    /// First point of the collection. `Ok(None)` means nothing was found within budget.
    fn seed(&mut self) -> Result<Option<Assignment>>;
    fn farthest(&mut self, s: &SolutionCollection) -> Result<Option<Assignment>>;
    /// Number of `seed` and `farthest` calls so far.
    fn calls(&self) -> u64;
}

/// Exact oracle over the enumerated solution space.
pub struct ExactOracle {
    flavor: Flavor,
    exclude: bool,
    omega: Vec<Assignment>,
    seed_point: Option<Assignment>,
    calls: u64,
}

impl ExactOracle {
    pub fn new(f: &CnfFormula, flavor: Flavor) -> Result<Self> {
        let omega = enumerate_solutions_with_limit(f, DEFAULT_ENUMERATION_LIMIT)?.into_members();
        Ok(ExactOracle {
            flavor,
            exclude: false,
            omega,
            seed_point: None,
            calls: 0,
        })
    }

    /// Start from `z` instead of the lexicographically first solution.
    pub fn with_seed(mut self, z: Assignment) -> Self {
        self.seed_point = Some(z);
        self
    }

    /// Never answer with a member of the query collection.
    pub fn excluding(mut self) -> Self {
        self.exclude = true;
        self
    }
}

impl FarthestOracle for ExactOracle {
    fn flavor(&self) -> Flavor {
        self.flavor
    }

    fn quality(&self) -> f64 {
        1.0
    }

    fn distinct(&self) -> bool {
        self.flavor == Flavor::Min || self.exclude
    }

    fn seed(&mut self) -> Result<Option<Assignment>> {
        self.calls += 1;
        if self.omega.is_empty() {
            return Err(Error::Unsat);
        }
        Ok(Some(self.seed_point.clone().unwrap_or_else(|| self.omega[0].clone())))
    }

    fn farthest(&mut self, s: &SolutionCollection) -> Result<Option<Assignment>> {
        self.calls += 1;
        let mut best: Option<(usize, &Assignment)> = None;
        for u in &self.omega {
            if self.exclude && s.contains(u) {
                continue;
            }
            let v = match self.flavor {
                Flavor::Min => s.min_distance_to(u).unwrap_or(0),
                Flavor::Sum => s.sum_distance_to(u),
            };
            // omega is sorted, so the first maximum is the lexicographically smallest
            if best.is_none_or(|(bv, _)| v > bv) {
                best = Some((v, u));
            }
        }
        Ok(best.map(|(_, u)| u.clone()))
    }

    fn calls(&self) -> u64 {
        self.calls
    }
}

/// PPZ oracle for the min objective: ball search plus PPZ repetitions.
pub struct PpzMinOracle<'a> {
    f: &'a CnfFormula,
    cfg: OracleConfig,
    calls: u64,
}

impl<'a> PpzMinOracle<'a> {
    pub fn new(f: &'a CnfFormula, cfg: OracleConfig) -> Self {
        PpzMinOracle { f, cfg, calls: 0 }
    }
}

impl FarthestOracle for PpzMinOracle<'_> {
    fn flavor(&self) -> Flavor {
        Flavor::Min
    }

    fn quality(&self) -> f64 {
        ppz_min_factor(self.f.k().max(2))
    }

    fn seed(&mut self) -> Result<Option<Assignment>> {
        self.calls += 1;
        Ok(ppz_solve(self.f, &self.cfg.child(self.calls))?.assignment)
    }

    fn farthest(&mut self, s: &SolutionCollection) -> Result<Option<Assignment>> {
        self.calls += 1;
        ppz_farthest_min(self.f, s, &self.cfg.child(self.calls))
    }

    fn calls(&self) -> u64 {
        self.calls
    }
}

/// PPZ oracle for the sum objectives.
pub struct PpzSumOracle<'a> {
    f: &'a CnfFormula,
    cfg: OracleConfig,
    exclude: bool,
    calls: u64,
}

impl<'a> PpzSumOracle<'a> {
    pub fn new(f: &'a CnfFormula, cfg: OracleConfig, exclude: bool) -> Self {
        PpzSumOracle {
            f,
            cfg,
            exclude,
            calls: 0,
        }
    }
}

impl FarthestOracle for PpzSumOracle<'_> {
    fn flavor(&self) -> Flavor {
        Flavor::Sum
    }

    fn quality(&self) -> f64 {
        let k = self.f.k().max(2) as f64;
        (k - 1.0) / (k + 1.0)
    }

    fn distinct(&self) -> bool {
        self.exclude
    }

    fn seed(&mut self) -> Result<Option<Assignment>> {
        self.calls += 1;
        Ok(ppz_solve(self.f, &self.cfg.child(self.calls))?.assignment)
    }

    fn farthest(&mut self, s: &SolutionCollection) -> Result<Option<Assignment>> {
        self.calls += 1;
        ppz_farthest_sum(self.f, s, &self.cfg.child(self.calls), self.exclude)
    }

    fn calls(&self) -> u64 {
        self.calls
    }
}

/// Schöning oracle for the min objective restricted to a weight window around `w`.
pub struct SchoningMinOracle<'a> {
    f: &'a CnfFormula,
    plan: BudgetPlan,
    cfg: OracleConfig,
    w: usize,
    calls: u64,
}

impl<'a> SchoningMinOracle<'a> {
    /// `w = 0` is the unweighted oracle.
    pub fn new(f: &'a CnfFormula, plan: BudgetPlan, cfg: OracleConfig, w: usize) -> Self {
        SchoningMinOracle {
            f,
            plan,
            cfg,
            w,
            calls: 0,
        }
    }
}

impl FarthestOracle for SchoningMinOracle<'_> {
    fn flavor(&self) -> Flavor {
        Flavor::Min
    }

    fn quality(&self) -> f64 {
        1.0 - self.plan.delta
    }

    fn seed(&mut self) -> Result<Option<Assignment>> {
        self.calls += 1;
        let cfg = self.cfg.child(self.calls);
        if self.w == 0 {
            return Ok(schoning_solve(self.f, &cfg)?.assignment);
        }
        let origin = SolutionCollection::singleton(Assignment::zeros(self.f.num_vars()));
        schoning_farthest_weighted(self.f, &origin, self.w, &self.plan, &cfg)
    }

    fn farthest(&mut self, s: &SolutionCollection) -> Result<Option<Assignment>> {
        self.calls += 1;
        schoning_farthest_weighted(self.f, s, self.w, &self.plan, &self.cfg.child(self.calls))
    }

    fn calls(&self) -> u64 {
        self.calls
    }
}

/// Schöning oracle for the sum objectives.
pub struct SchoningSumOracle<'a> {
    f: &'a CnfFormula,
    plan: BudgetPlan,
    cfg: OracleConfig,
    exclude: bool,
    calls: u64,
}

impl<'a> SchoningSumOracle<'a> {
    pub fn new(f: &'a CnfFormula, plan: BudgetPlan, cfg: OracleConfig, exclude: bool) -> Self {
        SchoningSumOracle {
            f,
            plan,
            cfg,
            exclude,
            calls: 0,
        }
    }
}

impl FarthestOracle for SchoningSumOracle<'_> {
    fn flavor(&self) -> Flavor {
        Flavor::Sum
    }

    fn quality(&self) -> f64 {
        1.0 - self.plan.delta
    }

    fn distinct(&self) -> bool {
        self.exclude
    }

    fn seed(&mut self) -> Result<Option<Assignment>> {
        self.calls += 1;
        Ok(schoning_solve(self.f, &self.cfg.child(self.calls))?.assignment)
    }

    fn farthest(&mut self, s: &SolutionCollection) -> Result<Option<Assignment>> {
        self.calls += 1;
        schoning_farthest_sum(self.f, s, &self.plan, &self.cfg.child(self.calls), self.exclude)
    }

    fn calls(&self) -> u64 {
        self.calls
    }
}

#[derive(Clone, Debug)]
pub struct DispersionRun {
    pub solutions: SolutionCollection,
    pub oracle_calls: u64,
    /// Swap rounds executed by the sum driver; 0 for the min driver.
    pub rounds: u64,
    /// Whether the swap phase ended on a round without a swap.
    pub converged: bool,
}

fn check_member(f: &CnfFormula, u: &Assignment) -> Result<()> {
    if u.len() != f.num_vars() || !f.satisfies(u) {
        return Err(Error::Capability(format!("oracle returned a non-solution {u}")));
    }
    Ok(())
}

fn seed_collection(
    f: &CnfFormula,
    s: usize,
    o: &mut dyn FarthestOracle,
) -> Result<SolutionCollection> {
    if s == 0 {
        return usage("s must be at least 1");
    }
    let z = o.seed()?.ok_or(Error::NotFound)?;
    check_member(f, &z)?;
    let mut coll = if o.distinct() {
        SolutionCollection::new_set()
    } else {
        SolutionCollection::new_multiset()
    };
    coll.push(z)?;
    Ok(coll)
}

/// Grows the collection to `s` members with oracle answers; rejected answers (none, or a
/// duplicate in a set) are retried, 3·s times in total.
fn insert_until(
    f: &CnfFormula,
    s: usize,
    mut coll: SolutionCollection,
    o: &mut dyn FarthestOracle,
) -> Result<SolutionCollection> {
    let mut retries = 0;
    while coll.len() < s {
        let answer = o.farthest(&coll)?;
        match answer {
            Some(u) if !(coll.is_distinct() && coll.contains(&u)) => {
                check_member(f, &u)?;
                coll.push(u)?;
            }
            _ => {
                retries += 1;
                if retries > 3 * s {
                    return Err(Error::Partial {
                        built: coll,
                        target: s,
                        oracle_calls: o.calls(),
                    });
                }
            }
        }
    }
    Ok(coll)
}

/// Farthest insertion: seed, then s-1 oracle answers.
pub fn gonzalez_min(f: &CnfFormula, s: usize, o: &mut dyn FarthestOracle) -> Result<DispersionRun> {
    if o.flavor() != Flavor::Min {
        return usage("min dispersion needs a min-flavored oracle");
    }
    let coll = seed_collection(f, s, o)?;
    let coll = insert_until(f, s, coll, o)?;
    Ok(DispersionRun {
        solutions: coll,
        oracle_calls: o.calls(),
        rounds: 0,
        converged: true,
    })
}

fn sum_pd(s: &SolutionCollection) -> u64 {
    dispersion_measures(s, None).map(|m| m.sum_pd).unwrap_or(0)
}

/// Farthest insertion followed by at most s²n rounds of single swaps; a swap happens only on
/// strict improvement.
pub fn sum_disperse(f: &CnfFormula, s: usize, o: &mut dyn FarthestOracle) -> Result<DispersionRun> {
    if o.flavor() != Flavor::Sum {
        return usage("sum dispersion needs a sum-flavored oracle");
    }
    let coll = seed_collection(f, s, o)?;
    let mut coll = insert_until(f, s, coll, o)?;
    let max_rounds = (s * s * f.num_vars()) as u64;
    let mut rounds = 0;
    let mut converged = s == 1;
    while !converged && rounds < max_rounds {
        rounds += 1;
        let before = sum_pd(&coll);
        let mut swapped = false;
        for i in 0..s {
            let rest = coll.without(i);
            let Some(u) = o.farthest(&rest)? else {
                continue;
            };
            if rest.sum_distance_to(&u) > rest.sum_distance_to(&coll.members()[i]) {
                if coll.is_distinct() && coll.contains(&u) {
                    continue;
                }
                check_member(f, &u)?;
                coll.replace(i, u)?;
                swapped = true;
            }
        }
        assert!(sum_pd(&coll) >= before, "swap round decreased sumPD");
        converged = !swapped;
    }
    Ok(DispersionRun {
        solutions: coll,
        oracle_calls: o.calls(),
        rounds,
        converged,
    })
}

/// Min dispersion over solutions of weight roughly at least (or at most) W, driven by the
/// weighted Schöning oracle.
pub fn disperse_weighted_min(
    f: &CnfFormula,
    s: usize,
    w: WeightConstraint,
    plan: &BudgetPlan,
    cfg: &OracleConfig,
) -> Result<DispersionRun> {
    let n = f.num_vars();
    w.validate(n)?;
    let fill = |g: &CnfFormula, target: usize| -> Result<DispersionRun> {
        let mut o = SchoningMinOracle::new(g, *plan, *cfg, target);
        gonzalez_min(g, s, &mut o).map_err(|e| match e {
            Error::Partial { built, target, .. } => Error::Infeasible(format!(
                "found {} of {target} solutions in the weight window",
                built.len()
            )),
            e => e,
        })
    };
    match w {
        WeightConstraint::None | WeightConstraint::AtLeast(0) => fill(f, 0),
        WeightConstraint::AtMost(x) if x == n => fill(f, 0),
        WeightConstraint::AtLeast(x) => fill(f, x),
        WeightConstraint::AtMost(x) => {
            // complementing every point turns weight ≤ W into weight ≥ n-W
            let g = f.rotate(&Assignment::zeros(n))?;
            let mut run = fill(&g, n - x)?;
            let back = run
                .solutions
                .members()
                .iter()
                .map(Assignment::complement)
                .collect();
            run.solutions = SolutionCollection::from_members(back, true)?;
            for u in run.solutions.members() {
                check_member(f, u)?;
            }
            Ok(run)
        }
    }
}

/// Weight range a member of [`disperse_weighted_min`]'s output lies in.
pub fn weighted_window(n: usize, w: WeightConstraint, delta: f64) -> (usize, usize) {
    match w {
        WeightConstraint::None | WeightConstraint::AtLeast(0) => (0, n),
        WeightConstraint::AtMost(x) if x == n => (0, n),
        WeightConstraint::AtLeast(x) => weight_window(n, x, delta),
        WeightConstraint::AtMost(x) => {
            let (lo, hi) = weight_window(n, n - x, delta);
            (n - hi, n - lo)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{bits, brute_opt, DispersionObjective};
    use crate::gen::random_kcnf;
    use crate::rng::stream;
    use crate::schoning::LsVariant;
    use proptest::prelude::*;

    fn f(n: usize, cl: &[&[i64]]) -> CnfFormula {
        CnfFormula::new(n, cl.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    #[test]
    fn gonzalez_example() {
        let g = f(2, &[&[1, 2]]);
        let mut o = ExactOracle::new(&g, Flavor::Min).unwrap().with_seed(bits("11"));
        let run = gonzalez_min(&g, 2, &mut o).unwrap();
        assert_eq!(run.solutions.members()[0], bits("11"));
        assert_eq!(run.solutions.members()[1], bits("01"));
        assert_eq!(run.oracle_calls, 2);
        let mut o = ExactOracle::new(&g, Flavor::Min).unwrap();
        assert_eq!(gonzalez_min(&g, 1, &mut o).unwrap().solutions.len(), 1);
    }

    #[test]
    fn gonzalez_reports_partial() {
        let g = f(2, &[&[1], &[2]]);
        let mut o = ExactOracle::new(&g, Flavor::Min).unwrap();
        match gonzalez_min(&g, 2, &mut o) {
            Err(Error::Partial { built, target, .. }) => {
                assert_eq!(built.len(), 1);
                assert_eq!(target, 2);
            }
            other => panic!("expected partial, got {other:?}"),
        }
        let unsat = f(1, &[&[1], &[-1]]);
        let mut o = ExactOracle::new(&unsat, Flavor::Min).unwrap();
        assert!(matches!(gonzalez_min(&unsat, 2, &mut o), Err(Error::Unsat)));
    }

    #[test]
    fn sum_example() {
        let g = f(2, &[&[1, 2]]);
        let mut o = ExactOracle::new(&g, Flavor::Sum).unwrap();
        let run = sum_disperse(&g, 3, &mut o).unwrap();
        assert_eq!(sum_pd(&run.solutions), 4);
        assert!(run.converged);
    }

    #[test]
    fn weighted_at_least_example() {
        let g = f(3, &[&[1, 2, 3]]);
        let plan = BudgetPlan::new(3, LsVariant::v1(3), 0.5).unwrap();
        let run = disperse_weighted_min(
            &g,
            2,
            WeightConstraint::AtLeast(2),
            &plan,
            &OracleConfig::seeded(2),
        )
        .unwrap();
        let m = dispersion_measures(&run.solutions, None).unwrap();
        assert!(m.min_pd >= 1);
        assert!(run.solutions.members().iter().all(|u| u.weight() >= 1 && g.satisfies(u)));
    }

    #[test]
    fn weighted_vacuous_windows_match_unweighted() {
        let mut rng = stream(8, 0);
        let g = random_kcnf(8, 3, 20, &mut rng);
        let plan = BudgetPlan::new(8, LsVariant::v1(3), 0.5).unwrap();
        let cfg = OracleConfig::seeded(3).with_effort(0.2);
        let base = disperse_weighted_min(&g, 3, WeightConstraint::None, &plan, &cfg).unwrap();
        for w in [WeightConstraint::AtLeast(0), WeightConstraint::AtMost(8)] {
            let run = disperse_weighted_min(&g, 3, w, &plan, &cfg).unwrap();
            assert_eq!(run.solutions.members(), base.solutions.members());
        }
    }

    #[test]
    fn weighted_at_most_respects_window() {
        let g = f(4, &[&[1, 2, 3, 4]]);
        let plan = BudgetPlan::new(4, LsVariant::v1(4), 0.5).unwrap();
        let w = WeightConstraint::AtMost(2);
        let run = disperse_weighted_min(&g, 2, w, &plan, &OracleConfig::seeded(6)).unwrap();
        let (lo, hi) = weighted_window(4, w, 0.5);
        for u in run.solutions.members() {
            assert!(g.satisfies(u));
            assert!((lo..=hi).contains(&u.weight()), "{u}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn farthest_first_observation(seed in any::<u64>(), a in 1usize..6, extra in 1usize..6) {
            let mut rng = stream(seed, 0);
            let mut pts: Vec<Assignment> = Vec::new();
            while pts.len() < a + extra {
                let u = Assignment::uniform(8, &mut rng);
                if !pts.contains(&u) {
                    pts.push(u);
                }
            }
            let b = SolutionCollection::from_members(pts.clone(), true).unwrap();
            let av: Vec<Assignment> = (0..a).map(|_| Assignment::uniform(8, &mut rng)).collect();
            let acoll = SolutionCollection::from_members(av, false).unwrap();
            let min_pd = dispersion_measures(&b, None).unwrap().min_pd;
            let best = pts.iter().map(|u| acoll.min_distance_to(u).unwrap()).max().unwrap();
            prop_assert!(2 * best as u64 >= min_pd);
        }

        #[test]
        fn multiset_triangle_observation(seed in any::<u64>(), a in 1usize..6, bsize in 2usize..7) {
            let mut rng = stream(seed, 1);
            let pool: Vec<Assignment> = (0..4).map(|_| Assignment::uniform(6, &mut rng)).collect();
            let pick = |rng: &mut crate::rng::Rng, c: usize| {
                use rand::Rng as _;
                let v = (0..c).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
                SolutionCollection::from_members(v, false).unwrap()
            };
            let acoll = pick(&mut rng, a);
            let b = pick(&mut rng, bsize);
            let spd = dispersion_measures(&b, None).unwrap().sum_pd as usize;
            let best = b.members().iter().map(|u| acoll.sum_distance_to(u)).max().unwrap();
            // best ≥ |A|/(|B|(|B|-1)) · sumPD(B), cleared of denominators
            prop_assert!(best * bsize * (bsize - 1) >= a * spd);
        }

        #[test]
        fn exact_drivers_meet_bounds(seed in any::<u64>(), n in 3usize..9, s in 2usize..5) {
            let mut rng = stream(seed, 2);
            let g = random_kcnf(n, 3, 2 * n, &mut rng);
            let Ok(opt) = brute_opt(&g, s, DispersionObjective::MinPd, WeightConstraint::None) else {
                return Ok(());
            };
            let mut o = ExactOracle::new(&g, Flavor::Min).unwrap();
            let run = gonzalez_min(&g, s, &mut o).unwrap();
            let got = dispersion_measures(&run.solutions, None).unwrap().min_pd;
            prop_assert!(2 * got >= opt.value);

            let opt = brute_opt(&g, s, DispersionObjective::SumPd, WeightConstraint::None).unwrap();
            let mut o = ExactOracle::new(&g, Flavor::Sum).unwrap();
            let run = sum_disperse(&g, s, &mut o).unwrap();
            prop_assert!(run.converged && run.rounds <= (s * s * n) as u64);
            let got = sum_pd(&run.solutions);
            prop_assert!(got * (s as u64 + 1) >= (s as u64 - 1) * opt.value);
            // no single exact swap improves the final collection
            for i in 0..s {
                let rest = run.solutions.without(i);
                let u = o.farthest(&rest).unwrap().unwrap();
                prop_assert!(rest.sum_distance_to(&u) <= rest.sum_distance_to(&run.solutions.members()[i]));
            }
        }
    }
}
